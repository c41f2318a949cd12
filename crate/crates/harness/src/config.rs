//! Experiment configuration files.
//!
//! Configs are TOML documents with a mandatory `config_version = 1` and
//! optional keys for everything else:
//!
//! ```toml
//! config_version = 1
//! m = 200                      # training length
//! n = 100                      # delay spread
//! s = 3                        # non-zero taps
//! k = 50                       # measurement rank
//! snr_db = [0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20]
//! trials = 200
//! seed = 1
//! estimators = ["sliding", "max_energy", "hn_oracle_p", "pea_cs", "mp", "ds"]
//! gamma = 0.24                 # Dantzig selector slack
//! p = 4.6                      # divisor for hn_fixed_p, or "oracle"
//! p_grid = [1, 2, 3, 4, 4.6, 5, 6, 7, 8, 9, 10]
//! n_t = 21                     # thresholds in the PEA-CS bank
//! amplitude_law = "uniform"    # or "gaussian_clipped"
//! initial_estimate = "sliding" # or "max_energy"
//! mp_operand = "full"          # or "compressed"
//! log_base = "e"               # or a number > 1
//! eig_trials = 20              # random matrices per delay spread in the λ fit
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use chanest::signal::AmplitudeLaw;
use serde::Deserialize;
use thiserror::Error;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("invalid `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
}

fn invalid(field: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Sliding,
    MaxEnergy,
    HnOracleP,
    HnFixedP,
    PeaCs,
    Mp,
    Ds,
}

impl EstimatorKind {
    pub fn id(self) -> &'static str {
        match self {
            EstimatorKind::Sliding => "sliding",
            EstimatorKind::MaxEnergy => "max_energy",
            EstimatorKind::HnOracleP => "hn_oracle_p",
            EstimatorKind::HnFixedP => "hn_fixed_p",
            EstimatorKind::PeaCs => "pea_cs",
            EstimatorKind::Mp => "mp",
            EstimatorKind::Ds => "ds",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Threshold divisor for `hn_fixed_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divisor {
    Fixed(f64),
    /// Pick the best divisor from `p_grid` per SNR; `hn_fixed_p` is then
    /// unavailable.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialEstimate {
    /// Sliding correlator on the full received block.
    Sliding,
    /// `Aᵀy` on the compressed measurements.
    MaxEnergy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MpOperand {
    /// Normalized convolution basis and the full received block.
    Full,
    /// Effective matrix and the compressed measurements.
    Compressed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum LawName {
    Uniform,
    GaussianClipped,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum NumberOrName {
    Number(f64),
    Name(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    config_version: Option<u32>,
    m: Option<usize>,
    n: Option<usize>,
    s: Option<usize>,
    k: Option<usize>,
    snr_db: Option<Vec<f64>>,
    trials: Option<usize>,
    seed: Option<u64>,
    estimators: Option<Vec<EstimatorKind>>,
    gamma: Option<f64>,
    p: Option<NumberOrName>,
    p_grid: Option<Vec<f64>>,
    n_t: Option<usize>,
    amplitude_law: Option<LawName>,
    initial_estimate: Option<InitialEstimate>,
    mp_operand: Option<MpOperand>,
    log_base: Option<NumberOrName>,
    eig_trials: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub k: usize,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub estimators: Vec<EstimatorKind>,
    pub gamma: f64,
    pub p: Divisor,
    pub p_grid: Vec<f64>,
    pub n_t: usize,
    pub amplitude_law: AmplitudeLaw,
    pub initial_estimate: InitialEstimate,
    pub mp_operand: MpOperand,
    pub log_base: f64,
    pub eig_trials: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            m: 200,
            n: 100,
            s: 3,
            k: 50,
            snr_db: (0..=10).map(|i| 2.0 * i as f64).collect(),
            trials: 200,
            seed: 1,
            estimators: vec![
                EstimatorKind::Sliding,
                EstimatorKind::MaxEnergy,
                EstimatorKind::HnOracleP,
                EstimatorKind::PeaCs,
                EstimatorKind::Mp,
                EstimatorKind::Ds,
            ],
            gamma: 0.24,
            p: Divisor::Fixed(4.6),
            p_grid: default_p_grid(),
            n_t: 21,
            amplitude_law: AmplitudeLaw::uniform(),
            initial_estimate: InitialEstimate::Sliding,
            mp_operand: MpOperand::Full,
            log_base: std::f64::consts::E,
            eig_trials: 20,
        }
    }
}

/// `{1, 2, …, 10} ∪ {4.6}`, ascending.
pub fn default_p_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=10).map(f64::from).collect();
    grid.insert(4, 4.6);
    grid
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        match raw.config_version {
            None => return Err(invalid("config_version", "missing; expected 1")),
            Some(CONFIG_VERSION) => {}
            Some(v) => return Err(invalid("config_version", format!("unsupported version {v}"))),
        }
        let d = ExperimentConfig::default();
        let p = match raw.p {
            None => d.p,
            Some(NumberOrName::Number(v)) => Divisor::Fixed(v),
            Some(NumberOrName::Name(s)) if s == "oracle" => Divisor::Oracle,
            Some(NumberOrName::Name(s)) => {
                return Err(invalid("p", format!("expected a number or \"oracle\", got {s:?}")))
            }
        };
        let log_base = match raw.log_base {
            None => d.log_base,
            Some(NumberOrName::Number(v)) => v,
            Some(NumberOrName::Name(s)) if s == "e" => std::f64::consts::E,
            Some(NumberOrName::Name(s)) => {
                return Err(invalid("log_base", format!("expected a number or \"e\", got {s:?}")))
            }
        };
        let amplitude_law = match raw.amplitude_law {
            None => d.amplitude_law,
            Some(LawName::Uniform) => AmplitudeLaw::uniform(),
            Some(LawName::GaussianClipped) => AmplitudeLaw::gaussian_clipped(),
        };
        let cfg = ExperimentConfig {
            m: raw.m.unwrap_or(d.m),
            n: raw.n.unwrap_or(d.n),
            s: raw.s.unwrap_or(d.s),
            k: raw.k.unwrap_or(d.k),
            snr_db: raw.snr_db.unwrap_or(d.snr_db),
            trials: raw.trials.unwrap_or(d.trials),
            seed: raw.seed.unwrap_or(d.seed),
            estimators: raw.estimators.unwrap_or(d.estimators),
            gamma: raw.gamma.unwrap_or(d.gamma),
            p,
            p_grid: raw.p_grid.unwrap_or(d.p_grid),
            n_t: raw.n_t.unwrap_or(d.n_t),
            amplitude_law,
            initial_estimate: raw.initial_estimate.unwrap_or(d.initial_estimate),
            mp_operand: raw.mp_operand.unwrap_or(d.mp_operand),
            log_base,
            eig_trials: raw.eig_trials.unwrap_or(d.eig_trials),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.m == 0 {
            return Err(invalid("m", "must be at least 1"));
        }
        if self.n < 2 {
            return Err(invalid("n", "must be at least 2"));
        }
        if self.s == 0 || self.s > self.n {
            return Err(invalid("s", format!("must be in 1..={}", self.n)));
        }
        let l = self.m + self.n - 1;
        if self.k == 0 || self.k > l {
            return Err(invalid("k", format!("must be in 1..={l} (M+N−1)")));
        }
        if self.snr_db.is_empty() {
            return Err(invalid("snr_db", "list is empty"));
        }
        if self.snr_db.iter().any(|v| !v.is_finite()) {
            return Err(invalid("snr_db", "entries must be finite"));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if self.estimators.is_empty() {
            return Err(invalid("estimators", "list is empty"));
        }
        let mut seen = self.estimators.clone();
        seen.sort();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("estimators", "contains duplicates"));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(invalid("gamma", "must be finite and ≥ 0"));
        }
        match self.p {
            Divisor::Fixed(v) if !(v > 0.0) || !v.is_finite() => {
                return Err(invalid("p", "must be positive"))
            }
            Divisor::Oracle if self.estimators.contains(&EstimatorKind::HnFixedP) => {
                return Err(invalid("p", "hn_fixed_p needs a numeric divisor"))
            }
            _ => {}
        }
        validate_p_grid(&self.p_grid)?;
        if self.n_t < 2 {
            return Err(invalid("n_t", "must be at least 2"));
        }
        if !(self.log_base > 1.0) || !self.log_base.is_finite() {
            return Err(invalid("log_base", "must exceed 1"));
        }
        if self.eig_trials == 0 {
            return Err(invalid("eig_trials", "must be at least 1"));
        }
        if self.n / 2 < 2 {
            return Err(invalid("n", "too small for the eigenvalue fit range"));
        }
        Ok(())
    }

    /// Divisor used by `hn_fixed_p`.
    pub fn fixed_divisor(&self) -> Option<f64> {
        match self.p {
            Divisor::Fixed(v) => Some(v),
            Divisor::Oracle => None,
        }
    }
}

pub fn validate_p_grid(grid: &[f64]) -> Result<(), ConfigError> {
    if grid.is_empty() {
        return Err(invalid("p_grid", "list is empty"));
    }
    if grid.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(invalid("p_grid", "entries must be positive"));
    }
    Ok(())
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    ExperimentConfig::from_toml_str(&text)
}
