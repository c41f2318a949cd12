use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chanest::signal::AmplitudeLaw;
use chanest_harness::commands::{
    parse_list, parse_range, run_lambda_fit, run_power_check, write_lambda_fit, write_power_check,
};
use chanest_harness::table::TableError;
use chanest_harness::{emit_csv, load_config, oracle_p_search, run_sweep, ExperimentConfig, SweepError};
use clap::{Parser, Subcommand, ValueEnum};

/// Sparse channel estimation experiments.
#[derive(Debug, Parser)]
#[command(name = "chanest", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Monte Carlo sweep over the configured SNRs and estimators.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Best HN threshold divisor per SNR over a grid.
    OracleP {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated divisors, e.g. `1,2,4.6,10`.
        #[arg(long)]
        p_grid: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Linear fit of the mean top eigenvalue of random projections.
    LambdaFit {
        #[arg(long)]
        m: usize,
        /// Delay spreads as `lo:hi:step`.
        #[arg(long)]
        n_range: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Fixed measurement rank; defaults to N/2 for each N.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Monte Carlo rate of the training power constraint.
    PowerCheck {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Law::GaussianClipped)]
        law: Law,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Law {
    Uniform,
    GaussianClipped,
}

impl From<Law> for AmplitudeLaw {
    fn from(law: Law) -> Self {
        match law {
            Law::Uniform => AmplitudeLaw::uniform(),
            Law::GaussianClipped => AmplitudeLaw::gaussian_clipped(),
        }
    }
}

/// Exit code 1: bad arguments or config. Exit code 2: the run itself failed.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<SweepError> for Failure {
    fn from(e: SweepError) -> Self {
        match e {
            SweepError::Config(c) => Failure::Usage(c.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<TableError> for Failure {
    fn from(e: TableError) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn runtime(e: chanest::Error) -> Failure {
    Failure::Runtime(e.to_string())
}

fn config_with_seed(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, Failure> {
    let mut cfg = load_config(path).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn write_file(path: &Path, write: impl FnOnce(&mut Vec<u8>) -> Result<(), TableError>) -> Result<(), Failure> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    std::fs::write(path, buf).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { config, out, seed } => {
            let cfg = config_with_seed(&config, seed)?;
            let table = run_sweep(&cfg)?;
            emit_csv(&table, &out)?;
        }
        Command::OracleP {
            config,
            p_grid,
            out,
            seed,
        } => {
            let cfg = config_with_seed(&config, seed)?;
            let grid = parse_list(&p_grid).map_err(Failure::Usage)?;
            let result = oracle_p_search(&cfg, &grid)?;
            emit_csv(&result.table(), &out)?;
        }
        Command::LambdaFit {
            m,
            n_range,
            out,
            trials,
            k,
            seed,
        } => {
            let ns = parse_range(&n_range).map_err(Failure::Usage)?;
            if ns.len() < 2 {
                return Err(Failure::Usage("--n-range needs at least two delay spreads".into()));
            }
            if m == 0 || trials == 0 {
                return Err(Failure::Usage("--m and --trials must be positive".into()));
            }
            if let Some(k) = k {
                if k == 0 || ns.iter().any(|&n| k > m + n - 1) {
                    return Err(Failure::Usage(format!("--k {k} must be in 1..=M+N−1 for every N")));
                }
            }
            let fit = run_lambda_fit(m, &ns, k, trials, seed).map_err(runtime)?;
            write_file(&out, |buf| write_lambda_fit(&fit, buf))?;
        }
        Command::PowerCheck {
            m,
            n,
            s,
            trials,
            out,
            seed,
            law,
        } => {
            if m == 0 || n == 0 || trials == 0 || s > n {
                return Err(Failure::Usage(
                    "--m, --n and --trials must be positive and --s at most --n".into(),
                ));
            }
            let summary = run_power_check(m, n, s, trials, law.into(), seed).map_err(runtime)?;
            write_file(&out, |buf| write_power_check(&summary, buf))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
