//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! PASS/FAIL line per criterion and exits non-zero if any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use chanest::analysis::{mse, CrbReport};
use chanest::estimators::{
    calibrate_threshold_model, dantzig_selector, dantzig_selector_with_report, hn_recover,
    matching_pursuit, HnConfig,
};
use chanest::linops::{spectral_top, trace_inverse_gram, ColumnSelection};
use chanest::measurement::{effective, gen_measurement, project, EffectiveMatrix, EigFit};
use chanest::signal::{build_convolution, gen_sparse_channel, gen_training, transmit};
use chanest::{Matrix, RngStream};
use chanest_harness::commands::{read_lambda_fit_line, read_power_rate};
use chanest_harness::config::{EstimatorKind, ExperimentConfig};
use chanest_harness::estimators::builtin_estimators;
use chanest_harness::sweep::SweepOutput;
use chanest_harness::trial::{TAG_CHANNEL, TAG_MEASUREMENT, TAG_NOISE, TAG_TRAINING};
use chanest_harness::{generate_trial, oracle_p_search, run_sweep_with, SweepContext};
use common::{dantzig_grid, gauss_jordan_inverse, gaussian_entries, gram, orthonormalize};
use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Outcome of one criterion: pass flag and a one-line summary.
struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict {
            pass,
            detail: detail.into(),
        }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Verdict::new(false, format!("error: {e}"))
    }
}

fn within_rel(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs()
}

fn chanest_cli(args: &[&str], out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_chanest"))
        .args(args)
        .arg("--out")
        .arg(out)
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("chanest {args:?} exited with {status}"))
    }
}

fn scratch() -> tempfile::TempDir {
    tempfile::tempdir().expect("temporary directory")
}

fn time_limited(v: Verdict, elapsed: Duration, limit: Duration) -> Verdict {
    if elapsed > limit {
        Verdict::new(false, format!("{} (over the {:?} limit)", v.detail, limit))
    } else {
        v
    }
}

fn power_rate() -> Verdict {
    let dir = scratch();
    let out = dir.path().join("power.csv");
    let start = Instant::now();
    let run = chanest_cli(
        &["power-check", "--m", "200", "--n", "100", "--s", "3", "--trials", "1000"],
        &out,
    );
    let elapsed = start.elapsed();
    if let Err(e) = run {
        return Verdict::error(e);
    }
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    let Some(rate) = read_power_rate(&text) else {
        return Verdict::error("no rate column");
    };
    let v = Verdict::new((0.80..=0.95).contains(&rate), format!("rate {rate:.3} in [0.80, 0.95]"));
    time_limited(v, elapsed, Duration::from_secs(10))
}

fn eigen_fit() -> Verdict {
    let dir = scratch();
    let out = dir.path().join("fit.csv");
    let start = Instant::now();
    let run = chanest_cli(
        &["lambda-fit", "--m", "200", "--n-range", "50:150:10", "--trials", "20"],
        &out,
    );
    let elapsed = start.elapsed();
    if let Err(e) = run {
        return Verdict::error(e);
    }
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    let Some((intercept, slope)) = read_lambda_fit_line(&text) else {
        return Verdict::error("no intercept/slope rows");
    };
    let ok = within_rel(intercept, 18.81, 0.15) && within_rel(slope, -0.064, 0.35);
    let v = Verdict::new(
        ok,
        format!("intercept {intercept:.4} (18.81 ± 15%), slope {slope:.5} (−0.064 ± 35%)"),
    );
    time_limited(v, elapsed, Duration::from_secs(60))
}

fn threshold_linearization() -> Verdict {
    let fit = EigFit::from_constants(200, 18.81, -0.064, 50, 150);
    match calibrate_threshold_model(200, 100, &fit) {
        Ok(model) => Verdict::new(
            within_rel(model.b, 1.4397, 0.005) && within_rel(model.a, 0.0707, 0.001),
            format!("b {:.5} (1.4397 ± 0.5%), a {:.5} (0.0707 ± 0.1%)", model.b, model.a),
        ),
        Err(e) => Verdict::error(e),
    }
}

fn noiseless_recovery() -> Verdict {
    const TRIALS: usize = 50;
    let cfg = ExperimentConfig {
        m: 200,
        n: 100,
        s: 3,
        k: 50,
        ..ExperimentConfig::default()
    };
    let start = Instant::now();
    let ctx = match SweepContext::new(&cfg) {
        Ok(ctx) => ctx,
        Err(e) => return Verdict::error(e),
    };
    let g = ctx.model.eval(0.0) / 4.6;
    let root = RngStream::new(cfg.seed).fork(4);
    let mut hn_ok = 0;
    let mut mp_ok = 0;
    for t in 0..TRIALS {
        let run = || -> chanest::Result<(f64, f64)> {
            let stream = root.fork(t as u64);
            let c = gen_training(cfg.m, &mut stream.fork(TAG_TRAINING))?;
            let basis = build_convolution(&c, cfg.n, true)?;
            let h = gen_sparse_channel(cfg.n, cfg.s, cfg.amplitude_law, &mut stream.fork(TAG_CHANNEL))?;
            let phi = gen_measurement(cfg.k, basis.signal_len(), &mut stream.fork(TAG_MEASUREMENT))?;
            let r = transmit(&basis, &h, 0.0, &mut stream.fork(TAG_NOISE))?;
            let a = effective(&phi, &basis)?;
            let y = project(&phi, &r)?;
            let lambda = spectral_top(a.matrix())?;
            let hn = hn_recover(&a, &y, g, &HnConfig::new(cfg.m, 0.0, lambda))?;
            let mp = matching_pursuit(basis.matrix(), r.samples(), cfg.s)?;
            Ok((mse(&hn, &h)?, mse(&mp, &h)?))
        };
        match run() {
            Ok((hn, mp)) => {
                hn_ok += usize::from(hn < 1e-6);
                mp_ok += usize::from(mp < 1e-6);
            }
            Err(e) => return Verdict::error(format!("trial {t}: {e}")),
        }
    }
    let need = (0.95 * TRIALS as f64).ceil() as usize;
    let v = Verdict::new(
        hn_ok >= need && mp_ok >= need,
        format!("MSE < 1e-6 in {hn_ok}/{TRIALS} (hn, G = {g:.4}) and {mp_ok}/{TRIALS} (mp), need {need}"),
    );
    time_limited(v, start.elapsed(), Duration::from_secs(30))
}

fn sweep(cfg: &ExperimentConfig) -> Result<SweepOutput, String> {
    cfg.validate().map_err(|e| e.to_string())?;
    let ctx = SweepContext::new(cfg).map_err(|e| e.to_string())?;
    run_sweep_with(cfg, &ctx, &builtin_estimators(cfg)).map_err(|e| e.to_string())
}

fn mean_db(out: &SweepOutput, snr: f64, id: &str) -> f64 {
    out.table().row(snr, id).map_or(f64::NAN, |r| r.mean_mse_db)
}

fn pea_cs_vs_oracle() -> Verdict {
    let cfg = ExperimentConfig {
        snr_db: vec![10.0, 15.0, 20.0],
        trials: 200,
        estimators: vec![EstimatorKind::HnOracleP, EstimatorKind::PeaCs],
        ..ExperimentConfig::default()
    };
    let start = Instant::now();
    let out = match sweep(&cfg) {
        Ok(out) => out,
        Err(e) => return Verdict::error(e),
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for &snr in &cfg.snr_db {
        let gap = mean_db(&out, snr, "pea_cs") - mean_db(&out, snr, "hn_oracle_p");
        ok &= gap.abs() <= 3.0;
        parts.push(format!("{snr} dB: {gap:+.2} dB"));
    }
    let v = Verdict::new(ok, format!("pea_cs − oracle hn: {} (limit ±3 dB)", parts.join(", ")));
    time_limited(v, start.elapsed(), Duration::from_secs(300))
}

fn default_sweep_config() -> ExperimentConfig {
    ExperimentConfig {
        trials: 200,
        estimators: vec![EstimatorKind::HnOracleP, EstimatorKind::PeaCs, EstimatorKind::Mp],
        ..ExperimentConfig::default()
    }
}

fn mse_ordering(out: &SweepOutput) -> Verdict {
    let (mp0, pea0) = (mean_db(out, 0.0, "mp"), mean_db(out, 0.0, "pea_cs"));
    let (mp20, pea20) = (mean_db(out, 20.0, "mp"), mean_db(out, 20.0, "pea_cs"));
    Verdict::new(
        mp0 <= pea0 && pea20 <= mp20,
        format!("0 dB: mp {mp0:.2} vs pea_cs {pea0:.2} dB; 20 dB: pea_cs {pea20:.2} vs mp {mp20:.2} dB"),
    )
}

fn crb_sanity(cfg: &ExperimentConfig, out: &SweepOutput) -> Verdict {
    let ordered = out.records.iter().filter(|r| r.crb_s <= r.crb_u).count();
    let mut worst: f64 = 0.0;
    for snr_index in 0..cfg.snr_db.len() {
        for trial_index in 0..5 {
            let trial = match generate_trial(cfg, snr_index, trial_index) {
                Ok(t) => t,
                Err(e) => return Verdict::error(e),
            };
            let support = trial.h.support();
            let pair = CrbReport::compute(&trial.basis, trial.sigma, support)
                .and_then(|one| Ok((one, CrbReport::compute(&trial.basis, 2.0 * trial.sigma, support)?)));
            let (one, two) = match pair {
                Ok(p) => p,
                Err(e) => return Verdict::error(e),
            };
            worst = worst
                .max((two.crb_u / one.crb_u - 4.0).abs())
                .max((two.crb_s / one.crb_s - 4.0).abs());
        }
    }
    Verdict::new(
        ordered == out.records.len() && worst <= 1e-12,
        format!(
            "crb_s ≤ crb_u on {ordered}/{} trials; max |ratio − 4| = {worst:.1e} when σ doubles",
            out.records.len()
        ),
    )
}

fn dantzig_checks() -> Verdict {
    let cfg = ExperimentConfig::default();
    let gamma = cfg.gamma;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut count = 0;
    for snr_index in (0..cfg.snr_db.len()).step_by(2) {
        for trial_index in 0..3 {
            let result = generate_trial(&cfg, snr_index, trial_index)
                .and_then(|t| Ok((dantzig_selector(&t.a, &t.y, gamma)?, t)));
            let (est, t) = match result {
                Ok(r) => r,
                Err(e) => return Verdict::error(e),
            };
            let a = t.a.matrix().as_dmatrix();
            let grad = a.tr_mul(&(a * &est.h_hat - &t.y));
            worst_excess = worst_excess.max(grad.amax() - gamma);
            count += 1;
        }
    }
    let feasible = worst_excess <= 1e-6;

    let mut rng = RngStream::new(17);
    let mut worst_gap: f64 = 0.0;
    let mut toys = 0;
    for cols in 1..=3 {
        for extra in 0..2 {
            let rows = cols + extra;
            let a: Vec<f64> = (0..rows * cols)
                .map(|i| f64::from(u8::from(i / cols == i % cols)) + 0.3 * rng.uniform(-1.0, 1.0))
                .collect();
            let y: Vec<f64> = (0..rows).map(|_| rng.uniform(-1.5, 1.5)).collect();
            let am = match Matrix::from_row_slice(rows, cols, &a) {
                Ok(m) => EffectiveMatrix::from_matrix(m),
                Err(e) => return Verdict::error(e),
            };
            let est = match dantzig_selector_with_report(&am, &DVector::from_vec(y.clone()), gamma) {
                Ok((est, _)) => est,
                Err(e) => return Verdict::error(e),
            };
            let Some((grid_l1, _)) = dantzig_grid(rows, cols, &a, &y, gamma, 4.0) else {
                return Verdict::error("grid search found no feasible point");
            };
            worst_gap = worst_gap.max((est.h_hat.lp_norm(1) - grid_l1).abs());
            toys += 1;
        }
    }
    Verdict::new(
        feasible && worst_gap < 1e-3,
        format!(
            "max ‖Aᵀ(Aθ−y)‖∞ − γ = {worst_excess:.2e} over {count} sweep trials; \
             max |ℓ1 − grid| = {worst_gap:.1e} over {toys} toys"
        ),
    )
}

fn oracle_p_trend() -> Verdict {
    let cfg = ExperimentConfig {
        snr_db: (0..=10).map(|i| 2.0 * f64::from(i)).collect(),
        trials: 200,
        ..ExperimentConfig::default()
    };
    let result = match oracle_p_search(&cfg, &cfg.p_grid) {
        Ok(r) => r,
        Err(e) => return Verdict::error(e),
    };
    let best = result.best_p();
    let xs: Vec<f64> = best.iter().map(|(s, _)| *s).collect();
    let ps: Vec<f64> = best.iter().map(|(_, p)| *p).collect();
    let fit = match chanest::linops::linear_fit(&xs, &ps) {
        Ok(f) => f,
        Err(e) => return Verdict::error(e),
    };
    let listing: Vec<String> = ps.iter().map(|p| format!("{p}")).collect();
    Verdict::new(
        fit.slope > 0.0,
        format!("best P [{}], slope {:+.4} per dB", listing.join(" "), fit.slope),
    )
}

fn determinism() -> Verdict {
    let dir = scratch();
    let config = dir.path().join("small.toml");
    let text = "config_version = 1\nm = 60\nn = 30\ns = 3\nk = 15\nsnr_db = [0, 10, 20]\n\
                trials = 10\nn_t = 9\neig_trials = 4\n";
    if let Err(e) = std::fs::write(&config, text) {
        return Verdict::error(e);
    }
    let config = config.to_string_lossy().into_owned();
    let commands: [(&str, Vec<&str>); 4] = [
        ("run", vec!["run", "--config", &config, "--seed", "9"]),
        ("oracle-p", vec!["oracle-p", "--config", &config, "--p-grid", "1,2,4.6,8", "--seed", "9"]),
        ("lambda-fit", vec!["lambda-fit", "--m", "60", "--n-range", "20:40:10", "--trials", "5", "--seed", "9"]),
        (
            "power-check",
            vec!["power-check", "--m", "60", "--n", "30", "--s", "3", "--trials", "200", "--seed", "9"],
        ),
    ];
    let mut mismatched = Vec::new();
    for (name, args) in &commands {
        let mut outputs = Vec::new();
        for round in 0..2 {
            let out = dir.path().join(format!("{name}-{round}.csv"));
            if let Err(e) = chanest_cli(args, &out) {
                return Verdict::error(e);
            }
            outputs.push(std::fs::read(&out).unwrap_or_default());
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            mismatched.push(*name);
        }
    }
    Verdict::new(
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!("{} commands byte-identical across two runs", commands.len())
        } else {
            format!("outputs differ for {}", mismatched.join(", "))
        },
    )
}

fn micro_suite() -> Verdict {
    let mut rng = RngStream::new(11);
    let mut worst = [0.0f64; 4];

    for rows in 1..=5 {
        for cols in 1..=5 {
            for _ in 0..8 {
                let entries = gaussian_entries(rows, cols, &mut rng);
                let dense = DMatrix::from_row_slice(rows, cols, &entries);
                let want = SymmetricEigen::new(dense.transpose() * &dense).eigenvalues.max();
                let got = Matrix::from_row_slice(rows, cols, &entries).and_then(|a| spectral_top(&a));
                let err = got.map_or(f64::INFINITY, |g| (g - want).abs() / want.max(1.0));
                worst[0] = worst[0].max(err);
            }
        }
    }

    for m in 1..=16 {
        for n in 1..=16 {
            let Ok(c) = gen_training(m, &mut rng) else {
                return Verdict::error("training generation failed");
            };
            let h: Vec<f64> = (0..n).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let mut direct = vec![0.0; m + n - 1];
            for (i, ci) in c.symbols().iter().enumerate() {
                for (j, hj) in h.iter().enumerate() {
                    direct[i + j] += ci * hj;
                }
            }
            let got = build_convolution(&c, n, false)
                .and_then(|b| b.matrix().mul_vec(&DVector::from_vec(h.clone())));
            let err = got.map_or(f64::INFINITY, |g| {
                g.iter().zip(&direct).map(|(g, d)| (g - d).abs()).fold(0.0, f64::max)
            });
            worst[1] = worst[1].max(err);
        }
    }

    for cols in 1..=4 {
        for rows in cols..=cols + 3 {
            let entries = gaussian_entries(rows, cols, &mut rng);
            let Some(inv) = gauss_jordan_inverse(cols, &gram(rows, cols, &entries)) else {
                continue;
            };
            let want: f64 = (0..cols).map(|i| inv[i * cols + i]).sum();
            let got = Matrix::from_row_slice(rows, cols, &entries)
                .and_then(|a| trace_inverse_gram(&a, ColumnSelection::All));
            let err = got.map_or(f64::INFINITY, |g| (g - want).abs() / want.max(1.0));
            worst[2] = worst[2].max(err);
        }
    }

    let (rows, cols) = (12, 6);
    let q = orthonormalize(rows, cols, &gaussian_entries(rows, cols, &mut rng));
    let Ok(dict) = Matrix::from_row_slice(rows, cols, &q) else {
        return Verdict::error("dictionary construction failed");
    };
    for _ in 0..5 {
        let y = DVector::from_fn(rows, |_, _| rng.gaussian());
        let proj = dict.as_dmatrix().tr_mul(&y);
        let err = matching_pursuit(&dict, &y, cols).map_or(f64::INFINITY, |e| (&e.h_hat - &proj).amax());
        worst[3] = worst[3].max(err);
    }

    Verdict::new(
        worst.iter().all(|w| *w <= 1e-8),
        format!(
            "max error: spectral {:.1e}, convolution {:.1e}, trace {:.1e}, mp {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn main() -> ExitCode {
    let mut failures = 0;
    let mut report = |index: usize, name: &str, run: &mut dyn FnMut() -> Verdict| {
        let start = Instant::now();
        let v = run();
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {index:>2}: {status}  {name}: {} [{:.1} s]",
            v.detail,
            start.elapsed().as_secs_f64()
        );
        failures += usize::from(!v.pass);
    };

    report(1, "power constraint rate", &mut power_rate);
    report(2, "eigenvalue fit", &mut eigen_fit);
    report(3, "threshold linearization", &mut threshold_linearization);
    report(4, "noiseless exact recovery", &mut noiseless_recovery);
    report(5, "pea_cs vs oracle hn", &mut pea_cs_vs_oracle);

    let cfg = default_sweep_config();
    let default_sweep = sweep(&cfg);
    report(6, "mse ordering", &mut || match &default_sweep {
        Ok(out) => mse_ordering(out),
        Err(e) => Verdict::error(e),
    });
    report(7, "crb sanity", &mut || match &default_sweep {
        Ok(out) => crb_sanity(&cfg, out),
        Err(e) => Verdict::error(e),
    });

    report(8, "dantzig feasibility and optimality", &mut dantzig_checks);
    report(9, "oracle divisor trend", &mut oracle_p_trend);
    report(10, "determinism", &mut determinism);
    report(11, "oracle micro-suite", &mut micro_suite);

    if failures == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
