//! Outputs of the `lambda-fit` and `power-check` commands.

use std::io::Write;

use chanest::analysis::{hoeffding_bound, power_montecarlo, PowerCheckReport};
use chanest::measurement::{lambda_fit, mp_edge, EigFit, KRule};
use chanest::signal::AmplitudeLaw;
use chanest::RngStream;

use crate::table::{format_g12, TableError};

/// Parses `lo:hi:step` into the inclusive list `lo, lo+step, …, ≤ hi`.
pub fn parse_range(text: &str) -> Result<Vec<usize>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        return Err(format!("expected lo:hi:step, got {text:?}"));
    };
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("bad integer {s:?} in {text:?}"));
    let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
    if step == 0 || lo > hi {
        return Err(format!("range {text:?} needs lo ≤ hi and step ≥ 1"));
    }
    Ok((lo..=hi).step_by(step).collect())
}

/// Parses a comma-separated list of reals.
pub fn parse_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("bad number {s:?} in {text:?}")))
        .collect()
}

/// Runs the eigenvalue fit. `k = None` uses `K = N/2`.
pub fn run_lambda_fit(
    m: usize,
    n_values: &[usize],
    k: Option<usize>,
    trials: usize,
    seed: u64,
) -> chanest::Result<EigFit> {
    let rule = match k {
        Some(k) => KRule::Fixed(k),
        None => KRule::HalfN,
    };
    lambda_fit(m, n_values, rule, trials, &RngStream::new(seed))
}

/// Columns `record, n, k, value, std_err, mp_edge`. One `point` row per
/// delay spread (`value` = mean top eigenvalue), then `intercept`, `slope`
/// and `residual_norm` rows.
pub fn write_lambda_fit<W: Write>(fit: &EigFit, out: W) -> Result<(), TableError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["record", "n", "k", "value", "std_err", "mp_edge"])?;
    for p in &fit.points {
        w.write_record([
            "point".to_string(),
            p.n.to_string(),
            p.k.to_string(),
            format_g12(p.mean_lambda),
            format_g12(p.std_err),
            format_g12(mp_edge(p.k, fit.m + p.n - 1)),
        ])?;
    }
    for (name, value) in [
        ("intercept", fit.intercept),
        ("slope", fit.slope),
        ("residual_norm", fit.residual_norm),
    ] {
        w.write_record([name, "", "", &format_g12(value), "", ""])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads back the `intercept` and `slope` rows of a lambda-fit CSV.
pub fn read_lambda_fit_line(text: &str) -> Option<(f64, f64)> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let mut intercept = None;
    let mut slope = None;
    for rec in rdr.records() {
        let rec = rec.ok()?;
        match &rec[0] {
            "intercept" => intercept = rec[3].parse().ok(),
            "slope" => slope = rec[3].parse().ok(),
            _ => {}
        }
    }
    Some((intercept?, slope?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSummary {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub report: PowerCheckReport,
    pub hoeffding_per_sample: f64,
    pub hoeffding_aggregate: f64,
}

pub fn run_power_check(
    m: usize,
    n: usize,
    s: usize,
    trials: usize,
    law: AmplitudeLaw,
    seed: u64,
) -> chanest::Result<PowerSummary> {
    let report = power_montecarlo(m, n, s, trials, law, &RngStream::new(seed))?;
    let (per, agg) = if s == 0 {
        (f64::NAN, f64::NAN)
    } else {
        hoeffding_bound(s, m, n)?
    };
    Ok(PowerSummary {
        m,
        n,
        s,
        report,
        hoeffding_per_sample: per,
        hoeffding_aggregate: agg,
    })
}

/// One header line and one data row.
pub fn write_power_check<W: Write>(p: &PowerSummary, out: W) -> Result<(), TableError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([
        "m",
        "n",
        "s",
        "trials",
        "passed",
        "rate",
        "bound",
        "mean_norm_sq",
        "hoeffding_per_sample",
        "hoeffding_aggregate",
    ])?;
    let passed = (p.report.rate * p.report.trials as f64).round() as usize;
    w.write_record([
        p.m.to_string(),
        p.n.to_string(),
        p.s.to_string(),
        p.report.trials.to_string(),
        passed.to_string(),
        format_g12(p.report.rate),
        format_g12(p.report.bound),
        format_g12(p.report.norm_sq),
        format_g12(p.hoeffding_per_sample),
        format_g12(p.hoeffding_aggregate),
    ])?;
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads the `rate` column of a power-check CSV.
pub fn read_power_rate(text: &str) -> Option<f64> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let idx = rdr.headers().ok()?.iter().position(|h| h == "rate")?;
    let rec = rdr.records().next()?.ok()?;
    rec[idx].parse().ok()
}
