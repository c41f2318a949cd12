//! Result tables and their CSV form.
//!
//! Columns, in order: `snr_db, estimator, mean_mse, mean_mse_db, crb_u,
//! crb_s, trials, failures, extra`. Reals are written with 12 significant
//! digits in the style of C's `%.12g`; lines end with LF.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

pub const HEADER: [&str; 9] = [
    "snr_db",
    "estimator",
    "mean_mse",
    "mean_mse_db",
    "crb_u",
    "crb_s",
    "trials",
    "failures",
    "extra",
];

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed table: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub snr_db: f64,
    pub estimator: String,
    /// Mean over successful trials; NaN when every trial failed.
    pub mean_mse: f64,
    /// `10·log₁₀(mean_mse)`.
    pub mean_mse_db: f64,
    pub crb_u: f64,
    pub crb_s: f64,
    pub trials: usize,
    pub failures: usize,
    /// Winning divisor (`p=…`) or a 1-based histogram of chosen threshold
    /// indices (`i:count;…`).
    pub extra: String,
}

/// `10·log₁₀(x)`.
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn row(&self, snr_db: f64, estimator: &str) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.snr_db == snr_db && r.estimator == estimator)
    }
}

/// `%.12g`-style rendering.
pub fn format_g12(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp) as usize;
        trim_fraction(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(table: &ResultTable, out: W) -> Result<(), TableError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in &table.rows {
        w.write_record([
            format_g12(r.snr_db),
            r.estimator.clone(),
            format_g12(r.mean_mse),
            format_g12(r.mean_mse_db),
            format_g12(r.crb_u),
            format_g12(r.crb_s),
            r.trials.to_string(),
            r.failures.to_string(),
            r.extra.clone(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn to_csv_string(table: &ResultTable) -> Result<String, TableError> {
    let mut buf = Vec::new();
    write_csv(table, &mut buf)?;
    String::from_utf8(buf).map_err(|e| TableError::Malformed(e.to_string()))
}

pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<(), TableError> {
    let text = to_csv_string(table)?;
    std::fs::write(path, text).map_err(|source| TableError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_csv<R: Read>(input: R) -> Result<ResultTable, TableError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(TableError::Malformed(format!("unexpected header {header:?}")));
    }
    let real = |s: &str| -> Result<f64, TableError> {
        s.parse::<f64>()
            .map_err(|_| TableError::Malformed(format!("bad number {s:?}")))
    };
    let count = |s: &str| -> Result<usize, TableError> {
        s.parse::<usize>()
            .map_err(|_| TableError::Malformed(format!("bad count {s:?}")))
    };
    let mut rows = Vec::new();
    for record in rdr.records() {
        let rec = record?;
        if rec.len() != HEADER.len() {
            return Err(TableError::Malformed(format!("row has {} fields", rec.len())));
        }
        rows.push(ResultRow {
            snr_db: real(&rec[0])?,
            estimator: rec[1].to_string(),
            mean_mse: real(&rec[2])?,
            mean_mse_db: real(&rec[3])?,
            crb_u: real(&rec[4])?,
            crb_s: real(&rec[5])?,
            trials: count(&rec[6])?,
            failures: count(&rec[7])?,
            extra: rec[8].to_string(),
        });
    }
    Ok(ResultTable { rows })
}
