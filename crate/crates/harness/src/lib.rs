//! Seeded Monte Carlo experiments for the sparse channel estimators.
//!
//! [`sweep::run_sweep`] draws a fresh training block, channel, projection
//! and noise for every `(snr, trial)` pair, runs each configured estimator
//! on the same data, and averages squared errors and Cramér–Rao bounds per
//! SNR. [`table`] renders the result as CSV.

pub mod commands;
pub mod config;
pub mod estimators;
pub mod sweep;
pub mod table;
pub mod trial;

pub use config::{load_config, ConfigError, EstimatorKind, ExperimentConfig};
pub use estimators::{Outcome, TrialEstimator};
pub use sweep::{oracle_p_search, run_sweep, run_sweep_with, SweepError};
pub use table::{emit_csv, parse_csv, ResultRow, ResultTable};
pub use trial::{generate_trial, SweepContext, TrialData};
