//! Sparse channel estimation by compressed sensing.
//!
//! The crate models a known ±1 training block sent through a sparse
//! multipath channel, compresses the received block with a random
//! Rademacher projection, and recovers the channel taps with several
//! estimators:
//!
//! - iterative hard thresholding with a noise-dependent threshold
//!   ([`estimators::hn_recover`]),
//! - a parallel bank of thresholded recoveries driven by a structured
//!   threshold set ([`estimators::pea_cs`]),
//! - classic matching pursuit ([`estimators::matching_pursuit`]),
//! - the Dantzig selector solved as a linear program
//!   ([`estimators::dantzig_selector`]).
//!
//! [`analysis`] provides the Cramér–Rao baselines, the mean-square error
//! metric, and the signal power constraint checks.

pub mod analysis;
pub mod error;
pub mod estimators;
pub mod linops;
pub mod measurement;
pub mod signal;

pub use error::{Error, Result};
pub use linops::{Matrix, RngStream};
