//! Nonparametric clustering for data whose cluster sizes follow a power law.
//!
//! The centerpiece is [`pyp::fit`], a k-means-style hard clustering whose
//! threshold for opening a new cluster shrinks as `lambda - ln(c) * theta`
//! with the current number of clusters `c`. Around it sit:
//!
//! - [`dataset`]: CSV ingestion and min-max normalization,
//! - [`spectral`]: the kernel / eigenvalue-threshold variant,
//! - [`urn`]: the generative urn scheme behind the threshold,
//! - [`datagen`]: synthetic power-law Gaussian mixtures,
//! - [`metrics`]: ACC, NMI, discovery rate and the power-law exponent.
//!
//! ```
//! use pyp_means::dataset::Dataset;
//! use pyp_means::pyp::{fit, PypParams};
//!
//! let ds = Dataset::from_rows(&[[0.0], [0.2], [10.0]]).unwrap();
//! let run = fit(&ds, &PypParams::pyp(1.0, 0.0)).unwrap();
//! assert_eq!(run.state.c(), 2);
//! assert!((run.objective() - 2.02).abs() < 1e-12);
//! ```
//!
//! A longer guide lives in the `book/` directory of the repository; its code
//! listings are compiled and run as doc-tests of this crate.

pub mod datagen;
pub mod dataset;
pub mod error;
pub mod metrics;
pub mod pyp;
pub mod spectral;
pub mod urn;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book;
