//! Seeded generators of semi-artificial tabular data and a framework for
//! judging how close the generated tables are to the originals.
//!
//! Three generators are provided, all built on the same dense-network core:
//!
//! - **VAE**: a variational autoencoder seeded with existing instances;
//!   new rows are decoded from latent vectors resampled around each seed's
//!   posterior mean.
//! - **MCD-VAE**: the VAE's decoder run with Monte Carlo dropout; each seed's
//!   posterior mean is pushed through the dropout-active decoder `t` times.
//! - **MCD-AE**: the same dropout-decoder trick applied to a plain
//!   autoencoder's latent codes.
//!
//! Generated tables are compared with the originals on three axes:
//! per-attribute statistics (Δmean/Δstd on `[0,1]`-normalized columns),
//! structure (k-medoids clusterings cross-assigned between the two tables and
//! scored with the adjusted Rand index), and predictive behaviour (random
//! forest accuracy transfer, Δacc = m2d1 − m1d1). A timing harness measures
//! generation speed.
//!
//! Everything stochastic takes an explicit seed, and identical seeds produce
//! bitwise-identical results on a given platform.
//!
//! See the `synthgen-cli` crate for the command-line pipeline.

pub mod bench;
pub mod data;
pub mod error;
pub mod eval;
pub mod generate;
pub mod models;
pub mod nn;
pub mod seed;

pub use error::{Error, Result};
