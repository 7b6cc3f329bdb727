//! Randomized quasi-Monte Carlo pricing with variable push-out smoothing of
//! discontinuous payoffs and QR-based path generation.
//!
//! Pipeline: `lowdisc` points, `models` paths, `pgm` orthogonal transforms,
//! `payoffs` separation bounds, `smoothing`, then `estimators` and `effdim`.

// `!(x > 0.0)` deliberately rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod effdim;
pub mod error;
pub mod estimators;
pub mod integrand;
pub mod linalg;
pub mod lowdisc;
pub mod models;
pub mod payoffs;
pub mod pgm;
pub mod quad;
pub mod smoothing;
pub mod special;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
