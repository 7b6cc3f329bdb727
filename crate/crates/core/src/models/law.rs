use std::sync::Arc;

use super::nig::NumericInverse;
use crate::error::{invalid, Result};
use crate::special::{norm_cdf, norm_inv};

/// Distribution of a single log-increment, with its CDF and inverse.
#[derive(Clone, Debug)]
pub enum IncrementLaw {
    Gaussian { mean: f64, sd: f64 },
    Numeric(Arc<NumericInverse>),
}

impl IncrementLaw {
    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0 && sd.is_finite()) {
            return Err(invalid("sd", format!("must be positive and finite, got {sd}")));
        }
        if !mean.is_finite() {
            return Err(invalid("mean", "must be finite"));
        }
        Ok(Self::Gaussian { mean, sd })
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, Self::Gaussian { .. })
    }

    #[inline]
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian { mean, sd } => norm_cdf((x - mean) / sd),
            Self::Numeric(t) => t.cdf(x),
        }
    }

    #[inline]
    pub fn inv_cdf(&self, u: f64) -> f64 {
        match self {
            Self::Gaussian { mean, sd } => mean + sd * norm_inv(u),
            Self::Numeric(t) => t.inv_cdf(u),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian { mean, sd } => crate::special::norm_pdf((x - mean) / sd) / sd,
            Self::Numeric(t) => t.pdf(x),
        }
    }

    /// The increment `phi^-1(Phi(z))` driven by a standard normal coordinate.
    #[inline]
    pub fn from_normal(&self, z: f64) -> f64 {
        match self {
            Self::Gaussian { mean, sd } => mean + sd * z,
            // upper half goes through the survival function so that large z
            // does not round Phi(z) to one
            Self::Numeric(t) if z > 0.0 => t.inv_sf(norm_cdf(-z)),
            Self::Numeric(t) => t.inv_cdf(norm_cdf(z)),
        }
    }
}
