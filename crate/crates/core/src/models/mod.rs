//! Asset-price path construction.
//!
//! Every model factors as `S_i = exp(y_1) * zeta_i(rest)` where `y_1` is a
//! one-dimensional "pinned" shock driven by the first uniform coordinate.
//! The model-specific work happens on a vector of *shocks*: log-increments
//! for exponential-Lévy models, transformed normals for Heston.

mod heston;
mod law;
mod nig;

pub use heston::HestonSpec;
pub use law::IncrementLaw;
pub use nig::{esscher_theta, nig_density, nig_inverse_cdf_build, nig_mgf, NigParams, NigSpec, NumericInverse};

use crate::error::{invalid, Error, Result};
use crate::pgm::OrthogonalTransform;
use crate::special::{norm_cdf, norm_inv};

#[derive(Clone, Debug, PartialEq)]
pub struct BlackScholesSpec {
    pub s0: f64,
    pub r: f64,
    pub sigma: f64,
    pub maturity: f64,
    pub steps: usize,
}

impl BlackScholesSpec {
    pub fn reference(steps: usize) -> Self {
        Self { s0: 100.0, r: 0.04, sigma: 0.3, maturity: 1.0, steps }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s0 > 0.0) {
            return Err(invalid("s0", "must be positive"));
        }
        if !(self.sigma > 0.0) {
            return Err(invalid("sigma", "must be positive"));
        }
        if !(self.maturity > 0.0) {
            return Err(invalid("maturity", "must be positive"));
        }
        if self.steps == 0 {
            return Err(invalid("steps", "must be at least 1"));
        }
        Ok(())
    }

    /// Per-step drift `a` and standard deviation `b`.
    pub fn drift_and_scale(&self) -> (f64, f64) {
        let dt = self.maturity / self.steps as f64;
        ((self.r - 0.5 * self.sigma * self.sigma) * dt, self.sigma * dt.sqrt())
    }
}

pub fn bs_increment_law(spec: &BlackScholesSpec) -> Result<IncrementLaw> {
    spec.validate()?;
    let (a, b) = spec.drift_and_scale();
    IncrementLaw::gaussian(a, b)
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    BlackScholes(BlackScholesSpec),
    Nig(NigSpec),
    Heston(HestonSpec),
}

impl ModelSpec {
    pub fn build(&self) -> Result<Model> {
        let kind = match self {
            Self::BlackScholes(s) => Kind::ExpLevy { s0: s.s0, law: bs_increment_law(s)? },
            Self::Nig(s) => Kind::ExpLevy { s0: s.s0, law: nig_inverse_cdf_build(s)? },
            Self::Heston(s) => {
                s.validate()?;
                Kind::Heston(s.clone())
            }
        };
        let theta = match self {
            Self::Nig(s) => Some(s.theta()?),
            _ => None,
        };
        Ok(Model { spec: self.clone(), kind, theta })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::BlackScholes(s) => s.validate(),
            Self::Nig(s) => s.validate(),
            Self::Heston(s) => s.validate(),
        }
    }

    pub fn steps(&self) -> usize {
        match self {
            Self::BlackScholes(s) => s.steps,
            Self::Nig(s) => s.steps,
            Self::Heston(s) => s.steps,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::BlackScholes(_) => "black-scholes",
            Self::Nig(_) => "nig",
            Self::Heston(_) => "heston",
        }
    }
}

#[derive(Clone, Debug)]
enum Kind {
    ExpLevy { s0: f64, law: IncrementLaw },
    Heston(HestonSpec),
}

/// A model ready for path generation; the NIG inverse CDF is built once at
/// construction and shared by clones.
#[derive(Clone, Debug)]
pub struct Model {
    spec: ModelSpec,
    kind: Kind,
    theta: Option<f64>,
}

impl Model {
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// Esscher parameter of an NIG model.
    pub fn esscher_theta(&self) -> Option<f64> {
        self.theta
    }

    pub fn law(&self) -> Option<&IncrementLaw> {
        match &self.kind {
            Kind::ExpLevy { law, .. } => Some(law),
            Kind::Heston(_) => None,
        }
    }

    pub fn steps(&self) -> usize {
        self.spec.steps()
    }

    /// Nominal integration dimension.
    pub fn dim(&self) -> usize {
        match &self.kind {
            Kind::ExpLevy { .. } => self.steps(),
            Kind::Heston(h) => h.dim(),
        }
    }

    pub fn s0(&self) -> f64 {
        match &self.spec {
            ModelSpec::BlackScholes(s) => s.s0,
            ModelSpec::Nig(s) => s.s0,
            ModelSpec::Heston(s) => s.s0,
        }
    }

    pub fn rate(&self) -> f64 {
        match &self.spec {
            ModelSpec::BlackScholes(s) => s.r,
            ModelSpec::Nig(s) => s.r,
            ModelSpec::Heston(s) => s.r,
        }
    }

    pub fn maturity(&self) -> f64 {
        match &self.spec {
            ModelSpec::BlackScholes(s) => s.maturity,
            ModelSpec::Nig(s) => s.maturity,
            ModelSpec::Heston(s) => s.maturity,
        }
    }

    pub fn discount(&self) -> f64 {
        (-self.rate() * self.maturity()).exp()
    }

    /// Shocks from uniforms: `u -> z = Phi^-1(u) -> U z -> shocks`.
    /// `z` is scratch of length `dim`.
    pub fn shocks_from_uniforms(
        &self,
        u: &[f64],
        transform: &OrthogonalTransform,
        z: &mut [f64],
        shocks: &mut [f64],
    ) {
        debug_assert_eq!(u.len(), self.dim());
        if transform.is_identity() {
            match &self.kind {
                Kind::ExpLevy { law, .. } => {
                    for (s, &v) in shocks.iter_mut().zip(u) {
                        *s = law.inv_cdf(v);
                    }
                }
                Kind::Heston(_) => {
                    for (s, &v) in shocks.iter_mut().zip(u) {
                        *s = norm_inv(v);
                    }
                }
            }
            return;
        }
        for (t, &v) in z.iter_mut().zip(u) {
            *t = norm_inv(v);
        }
        transform.apply(z);
        self.shocks_from_normals(z, shocks);
        if let (true, Kind::ExpLevy { law, .. }) = (transform.pins_first(), &self.kind) {
            // keep the pinned increment exactly on the uniform chain
            shocks[0] = law.inv_cdf(u[0]);
        }
    }

    /// Shocks from already-transformed standard normal coordinates.
    pub fn shocks_from_normals(&self, z: &[f64], shocks: &mut [f64]) {
        match &self.kind {
            Kind::ExpLevy { law, .. } => {
                for (s, &v) in shocks.iter_mut().zip(z) {
                    *s = law.from_normal(v);
                }
            }
            Kind::Heston(_) => shocks.copy_from_slice(z),
        }
    }

    /// `log S_1..log S_m`.
    pub fn log_path(&self, shocks: &[f64], out: &mut [f64]) {
        match &self.kind {
            Kind::ExpLevy { s0, .. } => {
                let mut acc = s0.ln();
                for (o, x) in out.iter_mut().zip(shocks) {
                    acc += x;
                    *o = acc;
                }
            }
            Kind::Heston(h) => h.log_recursion(shocks, true, out),
        }
    }

    /// `log zeta_1..log zeta_m`, the path with the pinned shock removed.
    pub fn log_factors(&self, shocks: &[f64], out: &mut [f64]) {
        match &self.kind {
            Kind::ExpLevy { s0, .. } => {
                let mut acc = s0.ln();
                for (i, (o, x)) in out.iter_mut().zip(shocks).enumerate() {
                    if i > 0 {
                        acc += x;
                    }
                    *o = acc;
                }
            }
            Kind::Heston(h) => h.log_recursion(shocks, false, out),
        }
    }

    /// Pinned shock `y_1 = psi(u_1)`.
    #[inline]
    pub fn pinned_shock(&self, u1: f64) -> f64 {
        match &self.kind {
            Kind::ExpLevy { law, .. } => law.inv_cdf(u1),
            Kind::Heston(h) => h.pinned_scale() * norm_inv(u1),
        }
    }

    /// CDF of the pinned shock.
    #[inline]
    pub fn pinned_cdf(&self, y: f64) -> f64 {
        match &self.kind {
            Kind::ExpLevy { law, .. } => law.cdf(y),
            Kind::Heston(h) => norm_cdf(y / h.pinned_scale()),
        }
    }

    /// Price path `S_1..S_m` from standard normal coordinates (untransformed).
    pub fn path_from_normals(&self, z: &[f64]) -> Vec<f64> {
        let mut shocks = vec![0.0; self.dim()];
        let mut out = vec![0.0; self.steps()];
        self.shocks_from_normals(z, &mut shocks);
        self.log_path(&shocks, &mut out);
        out.iter_mut().for_each(|v| *v = v.exp());
        out
    }
}

fn check_batch(z: &[f64], d: usize, transform: &OrthogonalTransform) -> Result<()> {
    if transform.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: transform.dim() });
    }
    if d == 0 || !z.len().is_multiple_of(d) {
        return Err(Error::DimensionMismatch { expected: d, got: z.len() });
    }
    Ok(())
}

/// Exponential-Lévy paths from a row-major batch of standard normals:
/// `x_i = phi^-1(Phi((U z)_i))`, `S_i = S0 exp(x_1 + ... + x_i)`.
pub fn paths_exp_levy(
    law: &IncrementLaw,
    s0: f64,
    z: &[f64],
    transform: &OrthogonalTransform,
) -> Result<Vec<Vec<f64>>> {
    let d = transform.dim();
    check_batch(z, d, transform)?;
    let mut w = vec![0.0; d];
    Ok(z.chunks_exact(d)
        .map(|row| {
            w.copy_from_slice(row);
            transform.apply(&mut w);
            let mut acc = s0.ln();
            w.iter()
                .map(|&v| {
                    acc += law.from_normal(v);
                    acc.exp()
                })
                .collect()
        })
        .collect())
}

/// Heston paths from a row-major batch of standard normals of length `2m`.
pub fn paths_heston(spec: &HestonSpec, z: &[f64], transform: &OrthogonalTransform) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let d = spec.dim();
    check_batch(z, d, transform)?;
    let mut w = vec![0.0; d];
    Ok(z.chunks_exact(d)
        .map(|row| {
            w.copy_from_slice(row);
            transform.apply(&mut w);
            let mut out = vec![0.0; spec.steps];
            spec.log_recursion(&w, true, &mut out);
            out.iter_mut().for_each(|v| *v = v.exp());
            out
        })
        .collect())
}
