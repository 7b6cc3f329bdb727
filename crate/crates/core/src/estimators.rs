//! The five estimators and variance-reduction factors.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrand::{Integrand, Workspace};
use crate::lowdisc::{PointSource, ScrambleSeed};
use crate::models::Model;
use crate::payoffs::{build_separable, PathProblem, PayoffKind, PayoffSpec};
use crate::pgm::{mqr_transform, qr_transform, taylor_weight, OrthogonalTransform};
use crate::smoothing::Smoothed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MethodId {
    Mc,
    QmcI,
    QmcII,
    SqmcI,
    SqmcII,
}

impl MethodId {
    pub const ALL: [MethodId; 5] = [Self::Mc, Self::QmcI, Self::QmcII, Self::SqmcI, Self::SqmcII];

    pub fn name(self) -> &'static str {
        match self {
            Self::Mc => "MC",
            Self::QmcI => "QMC-I",
            Self::QmcII => "QMC-II",
            Self::SqmcI => "sQMC-I",
            Self::SqmcII => "sQMC-II",
        }
    }

    pub fn sampler(self) -> Sampler {
        if self == Self::Mc {
            Sampler::Pseudo
        } else {
            Sampler::Sobol
        }
    }

    pub fn smoothed(self) -> bool {
        matches!(self, Self::SqmcI | Self::SqmcII)
    }

    fn tag(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unsupported(format!("unknown method `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampler {
    Pseudo,
    Sobol,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorReport {
    pub method: MethodId,
    pub estimate: f64,
    /// Sample variance of the replicate means.
    pub replicate_variance: f64,
    /// Crude-MC replicate variance over this one; filled by [`vrf_table`].
    pub vrf: Option<f64>,
    /// Seconds spent generating points and evaluating the integrand.
    pub wall_time: f64,
    pub n: usize,
    pub reps: usize,
}

impl EstimatorReport {
    pub fn std_error(&self) -> f64 {
        (self.replicate_variance / self.reps as f64).sqrt()
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Stream seed for one (method, payoff) cell.
pub fn cell_seed(seed: u64, method: MethodId, kind: PayoffKind) -> u64 {
    splitmix(splitmix(seed) ^ (method.tag() << 8 | kind as u64))
}

/// Mean of `n` points for each of `reps` independent replicates. The
/// result depends only on the arguments, not on the thread count.
pub fn replicate_means<I: Integrand + ?Sized>(
    integrand: &I,
    sampler: Sampler,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::SampleSize("needs at least one point".into()));
    }
    let d = integrand.dim();
    (0..reps)
        .into_par_iter()
        .map(|r| {
            let s = ScrambleSeed::new(seed, r as u64);
            let mut src = match sampler {
                Sampler::Pseudo => PointSource::pseudo(d, s),
                Sampler::Sobol => PointSource::scrambled_sobol(d, s)?,
            };
            let mut ws = Workspace::new();
            let mut u = vec![0.0; d];
            let mut sum = 0.0;
            for _ in 0..n {
                src.next_into(&mut u);
                sum += integrand.eval(&u, &mut ws);
            }
            Ok(sum / n as f64)
        })
        .collect()
}

/// Mean and sample variance.
pub fn mean_and_variance(v: &[f64]) -> (f64, f64) {
    let k = v.len() as f64;
    let mean = v.iter().sum::<f64>() / k;
    let var = if v.len() > 1 { v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { f64::NAN };
    (mean, var)
}

/// Replicated estimate of an arbitrary integrand.
pub fn estimate<I: Integrand + ?Sized>(
    method: MethodId,
    integrand: &I,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<EstimatorReport> {
    check_sizes(n, reps)?;
    let start = Instant::now();
    let means = replicate_means(integrand, method.sampler(), n, reps, seed)?;
    let wall_time = start.elapsed().as_secs_f64();
    let (estimate, replicate_variance) = mean_and_variance(&means);
    if !estimate.is_finite() {
        return Err(Error::Unsupported(format!("{method} produced a non-finite estimate")));
    }
    Ok(EstimatorReport {
        method,
        estimate,
        replicate_variance,
        vrf: (method == MethodId::Mc).then_some(1.0),
        wall_time,
        n,
        reps,
    })
}

fn check_sizes(n: usize, reps: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::SampleSize(format!("n = {n}; needs at least 2 points")));
    }
    if reps < 2 {
        return Err(Error::SampleSize(format!("reps = {reps}; the replicate variance needs at least 2")));
    }
    Ok(())
}

/// Path-generation transform a method uses for a payoff.
pub fn method_transform(method: MethodId, model: &Model, kind: PayoffKind) -> Result<OrthogonalTransform> {
    match method {
        MethodId::Mc | MethodId::QmcI | MethodId::SqmcI => Ok(OrthogonalTransform::identity(model.dim())),
        MethodId::QmcII => qr_transform(&taylor_weight(model, kind.weight_target())?),
        MethodId::SqmcII => mqr_transform(&taylor_weight(model, kind.weight_target())?),
    }
}

struct RawPath<'a>(&'a PathProblem);

impl Integrand for RawPath<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, u: &[f64], ws: &mut Workspace) -> f64 {
        self.0.raw(u, ws)
    }
}

pub fn run(
    method: MethodId,
    payoff: &PayoffSpec,
    model: &Model,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<EstimatorReport> {
    check_sizes(n, reps)?;
    let transform = method_transform(method, model, payoff.kind)?;
    let seed = cell_seed(seed, method, payoff.kind);
    if method.smoothed() {
        let p = build_separable(payoff, model, &transform)?;
        estimate(method, &Smoothed(&p), n, reps, seed)
    } else {
        let p = PathProblem::new(payoff.clone(), model.clone(), transform)?;
        estimate(method, &RawPath(&p), n, reps, seed)
    }
}

/// One report per (payoff, method), in input order, with VRFs against the
/// MC run of the same payoff.
pub fn vrf_table(
    payoffs: &[PayoffSpec],
    model: &Model,
    methods: &[MethodId],
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<Vec<EstimatorReport>>> {
    if !methods.contains(&MethodId::Mc) {
        return Err(Error::Unsupported("VRF table needs MC in the method list".into()));
    }
    payoffs
        .iter()
        .map(|pay| {
            let mut rows = methods
                .iter()
                .map(|&m| run(m, pay, model, n, reps, seed))
                .collect::<Result<Vec<_>>>()?;
            let var_mc = rows.iter().find(|r| r.method == MethodId::Mc).unwrap().replicate_variance;
            for r in &mut rows {
                r.vrf = Some(var_mc / r.replicate_variance);
            }
            Ok(rows)
        })
        .collect()
}
