//! Effective-dimension characteristics from pick-freeze estimators.
//!
//! With independent points `a, b` and `y = (a_S, b_{-S})`,
//! `Var(E[h | u_S]) ~ mean(h(a) (h(y) - h(b)))`; total effects use Jansen
//! differences `mean((h(a) - h(a with u_j from b))^2) / 2`.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::quad::composite_rule;
use crate::estimators::{method_transform, MethodId};
use crate::integrand::{FixedFirst, Integrand, Workspace};
use crate::models::Model;
use crate::payoffs::{build_separable, PayoffSpec, Separable};
use crate::smoothing::Smoothed;
use crate::lowdisc::{scrambled_sobol, ScrambleSeed};

/// Variance threshold defining the truncation dimension.
pub const DEFAULT_THRESHOLD: f64 = 0.99;

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionReport {
    pub dim: usize,
    pub n: usize,
    /// `R_{1}`.
    pub r_first: f64,
    /// `R_{1,2}`.
    pub r_first_two: f64,
    /// `R_(1)`, the share of variance in first-order terms.
    pub r_order1: f64,
    pub d_t: usize,
    pub d_ms: f64,
    pub total_variance: f64,
    /// Raw truncation ratios for prefixes of length `1..=d`.
    pub truncation: Vec<f64>,
    /// Raw first-order indices.
    pub first_order: Vec<f64>,
    /// Raw normalized total-effect indices.
    pub total_effect: Vec<f64>,
}

/// Ratios are clamped into `[0, 1]` for display only.
pub fn display_ratio(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

struct Base {
    n: usize,
    d: usize,
    points: Vec<f64>,
    ha: Vec<f64>,
    hb: Vec<f64>,
    var: f64,
}

impl Base {
    fn new<I: Integrand + ?Sized>(h: &I, n: usize, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::SampleSize(format!("n = {n}; needs at least 2")));
        }
        let d = h.dim();
        let ps = scrambled_sobol(n, 2 * d, ScrambleSeed::new(seed, 0))?;
        let points = ps.values().to_vec();
        let mut base = Self { n, d, points, ha: Vec::new(), hb: Vec::new(), var: 0.0 };
        base.ha = base.hybrid(h, |_| false);
        base.hb = base.hybrid(h, |_| true);
        let all = base.ha.iter().chain(&base.hb);
        let mean = all.clone().sum::<f64>() / (2 * n) as f64;
        base.var = all.map(|v| (v - mean).powi(2)).sum::<f64>() / (2 * n) as f64;
        if !(base.var > 0.0 && base.var.is_finite()) {
            return Err(Error::ZeroVariance);
        }
        Ok(base)
    }

    /// `h` at the points taking coordinate `j` from `b` when `from_b(j)`.
    fn hybrid<I: Integrand + ?Sized>(&self, h: &I, from_b: impl Fn(usize) -> bool + Sync) -> Vec<f64> {
        let d = self.d;
        self.points
            .par_chunks_exact(2 * d)
            .map_init(
                || (Workspace::new(), vec![0.0; d]),
                |(ws, y), row| {
                    for (j, v) in y.iter_mut().enumerate() {
                        *v = if from_b(j) { row[d + j] } else { row[j] };
                    }
                    h.eval(y, ws)
                },
            )
            .collect()
    }

    /// `Var(E[h | u_S]) / Var(h)` for the coordinates kept from `a`.
    fn closed_ratio<I: Integrand + ?Sized>(&self, h: &I, keep: impl Fn(usize) -> bool + Sync) -> f64 {
        let hy = self.hybrid(h, |j| !keep(j));
        let cov = self.ha.iter().zip(&hy).zip(&self.hb).map(|((a, y), b)| a * (y - b)).sum::<f64>()
            / self.n as f64;
        cov / self.var
    }

    fn total_effect<I: Integrand + ?Sized>(&self, h: &I, j: usize) -> f64 {
        let hy = self.hybrid(h, |k| k == j);
        let s = self.ha.iter().zip(&hy).map(|(a, y)| (a - y).powi(2)).sum::<f64>();
        s / (2 * self.n) as f64 / self.var
    }
}

fn check_prefix(l: usize, d: usize) -> Result<()> {
    if l == 0 || l > d {
        return Err(Error::InvalidParameter { name: "prefix_len", reason: format!("{l} is not in 1..={d}") });
    }
    Ok(())
}

pub fn truncation_ratio<I: Integrand + ?Sized>(h: &I, prefix_len: usize, n: usize, seed: u64) -> Result<f64> {
    check_prefix(prefix_len, h.dim())?;
    let base = Base::new(h, n, seed)?;
    Ok(base.closed_ratio(h, |j| j < prefix_len))
}

pub fn first_order_ratio<I: Integrand + ?Sized>(h: &I, n: usize, seed: u64) -> Result<f64> {
    let base = Base::new(h, n, seed)?;
    Ok((0..h.dim()).map(|j| base.closed_ratio(h, |k| k == j)).sum())
}

pub fn mean_dimension<I: Integrand + ?Sized>(h: &I, n: usize, seed: u64) -> Result<f64> {
    let base = Base::new(h, n, seed)?;
    Ok((0..h.dim()).map(|j| base.total_effect(h, j)).sum())
}

fn first_reaching(ratios: &[f64], p: f64) -> usize {
    ratios.iter().position(|&r| r >= p).map_or(ratios.len(), |i| i + 1)
}

fn check_threshold(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter { name: "p", reason: format!("{p} is not in (0, 1)") });
    }
    Ok(())
}

pub fn truncation_dimension<I: Integrand + ?Sized>(h: &I, p: f64, n: usize, seed: u64) -> Result<usize> {
    check_threshold(p)?;
    let base = Base::new(h, n, seed)?;
    let d = h.dim();
    let mut ratios: Vec<f64> = (1..d).map(|l| base.closed_ratio(h, |j| j < l)).collect();
    ratios.push(1.0);
    Ok(first_reaching(&ratios, p))
}

/// All characteristics from one shared base sample.
pub fn dimension_report<I: Integrand + ?Sized>(h: &I, n: usize, seed: u64, p: f64) -> Result<DimensionReport> {
    check_threshold(p)?;
    let base = Base::new(h, n, seed)?;
    let d = h.dim();
    let mut truncation: Vec<f64> = (1..d).map(|l| base.closed_ratio(h, |j| j < l)).collect();
    truncation.push(1.0);
    let first_order: Vec<f64> = (0..d).map(|j| base.closed_ratio(h, |k| k == j)).collect();
    let total_effect: Vec<f64> = (0..d).map(|j| base.total_effect(h, j)).collect();
    Ok(DimensionReport {
        dim: d,
        n,
        r_first: truncation[0],
        r_first_two: truncation[1.min(d - 1)],
        r_order1: first_order.iter().sum(),
        d_t: first_reaching(&truncation, p),
        d_ms: total_effect.iter().sum(),
        total_variance: base.var,
        truncation,
        first_order,
        total_effect,
    })
}

/// Report for the smoothed integrand of a cell. When the smooth factor is
/// constant the integrand does not depend on `u_1`, which is then dropped and
/// the report covers the remaining `d - 1` coordinates.
pub fn smoothed_dimension_report(
    method: MethodId,
    payoff: &PayoffSpec,
    model: &Model,
    n: usize,
    seed: u64,
    p: f64,
) -> Result<DimensionReport> {
    if !method.smoothed() {
        return Err(Error::Unsupported(format!("{method} has no smoothed integrand")));
    }
    let transform = method_transform(method, model, payoff.kind)?;
    let problem = build_separable(payoff, model, &transform)?;
    if problem.smooth_factor_is_constant() {
        dimension_report(&FixedFirst::new(Smoothed(&problem), 0.5), n, seed, p)
    } else {
        dimension_report(&Smoothed(&problem), n, seed, p)
    }
}

/// Exact-up-to-quadrature ANOVA quantities for a low-dimensional integrand.
#[derive(Clone, Debug, PartialEq)]
pub struct AnovaReference {
    pub truncation: Vec<f64>,
    pub first_order: Vec<f64>,
    pub d_ms: f64,
    pub total_variance: f64,
}

/// Largest tensor grid `tensor_anova` will evaluate.
pub const MAX_TENSOR_POINTS: usize = 1 << 22;

/// Tensor Gauss–Legendre ANOVA on `[0,1]^d` with panels split at `breaks`.
/// Exact for integrands that are polynomial of degree < 32 per coordinate
/// on every grid cell.
pub fn tensor_anova(h: &dyn Fn(&[f64]) -> f64, d: usize, breaks: &[f64]) -> Result<AnovaReference> {
    let (nodes, weights): (Vec<f64>, Vec<f64>) = composite_rule(breaks).into_iter().unzip();
    let q = nodes.len();
    let total = match q.checked_pow(d as u32) {
        Some(t) if d >= 1 && t <= MAX_TENSOR_POINTS => t,
        _ => return Err(invalid("d", format!("{d}-dimensional grid of {q} nodes per axis is too large"))),
    };
    let mut vals = vec![0.0; total];
    let mut w = vec![0.0; total];
    let mut u = vec![0.0; d];
    for idx in 0..total {
        let mut r = idx;
        let mut wt = 1.0;
        for u_j in u.iter_mut() {
            let k = r % q;
            r /= q;
            *u_j = nodes[k];
            wt *= weights[k];
        }
        vals[idx] = h(&u);
        w[idx] = wt;
    }
    let mean: f64 = vals.iter().zip(&w).map(|(v, w)| v * w).sum();
    let var: f64 = vals.iter().zip(&w).map(|(v, w)| w * (v - mean).powi(2)).sum();
    // Var(E[h | u_S]) for a coordinate mask
    let closed = |mask: &dyn Fn(usize) -> bool| -> f64 {
        let kept = (0..d).filter(|&j| mask(j)).count();
        let mut g = vec![0.0; q.pow(kept as u32)];
        let mut gw = vec![0.0; g.len()];
        for idx in 0..total {
            let mut r = idx;
            let mut key = 0;
            let mut mul = 1;
            let mut kw = 1.0;
            for j in 0..d {
                let k = r % q;
                r /= q;
                if mask(j) {
                    key += k * mul;
                    mul *= q;
                    kw *= weights[k];
                }
            }
            g[key] += w[idx] * vals[idx];
            gw[key] = kw;
        }
        g.iter().zip(&gw).map(|(s, kw)| kw * (s / kw - mean).powi(2)).sum()
    };
    if !(var > 0.0) {
        return Err(Error::ZeroVariance);
    }
    Ok(AnovaReference {
        total_variance: var,
        truncation: (1..=d).map(|l| closed(&|j| j < l) / var).collect(),
        first_order: (0..d).map(|j| closed(&|k| k == j) / var).collect(),
        d_ms: (0..d).map(|j| (var - closed(&|k| k != j)) / var).sum(),
    })
}
