//! Variable push-out: replace `f 1{G1 < u_1 < G2}` by `(G2 - G1) f` with
//! `u_1` pushed into the payout interval.

use crate::error::{Error, Result};
use crate::integrand::{Integrand, Workspace};
use crate::lowdisc::{clamp_open, PseudoUniform, ScrambleSeed};
use crate::payoffs::{Orientation, Separable};

/// `(u~_1, weight)` with `u~_1 = G1 + (G2 - G1) u_1`.
#[inline]
pub fn vpo_map(u1: f64, g1: f64, g2: f64) -> (f64, f64) {
    if g2 > g1 {
        (clamp_open(g1 + (g2 - g1) * u1), g2 - g1)
    } else {
        (u1, 0.0)
    }
}

pub fn evaluate_smoothed<P: Separable + ?Sized>(problem: &P, u: &[f64], ws: &mut Workspace) -> f64 {
    let b = problem.bounds(u, ws);
    let (ut, w) = vpo_map(u[0], b.lower, b.upper);
    let pushed = if w > 0.0 { w * problem.smooth_factor(ut, u, ws) } else { 0.0 };
    match problem.orientation() {
        Orientation::Interval => pushed,
        Orientation::Complement => problem.smooth_factor(u[0], u, ws) - pushed,
    }
}

/// The smoothed integrand of a separable problem.
pub struct Smoothed<'a, P: ?Sized>(pub &'a P);

impl<P: Separable + ?Sized> Integrand for Smoothed<'_, P> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, u: &[f64], ws: &mut Workspace) -> f64 {
        evaluate_smoothed(self.0, u, ws)
    }
}

/// The original discontinuous integrand of a separable problem.
pub struct Raw<'a, P: ?Sized>(pub &'a P);

impl<P: Separable + ?Sized> Integrand for Raw<'_, P> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn eval(&self, u: &[f64], ws: &mut Workspace) -> f64 {
        self.0.raw(u, ws)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarianceBoundReport {
    pub n: usize,
    pub mean_raw: f64,
    pub mean_smoothed: f64,
    /// Standard error of the paired difference of means.
    pub se_difference: f64,
    pub var_raw: f64,
    pub var_smoothed: f64,
    pub se_var_raw: f64,
    pub se_var_smoothed: f64,
    /// Largest sampled `G2 - G1`.
    pub c_hat: f64,
}

impl VarianceBoundReport {
    pub fn unbiased(&self) -> bool {
        (self.mean_raw - self.mean_smoothed).abs() <= 3.0 * self.se_difference
    }

    /// `Var(smoothed) <= c Var(raw)` within three standard errors.
    pub fn bound_holds(&self) -> bool {
        let slack = 3.0 * (self.se_var_smoothed.powi(2) + (self.c_hat * self.se_var_raw).powi(2)).sqrt();
        self.var_smoothed <= self.c_hat * self.var_raw + slack
    }
}

struct Moments {
    mean: f64,
    var: f64,
    se_var: f64,
}

fn moments(v: &[f64]) -> Moments {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let m2 = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = v.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    Moments { mean, var: m2 * n / (n - 1.0), se_var: ((m4 - m2 * m2).max(0.0) / n).sqrt() }
}

/// Plain Monte Carlo comparison of the raw and smoothed integrands on the
/// same pseudo-random points.
pub fn variance_bound_check<P: Separable + ?Sized>(problem: &P, n: usize, seed: u64) -> Result<VarianceBoundReport> {
    if n < 10_000 {
        return Err(Error::SampleSize(format!("needs at least 10^4 points, got {n}")));
    }
    let d = problem.dim();
    let mut src = PseudoUniform::new(d, ScrambleSeed::new(seed, 0));
    let mut ws = Workspace::new();
    let mut u = vec![0.0; d];
    let (mut raw, mut smooth, mut diff) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut c_hat = 0.0f64;
    for _ in 0..n {
        src.next_into(&mut u);
        let b = problem.bounds(&u, &mut ws);
        c_hat = c_hat.max((b.upper - b.lower).max(0.0));
        let s = evaluate_smoothed(problem, &u, &mut ws);
        let r = problem.raw(&u, &mut ws);
        raw.push(r);
        smooth.push(s);
        diff.push(r - s);
    }
    let (mr, ms, md) = (moments(&raw), moments(&smooth), moments(&diff));
    Ok(VarianceBoundReport {
        n,
        mean_raw: mr.mean,
        mean_smoothed: ms.mean,
        se_difference: (md.var / n as f64).sqrt(),
        var_raw: mr.var,
        var_smoothed: ms.var,
        se_var_raw: mr.se_var,
        se_var_smoothed: ms.se_var,
        c_hat,
    })
}
