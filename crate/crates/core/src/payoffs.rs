//! The three example payoffs and their separation bounds.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::integrand::Workspace;
use crate::models::{HestonSpec, IncrementLaw, Model};
use crate::pgm::{OrthogonalTransform, WeightTarget};
use crate::special::{norm_cdf, norm_inv};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PayoffKind {
    /// `e^{-rT} 1{S_A > K}`.
    BinaryAsian,
    /// Pathwise delta of the arithmetic Asian call, `e^{-rT} (S_A/S0) 1{S_A > K}`.
    AsianDelta,
    /// `e^{-rT} (S_m - K) prod_j 1{S_j > kappa_j}`.
    DownOutBarrier,
}

impl PayoffKind {
    pub const ALL: [PayoffKind; 3] = [Self::BinaryAsian, Self::AsianDelta, Self::DownOutBarrier];

    pub fn name(self) -> &'static str {
        match self {
            Self::BinaryAsian => "binary-asian",
            Self::AsianDelta => "asian-delta",
            Self::DownOutBarrier => "barrier",
        }
    }

    pub fn weight_target(self) -> WeightTarget {
        match self {
            Self::BinaryAsian | Self::AsianDelta => WeightTarget::Average,
            Self::DownOutBarrier => WeightTarget::Barrier,
        }
    }
}

impl fmt::Display for PayoffKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PayoffKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unsupported(format!("unknown payoff `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PayoffSpec {
    pub kind: PayoffKind,
    pub strike: f64,
    pub barrier: f64,
    pub discount: f64,
    pub s0: f64,
}

impl PayoffSpec {
    pub fn for_model(kind: PayoffKind, strike: f64, barrier: f64, model: &Model) -> Result<Self> {
        let spec = Self { kind, strike, barrier, discount: model.discount(), s0: model.s0() };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strike > 0.0) {
            return Err(invalid("strike", "must be positive"));
        }
        if self.kind == PayoffKind::DownOutBarrier && !(self.barrier > 0.0) {
            return Err(invalid("barrier", "must be positive"));
        }
        if !(self.discount > 0.0 && self.s0 > 0.0) {
            return Err(invalid("discount", "discount and s0 must be positive"));
        }
        Ok(())
    }

    /// Monitoring levels `kappa_1..kappa_m`, the last raised to the strike.
    pub fn levels(&self, m: usize) -> Vec<f64> {
        let mut k = vec![self.barrier; m];
        k[m - 1] = self.barrier.max(self.strike);
        k
    }
}

fn average(path: &[f64]) -> f64 {
    path.iter().sum::<f64>() / path.len() as f64
}

pub fn payoff_value(spec: &PayoffSpec, path: &[f64]) -> f64 {
    match spec.kind {
        PayoffKind::BinaryAsian => {
            if average(path) > spec.strike {
                spec.discount
            } else {
                0.0
            }
        }
        PayoffKind::AsianDelta => {
            let a = average(path);
            if a > spec.strike {
                spec.discount * a / spec.s0
            } else {
                0.0
            }
        }
        PayoffKind::DownOutBarrier => {
            let m = path.len();
            let last = spec.barrier.max(spec.strike);
            let alive = path[..m - 1].iter().all(|&s| s > spec.barrier) && path[m - 1] > last;
            if alive {
                spec.discount * (path[m - 1] - spec.strike)
            } else {
                0.0
            }
        }
    }
}

/// `log sum exp`.
fn log_sum_exp(v: &[f64]) -> f64 {
    let top = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + v.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

fn partial_log_factors(x_tail: &[f64], s0: f64, m: usize) -> Vec<f64> {
    let mut acc = s0.ln();
    let mut out = Vec::with_capacity(m);
    out.push(acc);
    for x in x_tail.iter().take(m - 1) {
        acc += x;
        out.push(acc);
    }
    out
}

/// `gamma_j = phi(log(kappa/S0) - x_2 - ... - x_j)`; `x_tail` holds
/// `x_2..x_j`.
pub fn gamma_component(j: usize, kappa: f64, x_tail: &[f64], law: &IncrementLaw, s0: f64) -> f64 {
    let s: f64 = x_tail.iter().take(j.saturating_sub(1)).sum();
    law.cdf((kappa / s0).ln() - s)
}

/// `gamma = phi(log(kappa m) - log sum_i S0 exp(x_2 + ... + x_i))`.
pub fn gamma_average(kappa: f64, x_tail: &[f64], law: &IncrementLaw, s0: f64, m: usize) -> f64 {
    let logs = partial_log_factors(x_tail, s0, m);
    law.cdf((kappa * m as f64).ln() - log_sum_exp(&logs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Extreme {
    /// All `S_j > kappa_j`.
    MinAbove,
    /// All `S_j < kappa_j`.
    MaxBelow,
}

/// Payout interval `(lower, upper)` for the first uniform coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

fn extreme_bounds(thresholds: impl Iterator<Item = f64>, cdf: impl Fn(f64) -> f64, direction: Extreme) -> Bounds {
    match direction {
        Extreme::MinAbove => {
            let t = thresholds.fold(f64::NEG_INFINITY, f64::max);
            Bounds { lower: cdf(t), upper: 1.0 }
        }
        Extreme::MaxBelow => {
            let t = thresholds.fold(f64::INFINITY, f64::min);
            Bounds { lower: 0.0, upper: cdf(t) }
        }
    }
}

pub fn gamma_extreme(kappas: &[f64], x_tail: &[f64], law: &IncrementLaw, s0: f64, direction: Extreme) -> Bounds {
    let logs = partial_log_factors(x_tail, s0, kappas.len());
    extreme_bounds(kappas.iter().zip(&logs).map(|(k, l)| k.ln() - l), |y| law.cdf(y), direction)
}

/// Lower bound for `S_A > kappa` under Heston, from `u_2..u_d`.
pub fn heston_gamma_average(kappa: f64, u_tail: &[f64], spec: &HestonSpec, transform: &OrthogonalTransform) -> f64 {
    let d = spec.dim();
    let mut z = Vec::with_capacity(d);
    z.push(0.0);
    z.extend(u_tail.iter().map(|&u| norm_inv(u)));
    transform.apply(&mut z);
    let mut logs = vec![0.0; spec.steps];
    spec.log_recursion(&z, false, &mut logs);
    norm_cdf(((kappa * spec.steps as f64).ln() - log_sum_exp(&logs)) / spec.pinned_scale())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// Payout when `Gamma1 < u_1 < Gamma2`.
    Interval,
    /// Payout when `u_1` lies outside `(Gamma1, Gamma2)`.
    Complement,
}

/// An integrand of the form `f(F(u)) 1{Gamma1(u_{2:d}) < u_1 < Gamma2(u_{2:d})}`.
///
/// `bounds` may leave state in the workspace that `smooth_factor` then
/// reuses for the same `u_{2:d}`.
pub trait Separable: Sync {
    fn dim(&self) -> usize;
    fn orientation(&self) -> Orientation {
        Orientation::Interval
    }
    fn bounds(&self, u: &[f64], ws: &mut Workspace) -> Bounds;
    /// `f(F(u1, u_{2:d}))`, called after `bounds` on the same point.
    fn smooth_factor(&self, u1: f64, u: &[f64], ws: &mut Workspace) -> f64;
    /// The original discontinuous integrand.
    fn raw(&self, u: &[f64], ws: &mut Workspace) -> f64;
    /// True when `f` does not depend on `u_1`, so the smoothed integrand
    /// ignores that coordinate.
    fn smooth_factor_is_constant(&self) -> bool {
        false
    }
}

/// Payoff, model and path-generation transform.
#[derive(Clone, Debug)]
pub struct PathProblem {
    payoff: PayoffSpec,
    model: Model,
    transform: OrthogonalTransform,
    log_levels: Vec<f64>,
}

impl PathProblem {
    pub fn new(payoff: PayoffSpec, model: Model, transform: OrthogonalTransform) -> Result<Self> {
        payoff.validate()?;
        if transform.dim() != model.dim() {
            return Err(Error::DimensionMismatch { expected: model.dim(), got: transform.dim() });
        }
        let log_levels = payoff.levels(model.steps()).iter().map(|k| k.ln()).collect();
        Ok(Self { payoff, model, transform, log_levels })
    }

    pub fn payoff(&self) -> &PayoffSpec {
        &self.payoff
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn transform(&self) -> &OrthogonalTransform {
        &self.transform
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    pub fn raw(&self, u: &[f64], ws: &mut Workspace) -> f64 {
        ws.ensure(self.model.dim(), self.model.steps());
        self.model.shocks_from_uniforms(u, &self.transform, &mut ws.z, &mut ws.shocks);
        self.model.log_path(&ws.shocks, &mut ws.logs);
        ws.logs.iter_mut().for_each(|v| *v = v.exp());
        payoff_value(&self.payoff, &ws.logs)
    }
}

/// A [`PathProblem`] whose transform keeps the first coordinate pinned.
#[derive(Clone, Debug)]
pub struct SeparableProblem {
    inner: PathProblem,
}

impl SeparableProblem {
    pub fn problem(&self) -> &PathProblem {
        &self.inner
    }
}

pub fn build_separable(spec: &PayoffSpec, model: &Model, transform: &OrthogonalTransform) -> Result<SeparableProblem> {
    if !transform.pins_first() {
        return Err(Error::Unsupported(
            "smoothing needs a transform that leaves the first coordinate in place".into(),
        ));
    }
    Ok(SeparableProblem { inner: PathProblem::new(spec.clone(), model.clone(), transform.clone())? })
}

impl Separable for SeparableProblem {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn bounds(&self, u: &[f64], ws: &mut Workspace) -> Bounds {
        let p = &self.inner;
        let m = p.model.steps();
        ws.ensure(p.model.dim(), m);
        p.model.shocks_from_uniforms(u, &p.transform, &mut ws.z, &mut ws.shocks);
        p.model.log_factors(&ws.shocks, &mut ws.logs);
        let b = match p.payoff.kind {
            PayoffKind::BinaryAsian | PayoffKind::AsianDelta => {
                let t = (p.payoff.strike * m as f64).ln() - log_sum_exp(&ws.logs);
                Bounds { lower: p.model.pinned_cdf(t), upper: 1.0 }
            }
            PayoffKind::DownOutBarrier => extreme_bounds(
                p.log_levels.iter().zip(&ws.logs).map(|(k, l)| k - l),
                |y| p.model.pinned_cdf(y),
                Extreme::MinAbove,
            ),
        };
        Bounds { lower: b.lower.clamp(0.0, 1.0), upper: b.upper.clamp(0.0, 1.0) }
    }

    fn smooth_factor(&self, u1: f64, _u: &[f64], ws: &mut Workspace) -> f64 {
        let p = &self.inner;
        let pay = &p.payoff;
        match pay.kind {
            PayoffKind::BinaryAsian => pay.discount,
            PayoffKind::AsianDelta => {
                let y = p.model.pinned_shock(u1);
                let m = ws.logs.len() as f64;
                pay.discount * y.exp() * ws.logs.iter().map(|l| l.exp()).sum::<f64>() / (m * pay.s0)
            }
            PayoffKind::DownOutBarrier => {
                let y = p.model.pinned_shock(u1);
                pay.discount * ((y + ws.logs[ws.logs.len() - 1]).exp() - pay.strike)
            }
        }
    }

    fn raw(&self, u: &[f64], ws: &mut Workspace) -> f64 {
        self.inner.raw(u, ws)
    }

    fn smooth_factor_is_constant(&self) -> bool {
        self.inner.payoff.kind == PayoffKind::BinaryAsian
    }
}

/// A separable problem given by closures, mostly for tests.
pub struct FnSeparable<B, F> {
    dim: usize,
    orientation: Orientation,
    bounds: B,
    factor: F,
}

impl<B, F> FnSeparable<B, F>
where
    B: Fn(&[f64]) -> (f64, f64) + Sync,
    F: Fn(f64, &[f64]) -> f64 + Sync,
{
    pub fn new(dim: usize, orientation: Orientation, bounds: B, factor: F) -> Self {
        Self { dim, orientation, bounds, factor }
    }
}

impl<B, F> Separable for FnSeparable<B, F>
where
    B: Fn(&[f64]) -> (f64, f64) + Sync,
    F: Fn(f64, &[f64]) -> f64 + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn orientation(&self) -> Orientation {
        self.orientation
    }

    fn bounds(&self, u: &[f64], _: &mut Workspace) -> Bounds {
        let (lower, upper) = (self.bounds)(u);
        Bounds { lower, upper }
    }

    fn smooth_factor(&self, u1: f64, u: &[f64], _: &mut Workspace) -> f64 {
        (self.factor)(u1, u)
    }

    fn raw(&self, u: &[f64], _: &mut Workspace) -> f64 {
        let (lo, hi) = (self.bounds)(u);
        let inside = lo < u[0] && u[0] < hi;
        let pays = match self.orientation {
            Orientation::Interval => inside,
            Orientation::Complement => !inside,
        };
        if pays {
            (self.factor)(u[0], u)
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lowdisc::{PseudoUniform, ScrambleSeed};
    use crate::models::{bs_increment_law, BlackScholesSpec, ModelSpec};
    use crate::pgm::{mqr_transform, taylor_weight};
    use crate::testutil::{bs, heston, mean_se, nig, payoff, KINDS};
    use proptest::prelude::*;

    fn flat_spec(kind: PayoffKind) -> PayoffSpec {
        PayoffSpec { kind, strike: 100.0, barrier: 90.0, discount: 1.0, s0: 100.0 }
    }

    fn symmetric_law() -> IncrementLaw {
        // r = sigma^2 / 2 gives zero drift
        bs_increment_law(&BlackScholesSpec { r: 0.045, ..BlackScholesSpec::reference(16) }).unwrap()
    }

    #[test]
    fn payoff_examples() {
        assert_eq!(payoff_value(&flat_spec(PayoffKind::BinaryAsian), &[100.0; 4]), 0.0);
        let v = payoff_value(&flat_spec(PayoffKind::AsianDelta), &[105.0, 115.0]);
        assert!((v - 1.1).abs() < 1e-15);
        assert_eq!(payoff_value(&flat_spec(PayoffKind::DownOutBarrier), &[95.0, 89.0, 120.0]), 0.0);
        assert_eq!(payoff_value(&flat_spec(PayoffKind::DownOutBarrier), &[95.0, 91.0, 120.0]), 20.0);
    }

    #[test]
    fn component_and_average_limits() {
        let law = symmetric_law();
        assert!((gamma_component(1, 100.0, &[], &law, 100.0) - 0.5).abs() < 1e-15);
        assert!(gamma_component(3, 1e-300, &[0.1, -0.2], &law, 100.0) < 1e-300);
        assert_eq!(gamma_average(100.0, &[], &law, 100.0, 1), law.cdf(0.0));
        assert!((gamma_average(100.0, &[0.0; 15], &law, 100.0, 16) - 0.5).abs() < 1e-12);
        let b = gamma_extreme(&[100.0], &[], &law, 100.0, Extreme::MinAbove);
        assert_eq!(b.lower, gamma_component(1, 100.0, &[], &law, 100.0));
        let b = gamma_extreme(&[1e-300; 4], &[0.1, 0.2, -0.3], &law, 100.0, Extreme::MinAbove);
        assert!(b.lower < 1e-300 && b.upper == 1.0);
    }

    fn bs_increments(n: usize, m: usize, seed: u64) -> (IncrementLaw, Vec<Vec<f64>>) {
        let law = bs_increment_law(&BlackScholesSpec::reference(m)).unwrap();
        let mut src = PseudoUniform::new(m, ScrambleSeed::new(seed, 0));
        let mut u = vec![0.0; m];
        let xs = (0..n)
            .map(|_| {
                src.next_into(&mut u);
                u.iter().map(|&v| law.inv_cdf(v)).collect()
            })
            .collect();
        (law, xs)
    }

    #[test]
    fn component_bound_is_a_conditional_probability() {
        let (law, xs) = bs_increments(100_000, 4, 1);
        for j in 1..=4 {
            let hits: Vec<f64> = xs
                .iter()
                .map(|x| if 100.0 * x[..j].iter().sum::<f64>().exp() > 95.0 { 1.0 } else { 0.0 })
                .collect();
            let cond: Vec<f64> = xs.iter().map(|x| 1.0 - gamma_component(j, 95.0, &x[1..j], &law, 100.0)).collect();
            let (m1, s1) = mean_se(&hits);
            let (m2, s2) = mean_se(&cond);
            assert!((m1 - m2).abs() < 3.0 * (s1 * s1 + s2 * s2).sqrt(), "j={j}: {m1} vs {m2}");
        }
    }

    #[test]
    fn average_bound_gives_the_binary_probability() {
        let (law, xs) = bs_increments(100_000, 16, 2);
        let p: Vec<f64> = xs.iter().map(|x| 1.0 - gamma_average(100.0, &x[1..], &law, 100.0, 16)).collect();
        let (m, _) = mean_se(&p);
        // discounted price 0.4848 grossed up by e^{0.04}
        assert!((m - 0.4848 * 0.04f64.exp()).abs() < 0.005, "{m}");
    }

    #[test]
    fn degenerate_heston_bound_matches_gaussian_bound() {
        let h = HestonSpec { sigma_v: 0.0, ..HestonSpec::reference(8, 0.5) };
        let t = OrthogonalTransform::identity(16);
        let dt = h.dt();
        let b = (h.v0 * dt).sqrt();
        let a = (h.r - h.v0 / 2.0) * dt;
        let rho_hat = (1.0 - h.rho * h.rho).sqrt();
        let c = h.pinned_scale();
        let pinned = IncrementLaw::gaussian(0.0, c).unwrap();
        let mut src = PseudoUniform::new(15, ScrambleSeed::new(4, 0));
        let mut u = vec![0.0; 15];
        for _ in 0..100 {
            src.next_into(&mut u);
            let z: Vec<f64> = std::iter::once(0.0).chain(u.iter().map(|&v| norm_inv(v))).collect();
            // first step keeps only its variance-shock share; later steps are BS increments
            let s0 = 100.0 * (a + b * h.rho * z[1]).exp();
            let x: Vec<f64> = (1..8).map(|i| a + b * (rho_hat * z[2 * i] + h.rho * z[2 * i + 1])).collect();
            let expect = gamma_average(100.0, &x, &pinned, s0, 8);
            let got = heston_gamma_average(100.0, &u, &h, &t);
            assert!((expect - got).abs() < 1e-10, "{expect} {got}");
        }
    }

    #[test]
    fn heston_bound_at_the_centre_point() {
        let h = HestonSpec::reference(4, 0.0);
        let t = OrthogonalTransform::identity(8);
        let dt: f64 = 0.25;
        // V stays at V0 = theta_bar when all shocks vanish
        let sum: f64 = (1..=4).map(|i| 100.0 * (i as f64 * (0.04 - 0.1) * dt).exp()).sum();
        let expect = norm_cdf(((90.0 * 4.0f64).ln() - sum.ln()) / (0.2 * dt).sqrt());
        let got = heston_gamma_average(90.0, &[0.5; 7], &h, &t);
        assert!((expect - got).abs() < 1e-12);
        assert!(heston_gamma_average(1e-300, &[0.5; 7], &h, &t) < 1e-300);
    }

    fn cells() -> Vec<(&'static str, Model)> {
        vec![("bs", bs(16)), ("nig", nig(16)), ("heston", heston(16, 0.5))]
    }

    fn transforms(model: &Model, kind: PayoffKind) -> Vec<OrthogonalTransform> {
        let w = taylor_weight(model, kind.weight_target()).unwrap();
        vec![OrthogonalTransform::identity(model.dim()), mqr_transform(&w).unwrap()]
    }

    #[test]
    fn raw_and_separable_forms_agree_pointwise() {
        for (name, model) in cells() {
            for kind in KINDS {
                let pay = payoff(kind, &model);
                for t in transforms(&model, kind) {
                    let p = build_separable(&pay, &model, &t).unwrap();
                    let d = p.dim();
                    let mut src = PseudoUniform::new(d, ScrambleSeed::new(21, 0));
                    let mut ws = Workspace::new();
                    let mut u = vec![0.0; d];
                    let mut inside = 0;
                    for _ in 0..10_000 {
                        src.next_into(&mut u);
                        let b = p.bounds(&u, &mut ws);
                        if (u[0] - b.lower).abs() < 1e-12 || (u[0] - b.upper).abs() < 1e-12 {
                            continue;
                        }
                        let pays = b.lower < u[0] && u[0] < b.upper;
                        let sep = if pays { p.smooth_factor(u[0], &u, &mut ws) } else { 0.0 };
                        let raw = p.raw(&u, &mut ws);
                        inside += pays as usize;
                        assert!(
                            (sep - raw).abs() <= 1e-9 * raw.abs().max(1.0),
                            "{name} {kind:?} {:?}: separable {sep} raw {raw}",
                            t.kind()
                        );
                    }
                    assert!(inside > 1000, "{name} {kind:?}: region too small to be a test");
                }
            }
        }
    }

    #[test]
    fn delta_factor_is_continuous_at_the_strike() {
        let model = bs(16);
        let pay = payoff(PayoffKind::AsianDelta, &model);
        let p = build_separable(&pay, &model, &OrthogonalTransform::identity(16)).unwrap();
        let mut ws = Workspace::new();
        let u = vec![0.37; 16];
        let b = p.bounds(&u, &mut ws);
        let f = p.smooth_factor(b.lower, &u, &mut ws);
        assert!((f - pay.discount * 100.0 / 100.0).abs() < 1e-9);
    }

    #[test]
    fn smoothing_rejects_unpinned_transforms() {
        let model = bs(8);
        let w = taylor_weight(&model, WeightTarget::Average).unwrap();
        let q = crate::pgm::qr_transform(&w).unwrap();
        let pay = payoff(PayoffKind::BinaryAsian, &model);
        assert!(matches!(build_separable(&pay, &model, &q), Err(Error::Unsupported(_))));
        assert!(build_separable(&pay, &model, &OrthogonalTransform::identity(7)).is_err());
    }

    fn barrier_problem() -> SeparableProblem {
        let model = ModelSpec::BlackScholes(BlackScholesSpec::reference(8)).build().unwrap();
        let pay = payoff(PayoffKind::DownOutBarrier, &model);
        build_separable(&pay, &model, &OrthogonalTransform::identity(8)).unwrap()
    }

    proptest! {
        #[test]
        fn bounds_stay_in_the_unit_interval(u in prop::collection::vec(1e-9f64..1.0 - 1e-9, 8), k in 0usize..3) {
            let model = bs(8);
            let pay = payoff(KINDS[k], &model);
            let p = build_separable(&pay, &model, &OrthogonalTransform::identity(8)).unwrap();
            let b = p.bounds(&u, &mut Workspace::new());
            prop_assert!((0.0..=1.0).contains(&b.lower) && (0.0..=1.0).contains(&b.upper));
        }

        #[test]
        fn bounds_are_continuous(u in prop::collection::vec(0.01f64..0.99, 8), k in 1usize..8) {
            let p = barrier_problem();
            let mut ws = Workspace::new();
            let g0 = p.bounds(&u, &mut ws).lower;
            let mut last = f64::INFINITY;
            for e in [1e-3, 1e-5, 1e-7, 1e-9] {
                let mut v = u.clone();
                v[k] += e;
                let diff = (p.bounds(&v, &mut ws).lower - g0).abs();
                prop_assert!(diff <= last + 1e-15);
                last = diff;
            }
            prop_assert!(last < 1e-6);
        }

        #[test]
        fn bounds_increase_with_the_level(x in prop::collection::vec(-0.2f64..0.2, 7), k1 in 50.0f64..150.0, dk in 0.0f64..50.0) {
            let law = symmetric_law();
            prop_assert!(gamma_component(5, k1, &x[..4], &law, 100.0) <= gamma_component(5, k1 + dk, &x[..4], &law, 100.0));
            prop_assert!(gamma_average(k1, &x, &law, 100.0, 8) <= gamma_average(k1 + dk, &x, &law, 100.0, 8));
        }
    }
}
