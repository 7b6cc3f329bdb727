use rand::Rng;

use crate::models::{BlackScholesSpec, HestonSpec, Model, ModelSpec, NigSpec};
use crate::payoffs::{PayoffKind, PayoffSpec};

/// Box–Muller normals.
pub fn normals(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        out.push(r * t.cos());
        out.push(r * t.sin());
    }
    out.truncate(n);
    out
}

pub fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

pub fn bs(m: usize) -> Model {
    ModelSpec::BlackScholes(BlackScholesSpec::reference(m)).build().unwrap()
}

pub fn nig(m: usize) -> Model {
    ModelSpec::Nig(NigSpec::dax(m)).build().unwrap()
}

pub fn heston(m: usize, rho: f64) -> Model {
    ModelSpec::Heston(HestonSpec::reference(m, rho)).build().unwrap()
}

pub fn payoff(kind: PayoffKind, model: &Model) -> PayoffSpec {
    PayoffSpec::for_model(kind, 100.0, 90.0, model).unwrap()
}

pub const KINDS: [PayoffKind; 3] = [PayoffKind::BinaryAsian, PayoffKind::AsianDelta, PayoffKind::DownOutBarrier];
