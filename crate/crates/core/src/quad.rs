//! Gauss–Legendre quadrature, fixed and adaptive.

use std::sync::OnceLock;

const ORDER: usize = 16;

static NODES: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();

fn nodes() -> &'static ([f64; ORDER], [f64; ORDER]) {
    NODES.get_or_init(|| {
        let mut x = [0.0; ORDER];
        let mut w = [0.0; ORDER];
        let n = ORDER as f64;
        for i in 0..ORDER {
            // Newton on P_n starting from the Chebyshev-like guess
            let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(ORDER, t);
                let step = p / dp;
                t -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre(ORDER, t);
            x[i] = t;
            w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
        }
        (x, w)
    })
}

fn legendre(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * t * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, dp)
}

/// 16-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (x, w) = nodes();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    half * x
        .iter()
        .zip(w)
        .map(|(&t, &wt)| wt * f(mid + half * t))
        .sum::<f64>()
}

/// Composite 16-point rule on `[0, 1]` with panel edges at `breaks`, as
/// `(node, weight)` pairs.
pub fn composite_rule(breaks: &[f64]) -> Vec<(f64, f64)> {
    let (x, w) = nodes();
    let mut edges = vec![0.0];
    edges.extend_from_slice(breaks);
    edges.push(1.0);
    edges
        .windows(2)
        .flat_map(|e| {
            let half = 0.5 * (e[1] - e[0]);
            let mid = 0.5 * (e[0] + e[1]);
            x.iter().zip(w).map(move |(&t, &wt)| (mid + half * t, half * wt))
        })
        .collect()
}

/// Adaptive Gauss–Legendre: bisect until one panel agrees with its two
/// halves to `abs_tol`, or to a relative 1e-14 when that is looser.
pub fn adaptive(f: &impl Fn(f64) -> f64, a: f64, b: f64, abs_tol: f64) -> f64 {
    fn recurse(f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = gauss_legendre(f, a, m);
        let right = gauss_legendre(f, m, b);
        let both = left + right;
        if depth == 0 || (both - whole).abs() <= tol.max(1e-14 * both.abs()) {
            return both;
        }
        recurse(f, a, m, left, 0.5 * tol, depth - 1) + recurse(f, m, b, right, 0.5 * tol, depth - 1)
    }
    let whole = gauss_legendre(f, a, b);
    recurse(f, a, b, whole, abs_tol, 30)
}
