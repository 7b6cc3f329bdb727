//! Normal inverse Gaussian increments: density, MGF, Esscher parameter and
//! a tabulated inverse CDF.

use std::f64::consts::PI;
use std::sync::Arc;

use super::law::IncrementLaw;
use crate::error::{invalid, Error, Result};
use crate::quad;
use crate::special::bessel_k1_scaled;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NigParams {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub delta: f64,
}

impl NigParams {
    pub fn new(alpha: f64, beta: f64, mu: f64, delta: f64) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite() && mu.is_finite() && delta.is_finite()) {
            return Err(invalid("nig", "parameters must be finite"));
        }
        if !(delta > 0.0) {
            return Err(invalid("delta", format!("must be positive, got {delta}")));
        }
        if beta.abs() > alpha {
            return Err(invalid("beta", format!("|beta| = {} exceeds alpha = {alpha}", beta.abs())));
        }
        Ok(Self { alpha, beta, mu, delta })
    }

    fn gamma(&self) -> f64 {
        (self.alpha * self.alpha - self.beta * self.beta).sqrt()
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let dx = x - self.mu;
        let s = self.delta.hypot(dx);
        let z = self.alpha * s;
        (self.alpha * self.delta / PI).ln() + self.delta * self.gamma() + self.beta * dx
            + bessel_k1_scaled(z).ln()
            - z
            - s.ln()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn mean(&self) -> f64 {
        self.mu + self.delta * self.beta / self.gamma()
    }

    pub fn variance(&self) -> f64 {
        self.delta * self.alpha * self.alpha / self.gamma().powi(3)
    }

    pub fn ln_mgf(&self, u: f64) -> Result<f64> {
        let b = self.beta + u;
        if b.abs() > self.alpha {
            return Err(Error::MgfDomain { value: b.abs(), alpha: self.alpha });
        }
        Ok(self.delta * self.gamma() - self.delta * (self.alpha * self.alpha - b * b).sqrt()
            + self.mu * u)
    }

    pub fn mgf(&self, u: f64) -> Result<f64> {
        self.ln_mgf(u).map(f64::exp)
    }

    /// Law of the increment over a fraction `dt` of the unit horizon.
    pub fn over(&self, dt: f64) -> Self {
        Self { mu: self.mu * dt, delta: self.delta * dt, ..*self }
    }

    pub fn with_skew_shift(&self, theta: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta + theta, self.mu, self.delta)
    }
}

pub fn nig_density(x: f64, alpha: f64, beta: f64, mu: f64, delta: f64) -> Result<f64> {
    Ok(NigParams::new(alpha, beta, mu, delta)?.pdf(x))
}

pub fn nig_mgf(u: f64, alpha: f64, beta: f64, mu: f64, delta: f64) -> Result<f64> {
    NigParams::new(alpha, beta, mu, delta)?.mgf(u)
}

/// Solves `r = log M(theta + 1) - log M(theta)` by bisection with a secant
/// polish. The left side is strictly increasing in `theta`.
pub fn esscher_theta(alpha: f64, beta: f64, mu: f64, delta: f64, r: f64) -> Result<f64> {
    let p = NigParams::new(alpha, beta, mu, delta)?;
    let lo0 = -alpha - beta;
    let hi0 = alpha - beta - 1.0;
    if !(lo0 < hi0) {
        return Err(Error::NoEsscherRoot);
    }
    let g = |t: f64| -> f64 {
        let a = p.ln_mgf(t + 1.0).unwrap_or(f64::NAN);
        let b = p.ln_mgf(t).unwrap_or(f64::NAN);
        a - b - r
    };
    // clip endpoints into the domain against rounding
    let (mut lo, mut hi) = (lo0, hi0);
    let (mut glo, mut ghi) = (g(lo), g(hi));
    if glo.is_nan() {
        lo = lo0 + 1e-15 * lo0.abs().max(1.0);
        glo = g(lo);
    }
    if ghi.is_nan() {
        hi = hi0 - 1e-15 * hi0.abs().max(1.0);
        ghi = g(hi);
    }
    if !(glo <= 0.0 && ghi >= 0.0) {
        return Err(Error::NoEsscherRoot);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm < 0.0 {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
            ghi = gm;
        }
        if hi - lo < 1e-9 {
            break;
        }
    }
    let mut t = if ghi > glo { lo - glo * (hi - lo) / (ghi - glo) } else { 0.5 * (lo + hi) };
    for _ in 0..8 {
        let gt = g(t);
        if gt.abs() < 1e-14 {
            break;
        }
        let h = 1e-7;
        let slope = (g(t + h) - g(t - h)) / (2.0 * h);
        let next = t - gt / slope;
        if !(next > lo && next < hi) {
            break;
        }
        t = next;
    }
    if !(g(t).abs() <= 1e-10) {
        return Err(Error::NoEsscherRoot);
    }
    Ok(t)
}

/// Exponential-NIG model parameters; `alpha..delta` are annualized.
#[derive(Clone, Debug, PartialEq)]
pub struct NigSpec {
    pub s0: f64,
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    pub delta: f64,
    pub r: f64,
    pub maturity: f64,
    pub steps: usize,
}

impl NigSpec {
    /// DAX daily-return fit, annualized over 360 days.
    pub fn dax(steps: usize) -> Self {
        Self {
            s0: 100.0,
            alpha: 105.96,
            beta: -26.15,
            mu: 360.0 * 0.00348,
            delta: 360.0 * 0.0112,
            r: 0.04,
            maturity: 1.0,
            steps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s0 > 0.0) {
            return Err(invalid("s0", "must be positive"));
        }
        if !(self.maturity > 0.0) {
            return Err(invalid("maturity", "must be positive"));
        }
        if self.steps == 0 {
            return Err(invalid("steps", "must be at least 1"));
        }
        NigParams::new(self.alpha, self.beta, self.mu, self.delta).map(|_| ())
    }

    pub fn theta(&self) -> Result<f64> {
        esscher_theta(self.alpha, self.beta, self.mu, self.delta, self.r)
    }

    /// Risk-neutral law of one step: NIG(alpha, beta + theta, mu dt, delta dt).
    pub fn increment_params(&self) -> Result<NigParams> {
        self.validate()?;
        let theta = self.theta()?;
        let dt = self.maturity / self.steps as f64;
        let p = NigParams::new(self.alpha, self.beta, self.mu, self.delta)?;
        let shifted = p.with_skew_shift(theta)?;
        if (shifted.beta + 1.0).abs() > shifted.alpha {
            return Err(Error::NoEsscherRoot);
        }
        Ok(shifted.over(dt))
    }
}

pub fn nig_inverse_cdf_build(spec: &NigSpec) -> Result<IncrementLaw> {
    let p = spec.increment_params()?;
    Ok(IncrementLaw::Numeric(Arc::new(NumericInverse::build(p)?)))
}

/// Inverse CDF tabulated on adaptively chosen intervals. On each interval
/// `x(u)` is the cubic Hermite interpolant with end slopes `1/f`; the CDF is
/// the exact inverse of that interpolant, so the two are mutually
/// consistent. Beyond the tabulated range both tails are exponential.
#[derive(Clone, Debug)]
pub struct NumericInverse {
    params: NigParams,
    xs: Vec<f64>,
    us: Vec<f64>,
    // dx/du at each knot
    slopes: Vec<f64>,
    lambda_left: f64,
    lambda_right: f64,
    sf_last: f64,
}

const U_TOL: f64 = 1e-11;
const TAIL_MASS: f64 = 1e-13;
const MAX_KNOTS: usize = 200_000;

impl NumericInverse {
    pub fn build(params: NigParams) -> Result<Self> {
        if params.beta.abs() >= params.alpha {
            return Err(Error::InverseCdfBuild("needs |beta| < alpha".into()));
        }
        let pdf = |x: f64| params.pdf(x);
        let mean = params.mean();
        let sd = params.variance().sqrt();
        let anchor_lo = (params.mu - 40.0 * params.delta).min(mean - 80.0 * sd);
        let anchor_hi = (params.mu + 40.0 * params.delta).max(mean + 80.0 * sd);

        // integrate tails window by window so a peak near the end is not missed
        let tail = |from: f64, to: f64| -> f64 {
            let dir = (to - from).signum();
            let mut total = 0.0;
            let mut a = from;
            loop {
                let b = a + dir * sd;
                let past = (b - to) * dir >= 0.0;
                let b = if past { to } else { b };
                let piece = quad::adaptive(&pdf, a.min(b), a.max(b), 1e-22).abs();
                total += piece;
                if past || piece <= 1e-6 * total || piece == 0.0 {
                    break;
                }
                a = b;
            }
            total
        };

        let mut k = 4.0;
        let (x_lo, left_mass) = loop {
            let x = mean - k * sd;
            if x <= anchor_lo {
                return Err(Error::InverseCdfBuild("left tail mass cannot be bracketed".into()));
            }
            let m = tail(x, anchor_lo);
            if m < TAIL_MASS {
                break (x, m);
            }
            k += 0.5;
        };
        let mut k = 4.0;
        let (x_hi, right_mass) = loop {
            let x = mean + k * sd;
            if x >= anchor_hi {
                return Err(Error::InverseCdfBuild("right tail mass cannot be bracketed".into()));
            }
            let m = tail(x, anchor_hi);
            if m < TAIL_MASS {
                break (x, m);
            }
            k += 0.5;
        };

        let mut xs = vec![x_lo];
        let mut us = vec![left_mass];
        let mut fs = vec![pdf(x_lo)];
        let initial = 64;
        let width = (x_hi - x_lo) / initial as f64;
        for i in 0..initial {
            let xb = if i + 1 == initial { x_hi } else { x_lo + width * (i + 1) as f64 };
            refine(&pdf, &mut xs, &mut us, &mut fs, xb, 0)?;
        }
        let u_last = *us.last().unwrap();
        // the right tail is anchored on the independently integrated mass;
        // the tabulated total differs from one by quadrature error only
        let sf_last = right_mass.max(f64::MIN_POSITIVE);
        if (u_last + right_mass - 1.0).abs() > 1e-10 {
            return Err(Error::InverseCdfBuild(format!(
                "total mass {} differs from one",
                u_last + right_mass
            )));
        }
        let n = xs.len();
        let slopes = fs.iter().map(|f| 1.0 / f).collect();
        Ok(Self {
            params,
            lambda_left: fs[0] / us[0],
            lambda_right: fs[n - 1] / sf_last,
            sf_last,
            xs,
            us,
            slopes,
        })
    }

    pub fn params(&self) -> &NigParams {
        &self.params
    }

    pub fn knots(&self) -> usize {
        self.xs.len()
    }

    #[inline]
    fn hermite(&self, k: usize, t: f64) -> f64 {
        let h = self.us[k + 1] - self.us[k];
        hermite(self.xs[k], self.xs[k + 1], h * self.slopes[k], h * self.slopes[k + 1], t)
    }

    pub fn inv_cdf(&self, u: f64) -> f64 {
        let n = self.xs.len();
        if u <= self.us[0] {
            return self.xs[0] + (u / self.us[0]).ln() / self.lambda_left;
        }
        if u >= self.us[n - 1] {
            return self.inv_sf(1.0 - u);
        }
        let k = self.us.partition_point(|&v| v <= u).saturating_sub(1).min(n - 2);
        let t = (u - self.us[k]) / (self.us[k + 1] - self.us[k]);
        self.hermite(k, t)
    }

    /// Inverse of the survival function, accurate for tiny `s`.
    pub fn inv_sf(&self, s: f64) -> f64 {
        let n = self.xs.len();
        if s < self.sf_last {
            return self.xs[n - 1] - (s / self.sf_last).ln() / self.lambda_right;
        }
        self.inv_cdf((1.0 - s).min(self.us[n - 1]))
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.us[0] * (self.lambda_left * (x - self.xs[0])).exp();
        }
        if x >= self.xs[n - 1] {
            return 1.0 - self.sf_last * (-self.lambda_right * (x - self.xs[n - 1])).exp();
        }
        let k = self.xs.partition_point(|&v| v <= x).saturating_sub(1).min(n - 2);
        let t = self.solve_t(k, x);
        self.us[k] + t * (self.us[k + 1] - self.us[k])
    }

    /// Density implied by the interpolant.
    pub fn pdf(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.lambda_left * self.cdf(x);
        }
        if x >= self.xs[n - 1] {
            return self.lambda_right * (1.0 - self.cdf(x));
        }
        let k = self.xs.partition_point(|&v| v <= x).saturating_sub(1).min(n - 2);
        let t = self.solve_t(k, x);
        let h = self.us[k + 1] - self.us[k];
        let dxdt = hermite_derivative(self.xs[k], self.xs[k + 1], h * self.slopes[k], h * self.slopes[k + 1], t);
        h / dxdt
    }

    fn solve_t(&self, k: usize, x: f64) -> f64 {
        let (xa, xb) = (self.xs[k], self.xs[k + 1]);
        let h = self.us[k + 1] - self.us[k];
        let (ma, mb) = (h * self.slopes[k], h * self.slopes[k + 1]);
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut t = ((x - xa) / (xb - xa)).clamp(0.0, 1.0);
        for _ in 0..60 {
            let r = hermite(xa, xb, ma, mb, t) - x;
            if r.abs() <= 4.0 * f64::EPSILON * x.abs().max(xb - xa) {
                break;
            }
            if r > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let d = hermite_derivative(xa, xb, ma, mb, t);
            let next = t - r / d;
            t = if d > 0.0 && next > lo && next < hi { next } else { 0.5 * (lo + hi) };
            if hi - lo < 1e-17 {
                break;
            }
        }
        t
    }
}

#[inline]
fn hermite(xa: f64, xb: f64, ma: f64, mb: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * xa
        + (t3 - 2.0 * t2 + t) * ma
        + (-2.0 * t3 + 3.0 * t2) * xb
        + (t3 - t2) * mb
}

#[inline]
fn hermite_derivative(xa: f64, xb: f64, ma: f64, mb: f64, t: f64) -> f64 {
    let t2 = t * t;
    (6.0 * t2 - 6.0 * t) * xa + (3.0 * t2 - 4.0 * t + 1.0) * ma + (-6.0 * t2 + 6.0 * t) * xb
        + (3.0 * t2 - 2.0 * t) * mb
}

/// Appends the interval ending at `xb`, splitting it until the interpolant
/// is monotone and accurate.
fn refine(
    pdf: &impl Fn(f64) -> f64,
    xs: &mut Vec<f64>,
    us: &mut Vec<f64>,
    fs: &mut Vec<f64>,
    xb: f64,
    depth: u32,
) -> Result<()> {
    let xa = *xs.last().unwrap();
    let ua = *us.last().unwrap();
    let fa = *fs.last().unwrap();
    let fb = pdf(xb);
    let xm = 0.5 * (xa + xb);
    let left = quad::gauss_legendre(pdf, xa, xm);
    let right = quad::gauss_legendre(pdf, xm, xb);
    let whole = quad::gauss_legendre(pdf, xa, xb);
    let mass = left + right;
    let ok = || -> bool {
        if (whole - mass).abs() > 1e-15 || !(mass > 0.0) {
            return false;
        }
        let secant = (xb - xa) / mass;
        let a = 1.0 / fa / secant;
        let b = 1.0 / fb / secant;
        if a * a + b * b > 9.0 {
            return false;
        }
        for t in [0.25, 0.5, 0.75] {
            let x = hermite(xa, xb, mass / fa, mass / fb, t);
            if !(x > xa && x < xb) {
                return false;
            }
            let exact = quad::gauss_legendre(pdf, xa, x);
            if (exact - t * mass).abs() > U_TOL {
                return false;
            }
        }
        true
    };
    if ok() {
        xs.push(xb);
        us.push(ua + mass);
        fs.push(fb);
        return Ok(());
    }
    if depth > 48 || xs.len() > MAX_KNOTS {
        return Err(Error::InverseCdfBuild(format!("refinement did not converge near x = {xa}")));
    }
    refine(pdf, xs, us, fs, xm, depth + 1)?;
    refine(pdf, xs, us, fs, xb, depth + 1)
}
