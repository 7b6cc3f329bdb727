use crate::error::{invalid, Result};

/// Heston model discretized by a log-Euler scheme on `steps` intervals.
/// Normal coordinates are interleaved: `(z_1^1, z_1^2, z_2^1, ...)`, with
/// `z_i^1` the asset shock and `z_i^2` the variance shock of step `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct HestonSpec {
    pub s0: f64,
    pub v0: f64,
    pub r: f64,
    pub theta_bar: f64,
    pub nu: f64,
    pub sigma_v: f64,
    pub rho: f64,
    pub maturity: f64,
    pub steps: usize,
}

impl HestonSpec {
    pub fn reference(steps: usize, rho: f64) -> Self {
        Self {
            s0: 100.0,
            v0: 0.2,
            r: 0.04,
            theta_bar: 0.2,
            nu: 1.0,
            sigma_v: 0.2,
            rho,
            maturity: 1.0,
            steps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s0 > 0.0) {
            return Err(invalid("s0", "must be positive"));
        }
        if !(self.v0 > 0.0) {
            return Err(invalid("v0", "must be positive"));
        }
        if !(self.rho * self.rho < 1.0) {
            return Err(invalid("rho", format!("needs rho^2 < 1, got {}", self.rho)));
        }
        if !(self.maturity > 0.0) {
            return Err(invalid("maturity", "must be positive"));
        }
        if self.steps == 0 {
            return Err(invalid("steps", "must be at least 1"));
        }
        if !(self.sigma_v >= 0.0 && self.nu.is_finite() && self.theta_bar.is_finite()) {
            return Err(invalid("sigma_v", "must be nonnegative"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        2 * self.steps
    }

    pub fn dt(&self) -> f64 {
        self.maturity / self.steps as f64
    }

    /// Scale `c` of the first asset shock: `S_i = exp(c z_1) zeta_i`.
    pub fn pinned_scale(&self) -> f64 {
        ((1.0 - self.rho * self.rho) * self.v0 * self.dt()).sqrt()
    }

    /// `log S_i` for `i = 1..m`. With `include_first = false` the first
    /// asset shock is treated as zero, giving `log zeta_i`.
    pub(crate) fn log_recursion(&self, z: &[f64], include_first: bool, out: &mut [f64]) {
        debug_assert_eq!(z.len(), self.dim());
        let dt = self.dt();
        let sdt = dt.sqrt();
        let rho_hat = (1.0 - self.rho * self.rho).sqrt();
        let mut log_s = self.s0.ln();
        let mut v = self.v0;
        for (i, o) in out.iter_mut().enumerate().take(self.steps) {
            let z1 = if i == 0 && !include_first { 0.0 } else { z[2 * i] };
            let z2 = z[2 * i + 1];
            let root = v.max(0.0).sqrt() * sdt;
            log_s += (self.r - 0.5 * v) * dt + root * (rho_hat * z1 + self.rho * z2);
            v += (self.theta_bar - v) * self.nu * dt + self.sigma_v * root * z2;
            *o = log_s;
        }
    }

    /// Variance path `V_1..V_m`; reads only the variance shocks.
    pub fn variance_path(&self, z: &[f64]) -> Vec<f64> {
        let dt = self.dt();
        let sdt = dt.sqrt();
        let mut v = self.v0;
        (0..self.steps)
            .map(|i| {
                let root = v.max(0.0).sqrt() * sdt;
                v += (self.theta_bar - v) * self.nu * dt + self.sigma_v * root * z[2 * i + 1];
                v
            })
            .collect()
    }
}
