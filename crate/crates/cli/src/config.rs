//! Experiment configuration, read from TOML. The grammar is documented in
//! `docs/config.md`.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use vpoqmc::estimators::MethodId;
use vpoqmc::models::{BlackScholesSpec, HestonSpec, ModelSpec, NigSpec};
use vpoqmc::payoffs::PayoffKind;

use crate::error::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_reps")]
    pub reps: usize,
    /// Time steps `m`; one table block per entry.
    #[serde(default = "default_steps")]
    pub steps: Vec<usize>,
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    /// Record wall-clock columns. Off makes every output byte-reproducible.
    #[serde(default = "default_true")]
    pub timing: bool,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub payoff: PayoffConfig,
    #[serde(default)]
    pub effdim: EffdimConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

fn default_seed() -> u64 {
    2024
}
fn default_n() -> usize {
    4096
}
fn default_reps() -> usize {
    100
}
fn default_steps() -> Vec<usize> {
    vec![16]
}
fn default_methods() -> Vec<String> {
    MethodId::ALL.iter().map(|m| m.name().to_string()).collect()
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    BlackScholes {
        #[serde(default = "d_s0")]
        s0: f64,
        #[serde(default = "d_r")]
        r: f64,
        #[serde(default = "d_sigma")]
        sigma: f64,
        #[serde(default = "d_one")]
        maturity: f64,
    },
    Nig {
        #[serde(default = "d_s0")]
        s0: f64,
        #[serde(default = "d_alpha")]
        alpha: f64,
        #[serde(default = "d_beta")]
        beta: f64,
        #[serde(default = "d_mu")]
        mu: f64,
        #[serde(default = "d_delta")]
        delta: f64,
        #[serde(default = "d_r")]
        r: f64,
        #[serde(default = "d_one")]
        maturity: f64,
    },
    Heston {
        #[serde(default = "d_s0")]
        s0: f64,
        #[serde(default = "d_var")]
        v0: f64,
        #[serde(default = "d_r")]
        r: f64,
        #[serde(default = "d_var")]
        theta_bar: f64,
        #[serde(default = "d_one")]
        nu: f64,
        #[serde(default = "d_var")]
        sigma_v: f64,
        #[serde(default = "d_rho")]
        rho: f64,
        #[serde(default = "d_one")]
        maturity: f64,
    },
}

fn d_s0() -> f64 {
    100.0
}
fn d_r() -> f64 {
    0.04
}
fn d_sigma() -> f64 {
    0.3
}
fn d_one() -> f64 {
    1.0
}
fn d_var() -> f64 {
    0.2
}
fn d_rho() -> f64 {
    0.5
}
fn d_alpha() -> f64 {
    NigSpec::dax(1).alpha
}
fn d_beta() -> f64 {
    NigSpec::dax(1).beta
}
fn d_mu() -> f64 {
    NigSpec::dax(1).mu
}
fn d_delta() -> f64 {
    NigSpec::dax(1).delta
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self::BlackScholes { s0: d_s0(), r: d_r(), sigma: d_sigma(), maturity: d_one() }
    }
}

impl ModelConfig {
    pub fn spec(&self, steps: usize) -> ModelSpec {
        match *self {
            Self::BlackScholes { s0, r, sigma, maturity } => {
                ModelSpec::BlackScholes(BlackScholesSpec { s0, r, sigma, maturity, steps })
            }
            Self::Nig { s0, alpha, beta, mu, delta, r, maturity } => {
                ModelSpec::Nig(NigSpec { s0, alpha, beta, mu, delta, r, maturity, steps })
            }
            Self::Heston { s0, v0, r, theta_bar, nu, sigma_v, rho, maturity } => {
                ModelSpec::Heston(HestonSpec { s0, v0, r, theta_bar, nu, sigma_v, rho, maturity, steps })
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PayoffConfig {
    #[serde(default = "default_kinds")]
    pub kinds: Vec<String>,
    #[serde(default = "d_s0")]
    pub strike: f64,
    #[serde(default = "default_barrier")]
    pub barrier: f64,
}

fn default_kinds() -> Vec<String> {
    PayoffKind::ALL.iter().map(|k| k.name().to_string()).collect()
}
fn default_barrier() -> f64 {
    90.0
}

impl Default for PayoffConfig {
    fn default() -> Self {
        Self { kinds: default_kinds(), strike: d_s0(), barrier: default_barrier() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffdimConfig {
    #[serde(default = "default_effdim_n")]
    pub n: usize,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_effdim_methods")]
    pub methods: Vec<String>,
}

fn default_effdim_n() -> usize {
    1 << 18
}
fn default_p() -> f64 {
    0.99
}
fn default_effdim_methods() -> Vec<String> {
    vec![MethodId::SqmcI.name().into(), MethodId::SqmcII.name().into()]
}

impl Default for EffdimConfig {
    fn default() -> Self {
        Self { n: default_effdim_n(), p: default_p(), methods: default_effdim_methods() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default = "default_sweep_n")]
    pub n: Vec<usize>,
}

fn default_sweep_n() -> Vec<usize> {
    (10..=18).map(|i| 1 << i).collect()
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { n: default_sweep_n() }
    }
}

fn field(name: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("field `{name}`: {reason}"))
}

fn parse_methods(name: &str, list: &[String]) -> Result<Vec<MethodId>, CliError> {
    if list.is_empty() {
        return Err(field(name, "must list at least one method"));
    }
    let mut out: Vec<MethodId> = Vec::new();
    for s in list {
        let m: MethodId = s.parse().map_err(|e| field(name, e))?;
        if out.contains(&m) {
            return Err(field(name, format!("`{s}` is listed twice")));
        }
        out.push(m);
    }
    Ok(out)
}

fn power_of_two(name: &str, n: usize) -> Result<(), CliError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(field(name, format!("{n} is not a power of two >= 2")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n < 2 {
            return Err(field("n", "needs at least 2 points"));
        }
        if self.reps < 2 {
            return Err(field("reps", format!("{}; the replicate variance needs at least 2", self.reps)));
        }
        if self.steps.is_empty() {
            return Err(field("steps", "must list at least one value"));
        }
        self.methods()?;
        self.payoff_kinds()?;
        self.effdim_methods()?;
        for &m in &self.steps {
            self.model.spec(m).validate().map_err(|e| field("model", e))?;
        }
        if self.payoff.strike.is_nan() || self.payoff.strike <= 0.0 {
            return Err(field("payoff.strike", "must be positive"));
        }
        if self.payoff.barrier.is_nan() || self.payoff.barrier <= 0.0 {
            return Err(field("payoff.barrier", "must be positive"));
        }
        power_of_two("effdim.n", self.effdim.n)?;
        if !(self.effdim.p > 0.0 && self.effdim.p < 1.0) {
            return Err(field("effdim.p", format!("{} is not in (0, 1)", self.effdim.p)));
        }
        if self.sweep.n.is_empty() {
            return Err(field("sweep.n", "must list at least one size"));
        }
        for &n in &self.sweep.n {
            power_of_two("sweep.n", n)?;
        }
        Ok(())
    }

    pub fn methods(&self) -> Result<Vec<MethodId>, CliError> {
        parse_methods("methods", &self.methods)
    }

    pub fn effdim_methods(&self) -> Result<Vec<MethodId>, CliError> {
        let ms = parse_methods("effdim.methods", &self.effdim.methods)?;
        if let Some(m) = ms.iter().find(|m| !m.smoothed()) {
            return Err(field("effdim.methods", format!("{m} has no smoothed integrand; use sQMC-I or sQMC-II")));
        }
        Ok(ms)
    }

    pub fn payoff_kinds(&self) -> Result<Vec<PayoffKind>, CliError> {
        if self.payoff.kinds.is_empty() {
            return Err(field("payoff.kinds", "must list at least one payoff"));
        }
        self.payoff.kinds.iter().map(|s| s.parse().map_err(|e| field("payoff.kinds", e))).collect()
    }
}
