//! The four subcommands. Each returns its CSV bytes and a metadata record;
//! rows follow the config order (steps, then payoff, then method).

use std::time::Instant;

use log::info;
use serde::Serialize;
use serde_json::{json, Value};
use vpoqmc::effdim::smoothed_dimension_report;
use vpoqmc::estimators::{cell_seed, run, vrf_table, EstimatorReport, MethodId};
use vpoqmc::models::Model;
use vpoqmc::payoffs::{PayoffKind, PayoffSpec};

use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Price,
    Vrf,
    Effdim,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Price => "price",
            Self::Vrf => "vrf",
            Self::Effdim => "effdim",
            Self::Sweep => "sweep",
        }
    }

    /// Bumped whenever the CSV header of the command changes.
    pub fn schema(self) -> String {
        format!("vpoqmc-{}-v1", self.name())
    }
}

pub struct Outcome {
    pub csv: Vec<u8>,
    pub meta: Value,
}

#[derive(Serialize)]
pub struct PriceRow {
    pub case: &'static str,
    pub d: usize,
    pub method: &'static str,
    pub estimate: f64,
    pub variance: f64,
    pub std_error: f64,
    pub vrf: Option<f64>,
    pub time_ms: Option<f64>,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
}

#[derive(Serialize)]
pub struct VrfRow {
    pub case: &'static str,
    pub d: usize,
    pub method: &'static str,
    pub estimate: f64,
    pub vrf: f64,
    pub time_ms: Option<f64>,
}

#[derive(Serialize)]
pub struct EffdimRow {
    pub case: &'static str,
    pub d: usize,
    pub method: &'static str,
    #[serde(rename = "R1")]
    pub r1: String,
    #[serde(rename = "R12")]
    pub r12: String,
    #[serde(rename = "Rorder1")]
    pub r_order1: String,
    pub d_t: usize,
    pub d_ms: String,
    /// Number of coordinates the analysed integrand depends on.
    pub inputs: usize,
    pub r1_raw: f64,
    pub r12_raw: f64,
    pub r_order1_raw: f64,
    pub d_ms_raw: f64,
    pub total_variance: f64,
    pub n: usize,
}

#[derive(Serialize)]
pub struct SweepRow {
    pub case: &'static str,
    pub d: usize,
    pub n: usize,
    pub method: &'static str,
    pub estimate: f64,
    pub variance: f64,
    pub time_ms: Option<f64>,
}

fn percent(x: f64) -> String {
    format!("{:.2}", 100.0 * x.clamp(0.0, 1.0))
}

struct Case {
    model: Model,
    payoffs: Vec<PayoffSpec>,
}

fn cases(cfg: &ExperimentConfig) -> Result<Vec<Case>, CliError> {
    let kinds = cfg.payoff_kinds()?;
    cfg.steps
        .iter()
        .map(|&m| {
            let model = cfg.model.spec(m).build()?;
            if let Some(theta) = model.esscher_theta() {
                info!("m = {m}: Esscher theta = {theta}");
            }
            let payoffs = kinds
                .iter()
                .map(|&k| PayoffSpec::for_model(k, cfg.payoff.strike, cfg.payoff.barrier, &model))
                .collect::<vpoqmc::Result<_>>()?;
            Ok(Case { model, payoffs })
        })
        .collect()
}

fn write_csv<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

fn ms(cfg: &ExperimentConfig, seconds: f64) -> Option<f64> {
    cfg.timing.then_some(1e3 * seconds)
}

fn seed_for(cfg: &ExperimentConfig, method: MethodId, kind: PayoffKind) -> u64 {
    cell_seed(cfg.seed, method, kind)
}

pub fn execute(cmd: Command, cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let start = Instant::now();
    let cases = cases(cfg)?;
    let (csv, rows) = match cmd {
        Command::Price => {
            let rows = price(cfg, &cases)?;
            (write_csv(&rows)?, rows.len())
        }
        Command::Vrf => {
            let rows = vrf(cfg, &cases)?;
            (write_csv(&rows)?, rows.len())
        }
        Command::Effdim => {
            let rows = effdim(cfg, &cases)?;
            (write_csv(&rows)?, rows.len())
        }
        Command::Sweep => {
            let rows = sweep(cfg, &cases)?;
            (write_csv(&rows)?, rows.len())
        }
    };
    let first = &cases[0].model;
    let mut meta = json!({
        "command": cmd.name(),
        "schema": cmd.schema(),
        "version": env!("CARGO_PKG_VERSION"),
        "model": first.spec().name(),
        "steps": cfg.steps,
        "seed": cfg.seed,
        "n": cfg.n,
        "reps": cfg.reps,
        "esscher_theta": first.esscher_theta(),
        "rows": rows,
    });
    if cfg.timing {
        meta["elapsed_ms"] = json!(1e3 * start.elapsed().as_secs_f64());
    }
    Ok(Outcome { csv, meta })
}

fn price(cfg: &ExperimentConfig, cases: &[Case]) -> Result<Vec<PriceRow>, CliError> {
    let methods = cfg.methods()?;
    let mut rows = Vec::new();
    for case in cases {
        for pay in &case.payoffs {
            let reports = methods
                .iter()
                .map(|&m| run(m, pay, &case.model, cfg.n, cfg.reps, cfg.seed))
                .collect::<vpoqmc::Result<Vec<_>>>()?;
            let var_mc = reports.iter().find(|r| r.method == MethodId::Mc).map(|r| r.replicate_variance);
            for r in reports {
                rows.push(PriceRow {
                    case: pay.kind.name(),
                    d: case.model.dim(),
                    method: r.method.name(),
                    estimate: r.estimate,
                    variance: r.replicate_variance,
                    std_error: r.std_error(),
                    vrf: var_mc.map(|v| v / r.replicate_variance),
                    time_ms: ms(cfg, r.wall_time),
                    n: r.n,
                    reps: r.reps,
                    seed: seed_for(cfg, r.method, pay.kind),
                });
            }
        }
    }
    Ok(rows)
}

fn vrf(cfg: &ExperimentConfig, cases: &[Case]) -> Result<Vec<VrfRow>, CliError> {
    let methods = cfg.methods()?;
    if !methods.contains(&MethodId::Mc) {
        return Err(CliError::Config("field `methods`: vrf needs MC in the list".into()));
    }
    let mut rows = Vec::new();
    for case in cases {
        let table = vrf_table(&case.payoffs, &case.model, &methods, cfg.n, cfg.reps, cfg.seed)?;
        for (pay, reports) in case.payoffs.iter().zip(table) {
            rows.extend(reports.iter().map(|r: &EstimatorReport| VrfRow {
                case: pay.kind.name(),
                d: case.model.dim(),
                method: r.method.name(),
                estimate: r.estimate,
                vrf: r.vrf.unwrap_or(f64::NAN),
                time_ms: ms(cfg, r.wall_time),
            }));
        }
    }
    Ok(rows)
}

fn effdim(cfg: &ExperimentConfig, cases: &[Case]) -> Result<Vec<EffdimRow>, CliError> {
    let methods = cfg.effdim_methods()?;
    let mut rows = Vec::new();
    for case in cases {
        for pay in &case.payoffs {
            for &m in &methods {
                let seed = seed_for(cfg, m, pay.kind);
                let r = smoothed_dimension_report(m, pay, &case.model, cfg.effdim.n, seed, cfg.effdim.p)?;
                rows.push(EffdimRow {
                    case: pay.kind.name(),
                    d: case.model.dim(),
                    method: m.name(),
                    r1: percent(r.r_first),
                    r12: percent(r.r_first_two),
                    r_order1: percent(r.r_order1),
                    d_t: r.d_t,
                    d_ms: format!("{:.2}", r.d_ms),
                    inputs: r.dim,
                    r1_raw: r.r_first,
                    r12_raw: r.r_first_two,
                    r_order1_raw: r.r_order1,
                    d_ms_raw: r.d_ms,
                    total_variance: r.total_variance,
                    n: r.n,
                });
            }
        }
    }
    Ok(rows)
}

fn sweep(cfg: &ExperimentConfig, cases: &[Case]) -> Result<Vec<SweepRow>, CliError> {
    let methods = cfg.methods()?;
    let mut rows = Vec::new();
    for case in cases {
        for pay in &case.payoffs {
            for &n in &cfg.sweep.n {
                for &m in &methods {
                    let r = run(m, pay, &case.model, n, cfg.reps, cfg.seed)?;
                    rows.push(SweepRow {
                        case: pay.kind.name(),
                        d: case.model.dim(),
                        n,
                        method: m.name(),
                        estimate: r.estimate,
                        variance: r.replicate_variance,
                        time_ms: ms(cfg, r.wall_time),
                    });
                }
            }
        }
    }
    Ok(rows)
}
