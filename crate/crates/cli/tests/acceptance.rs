//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use vpoqmc::effdim::{dimension_report, smoothed_dimension_report, tensor_anova};
use vpoqmc::estimators::{run, vrf_table, EstimatorReport, MethodId};
use vpoqmc::integrand::{FnIntegrand, Workspace};
use vpoqmc::lowdisc::{scrambled_sobol, PointSet, PseudoUniform, ScrambleSeed, Sobol};
use vpoqmc::models::{BlackScholesSpec, HestonSpec, Model, ModelSpec, NigSpec};
use vpoqmc::payoffs::{build_separable, PayoffKind, PayoffSpec, Separable};
use vpoqmc::pgm::{mqr_transform, taylor_weight, OrthogonalTransform};
use vpoqmc::quad::adaptive;
use vpoqmc::smoothing::variance_bound_check;

const SEED: u64 = 2024;
const EX1: PayoffKind = PayoffKind::BinaryAsian;
const EX2: PayoffKind = PayoffKind::AsianDelta;
const EX3: PayoffKind = PayoffKind::DownOutBarrier;

#[derive(Default)]
struct Ledger {
    failed: usize,
}

impl Ledger {
    fn record(&mut self, id: &str, name: &str, checks: Vec<(String, bool)>, started: Instant) {
        let pass = checks.iter().all(|c| c.1);
        if !pass {
            self.failed += 1;
        }
        let detail: Vec<String> = checks
            .iter()
            .map(|(s, ok)| if *ok { s.clone() } else { format!("FAILED {s}") })
            .collect();
        println!(
            "{} criterion {id} {name} ({:.1}s): {}",
            if pass { "PASS" } else { "FAIL" },
            started.elapsed().as_secs_f64(),
            detail.join("; ")
        );
    }
}

fn build(spec: ModelSpec) -> Model {
    spec.build().expect("model")
}

fn payoffs(model: &Model, kinds: &[PayoffKind]) -> Vec<PayoffSpec> {
    kinds.iter().map(|&k| PayoffSpec::for_model(k, 100.0, 90.0, model).expect("payoff")).collect()
}

fn find(rows: &[EstimatorReport], m: MethodId) -> &EstimatorReport {
    rows.iter().find(|r| r.method == m).expect("method present")
}

fn vrf_of(rows: &[EstimatorReport], m: MethodId) -> f64 {
    find(rows, m).vrf.expect("vrf filled")
}

fn at_least(label: &str, v: f64, floor: f64) -> (String, bool) {
    (format!("{label} = {v:.1} >= {floor}"), v >= floor)
}

fn near(label: &str, v: f64, target: f64, tol: f64) -> (String, bool) {
    (format!("{label} = {v:.6} vs {target} ± {tol}"), (v - target).abs() <= tol)
}

fn pairwise_agreement(label: &str, rows: &[EstimatorReport]) -> (String, bool) {
    let mut worst: f64 = 0.0;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            let se = (a.std_error().powi(2) + b.std_error().powi(2)).sqrt();
            worst = worst.max((a.estimate - b.estimate).abs() / se);
        }
    }
    (format!("{label} worst pairwise gap {worst:.2} combined s.e. <= 4"), worst <= 4.0)
}

fn criteria_1_and_2(ledger: &mut Ledger) {
    let t = Instant::now();
    let model = build(ModelSpec::BlackScholes(BlackScholesSpec::reference(16)));
    let pays = payoffs(&model, &[EX1, EX2, EX3]);
    let table = vrf_table(&pays, &model, &MethodId::ALL, 4096, 100, SEED).expect("table");
    let best = |k: usize| find(&table[k], MethodId::SqmcII).estimate;
    let checks = vec![
        near("Ex1 price", best(0), 0.4848, 0.002),
        near("Ex2 price", best(1), 0.5660, 0.002),
        near("Ex3 price", best(2), 10.99, 0.06),
        pairwise_agreement("Ex1", &table[0]),
        pairwise_agreement("Ex2", &table[1]),
        pairwise_agreement("Ex3", &table[2]),
    ];
    ledger.record("1", "BS d=16 price reproduction", checks, t);

    let t = Instant::now();
    let ratio = |k: usize| vrf_of(&table[k], MethodId::SqmcII) / vrf_of(&table[k], MethodId::QmcII);
    let checks = vec![
        at_least("Ex1 VRF(sQMC-II)", vrf_of(&table[0], MethodId::SqmcII), 5000.0),
        at_least("Ex2 VRF(sQMC-II)", vrf_of(&table[1], MethodId::SqmcII), 5000.0),
        at_least("Ex1 VRF(sQMC-II)/VRF(QMC-II)", ratio(0), 20.0),
        at_least("Ex2 VRF(sQMC-II)/VRF(QMC-II)", ratio(1), 20.0),
        at_least("Ex3 VRF(sQMC-II)", vrf_of(&table[2], MethodId::SqmcII), 50.0),
    ];
    ledger.record("2", "BS d=16 VRF ordering and magnitude", checks, t);
}

fn criterion_3(ledger: &mut Ledger) {
    let t = Instant::now();
    let model = build(ModelSpec::BlackScholes(BlackScholesSpec::reference(128)));
    let pays = payoffs(&model, &[EX1, EX2]);
    let table = vrf_table(&pays, &model, &[MethodId::Mc, MethodId::SqmcII], 4096, 100, SEED).expect("table");
    let checks = vec![
        at_least("Ex1 VRF(sQMC-II)", vrf_of(&table[0], MethodId::SqmcII), 300.0),
        at_least("Ex2 VRF(sQMC-II)", vrf_of(&table[1], MethodId::SqmcII), 400.0),
    ];
    ledger.record("3", "BS d=128 VRF", checks, t);
}

fn criterion_4(ledger: &mut Ledger) {
    let t = Instant::now();
    let model = build(ModelSpec::BlackScholes(BlackScholesSpec::reference(16)));
    let pays = payoffs(&model, &[EX1, EX2]);
    let n = 1 << 18;
    let report = |m, k: usize| smoothed_dimension_report(m, &pays[k], &model, n, SEED, 0.99).expect("effdim");
    let a = report(MethodId::SqmcII, 0);
    let b = report(MethodId::SqmcII, 1);
    let c = report(MethodId::SqmcI, 0);
    let checks = vec![
        (format!("sQMC-II Ex1 R1 = {:.2}% >= 99%", 100.0 * a.r_first), a.r_first >= 0.99),
        (format!("sQMC-II Ex1 d_t = {}", a.d_t), a.d_t == 1),
        (format!("sQMC-II Ex1 d_ms = {:.3} in [1.00, 1.03]", a.d_ms), (1.0..=1.03).contains(&a.d_ms)),
        (format!("sQMC-II Ex2 d_t = {}", b.d_t), b.d_t == 2),
        (format!("sQMC-I Ex1 R1 = {:.2}% in [10%, 22%]", 100.0 * c.r_first), (0.10..=0.22).contains(&c.r_first)),
        (format!("sQMC-I Ex1 d_ms = {:.3} in [1.25, 1.50]", c.d_ms), (1.25..=1.50).contains(&c.d_ms)),
    ];
    ledger.record("4", "effective dimension (n = 2^18)", checks, t);
}

fn criterion_5(ledger: &mut Ledger) {
    let t = Instant::now();
    let theta = NigSpec::dax(16).theta().expect("theta");
    let m16 = build(ModelSpec::Nig(NigSpec::dax(16)));
    let law = m16.law().expect("exp-Levy law");

    // independent CDF by adaptive quadrature of the density between inverse points
    let p = NigSpec::dax(16).increment_params().expect("params");
    let f = |x: f64| p.pdf(x);
    let n = 10_000;
    let grid: Vec<f64> = (0..n).map(|i| 1e-6 + (1.0 - 2e-6) * i as f64 / (n - 1) as f64).collect();
    let xs: Vec<f64> = grid.iter().map(|&u| law.inv_cdf(u)).collect();
    let sd = p.variance().sqrt();
    let mut acc = 0.0;
    let mut a = p.mu - 40.0 * p.delta;
    while a < xs[0] {
        let b = (a + sd).min(xs[0]);
        acc += adaptive(&f, a, b, 1e-17);
        a = b;
    }
    let mut worst = (acc - grid[0]).abs();
    for i in 1..n {
        acc += adaptive(&f, xs[i - 1], xs[i], 1e-16);
        worst = worst.max((acc - grid[i]).abs());
    }

    let table16 = vrf_table(&payoffs(&m16, &[EX1]), &m16, &[MethodId::Mc, MethodId::SqmcII], 4096, 100, SEED).expect("table");
    let m64 = build(ModelSpec::Nig(NigSpec::dax(64)));
    let table64 = vrf_table(&payoffs(&m64, &[EX1]), &m64, &[MethodId::Mc, MethodId::SqmcII], 4096, 100, SEED).expect("table");
    let checks = vec![
        near("theta", theta, -4.87, 0.01),
        (format!("inverse CDF round trip max error {worst:.2e} <= 1e-8"), worst <= 1e-8),
        at_least("Ex1 m=16 VRF(sQMC-II)", vrf_of(&table16[0], MethodId::SqmcII), 1e4),
        at_least("Ex1 m=64 VRF(sQMC-II)", vrf_of(&table64[0], MethodId::SqmcII), 100.0),
    ];
    ledger.record("5", "NIG pipeline", checks, t);
}

fn criterion_6(ledger: &mut Ledger) {
    let t = Instant::now();
    let up = build(ModelSpec::Heston(HestonSpec::reference(16, 0.5)));
    let down = build(ModelSpec::Heston(HestonSpec::reference(16, -0.5)));
    let methods = [MethodId::Mc, MethodId::SqmcII];
    let a = vrf_table(&payoffs(&up, &[EX1]), &up, &methods, 4096, 100, SEED).expect("table");
    let b = vrf_table(&payoffs(&down, &[EX3]), &down, &methods, 4096, 100, SEED).expect("table");
    let mut checks = vec![
        at_least("Ex1 rho=0.5 VRF(sQMC-II)", vrf_of(&a[0], MethodId::SqmcII), 300.0),
        at_least("Ex3 rho=-0.5 VRF(sQMC-II)", vrf_of(&b[0], MethodId::SqmcII), 30.0),
    ];

    let bs = build(ModelSpec::BlackScholes(BlackScholesSpec::reference(16)));
    let flat = HestonSpec { v0: 0.09, theta_bar: 0.09, sigma_v: 0.0, ..HestonSpec::reference(16, 0.5) };
    let flat = build(ModelSpec::Heston(flat));
    for (pb, ph) in payoffs(&bs, &[EX1, EX2, EX3]).iter().zip(payoffs(&flat, &[EX1, EX2, EX3])) {
        for m in methods {
            let x = run(m, pb, &bs, 4096, 100, SEED).expect("bs");
            let y = run(m, &ph, &flat, 4096, 100, SEED + 1).expect("heston");
            let gap = (x.estimate - y.estimate).abs() / (x.std_error().powi(2) + y.std_error().powi(2)).sqrt();
            checks.push((format!("degenerate Heston {} {m} gap {gap:.2} s.e. <= 3", pb.kind), gap <= 3.0));
        }
    }
    ledger.record("6", "Heston pipeline", checks, t);
}

fn cells() -> Vec<(&'static str, Model)> {
    vec![
        ("bs", build(ModelSpec::BlackScholes(BlackScholesSpec::reference(16)))),
        ("nig", build(ModelSpec::Nig(NigSpec::dax(16)))),
        ("heston", build(ModelSpec::Heston(HestonSpec::reference(16, 0.5)))),
    ]
}

fn equidistributed(points: &PointSet, k: u32) -> bool {
    let cells = 1usize << k;
    (0..points.dim()).all(|j| {
        let mut hit = vec![false; cells];
        for row in points.rows() {
            let c = ((row[j] * cells as f64) as usize).min(cells - 1);
            if std::mem::replace(&mut hit[c], true) {
                return false;
            }
        }
        true
    })
}

fn criterion_7(ledger: &mut Ledger) {
    let t = Instant::now();
    let cells = cells();
    let mut checks = Vec::new();

    let mut all_bounds = true;
    let mut all_pointwise = true;
    let mut all_pinned = true;
    for (name, model) in &cells {
        for kind in PayoffKind::ALL {
            let pay = PayoffSpec::for_model(kind, 100.0, 90.0, model).expect("payoff");
            let mqr = mqr_transform(&taylor_weight(model, kind.weight_target()).expect("weights")).expect("mqr");
            let q = mqr.matrix();
            let pinned = q.orthogonality_defect() < 1e-12
                && (q[(0, 0)] - 1.0).abs() < 1e-15
                && (1..q.rows()).all(|i| q[(0, i)] == 0.0 && q[(i, 0)] == 0.0);
            if !pinned {
                all_pinned = false;
                checks.push((format!("{name} {kind} MQR orthogonal with pinned first coordinate"), false));
            }
            for tr in [OrthogonalTransform::identity(model.dim()), mqr] {
                let p = build_separable(&pay, model, &tr).expect("separable");
                let r = variance_bound_check(&p, 1_000_000, SEED).expect("bound check");
                if !(r.unbiased() && r.bound_holds()) {
                    all_bounds = false;
                    checks.push((format!("{name} {kind} {:?} unbiased and variance bound", tr.kind()), false));
                }
                let mut src = PseudoUniform::new(p.dim(), ScrambleSeed::new(SEED, 1));
                let mut ws = Workspace::new();
                let mut u = vec![0.0; p.dim()];
                let mut worst: f64 = 0.0;
                for _ in 0..10_000 {
                    src.next_into(&mut u);
                    let b = p.bounds(&u, &mut ws);
                    if (u[0] - b.lower).abs() < 1e-12 || (u[0] - b.upper).abs() < 1e-12 {
                        continue;
                    }
                    let sep = if b.lower < u[0] && u[0] < b.upper { p.smooth_factor(u[0], &u, &mut ws) } else { 0.0 };
                    let raw = p.raw(&u, &mut ws);
                    worst = worst.max((sep - raw).abs() / raw.abs().max(1.0));
                }
                if worst > 1e-9 {
                    all_pointwise = false;
                    checks.push((format!("{name} {kind} {:?} raw vs separable gap {worst:e}", tr.kind()), false));
                }
            }
        }
    }
    checks.push(("nine cells unbiased within 3 s.e. with variance bound, n = 10^6 (identity and MQR)".into(), all_bounds));
    checks.push(("MQR orthogonal, first coordinate pinned for all weight targets".into(), all_pinned));
    checks.push(("raw vs separable payoff equal on 10^4 points per cell".into(), all_pointwise));

    let sobol_ok = (0..=12u32).all(|k| {
        equidistributed(&Sobol::new(32).expect("sobol").take(1 << k), k)
            && equidistributed(&scrambled_sobol(1 << k, 32, ScrambleSeed::new(SEED, k as u64)).expect("sobol"), k)
    });
    checks.push(("Sobol' dyadic equidistribution for k <= 12 (unscrambled with origin, and scrambled)".into(), sobol_ok));

    type TestFn = fn(&[f64]) -> f64;
    let funcs: [(usize, &[f64], TestFn); 3] = [
        (4, &[0.5], |u| (u[0] - 0.5).abs() * (1.0 + u[1]) + if u[2] > 0.5 { u[1] * u[2] } else { 0.0 } + u[3] * u[3]),
        (3, &[0.3], |u| (u[0] + u[1] * u[1]) * (u[2] - 0.5) + (u[0] - 0.3).max(0.0)),
        (2, &[0.5], |u| u[0] * u[1] + 0.5 * (u[1] - 0.5).abs()),
    ];
    let mut worst_ratio: f64 = 0.0;
    let mut worst_dms: f64 = 0.0;
    for (d, breaks, f) in funcs {
        let exact = tensor_anova(&f, d, breaks).expect("oracle");
        let est = dimension_report(&FnIntegrand::new(d, f), 1 << 16, SEED, 0.99).expect("estimate");
        for (e, g) in exact.truncation.iter().zip(&est.truncation).chain(exact.first_order.iter().zip(&est.first_order)) {
            worst_ratio = worst_ratio.max((e - g).abs()).max(if (e - g).is_nan() { f64::INFINITY } else { 0.0 });
        }
        let rel = (exact.d_ms - est.d_ms).abs() / exact.d_ms;
        worst_dms = worst_dms.max(if rel.is_nan() { f64::INFINITY } else { rel });
    }
    checks.push((
        format!("effdim vs tensor quadrature: ratios within {worst_ratio:.1e} <= 0.01, d_ms within {:.1e} <= 1%", worst_dms),
        worst_ratio <= 0.01 && worst_dms <= 0.01,
    ));
    ledger.record("7", "property suites", checks, t);
}

fn run_cli(args: &[&str], out: &Path) -> (Vec<u8>, Vec<u8>, bool) {
    let status = Command::new(env!("CARGO_BIN_EXE_vpoqmc"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "warn")
        .status()
        .expect("spawn cli");
    let meta = out.with_file_name(format!("{}.meta.json", out.file_name().unwrap().to_string_lossy()));
    (std::fs::read(out).unwrap_or_default(), std::fs::read(meta).unwrap_or_default(), status.success())
}

fn criterion_8(ledger: &mut Ledger) {
    let t = Instant::now();
    let dir = tempfile::tempdir().expect("tempdir");
    let cfg = dir.path().join("small.toml");
    std::fs::write(
        &cfg,
        "n = 512\nreps = 8\nsteps = [8]\ntiming = false\n\n[model]\nkind = \"nig\"\n\n[effdim]\nn = 2048\n\n[sweep]\nn = [256, 512]\n",
    )
    .expect("write config");
    let cfg = cfg.to_str().unwrap();
    let mut checks = Vec::new();
    for cmd in ["price", "vrf", "effdim", "sweep"] {
        let a = run_cli(&[cmd, "--config", cfg, "--seed", "7", "--threads", "1"], &dir.path().join(format!("{cmd}-a.csv")));
        let b = run_cli(&[cmd, "--config", cfg, "--seed", "7", "--threads", "2"], &dir.path().join(format!("{cmd}-b.csv")));
        let c = run_cli(&[cmd, "--config", cfg, "--seed", "8"], &dir.path().join(format!("{cmd}-c.csv")));
        let same = a.2 && b.2 && !a.0.is_empty() && a.0 == b.0 && a.1 == b.1;
        checks.push((format!("{cmd}: identical CSV and metadata across reruns and thread counts"), same));
        checks.push((format!("{cmd}: a different seed changes the CSV"), c.2 && c.0 != a.0));
    }
    ledger.record("8", "CLI determinism", checks, t);
}

fn main() {
    let mut ledger = Ledger::default();
    criteria_1_and_2(&mut ledger);
    criterion_3(&mut ledger);
    criterion_4(&mut ledger);
    criterion_5(&mut ledger);
    criterion_6(&mut ledger);
    criterion_7(&mut ledger);
    criterion_8(&mut ledger);
    if ledger.failed > 0 {
        println!("{} acceptance criteria failed", ledger.failed);
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
