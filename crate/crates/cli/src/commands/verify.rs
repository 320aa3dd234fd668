//! Invariant suites with measured errors against tolerances.
//!
//! Sizes follow the config: group law at `max(N_list)`, unitarity over the last three
//! entries of `N_list`, adjoint and convolution blocks at `N` (and `N / 2`).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use weyl_core::hermite::{frobenius, rho_matrix, RhoEvaluator};
use weyl_core::measures::{MeasureExpr, CATALOG};
use weyl_core::phase_space::{symplectic_phase, unit_phase};
use weyl_core::tconv::{phase_phi_2, phase_phi_k, PhaseChain};
use weyl_core::weyl::{weyl_matrix, TConvMode, WeylConfig};
use weyl_core::{BasisTruncation, PhasePoint};

use super::{catalog_measure, weyl_config, Outcome};
use crate::config::Resolved;
use crate::error::CliResult;
use crate::output::{json as json_doc, write, Header};

/// Errors below this count as converged when checking monotone decrease.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub tolerance: f64,
    /// Worst measured error.
    pub measured: f64,
    pub details: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

fn tol(r: &Resolved, default: f64) -> f64 {
    r.config.tolerance.unwrap_or(default)
}

fn random_point(rng: &mut ChaCha8Rng, n: usize, bound: f64) -> PhasePoint {
    let mut v = || (0..n).map(|_| rng.random_range(-bound..=bound)).collect::<Vec<_>>();
    let x = v();
    let y = v();
    PhasePoint::new(x, y).expect("matching lengths")
}

fn block(m: &DMatrix<Complex64>, k: usize) -> DMatrix<Complex64> {
    m.view((0, 0), (k, k)).into_owned()
}

fn block_size(per_axis: usize, wanted: usize) -> usize {
    wanted.min(per_axis / 4).max(1)
}

fn phi_suite(r: &Resolved, rng: &mut ChaCha8Rng) -> CliResult<SuiteResult> {
    let t = tol(r, 1e-12);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let p = random_point(rng, r.n, 5.0);
        let q = random_point(rng, r.n, 5.0);
        let s = random_point(rng, r.n, 5.0);
        let phi3 = phase_phi_k(&PhaseChain::new(vec![p.clone(), q.clone(), s.clone()])?);
        let rec = phase_phi_2(&p, &q)? * phase_phi_2(&p.add(&q)?, &s)?;
        worst = worst.max((phi3 - rec).norm());
    }
    Ok(SuiteResult {
        name: "phi_recursion".into(),
        passed: worst <= t,
        tolerance: t,
        measured: worst,
        details: json!({"triples": 1000, "n": r.n}),
    })
}

fn group_law_suite(r: &Resolved, rng: &mut ChaCha8Rng) -> CliResult<SuiteResult> {
    let t = tol(r, 1e-5);
    let per_axis = *r.config.n_list.last().expect("validated non-empty");
    let k = block_size(per_axis, 16);
    let trunc = BasisTruncation::one_dim(per_axis)?;
    let hermite = weyl_config(r).hermite;
    let mut pairs = Vec::new();
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let p = random_point(rng, 1, 1.0);
        let q = random_point(rng, 1, 1.0);
        let a = rho_matrix(&p, &trunc, &hermite)?;
        let b = rho_matrix(&q, &trunc, &hermite)?;
        let c = rho_matrix(&p.add(&q)?, &trunc, &hermite)?;
        let z = unit_phase(symplectic_phase(&p, &q)?);
        let err = frobenius(&(block(&(a.entries() * b.entries()), k) - block(c.entries(), k) * z));
        worst = worst.max(err);
        pairs.push(json!({"p": p.to_flat(), "q": q.to_flat(), "error": err}));
    }
    Ok(SuiteResult {
        name: "group_law".into(),
        passed: worst <= t,
        tolerance: t,
        measured: worst,
        details: json!({"N": per_axis, "block": k, "pairs": pairs}),
    })
}

fn unitarity_suite(r: &Resolved) -> CliResult<SuiteResult> {
    let t = tol(r, 1e-6);
    let list = &r.config.n_list;
    let sizes = &list[list.len().saturating_sub(3)..];
    let hermite = weyl_config(r).hermite;
    let mut rows = Vec::new();
    let mut passed = true;
    let mut worst = 0.0f64;
    for (x, y) in [(1.0, 0.0), (0.0, 1.0), (0.7, -0.3)] {
        let mut errs = Vec::new();
        for &per_axis in sizes {
            let k = block_size(sizes[0], 16);
            let trunc = BasisTruncation::one_dim(per_axis)?;
            let m = RhoEvaluator::new(&trunc, &hermite, f64::abs(y))?.axis_matrix(x, y)?;
            let gram = m.adjoint() * &m;
            errs.push(frobenius(&(block(&gram, k) - DMatrix::identity(k, k))));
        }
        let monotone = errs.windows(2).all(|w| w[1] <= w[0] || w[1] <= ROUNDOFF_FLOOR);
        let last = *errs.last().expect("non-empty");
        passed &= monotone && last <= t;
        worst = worst.max(last);
        rows.push(json!({"point": [x, y], "errors": errs, "monotone": monotone}));
    }
    Ok(SuiteResult {
        name: "unitarity".into(),
        passed,
        tolerance: t,
        measured: worst,
        details: json!({"N": sizes, "block": block_size(sizes[0], 16), "floor": ROUNDOFF_FLOOR, "points": rows}),
    })
}

fn adjoint_suite(r: &Resolved) -> CliResult<SuiteResult> {
    let t = tol(r, 1e-10);
    let cfg = weyl_config(r);
    let measures: Vec<(String, MeasureExpr)> = match &r.measure {
        Some(m) => vec![("measure".into(), m.clone())],
        None => CATALOG.iter().map(|&name| Ok((name.to_string(), catalog_measure(name)?))).collect::<CliResult<_>>()?,
    };
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for (name, m) in measures {
        let n = m.dim()?;
        // dimension N in every case: N per axis for n = 1, sqrt(N) per axis for n = 2
        let per_axis = if n == 1 { r.config.n_basis } else { (r.config.n_basis as f64).sqrt().ceil() as usize };
        let trunc = BasisTruncation::new(n, per_axis)?;
        let a = weyl_matrix(&MeasureExpr::reflected(m.clone()), &trunc, &cfg)?;
        let b = weyl_matrix(&m, &trunc, &cfg)?.adjoint();
        let err = a.sub(&b)?.frobenius();
        worst = worst.max(err);
        rows.push(json!({"measure": name, "n": n, "N": per_axis, "error": err}));
    }
    Ok(SuiteResult { name: "adjoint".into(), passed: worst <= t, tolerance: t, measured: worst, details: json!(rows) })
}

fn convolution_suite(r: &Resolved) -> CliResult<SuiteResult> {
    let t = tol(r, 1e-3);
    let pairs: Vec<(String, Vec<MeasureExpr>)> = match r.measure.as_ref().map(|m| m.simplify()) {
        Some(MeasureExpr::TConv(children)) if r.n == 1 && children.len() == 2 => vec![("measure".into(), children)],
        _ => {
            let c = catalog_measure("circle")?;
            let e = catalog_measure("ellipse")?;
            vec![("circle#circle".into(), vec![c.clone(), c.clone()]), ("circle#ellipse".into(), vec![c, e])]
        }
    };
    let hi = r.config.n_basis;
    let lo = (hi / 2).max(1);
    let k = block_size(hi, 8);
    let product = WeylConfig { tconv_mode: TConvMode::Product, ..weyl_config(r) };
    let direct = WeylConfig { tconv_mode: TConvMode::Direct, ..weyl_config(r) };
    let mut rows = Vec::new();
    let mut passed = true;
    let mut worst = 0.0f64;
    for (name, children) in pairs {
        let tc = MeasureExpr::tconv(children)?;
        let mut errs = Vec::new();
        for per_axis in [lo, hi] {
            let trunc = BasisTruncation::one_dim(per_axis)?;
            let a = weyl_matrix(&tc, &trunc, &direct)?;
            let b = weyl_matrix(&tc, &trunc, &product)?;
            errs.push(frobenius(&(block(a.entries(), k) - block(b.entries(), k))));
        }
        let ratio = errs[0] / errs[1];
        let ok = errs[1] <= t && ratio >= 2.0;
        passed &= ok;
        worst = worst.max(errs[1]);
        rows.push(json!({"pair": name, "N": [lo, hi], "errors": errs, "ratio": ratio, "passed": ok}));
    }
    Ok(SuiteResult {
        name: "convolution_blocks".into(),
        passed,
        tolerance: t,
        measured: worst,
        details: json!({"block": k, "min_ratio": 2.0, "pairs": rows}),
    })
}

/// Runs every suite; randomized suites draw from `seed`.
pub fn verify_report(r: &Resolved) -> CliResult<VerifyReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(r.config.seed);
    let suites = vec![
        phi_suite(r, &mut rng)?,
        group_law_suite(r, &mut rng)?,
        unitarity_suite(r)?,
        adjoint_suite(r)?,
        convolution_suite(r)?,
    ];
    Ok(VerifyReport { seed: r.config.seed, passed: suites.iter().all(|s| s.passed), suites })
}

/// `verify.json`; fails (exit 1) when any suite fails.
pub fn cmd_verify(r: &Resolved) -> CliResult<Outcome> {
    let report = verify_report(r)?;
    let path = write(&r.config.out, "verify.json", &json_doc(&Header::new(r), &report))?;
    let lines = report
        .suites
        .iter()
        .map(|s| {
            format!(
                "{} {:<20} measured {:.3e} tolerance {:.1e}",
                if s.passed { "PASS" } else { "FAIL" },
                s.name,
                s.measured,
                s.tolerance
            )
        })
        .collect();
    Ok(Outcome { passed: report.passed, files: vec![path], lines })
}
