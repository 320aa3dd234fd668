//! Density sweep of `a # b` for two planar curve measures, cross-checked against the pairing oracle.

use num_complex::Complex64;
use serde::Serialize;
use weyl_core::measures::{bump, MeasureExpr, SmoothMeasureSpec};
use weyl_core::parallel::{map_each, Execution};
use weyl_core::quadrature::CompositeRule;
use weyl_core::tconv::{cell_centers, grid_pairing, pairing_oracle, sample_cell, CellSample, DensityConfig, DensityEvaluator};
use weyl_core::PhasePoint;

use super::{require_measure, Outcome};
use crate::config::{BumpSpec, Resolved};
use crate::error::{CliError, CliResult};
use crate::output::{json, write, Header};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BumpPairing {
    pub bump: BumpSpec,
    pub grid: [f64; 2],
    pub oracle: [f64; 2],
    /// `|grid - oracle| / |oracle|`, or the absolute difference when the oracle vanishes.
    pub residual: f64,
    pub excluded: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySummary {
    pub bounds: [f64; 4],
    pub grid: usize,
    pub eps_j: f64,
    pub cells: usize,
    pub flagged: Vec<[f64; 2]>,
    pub pairings: Vec<BumpPairing>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn two_curves(m: &MeasureExpr) -> CliResult<(SmoothMeasureSpec, SmoothMeasureSpec)> {
    if let MeasureExpr::TConv(children) = m.simplify() {
        if let [MeasureExpr::Smooth(a), MeasureExpr::Smooth(b)] = children.as_slice() {
            return Ok((a.clone(), b.clone()));
        }
    }
    Err(CliError::Config("density needs a measure of the form tconv(smooth curve, smooth curve) with n = 1".into()))
}

fn xy(p: &PhasePoint) -> [f64; 2] {
    [p.x()[0], p.y()[0]]
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn bump_fn(b: &BumpSpec) -> impl Fn(&PhasePoint) -> f64 + Sync + '_ {
    move |z| bump(&xy(z), &b.center, &[b.half_width, b.half_width])
}

/// `density.csv` over the sweep box and `density.json` with flagged cells and bump pairings.
pub fn cmd_density(r: &Resolved) -> CliResult<Outcome> {
    let c = &r.config;
    let (a, b) = two_curves(require_measure(r)?)?;
    let cfg = DensityConfig { eps_j_rel: c.eps_j, ..DensityConfig::default() };
    let eval = DensityEvaluator::new(&a, &b, cfg)?;
    let [x0, x1, y0, y1] = c.bounds;
    let (centers, half) = cell_centers([(x0, x1), (y0, y1)], c.grid);
    let samples = map_each(Execution::Parallel, &centers, |z| sample_cell(&eval, z, half));

    let header = Header::new(r);
    let mut csv = header.csv_block();
    csv.push_str("z_x,z_y,re,im,roots_found,nearest_critical_distance,near_critical\n");
    let mut flagged = Vec::new();
    for (z, s) in centers.iter().zip(samples) {
        let [zx, zy] = xy(z);
        let (sample, near) = match s? {
            CellSample::Value(s) => (Some(s), false),
            CellSample::NearCritical { sample, .. } => {
                flagged.push([zx, zy]);
                (sample, true)
            }
        };
        let row = match sample {
            Some(s) => [num(zx), num(zy), num(s.value.re), num(s.value.im), s.roots_found.to_string(), num(s.nearest_critical_distance)],
            None => [num(zx), num(zy), "nan".into(), "nan".into(), String::new(), num(0.0)],
        };
        csv.push_str(&row.join(","));
        csv.push_str(if near { ",1\n" } else { ",0\n" });
    }

    let (ma, mb) = (MeasureExpr::smooth(a.clone()), MeasureExpr::smooth(b.clone()));
    let oracle_rule = CompositeRule::CURVE.doubled();
    let scale = ma.mass()? * mb.mass()?;
    let mut pairings = Vec::new();
    for bp in &c.bumps {
        let g = bump_fn(bp);
        let h = bp.half_width;
        let box_ = [(bp.center[0] - h, bp.center[0] + h), (bp.center[1] - h, bp.center[1] + h)];
        let grid = grid_pairing(&eval, &g, box_, c.grid, Execution::Parallel)?;
        let oracle = pairing_oracle(&ma, &mb, |z| Complex64::new(g(z), 0.0), oracle_rule)?;
        let diff = (grid.value - oracle).norm();
        let residual = if oracle.norm() > 1e-12 * scale { diff / oracle.norm() } else { diff };
        pairings.push(BumpPairing {
            bump: bp.clone(),
            grid: [grid.value.re, grid.value.im],
            oracle: [oracle.re, oracle.im],
            residual,
            excluded: grid.excluded.iter().map(xy).collect(),
        });
    }
    let max_residual = pairings.iter().map(|p| p.residual).fold(0.0, f64::max);
    let tolerance = c.tolerance.unwrap_or(1e-3);
    let summary = DensitySummary {
        bounds: c.bounds,
        grid: c.grid,
        eps_j: eval.eps_j(),
        cells: centers.len(),
        flagged,
        pairings,
        max_residual,
        tolerance,
        passed: max_residual <= tolerance,
    };
    let f1 = write(&c.out, "density.csv", &csv)?;
    let f2 = write(&c.out, "density.json", &json(&header, &summary))?;
    let mut lines = vec![format!(
        "density {}x{} cells, {} flagged near-critical",
        c.grid,
        c.grid,
        summary.flagged.len()
    )];
    for p in &summary.pairings {
        lines.push(format!(
            "bump at ({}, {}) width {}: residual {:.3e}, {} cells excluded",
            p.bump.center[0],
            p.bump.center[1],
            p.bump.half_width,
            p.residual,
            p.excluded.len()
        ));
    }
    lines.push(format!(
        "{} pairing residual {:.3e} tolerance {:.1e}",
        if summary.passed { "PASS" } else { "FAIL" },
        max_residual,
        tolerance
    ));
    Ok(Outcome { passed: summary.passed, files: vec![f1, f2], lines })
}
