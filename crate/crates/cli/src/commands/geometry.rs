//! Finite-type, tangent-span and hyperplane tests for the curves of a measure.

use serde::Serialize;
use weyl_core::geometry::{greedy_spanning_points, hyperplane_containment, type_report, uniform_samples, Hyperplane, SpanSearch, TypeReport};
use weyl_core::measures::{Chart, MeasureExpr, CATALOG};
use weyl_core::tconv::{critical_set_area, CriticalArea};

use super::{catalog_measure, Outcome};
use crate::config::Resolved;
use crate::error::CliResult;
use crate::output::{json, write, Header};

pub const SAMPLES: usize = 16;
pub const MAX_ORDER: usize = 8;
pub const CRITICAL_GRID: usize = 1024;
pub const CRITICAL_ETAS: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveGeometry {
    pub curve: String,
    /// Absent for charts of dimension two or more.
    pub finite_type: Option<TypeReport>,
    pub hyperplane: Option<Hyperplane>,
    pub spanning: SpanSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometryReport {
    pub rank_tol: f64,
    pub curves: Vec<CurveGeometry>,
    /// For a twisted convolution of two planar curves.
    pub critical_set: Option<Vec<CriticalArea>>,
}

fn leaves(m: &MeasureExpr, out: &mut Vec<Chart>) {
    match m {
        MeasureExpr::Smooth(s) => out.push(s.chart().clone()),
        MeasureExpr::TConv(children) => children.iter().for_each(|c| leaves(c, out)),
        MeasureExpr::Sum(terms) => terms.iter().for_each(|(_, c)| leaves(c, out)),
        MeasureExpr::Dirac(_) | MeasureExpr::Reflect(_) => {}
    }
}

/// Parameter samples: uniform for curves, a 3 x 3 x 3 interior grid otherwise.
pub fn samples(c: &Chart) -> Vec<Vec<f64>> {
    if c.param_dim() == 1 {
        return uniform_samples(c, SAMPLES).into_iter().map(|s| vec![s]).collect();
    }
    let dom = c.domain();
    let axes: Vec<Vec<f64>> = dom.iter().map(|&(lo, hi)| (1..=3).map(|i| lo + (hi - lo) * i as f64 / 4.0).collect()).collect();
    let mut out = vec![vec![]];
    for axis in &axes {
        out = out.into_iter().flat_map(|p: Vec<f64>| axis.iter().map(move |&v| [p.clone(), vec![v]].concat())).collect();
    }
    out
}

fn analyse(c: &Chart, tol: f64) -> CliResult<CurveGeometry> {
    let s = samples(c);
    let finite_type = if c.param_dim() == 1 && c.n() == 1 {
        let flat: Vec<f64> = s.iter().map(|p| p[0]).collect();
        Some(type_report(c, &flat, MAX_ORDER, tol)?)
    } else {
        None
    };
    Ok(CurveGeometry {
        curve: c.name().to_string(),
        finite_type,
        hyperplane: hyperplane_containment(c, &s, tol)?,
        spanning: greedy_spanning_points(c, &s, false, tol)?,
    })
}

/// `geometry.json` for the measure's curves, or for the whole catalog without a measure.
pub fn cmd_geometry(r: &Resolved) -> CliResult<Outcome> {
    let tol = r.config.rank_tol;
    let mut charts = Vec::new();
    let simplified = r.measure.as_ref().map(MeasureExpr::simplify);
    match &simplified {
        Some(m) => leaves(m, &mut charts),
        None => {
            for name in CATALOG {
                if let MeasureExpr::Smooth(s) = catalog_measure(name)? {
                    charts.push(s.chart().clone());
                }
            }
        }
    }
    let curves = charts.iter().map(|c| analyse(c, tol)).collect::<CliResult<Vec<_>>>()?;
    let critical_set = match (&simplified, charts.as_slice()) {
        (Some(MeasureExpr::TConv(_)), [a, b]) if a.param_dim() == 1 && a.n() == 1 && b.param_dim() == 1 && b.n() == 1 => {
            Some(critical_set_area(a, b, CRITICAL_GRID, &CRITICAL_ETAS)?)
        }
        _ => None,
    };
    let report = GeometryReport { rank_tol: tol, curves, critical_set };
    let path = write(&r.config.out, "geometry.json", &json(&Header::new(r), &report))?;
    let mut lines: Vec<String> = report
        .curves
        .iter()
        .map(|g| {
            let span = match &g.spanning {
                SpanSearch::Found { points } => format!("spanning points {}", points.len()),
                SpanSearch::NotFound { achieved_rank } => format!("no spanning set (rank {achieved_rank})"),
            };
            let ty = match &g.finite_type {
                Some(t) if t.all_finite() => "finite type",
                Some(_) => "not finite type",
                None => "type n/a",
            };
            let plane = if g.hyperplane.is_some() { "in a hyperplane" } else { "spans" };
            format!("{}: {ty}, {plane}, {span}", g.curve)
        })
        .collect();
    if let Some(areas) = &report.critical_set {
        for a in areas {
            lines.push(format!("critical set eta={}: area {:.4e}", a.eta, a.area));
        }
    }
    Ok(Outcome { passed: true, files: vec![path], lines })
}
