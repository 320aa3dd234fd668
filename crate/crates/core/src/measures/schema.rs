//! JSON measure files: `{ "n": int, "measure": <node> }`.
//!
//! ```json
//! {"kind": "dirac", "point": [x.., y..]}
//! {"kind": "smooth", "curve": {"name": "circle", ..}, "density": {"kind": "constant"}}
//! {"kind": "reflect", "child": <node>}
//! {"kind": "tconv", "children": [<node>, <node>, ..]}
//! {"kind": "sum", "terms": [{"w": [re, im], "child": <node>}, ..]}
//! ```
//!
//! Unknown keys are rejected at every level.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::chart::{Chart, CurveSpec};
use super::density::Density;
use super::expr::MeasureExpr;
use super::smooth::SmoothMeasureSpec;
use crate::error::{Error, Result};
use crate::phase_space::PhasePoint;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub n: usize,
    pub measure: NodeSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NodeSpec {
    Dirac {
        point: Vec<f64>,
    },
    Smooth {
        curve: CurveSpec,
        #[serde(default)]
        density: Density,
    },
    Reflect {
        child: Box<NodeSpec>,
    },
    Tconv {
        children: Vec<NodeSpec>,
    },
    Sum {
        terms: Vec<TermSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub w: [f64; 2],
    pub child: NodeSpec,
}

impl NodeSpec {
    pub fn to_expr(&self) -> Result<MeasureExpr> {
        Ok(match self {
            NodeSpec::Dirac { point } => MeasureExpr::Dirac(PhasePoint::from_flat(point)?),
            NodeSpec::Smooth { curve, density } => {
                MeasureExpr::Smooth(SmoothMeasureSpec::new(Chart::new(curve.clone())?, density.clone())?)
            }
            NodeSpec::Reflect { child } => MeasureExpr::reflected(child.to_expr()?),
            NodeSpec::Tconv { children } => {
                MeasureExpr::tconv(children.iter().map(NodeSpec::to_expr).collect::<Result<_>>()?)?
            }
            NodeSpec::Sum { terms } => MeasureExpr::sum(
                terms
                    .iter()
                    .map(|t| Ok((Complex64::new(t.w[0], t.w[1]), t.child.to_expr()?)))
                    .collect::<Result<_>>()?,
            )?,
        })
    }

    pub fn from_expr(m: &MeasureExpr) -> Result<Self> {
        Ok(match m {
            MeasureExpr::Dirac(p) => NodeSpec::Dirac { point: p.to_flat() },
            MeasureExpr::Smooth(s) => {
                if s.chart().is_reversed() {
                    return Err(Error::Schema("reversed charts have no file representation".into()));
                }
                let node = NodeSpec::Smooth { curve: s.chart().spec().clone(), density: s.density().clone() };
                if s.chart().is_reflected() {
                    NodeSpec::Reflect { child: Box::new(node) }
                } else {
                    node
                }
            }
            MeasureExpr::Reflect(c) => NodeSpec::Reflect { child: Box::new(Self::from_expr(c)?) },
            MeasureExpr::TConv(children) => {
                NodeSpec::Tconv { children: children.iter().map(Self::from_expr).collect::<Result<_>>()? }
            }
            MeasureExpr::Sum(terms) => NodeSpec::Sum {
                terms: terms
                    .iter()
                    .map(|(w, c)| Ok(TermSpec { w: [w.re, w.im], child: Self::from_expr(c)? }))
                    .collect::<Result<_>>()?,
            },
        })
    }
}

impl MeasureFile {
    pub fn to_expr(&self) -> Result<MeasureExpr> {
        if !(1..=2).contains(&self.n) {
            return Err(Error::Schema(format!("n must be 1 or 2, got {}", self.n)));
        }
        let expr = self.measure.to_expr()?;
        let d = expr.dim()?;
        if d != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: d });
        }
        Ok(expr)
    }
}

/// Parses a measure file; schema errors carry line and column.
pub fn parse_measure(text: &str) -> Result<(usize, MeasureExpr)> {
    let file: MeasureFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let expr = file.to_expr()?;
    Ok((file.n, expr))
}

pub fn load_measure(path: &Path) -> Result<(usize, MeasureExpr)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Schema(format!("cannot read measure file {}: {e}", path.display())))?;
    parse_measure(&text).map_err(|e| match e {
        Error::Schema(msg) => Error::Schema(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn measure_to_json(n: usize, m: &MeasureExpr) -> Result<String> {
    let file = MeasureFile { n, measure: NodeSpec::from_expr(m)? };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Schema(e.to_string()))
}
