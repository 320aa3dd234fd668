//! Weyl transforms `W(lambda) = int rho(x, y, 1) d lambda(x, y)` at a truncation.

mod spectrum;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use spectrum::{compactness_scan, singular_values, ProbeRow, ScanThresholds, SpectrumReport, Trend};

use crate::error::{Error, Result};
use crate::hermite::{BasisTruncation, HermiteConfig, OperatorMatrix, RhoBackend, RhoEvaluator};
use crate::measures::{reflect_measure, MeasureExpr, SmoothMeasureSpec};
use crate::parallel::{map_chunks, tree_reduce, Execution};
use crate::phase_space::PhasePoint;
use crate::quadrature::CompositeRule;
use crate::tconv::tconv_weyl_direct;

/// How `TConv` nodes are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TConvMode {
    /// Nested quadrature of the phase-weighted push-forward.
    Direct,
    /// Product of the children's matrices.
    #[default]
    Product,
}

/// Number of partial sums per assembly; fixes the reduction tree.
pub const ASSEMBLY_CHUNKS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeylConfig {
    pub hermite: HermiteConfig,
    /// Rule for curves; `None` scales the panel count with `N`.
    pub curve_rule: Option<CompositeRule>,
    /// Rule per axis for charts of dimension two or more.
    pub surface_rule: CompositeRule,
    pub tconv_mode: TConvMode,
    /// Rule for curve children in direct twisted convolution.
    pub direct_rule: CompositeRule,
    pub direct_backend: RhoBackend,
    /// Largest number of node tuples in direct twisted convolution.
    pub direct_budget: u128,
    pub execution: Execution,
}

impl Default for WeylConfig {
    fn default() -> Self {
        Self {
            hermite: HermiteConfig::default(),
            curve_rule: None,
            surface_rule: CompositeRule::SURFACE,
            tconv_mode: TConvMode::Product,
            direct_rule: CompositeRule::new(32, 8),
            direct_backend: RhoBackend::Laguerre,
            direct_budget: 1 << 22,
            execution: Execution::Parallel,
        }
    }
}

impl WeylConfig {
    /// Rule for a chart of dimension `param_dim` at `N` basis functions per axis.
    pub fn rule_for(&self, param_dim: usize, per_axis: usize) -> CompositeRule {
        if param_dim > 1 {
            return self.surface_rule;
        }
        self.curve_rule.unwrap_or_else(|| {
            let base = CompositeRule::CURVE;
            CompositeRule::new(base.panels.max(per_axis / 2), base.order)
        })
    }
}

/// Matrix of `W(m)` in the truncation.
pub fn weyl_matrix(m: &MeasureExpr, trunc: &BasisTruncation, cfg: &WeylConfig) -> Result<OperatorMatrix> {
    let d = m.dim()?;
    if d != trunc.n() {
        return Err(Error::DimensionMismatch { expected: trunc.n(), found: d });
    }
    OperatorMatrix::new(trunc.clone(), weyl_entries(m, trunc, cfg)?)
}

fn weyl_entries(m: &MeasureExpr, trunc: &BasisTruncation, cfg: &WeylConfig) -> Result<DMatrix<Complex64>> {
    match m {
        MeasureExpr::Dirac(p) => {
            let y = p.y().iter().fold(0.0f64, |a, v| a.max(v.abs()));
            RhoEvaluator::new(trunc, &cfg.hermite, y)?.matrix(p)
        }
        MeasureExpr::Smooth(spec) => smooth_entries(spec, trunc, cfg),
        MeasureExpr::Reflect(c) => weyl_entries(&reflect_measure(c), trunc, cfg),
        MeasureExpr::Sum(terms) => {
            let d = trunc.size();
            let mut acc = DMatrix::<Complex64>::zeros(d, d);
            for (w, child) in terms {
                let c = weyl_entries(child, trunc, cfg)?;
                acc.zip_apply(&c, |a, b| *a += w * b);
            }
            Ok(acc)
        }
        MeasureExpr::TConv(children) => match cfg.tconv_mode {
            TConvMode::Product => {
                let mut it = children.iter();
                let mut acc = weyl_entries(it.next().expect("two or more children"), trunc, cfg)?;
                for c in it {
                    acc = &acc * weyl_entries(c, trunc, cfg)?;
                }
                Ok(acc)
            }
            TConvMode::Direct => Ok(tconv_weyl_direct(children, trunc, cfg)?.into_entries()),
        },
    }
}

fn smooth_entries(spec: &SmoothMeasureSpec, trunc: &BasisTruncation, cfg: &WeylConfig) -> Result<DMatrix<Complex64>> {
    let rule = cfg.rule_for(spec.chart().param_dim(), trunc.per_axis());
    let nodes: Vec<(PhasePoint, Complex64)> = spec
        .nodes(rule)?
        .into_iter()
        .map(|n| (n.point, Complex64::new(n.weight, 0.0)))
        .collect();
    let y = nodes.iter().flat_map(|(p, _)| p.y()).fold(0.0f64, |a, v| a.max(v.abs()));
    let eval = RhoEvaluator::new(trunc, &cfg.hermite, y)?;
    assemble(&nodes, &eval, cfg.execution)
}

/// `sum_i w_i rho(p_i)` with fixed chunks and a pairwise reduction.
pub(crate) fn assemble(
    nodes: &[(PhasePoint, Complex64)],
    eval: &RhoEvaluator,
    exec: Execution,
) -> Result<DMatrix<Complex64>> {
    let d = eval.trunc().size();
    let chunk = nodes.len().div_ceil(ASSEMBLY_CHUNKS).max(1);
    let parts = map_chunks(exec, nodes, chunk, |_, part| {
        let mut acc = DMatrix::<Complex64>::zeros(d, d);
        for (p, w) in part {
            eval.accumulate(p, *w, &mut acc)?;
        }
        Ok(acc)
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(tree_reduce(parts, |a, b| a + b).unwrap_or_else(|| DMatrix::zeros(d, d)))
}

/// Conjugate transpose.
pub fn adjoint(m: &OperatorMatrix) -> OperatorMatrix {
    m.adjoint()
}

/// `rho(p) M rho(p)^{-1}`, with `rho(p)^{-1} = rho(-p)` truncated.
pub fn quantum_translate(m: &OperatorMatrix, p: &PhasePoint, hermite: &HermiteConfig) -> Result<OperatorMatrix> {
    let trunc = m.trunc();
    if p.dim() != trunc.n() {
        return Err(Error::DimensionMismatch { expected: trunc.n(), found: p.dim() });
    }
    let y = p.y().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let eval = RhoEvaluator::new(trunc, hermite, y)?;
    let fwd = eval.matrix(p)?;
    let back = eval.matrix(&p.neg())?;
    OperatorMatrix::new(trunc.clone(), fwd * m.entries() * back)
}
