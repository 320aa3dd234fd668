//! Smooth measures `psi sigma` on chart images and their quadrature nodes.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::chart::Chart;
use super::density::Density;
use crate::error::{Error, Result};
use crate::phase_space::PhasePoint;
use crate::quadrature::CompositeRule;

/// Singular-value tolerance of the first-derivative rank check, relative to the largest.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothMeasureSpec {
    chart: Chart,
    density: Density,
}

/// One quadrature node: parameter, image point, and weight `w_GL * psi * sqrt(det g)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureNode {
    pub param: Vec<f64>,
    pub point: PhasePoint,
    pub weight: f64,
}

/// Singular values of the `2n x m` tangent matrix, descending.
pub(crate) fn tangent_singular_values(tangents: &[Vec<f64>]) -> Vec<f64> {
    let rows = tangents.first().map_or(0, |t| t.len());
    if tangents.len() == 1 {
        return vec![tangents[0].iter().map(|v| v * v).sum::<f64>().sqrt()];
    }
    let m = DMatrix::from_fn(rows, tangents.len(), |r, c| tangents[c][r]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

impl SmoothMeasureSpec {
    pub fn new(chart: Chart, density: Density) -> Result<Self> {
        density.validate(&chart.domain())?;
        Ok(Self { chart, density })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn density(&self) -> &Density {
        &self.density
    }

    pub fn n(&self) -> usize {
        self.chart.n()
    }

    /// Same nodes and density, image negated.
    pub fn reflect(&self) -> Self {
        Self { chart: self.chart.reflect(), density: self.density.clone() }
    }

    /// Quadrature nodes; errors if the chart is rank deficient at any node.
    pub fn nodes(&self, rule: CompositeRule) -> Result<Vec<MeasureNode>> {
        let grid = rule.tensor(&self.chart.domain())?;
        let mut out = Vec::with_capacity(grid.len());
        let mut sigma_min = Vec::with_capacity(grid.len());
        let mut sigma_max = 0.0f64;
        for (param, w) in grid {
            let jet = self.chart.jet(&param, 1)?;
            let sv = tangent_singular_values(&jet[1]);
            let volume: f64 = sv.iter().product();
            sigma_max = sigma_max.max(sv[0]);
            sigma_min.push(*sv.last().expect("m >= 1"));
            let point = PhasePoint::from_flat(&jet[0][0])?;
            let weight = w * self.density.eval(&param) * volume;
            if !weight.is_finite() || !point.is_finite() {
                return Err(Error::NonFinite(format!("measure node at parameter {param:?}")));
            }
            out.push(MeasureNode { param, point, weight });
        }
        if let Some(index) = sigma_min.iter().position(|&s| !(s > RANK_TOLERANCE * sigma_max)) {
            return Err(Error::RankDeficient { index, param: out[index].param.clone() });
        }
        Ok(out)
    }

    /// `int f psi d sigma`.
    pub fn integral<F>(&self, rule: CompositeRule, f: F) -> Result<Complex64>
    where
        F: Fn(&PhasePoint) -> Complex64,
    {
        let mut acc = Complex64::new(0.0, 0.0);
        for node in self.nodes(rule)? {
            let v = f(&node.point);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite(format!("integrand at parameter {:?}", node.param)));
            }
            acc += node.weight * v;
        }
        Ok(acc)
    }

    /// `int |psi| d sigma`.
    pub fn mass(&self, rule: CompositeRule) -> Result<f64> {
        Ok(self.nodes(rule)?.iter().map(|n| n.weight.abs()).sum())
    }
}

/// `int f psi d sigma` with the default rule for the chart dimension.
pub fn measure_integral<F>(spec: &SmoothMeasureSpec, f: F) -> Result<Complex64>
where
    F: Fn(&PhasePoint) -> Complex64,
{
    spec.integral(default_rule(spec.chart().param_dim()), f)
}

/// 64 x 8 Gauss-Legendre for curves, 4 x 8 per axis otherwise.
pub fn default_rule(param_dim: usize) -> CompositeRule {
    if param_dim == 1 {
        CompositeRule::CURVE
    } else {
        CompositeRule::SURFACE
    }
}
