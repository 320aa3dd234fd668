//! Composite Gauss-Legendre rules on intervals and parameter boxes.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Composite Gauss-Legendre rule: `panels` equal sub-intervals, `order` nodes each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompositeRule {
    pub panels: usize,
    pub order: usize,
}

impl CompositeRule {
    pub const fn new(panels: usize, order: usize) -> Self {
        Self { panels, order }
    }

    /// Default for curves: 64 panels of order 8.
    pub const CURVE: Self = Self::new(64, 8);
    /// Default per axis for charts of dimension two or more.
    pub const SURFACE: Self = Self::new(4, 8);

    pub fn doubled(self) -> Self {
        Self { panels: self.panels * 2, order: self.order }
    }

    pub fn nodes_per_axis(self) -> usize {
        self.panels * self.order
    }

    fn validate(self) -> Result<()> {
        if self.panels == 0 || self.order == 0 {
            return Err(Error::InvalidArgument(format!(
                "quadrature rule needs positive panels and order, got {}x{}",
                self.panels, self.order
            )));
        }
        Ok(())
    }

    /// Nodes and weights on `[a, b]`, ordered left to right.
    pub fn interval(self, a: f64, b: f64) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        if !(a.is_finite() && b.is_finite()) || b <= a {
            return Err(Error::InvalidArgument(format!("invalid interval [{a}, {b}]")));
        }
        let gl = GaussLegendre::new(NonZeroUsize::new(self.order).expect("validated"));
        let mut ref_pairs: Vec<(f64, f64)> = gl.as_node_weight_pairs().to_vec();
        ref_pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        let h = (b - a) / self.panels as f64;
        let mut out = Vec::with_capacity(self.nodes_per_axis());
        for panel in 0..self.panels {
            let mid = a + h * (panel as f64 + 0.5);
            for &(u, w) in &ref_pairs {
                out.push((mid + 0.5 * h * u, 0.5 * h * w));
            }
        }
        Ok(out)
    }

    /// Tensor-product nodes on a box; the last axis varies fastest.
    pub fn tensor(self, domain: &[(f64, f64)]) -> Result<Vec<(Vec<f64>, f64)>> {
        let axes = domain
            .iter()
            .map(|&(a, b)| self.interval(a, b))
            .collect::<Result<Vec<_>>>()?;
        let mut out: Vec<(Vec<f64>, f64)> = vec![(Vec::with_capacity(domain.len()), 1.0)];
        for axis in &axes {
            let mut next = Vec::with_capacity(out.len() * axis.len());
            for (prefix, w0) in &out {
                for &(s, w) in axis {
                    let mut p = prefix.clone();
                    p.push(s);
                    next.push((p, w0 * w));
                }
            }
            out = next;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = CompositeRule::new(3, 4);
        let s: f64 = rule.interval(-1.0, 2.0).unwrap().iter().map(|(x, w)| w * x.powi(7)).sum();
        assert!((s - (2f64.powi(8) - 1.0) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_box_volume() {
        let rule = CompositeRule::new(2, 3);
        let nodes = rule.tensor(&[(0.0, 1.0), (0.0, 2.0), (-1.0, 1.0)]).unwrap();
        assert_eq!(nodes.len(), 6 * 6 * 6);
        let vol: f64 = nodes.iter().map(|(_, w)| w).sum();
        assert!((vol - 4.0).abs() < 1e-13);
    }

    #[test]
    fn rejects_empty_rules() {
        assert!(CompositeRule::new(0, 8).interval(0.0, 1.0).is_err());
        assert!(CompositeRule::new(4, 8).interval(1.0, 1.0).is_err());
    }
}
