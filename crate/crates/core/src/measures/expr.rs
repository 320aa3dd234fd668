//! Expression trees of finite measures on phase space.

use num_complex::Complex64;

use super::smooth::{default_rule, SmoothMeasureSpec};
use crate::error::{Error, Result};
use crate::phase_space::PhasePoint;
use crate::quadrature::CompositeRule;

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureExpr {
    Dirac(PhasePoint),
    Smooth(SmoothMeasureSpec),
    /// The involution `mu -> mu~`: push-forward by `p -> -p`, weights conjugated.
    Reflect(Box<MeasureExpr>),
    /// Twisted convolution of two or more children, left to right.
    TConv(Vec<MeasureExpr>),
    Sum(Vec<(Complex64, MeasureExpr)>),
}

impl MeasureExpr {
    pub fn dirac(p: PhasePoint) -> Self {
        MeasureExpr::Dirac(p)
    }

    pub fn smooth(spec: SmoothMeasureSpec) -> Self {
        MeasureExpr::Smooth(spec)
    }

    pub fn reflected(child: MeasureExpr) -> Self {
        MeasureExpr::Reflect(Box::new(child))
    }

    pub fn tconv(children: Vec<MeasureExpr>) -> Result<Self> {
        if children.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "twisted convolution needs at least two children, got {}",
                children.len()
            )));
        }
        let e = MeasureExpr::TConv(children);
        e.dim()?;
        Ok(e)
    }

    pub fn sum(terms: Vec<(Complex64, MeasureExpr)>) -> Result<Self> {
        let e = MeasureExpr::Sum(terms);
        e.dim()?;
        Ok(e)
    }

    /// Phase-space dimension n shared by every node.
    pub fn dim(&self) -> Result<usize> {
        match self {
            MeasureExpr::Dirac(p) => Ok(p.dim()),
            MeasureExpr::Smooth(s) => Ok(s.n()),
            MeasureExpr::Reflect(c) => c.dim(),
            MeasureExpr::TConv(children) => {
                if children.len() < 2 {
                    return Err(Error::InvalidArgument("twisted convolution needs at least two children".into()));
                }
                common_dim(children.iter())
            }
            MeasureExpr::Sum(terms) => {
                if terms.is_empty() {
                    return Err(Error::InvalidArgument("weighted sum has no terms".into()));
                }
                for (w, _) in terms {
                    if !w.re.is_finite() || !w.im.is_finite() {
                        return Err(Error::NonFinite(format!("sum weight {w}")));
                    }
                }
                common_dim(terms.iter().map(|(_, c)| c))
            }
        }
    }

    /// Resolves `Reflect` on this node; the result has no `Reflect` at its root.
    pub fn reflect(&self) -> MeasureExpr {
        reflect_measure(self)
    }

    /// Removes every `Reflect` node from the tree.
    pub fn simplify(&self) -> MeasureExpr {
        match self {
            MeasureExpr::Dirac(_) | MeasureExpr::Smooth(_) => self.clone(),
            MeasureExpr::Reflect(c) => reflect_measure(&c.simplify()),
            MeasureExpr::TConv(children) => MeasureExpr::TConv(children.iter().map(|c| c.simplify()).collect()),
            MeasureExpr::Sum(terms) => MeasureExpr::Sum(terms.iter().map(|(w, c)| (*w, c.simplify())).collect()),
        }
    }

    /// Upper bound on the total variation, `|mu|(R^{2n})`.
    pub fn total_mass(&self, rules: impl Fn(usize) -> CompositeRule + Copy) -> Result<f64> {
        match self {
            MeasureExpr::Dirac(_) => Ok(1.0),
            MeasureExpr::Smooth(s) => s.mass(rules(s.chart().param_dim())),
            MeasureExpr::Reflect(c) => c.total_mass(rules),
            MeasureExpr::TConv(children) => children.iter().map(|c| c.total_mass(rules)).product(),
            MeasureExpr::Sum(terms) => terms.iter().map(|(w, c)| Ok(w.norm() * c.total_mass(rules)?)).sum(),
        }
    }

    /// Total variation bound with the default quadrature rules.
    pub fn mass(&self) -> Result<f64> {
        self.total_mass(default_rule)
    }

    pub fn contains_tconv(&self) -> bool {
        match self {
            MeasureExpr::Dirac(_) | MeasureExpr::Smooth(_) => false,
            MeasureExpr::Reflect(c) => c.contains_tconv(),
            MeasureExpr::TConv(_) => true,
            MeasureExpr::Sum(terms) => terms.iter().any(|(_, c)| c.contains_tconv()),
        }
    }
}

fn common_dim<'a>(mut it: impl Iterator<Item = &'a MeasureExpr>) -> Result<usize> {
    let first = it.next().expect("non-empty").dim()?;
    for c in it {
        let d = c.dim()?;
        if d != first {
            return Err(Error::DimensionMismatch { expected: first, found: d });
        }
    }
    Ok(first)
}

/// `mu -> mu~`. Diracs and chart images are negated, sum weights conjugated,
/// twisted-convolution factors reversed, and `Reflect(Reflect(m))` becomes `m`.
pub fn reflect_measure(m: &MeasureExpr) -> MeasureExpr {
    match m {
        MeasureExpr::Dirac(p) => MeasureExpr::Dirac(p.neg()),
        MeasureExpr::Smooth(s) => MeasureExpr::Smooth(s.reflect()),
        MeasureExpr::Reflect(c) => (**c).clone(),
        MeasureExpr::TConv(children) => MeasureExpr::TConv(children.iter().rev().map(reflect_measure).collect()),
        MeasureExpr::Sum(terms) => MeasureExpr::Sum(terms.iter().map(|(w, c)| (w.conj(), reflect_measure(c))).collect()),
    }
}
