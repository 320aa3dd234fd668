//! `W(mu_1 # .. # mu_k)` by nested quadrature over the product of the factors.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::phase::phi_and_sum;
use crate::error::{Error, Result};
use crate::hermite::{BasisTruncation, HermiteConfig, OperatorMatrix, RhoEvaluator};
use crate::measures::MeasureExpr;
use crate::parallel::{map_each, tree_reduce};
use crate::phase_space::PhasePoint;
use crate::weyl::{WeylConfig, ASSEMBLY_CHUNKS};

/// Quadrature nodes of one factor: Diracs have a single unit node.
fn factor_nodes(m: &MeasureExpr, cfg: &WeylConfig) -> Result<Vec<(PhasePoint, f64)>> {
    match m.simplify() {
        MeasureExpr::Dirac(p) => Ok(vec![(p, 1.0)]),
        MeasureExpr::Smooth(spec) => {
            let rule = if spec.chart().param_dim() == 1 { cfg.direct_rule } else { cfg.surface_rule };
            Ok(spec.nodes(rule)?.into_iter().map(|n| (n.point, n.weight)).collect())
        }
        MeasureExpr::TConv(_) => Err(Error::NestedTConv),
        MeasureExpr::Sum(_) => Err(Error::InvalidArgument(
            "direct twisted convolution accepts Dirac and smooth factors only; expand sums by linearity".into(),
        )),
        MeasureExpr::Reflect(_) => unreachable!("simplify removes reflections"),
    }
}

/// `int .. int rho(p_1 + .. + p_k) phi_k(p_1, .., p_k) d mu_1 .. d mu_k`.
pub fn tconv_weyl_direct(children: &[MeasureExpr], trunc: &BasisTruncation, cfg: &WeylConfig) -> Result<OperatorMatrix> {
    if children.len() < 2 {
        return Err(Error::InvalidArgument("twisted convolution needs at least two factors".into()));
    }
    for c in children {
        let d = c.dim()?;
        if d != trunc.n() {
            return Err(Error::DimensionMismatch { expected: trunc.n(), found: d });
        }
    }
    let factors = children.iter().map(|c| factor_nodes(c, cfg)).collect::<Result<Vec<_>>>()?;
    let required: u128 = factors.iter().map(|f| f.len() as u128).product();
    if required > cfg.direct_budget {
        return Err(Error::BudgetExceeded { required, budget: cfg.direct_budget });
    }
    let total = required as usize;
    let y_bound: f64 = factors
        .iter()
        .map(|f| f.iter().flat_map(|(p, _)| p.y()).fold(0.0f64, |a, v| a.max(v.abs())))
        .sum();
    let hermite = HermiteConfig { backend: cfg.direct_backend, ..cfg.hermite.clone() };
    let eval = RhoEvaluator::new(trunc, &hermite, y_bound.min(hermite.coordinate_box))?;

    let d = trunc.size();
    let chunk = total.div_ceil(ASSEMBLY_CHUNKS).max(1);
    let starts: Vec<usize> = (0..total).step_by(chunk).collect();
    let parts = map_each(cfg.execution, &starts, |&start| {
        let mut acc = DMatrix::<Complex64>::zeros(d, d);
        let mut points = Vec::with_capacity(factors.len());
        for flat in start..(start + chunk).min(total) {
            // mixed-radix digits, last factor fastest
            points.clear();
            let mut rest = flat;
            let mut weight = 1.0;
            let mut digits = vec![0usize; factors.len()];
            for (i, f) in factors.iter().enumerate().rev() {
                digits[i] = rest % f.len();
                rest /= f.len();
            }
            for (f, &j) in factors.iter().zip(&digits) {
                points.push(f[j].0.clone());
                weight *= f[j].1;
            }
            let (phi, sum) = phi_and_sum(&points);
            eval.accumulate(&sum, phi * weight, &mut acc)?;
        }
        Ok(acc)
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    let entries = tree_reduce(parts, |a, b| a + b).unwrap_or_else(|| DMatrix::zeros(d, d));
    OperatorMatrix::new(trunc.clone(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::rho_matrix;

    #[test]
    fn dirac_factors() {
        let t = BasisTruncation::one_dim(10).unwrap();
        let cfg = WeylConfig::default();
        let o = MeasureExpr::Dirac(PhasePoint::origin(1));
        let id = tconv_weyl_direct(&[o.clone(), o], &t, &cfg).unwrap();
        assert!(id.sub(&OperatorMatrix::identity(t.clone())).unwrap().frobenius() < 1e-13);

        let p = PhasePoint::planar(0.3, 0.5);
        let q = PhasePoint::planar(-0.2, 0.4);
        let m = tconv_weyl_direct(&[MeasureExpr::Dirac(p.clone()), MeasureExpr::Dirac(q.clone())], &t, &cfg).unwrap();
        let z = crate::phase_space::unit_phase(0.3 * 0.4 - 0.5 * -0.2);
        let expect = rho_matrix(&p.add(&q).unwrap(), &t, &cfg.hermite).unwrap().scale(z);
        assert!(m.sub(&expect).unwrap().frobenius() < 1e-10);
    }

    #[test]
    fn nested_and_budget_errors() {
        let t = BasisTruncation::one_dim(4).unwrap();
        let o = MeasureExpr::Dirac(PhasePoint::origin(1));
        let nested = MeasureExpr::tconv(vec![o.clone(), o.clone()]).unwrap();
        let cfg = WeylConfig::default();
        assert_eq!(tconv_weyl_direct(&[o.clone(), nested], &t, &cfg).unwrap_err(), Error::NestedTConv);
        let tight = WeylConfig { direct_budget: 0, ..WeylConfig::default() };
        assert!(matches!(
            tconv_weyl_direct(&[o.clone(), o], &t, &tight),
            Err(Error::BudgetExceeded { required: 1, budget: 0 })
        ));
    }
}
