//! The phase weight `phi_k` of k-fold twisted convolution.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase_space::{symplectic_unchecked, unit_phase, PhasePoint};

/// Points `(p_1, .., p_k)` sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseChain {
    points: Vec<PhasePoint>,
}

impl PhaseChain {
    pub fn new(points: Vec<PhasePoint>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidArgument("phase chain needs at least one point".into()))?;
        for p in &points[1..] {
            first.check_dim(p)?;
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `phi_k`, left-associated:
/// `phi_k = phi_{k-1} exp(pi i ((x_1 + .. + x_{k-1}).y_k - (y_1 + .. + y_{k-1}).x_k))`, `phi_1 = 1`.
pub fn phase_phi_k(chain: &PhaseChain) -> Complex64 {
    let (phi, _) = phi_and_sum(chain.points());
    phi
}

/// `(phi_k, p_1 + .. + p_k)` for points of equal dimension.
pub(crate) fn phi_and_sum(points: &[PhasePoint]) -> (Complex64, PhasePoint) {
    let mut phi = Complex64::new(1.0, 0.0);
    let mut sum = points[0].clone();
    for p in &points[1..] {
        phi = renormalized(phi * unit_phase(symplectic_unchecked(&sum, p)));
        sum = sum.add(p).expect("chain dimensions checked");
    }
    (phi, sum)
}

fn renormalized(z: Complex64) -> Complex64 {
    z / z.norm()
}

/// `phi_2(p, q) = exp(pi i (x.y' - y.x'))`.
pub fn phase_phi_2(p: &PhasePoint, q: &PhasePoint) -> Result<Complex64> {
    p.check_dim(q)?;
    Ok(unit_phase(symplectic_unchecked(p, q)))
}
