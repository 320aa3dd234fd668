//! Phase-space points and the reduced Heisenberg group.
//!
//! A point of phase space is a pair `(x, y)` with `x, y` in R^n. The reduced
//! Heisenberg group consists of triples `(x, y, z)` with `|z| = 1` and the
//! product
//!
//! ```text
//! (x, y, z)(x', y', z') = (x + x', y + y', z z' exp(pi i (x.y' - y.x')))
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit-modulus tolerance for the central factor of a group element.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// A point `(x, y)` of phase space R^{2n}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidArgument("phase-space dimension must be at least 1".into()));
        }
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: y.len() });
        }
        Ok(Self { x, y })
    }

    /// Point of R^2 (n = 1).
    pub fn planar(x: f64, y: f64) -> Self {
        Self { x: vec![x], y: vec![y] }
    }

    pub fn origin(n: usize) -> Self {
        Self { x: vec![0.0; n], y: vec![0.0; n] }
    }

    /// Builds a point from the flat layout `[x_1..x_n, y_1..y_n]`.
    pub fn from_flat(v: &[f64]) -> Result<Self> {
        if v.is_empty() || v.len() % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "flat phase-space coordinates need even positive length, got {}",
                v.len()
            )));
        }
        let n = v.len() / 2;
        Self::new(v[..n].to_vec(), v[n..].to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.y);
        v
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn neg(&self) -> Self {
        Self {
            x: self.x.iter().map(|v| -v).collect(),
            y: self.y.iter().map(|v| -v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a + b).collect(),
            y: self.y.iter().zip(&other.y).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            x: self.x.iter().map(|v| s * v).collect(),
            y: self.y.iter().map(|v| s * v).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }

    /// Euclidean norm in R^{2n}.
    pub fn norm(&self) -> f64 {
        self.x.iter().chain(&self.y).map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }
}

/// The symplectic form `x.y' - y.x'`.
pub fn symplectic_phase(p: &PhasePoint, q: &PhasePoint) -> Result<f64> {
    p.check_dim(q)?;
    Ok(symplectic_unchecked(p, q))
}

pub(crate) fn symplectic_unchecked(p: &PhasePoint, q: &PhasePoint) -> f64 {
    let xy: f64 = p.x.iter().zip(&q.y).map(|(a, b)| a * b).sum();
    let yx: f64 = p.y.iter().zip(&q.x).map(|(a, b)| a * b).sum();
    xy - yx
}

/// `exp(pi i s)` renormalized onto the unit circle.
pub fn unit_phase(s: f64) -> Complex64 {
    let (sin, cos) = (PI * s).sin_cos();
    renormalize(Complex64::new(cos, sin))
}

fn renormalize(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 || !r.is_finite() {
        z
    } else {
        z / r
    }
}

/// Element `(x, y, z)` of the reduced Heisenberg group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergElement {
    p: PhasePoint,
    z: Complex64,
}

impl HeisenbergElement {
    pub fn new(p: PhasePoint, z: Complex64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() || (z.norm() - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "central factor must have unit modulus within {UNIT_TOLERANCE:e}, got |z| = {}",
                z.norm()
            )));
        }
        Ok(Self { p, z })
    }

    pub fn identity(n: usize) -> Self {
        Self { p: PhasePoint::origin(n), z: Complex64::new(1.0, 0.0) }
    }

    pub fn point(&self) -> &PhasePoint {
        &self.p
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    /// The group product; the central factor is renormalized after every multiplication.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let p = self.p.add(&other.p)?;
        let twist = unit_phase(symplectic_unchecked(&self.p, &other.p));
        Ok(Self { p, z: renormalize(self.z * other.z * twist) })
    }

    /// `(x, y, z)^{-1} = (-x, -y, conj z)`; the twist `exp(pi i (x.(-y) - y.(-x)))` is 1.
    pub fn inverse(&self) -> Self {
        Self { p: self.p.neg(), z: self.z.conj() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(x: f64, y: f64, z: Complex64) -> HeisenbergElement {
        HeisenbergElement::new(PhasePoint::planar(x, y), z).unwrap()
    }

    const ONE: Complex64 = Complex64::new(1.0, 0.0);

    #[test]
    fn symplectic_examples() {
        let p = PhasePoint::planar(1.0, 0.0);
        let q = PhasePoint::planar(0.0, 1.0);
        assert_eq!(symplectic_phase(&p, &q).unwrap(), 1.0);
        assert_eq!(symplectic_phase(&p, &p).unwrap(), 0.0);
        let a = PhasePoint::planar(1.0, 2.0);
        let b = PhasePoint::planar(3.0, 4.0);
        assert_eq!(symplectic_phase(&a, &b).unwrap(), -2.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let p = PhasePoint::planar(1.0, 0.0);
        let q = PhasePoint::origin(2);
        assert!(matches!(
            symplectic_phase(&p, &q),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        ));
        assert!(PhasePoint::new(vec![1.0], vec![1.0, 2.0]).is_err());
        assert!(PhasePoint::new(vec![], vec![]).is_err());
    }

    #[test]
    fn group_mul_examples() {
        let g = el(1.0, 0.0, ONE).mul(&el(0.0, 1.0, ONE)).unwrap();
        assert_eq!(g.point(), &PhasePoint::planar(1.0, 1.0));
        assert!((g.z() - Complex64::new(-1.0, 0.0)).norm() < 1e-15);

        let i = Complex64::new(0.0, 1.0);
        let c = el(0.0, 0.0, i).mul(&el(0.0, 0.0, -i)).unwrap();
        assert!((c.z() - ONE).norm() < 1e-15);

        let h = el(1.0, 2.0, ONE).mul(&el(3.0, 4.0, ONE)).unwrap();
        assert_eq!(h.point(), &PhasePoint::planar(4.0, 6.0));
        assert!((h.z() - ONE).norm() < 1e-14);
    }

    #[test]
    fn inverse_examples() {
        let g = el(0.3, -0.7, ONE);
        let inv = g.inverse();
        assert_eq!(inv.point(), &PhasePoint::planar(-0.3, 0.7));
        assert_eq!(inv.z(), ONE);

        let z = Complex64::from_polar(1.0, 0.4);
        assert_eq!(el(0.0, 0.0, z).inverse().z(), z.conj());

        let m = el(1.0, 0.0, -ONE).inverse();
        assert_eq!(m.point(), &PhasePoint::planar(-1.0, 0.0));
        assert_eq!(m.z(), -ONE);
    }

    #[test]
    fn rejects_non_unit_center() {
        assert!(HeisenbergElement::new(PhasePoint::planar(0.0, 0.0), Complex64::new(1.1, 0.0)).is_err());
    }
}
