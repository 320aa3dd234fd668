//! Matrix elements of the Schrodinger representation in the Hermite basis.
//!
//! For n = 1 the operator `rho(x, y, 1)` acts by
//! `phi(t) -> exp(pi i (x y + 2 y t)) phi(t + x)`, and its matrix element is
//!
//! ```text
//! A_jk(x, y) = int exp(pi i (x y + 2 y t)) h_k(t + x) h_j(t) dt
//!            = int exp(2 pi i y u) h_k(u + x/2) h_j(u - x/2) du      (u = t + x/2)
//! ```
//!
//! The product `h_k(u + x/2) h_j(u - x/2)` carries the envelope
//! `exp(-x^2/4) exp(-u^2)`, so Gauss-Hermite quadrature in `u` is exact for the
//! polynomial part and only the oscillation `exp(2 pi i y u)` drives the order.
//!
//! The fast path uses the closed form through normalized Laguerre functions:
//! `rho(x, y, 1)` is the oscillator displacement with `alpha = (-x + 2 pi i y)/sqrt 2`.

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{BasisTruncation, OperatorMatrix};
use super::functions::{hermite_functions_into, ln_factorials, GaussHermite, DEFAULT_MAX_INDEX};
use crate::error::{Error, Result};
use crate::phase_space::PhasePoint;

/// How one-dimensional matrix elements are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoBackend {
    /// Gauss-Hermite quadrature with a convergence probe.
    #[default]
    Quadrature,
    /// Closed-form Laguerre recurrence.
    Laguerre,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HermiteConfig {
    pub backend: RhoBackend,
    /// Fixed Gauss-Hermite order; `None` selects it from `N` and `|y|`.
    pub quad_order: Option<usize>,
    /// Extra order per unit of `(pi |y|)^2`.
    pub oscillation_padding: f64,
    pub convergence_check: bool,
    /// Largest accepted change of probe entries against a higher order.
    pub convergence_tol: f64,
    /// Largest accepted `|x_i|`, `|y_i|`.
    pub coordinate_box: f64,
    pub max_index: usize,
}

impl Default for HermiteConfig {
    fn default() -> Self {
        Self {
            backend: RhoBackend::Quadrature,
            quad_order: None,
            oscillation_padding: 2.0,
            convergence_check: true,
            convergence_tol: 1e-10,
            coordinate_box: 16.0,
            max_index: DEFAULT_MAX_INDEX,
        }
    }
}

impl HermiteConfig {
    pub fn laguerre() -> Self {
        Self { backend: RhoBackend::Laguerre, ..Self::default() }
    }

    /// Gauss-Hermite order for `n_basis` functions and oscillation `|y| <= y_bound`.
    pub fn quadrature_order(&self, n_basis: usize, y_bound: f64) -> usize {
        if let Some(q) = self.quad_order {
            return q.max(1);
        }
        let pad = (self.oscillation_padding * (PI * y_bound).powi(2)).ceil() as usize;
        round_up((2 * n_basis).max(64) + pad, 16)
    }
}

fn round_up(v: usize, m: usize) -> usize {
    v.div_ceil(m) * m
}

enum Kernel {
    Quadrature { rule: Arc<GaussHermite>, check: Option<Arc<GaussHermite>> },
    Laguerre { ln_fact: Vec<f64> },
}

/// Evaluates `rho(p)` matrices for one truncation, sharing rules across calls.
pub struct RhoEvaluator {
    trunc: BasisTruncation,
    n_basis: usize,
    coordinate_box: f64,
    tol: f64,
    kernel: Kernel,
}

impl RhoEvaluator {
    /// `y_bound` bounds every `|y_i|` that will be evaluated; it fixes the quadrature order.
    pub fn new(trunc: &BasisTruncation, cfg: &HermiteConfig, y_bound: f64) -> Result<Self> {
        let n_basis = trunc.per_axis();
        if n_basis > cfg.max_index {
            return Err(Error::InvalidArgument(format!(
                "N = {n_basis} exceeds the Hermite index limit {}",
                cfg.max_index
            )));
        }
        if !y_bound.is_finite() || y_bound > cfg.coordinate_box {
            return Err(Error::InvalidArgument(format!(
                "|y| bound {y_bound} outside the coordinate box {}",
                cfg.coordinate_box
            )));
        }
        let kernel = match cfg.backend {
            RhoBackend::Quadrature => {
                let q = cfg.quadrature_order(n_basis, y_bound);
                let check = if cfg.convergence_check {
                    Some(GaussHermite::cached(round_up(q + (q / 4).max(16), 16))?)
                } else {
                    None
                };
                Kernel::Quadrature { rule: GaussHermite::cached(q)?, check }
            }
            RhoBackend::Laguerre => Kernel::Laguerre { ln_fact: ln_factorials(n_basis) },
        };
        Ok(Self {
            trunc: trunc.clone(),
            n_basis,
            coordinate_box: cfg.coordinate_box,
            tol: cfg.convergence_tol,
            kernel,
        })
    }

    pub fn trunc(&self) -> &BasisTruncation {
        &self.trunc
    }

    /// Gauss-Hermite order in use, if any.
    pub fn quadrature_order(&self) -> Option<usize> {
        match &self.kernel {
            Kernel::Quadrature { rule, .. } => Some(rule.order()),
            Kernel::Laguerre { .. } => None,
        }
    }

    fn check_box(&self, v: f64) -> Result<()> {
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("phase-space coordinate {v}")));
        }
        if v.abs() > self.coordinate_box {
            return Err(Error::InvalidArgument(format!(
                "coordinate {v} outside the box |.| <= {}",
                self.coordinate_box
            )));
        }
        Ok(())
    }

    /// One-dimensional `N x N` matrix `A(x, y)`.
    pub fn axis_matrix(&self, x: f64, y: f64) -> Result<DMatrix<Complex64>> {
        self.check_box(x)?;
        self.check_box(y)?;
        if x == 0.0 && y == 0.0 {
            return Ok(DMatrix::identity(self.n_basis, self.n_basis));
        }
        match &self.kernel {
            Kernel::Quadrature { rule, check } => {
                let m = quadrature_matrix(rule, x, y, self.n_basis);
                if let Some(check) = check {
                    let change = probe_change(&m, check, x, y, self.n_basis);
                    if change > self.tol {
                        return Err(Error::QuadratureNotConverged { order: rule.order(), x, y, change });
                    }
                }
                Ok(m)
            }
            Kernel::Laguerre { ln_fact } => Ok(laguerre_matrix(x, y, self.n_basis, ln_fact)),
        }
    }

    /// Full matrix of `rho(p, 1)` in the graded ordering.
    pub fn matrix(&self, p: &PhasePoint) -> Result<DMatrix<Complex64>> {
        if p.dim() != self.trunc.n() {
            return Err(Error::DimensionMismatch { expected: self.trunc.n(), found: p.dim() });
        }
        if self.trunc.n() == 1 {
            return self.axis_matrix(p.x()[0], p.y()[0]);
        }
        let axes = p
            .x()
            .iter()
            .zip(p.y())
            .map(|(&x, &y)| self.axis_matrix(x, y))
            .collect::<Result<Vec<_>>>()?;
        let idx = self.trunc.multi_indices();
        let d = idx.len();
        Ok(DMatrix::from_fn(d, d, |r, c| {
            axes.iter()
                .enumerate()
                .fold(Complex64::new(1.0, 0.0), |acc, (i, a)| acc * a[(idx[r][i], idx[c][i])])
        }))
    }

    /// `acc += w * rho(p)`.
    pub fn accumulate(&self, p: &PhasePoint, w: Complex64, acc: &mut DMatrix<Complex64>) -> Result<()> {
        let m = self.matrix(p)?;
        acc.zip_apply(&m, |a, b| *a += w * b);
        Ok(())
    }
}

/// Hermite values at `shift + u_i`, one column per node, scaled by `weight(i)`.
fn hermite_table(rule: &GaussHermite, shift: f64, n_basis: usize, weight: impl Fn(usize) -> f64) -> Vec<f64> {
    let q = rule.order();
    let mut table = vec![0.0; n_basis * q];
    for (i, col) in table.chunks_mut(n_basis).enumerate() {
        hermite_functions_into(rule.nodes[i] + shift, col);
        let w = weight(i);
        if w != 1.0 {
            col.iter_mut().for_each(|v| *v *= w);
        }
    }
    table
}

/// `C = A B^T` for column-major `n x q` tables `A`, `B`.
fn gemm_abt(a: &[f64], b: &[f64], n: usize, q: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    // SAFETY: every slice holds exactly n*q (inputs) or n*n (output) elements
    // and the strides below address only those elements.
    unsafe {
        matrixmultiply::dgemm(
            n,
            q,
            n,
            1.0,
            a.as_ptr(),
            1,
            n as isize,
            b.as_ptr(),
            n as isize,
            1,
            0.0,
            c.as_mut_ptr(),
            1,
            n as isize,
        );
    }
    c
}

fn quadrature_matrix(rule: &GaussHermite, x: f64, y: f64, n_basis: usize) -> DMatrix<Complex64> {
    let q = rule.order();
    let omega = 2.0 * PI * y;
    let minus = hermite_table(rule, -0.5 * x, n_basis, |_| 1.0);
    let re_w = |i: usize| rule.scaled_weights[i] * (omega * rule.nodes[i]).cos();
    let im_w = |i: usize| rule.scaled_weights[i] * (omega * rule.nodes[i]).sin();
    let plus_re = hermite_table(rule, 0.5 * x, n_basis, re_w);
    let re = gemm_abt(&minus, &plus_re, n_basis, q);
    let im = if y == 0.0 {
        vec![0.0; n_basis * n_basis]
    } else {
        let plus_im = hermite_table(rule, 0.5 * x, n_basis, im_w);
        gemm_abt(&minus, &plus_im, n_basis, q)
    };
    DMatrix::from_fn(n_basis, n_basis, |j, k| Complex64::new(re[j + k * n_basis], im[j + k * n_basis]))
}

/// Largest change of the hardest entries when the order is raised.
fn probe_change(m: &DMatrix<Complex64>, check: &GaussHermite, x: f64, y: f64, n_basis: usize) -> f64 {
    let last = n_basis - 1;
    let mid = n_basis / 2;
    let probes = [(last, last), (0, last), (last, 0), (mid, mid), (last, mid)];
    let omega = 2.0 * PI * y;
    let mut hm = vec![0.0; n_basis];
    let mut hp = vec![0.0; n_basis];
    let mut sums = [Complex64::new(0.0, 0.0); 5];
    for (i, &u) in check.nodes.iter().enumerate() {
        hermite_functions_into(u - 0.5 * x, &mut hm);
        hermite_functions_into(u + 0.5 * x, &mut hp);
        let c = Complex64::from_polar(check.scaled_weights[i], omega * u);
        for (s, &(j, k)) in sums.iter_mut().zip(&probes) {
            *s += c * (hm[j] * hp[k]);
        }
    }
    probes
        .iter()
        .zip(&sums)
        .map(|(&(j, k), s)| (m[(j, k)] - s).norm())
        .fold(0.0, f64::max)
}

const RESCALE_AT: f64 = 1e150;
const LN_RESCALE: f64 = 345.387_763_949_106_8;

/// Closed-form matrix via normalized Laguerre functions
/// `l_k^(m)(X) = sqrt(k!/(k+m)!) X^{m/2} exp(-X/2) L_k^(m)(X)`, `X = |alpha|^2`.
fn laguerre_matrix(x: f64, y: f64, n_basis: usize, ln_fact: &[f64]) -> DMatrix<Complex64> {
    let alpha = Complex64::new(-x / SQRT_2, 2.0 * PI * y / SQRT_2);
    let big_x = alpha.norm_sqr();
    let theta = if big_x == 0.0 { 0.0 } else { alpha.arg() };
    let mut out = DMatrix::<Complex64>::zeros(n_basis, n_basis);
    let mut ell = vec![0.0; n_basis];
    for m in 0..n_basis {
        let len = n_basis - m;
        let ell = &mut ell[..len];
        if big_x == 0.0 {
            ell.fill(if m == 0 { 1.0 } else { 0.0 });
        } else {
            let mf = m as f64;
            let mut log_scale = 0.5 * mf * big_x.ln() - 0.5 * big_x - 0.5 * ln_fact[m];
            let mut factor = log_scale.exp();
            let (mut prev, mut cur) = (0.0, 1.0);
            for k in 0..len {
                ell[k] = if factor > 1e-290 {
                    cur * factor
                } else if cur == 0.0 {
                    0.0
                } else {
                    cur.signum() * (log_scale + cur.abs().ln()).exp()
                };
                let kf = k as f64;
                let next = ((2.0 * kf + mf + 1.0 - big_x) * cur - (kf * (kf + mf)).sqrt() * prev)
                    / ((kf + 1.0) * (kf + mf + 1.0)).sqrt();
                prev = cur;
                cur = next;
                if cur.abs() > RESCALE_AT {
                    cur /= RESCALE_AT;
                    prev /= RESCALE_AT;
                    log_scale += LN_RESCALE;
                    factor = log_scale.exp();
                }
            }
        }
        let lower = Complex64::from_polar(1.0, m as f64 * theta);
        let upper = if m % 2 == 0 { lower.conj() } else { -lower.conj() };
        for (k, &v) in ell.iter().enumerate() {
            out[(k + m, k)] = lower * v;
            if m > 0 {
                out[(k, k + m)] = upper * v;
            }
        }
    }
    out
}

/// `rho(x, y, 1)` truncated to `h_0 .. h_{N-1}` (n = 1).
pub fn rho_matrix_1d(x: f64, y: f64, n_basis: usize, cfg: &HermiteConfig) -> Result<OperatorMatrix> {
    let trunc = BasisTruncation::one_dim(n_basis)?;
    let eval = RhoEvaluator::new(&trunc, cfg, y.abs())?;
    let m = eval.axis_matrix(x, y)?;
    OperatorMatrix::new(trunc, m)
}

/// `rho(p, 1)` on a tensor truncation; entries are products of one-dimensional elements.
pub fn rho_matrix(p: &PhasePoint, trunc: &BasisTruncation, cfg: &HermiteConfig) -> Result<OperatorMatrix> {
    let y_bound = p.y().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let eval = RhoEvaluator::new(trunc, cfg, if y_bound.is_finite() { y_bound } else { 0.0 })?;
    OperatorMatrix::new(trunc.clone(), eval.matrix(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn both() -> [HermiteConfig; 2] {
        [HermiteConfig::default(), HermiteConfig::laguerre()]
    }

    #[test]
    fn origin_is_identity() {
        for cfg in both() {
            let m = rho_matrix_1d(0.0, 0.0, 12, &cfg).unwrap();
            let err = (m.entries() - DMatrix::<Complex64>::identity(12, 12)).norm();
            assert!(err < 1e-12, "{:?}: {err}", cfg.backend);
        }
    }

    #[test]
    fn gaussian_entries() {
        for cfg in both() {
            let m = rho_matrix_1d(1.0, 0.0, 4, &cfg).unwrap();
            assert!((m.get(0, 0) - Complex64::new((-0.25f64).exp(), 0.0)).norm() < 1e-12);
            assert!((m.get(0, 0).re - 0.778_800_78).abs() < 1e-8);
            let m = rho_matrix_1d(0.0, 0.2, 4, &cfg).unwrap();
            let expect = (-(PI * 0.2).powi(2)).exp();
            assert!((m.get(0, 0) - Complex64::new(expect, 0.0)).norm() < 1e-12);
            assert!((m.get(0, 0).re - 0.673_826).abs() < 1e-6);
        }
    }

    #[test]
    fn first_off_diagonal() {
        // <rho(x,0) h_0, h_1> = -x/sqrt(2) exp(-x^2/4)
        for cfg in both() {
            let x = 0.9;
            let m = rho_matrix_1d(x, 0.0, 3, &cfg).unwrap();
            let expect = -x / SQRT_2 * (-x * x / 4.0).exp();
            assert!((m.get(1, 0).re - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn two_dimensional_product() {
        let trunc = BasisTruncation::new(2, 4).unwrap();
        let p = PhasePoint::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        let m = rho_matrix(&p, &trunc, &HermiteConfig::default()).unwrap();
        assert!((m.get(0, 0).re - (-0.25f64).exp()).abs() < 1e-12);
        assert!(rho_matrix(&PhasePoint::origin(2), &trunc, &HermiteConfig::default())
            .unwrap()
            .sub(&OperatorMatrix::identity(trunc.clone()))
            .unwrap()
            .frobenius()
            < 1e-12);
    }

    #[test]
    fn one_dim_consistency() {
        let trunc = BasisTruncation::one_dim(6).unwrap();
        let cfg = HermiteConfig::default();
        let a = rho_matrix(&PhasePoint::planar(0.4, -0.6), &trunc, &cfg).unwrap();
        let b = rho_matrix_1d(0.4, -0.6, 6, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn low_order_is_reported() {
        let cfg = HermiteConfig { quad_order: Some(20), ..HermiteConfig::default() };
        let err = rho_matrix_1d(0.5, 3.0, 16, &cfg).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { order: 20, .. }), "{err}");
    }

    #[test]
    fn outside_box_is_rejected() {
        assert!(rho_matrix_1d(17.0, 0.0, 4, &HermiteConfig::default()).is_err());
        assert!(rho_matrix_1d(0.0, f64::NAN, 4, &HermiteConfig::laguerre()).is_err());
        assert!(rho_matrix_1d(0.0, 0.0, 0, &HermiteConfig::default()).is_err());
    }
}
