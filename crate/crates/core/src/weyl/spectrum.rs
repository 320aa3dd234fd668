//! Singular values and the truncation-trend compactness probe.

use serde::{Deserialize, Serialize};

use super::{weyl_matrix, WeylConfig};
use crate::error::{Error, Result};
use crate::hermite::{BasisTruncation, OperatorMatrix};
use crate::measures::MeasureExpr;

/// Singular values, descending.
pub fn singular_values(m: &OperatorMatrix) -> Result<Vec<f64>> {
    if m.entries().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("operator matrix has non-finite entries".into()));
    }
    let svd = m.entries().clone().try_svd(false, false, f64::EPSILON, 0).ok_or(Error::Svd)?;
    let mut sv: Vec<f64> = svd.singular_values.iter().map(|v| v.max(0.0)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Decaying,
    NonDecaying,
    Inconclusive,
}

/// Classification thresholds relative to `sigma_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanThresholds {
    pub tau_dec: f64,
    pub tau_flat: f64,
}

impl Default for ScanThresholds {
    fn default() -> Self {
        Self { tau_dec: 1e-3, tau_flat: 1e-1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub sigma_k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub n_list: Vec<usize>,
    pub probe_k: usize,
    pub spectra: Vec<Vec<f64>>,
    pub rows: Vec<ProbeRow>,
    /// `sigma_{ceil(N/2)} / sigma_1` per `N`.
    pub mid_ratios: Vec<f64>,
    pub trend: Trend,
    pub thresholds: ScanThresholds,
}

impl SpectrumReport {
    /// CSV with columns `N,k,sigma_k`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,k,sigma_k\n");
        for r in &self.rows {
            out.push_str(&format!("{},{},{:e}\n", r.n, r.k, r.sigma_k));
        }
        out
    }
}

/// Trend of `sigma_{ceil(N/2)}` over the scan.
pub fn classify(spectra: &[Vec<f64>], th: ScanThresholds) -> Trend {
    let mids: Vec<(f64, f64)> = spectra
        .iter()
        .map(|s| (s[s.len().div_ceil(2) - 1], s[0]))
        .collect();
    let decreasing = mids.windows(2).all(|w| w[1].0 < w[0].0);
    let (last, last_top) = *mids.last().expect("non-empty scan");
    if decreasing && last < th.tau_dec * last_top {
        Trend::Decaying
    } else if mids.iter().all(|&(m, top)| m >= th.tau_flat * top) {
        Trend::NonDecaying
    } else {
        Trend::Inconclusive
    }
}

/// Singular values of `W_N(m)` over `n_list`, probed at `k in {1, K, ceil(N/2)}`.
pub fn compactness_scan(
    m: &MeasureExpr,
    n_list: &[usize],
    probe_k: usize,
    thresholds: ScanThresholds,
    cfg: &WeylConfig,
) -> Result<SpectrumReport> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(format!("N list must be non-empty and increasing, got {n_list:?}")));
    }
    let n = m.dim()?;
    let sizes: Vec<usize> = n_list.iter().map(|&per| per.pow(n as u32)).collect();
    let min_size = *sizes.iter().min().expect("non-empty");
    if probe_k == 0 || probe_k >= min_size {
        return Err(Error::InvalidArgument(format!("probe index K = {probe_k} must satisfy 1 <= K < {min_size}")));
    }
    if !(thresholds.tau_dec > 0.0 && thresholds.tau_flat > 0.0) {
        return Err(Error::InvalidArgument("scan thresholds must be positive".into()));
    }
    let mut spectra = Vec::with_capacity(n_list.len());
    let mut rows = Vec::new();
    for &per in n_list {
        let trunc = BasisTruncation::new(n, per)?;
        let sv = singular_values(&weyl_matrix(m, &trunc, cfg)?)?;
        let mid = sv.len().div_ceil(2);
        let mut ks = vec![1, probe_k, mid];
        ks.dedup();
        for k in ks {
            rows.push(ProbeRow { n: per, k, sigma_k: sv[k - 1] });
        }
        spectra.push(sv);
    }
    let mid_ratios = spectra
        .iter()
        .map(|s| if s[0] > 0.0 { s[s.len().div_ceil(2) - 1] / s[0] } else { 0.0 })
        .collect();
    Ok(SpectrumReport {
        n_list: n_list.to_vec(),
        probe_k,
        trend: classify(&spectra, thresholds),
        spectra,
        rows,
        mid_ratios,
        thresholds,
    })
}

#[cfg(test)]
mod tests {
    use nalgebra::DVector;
    use num_complex::Complex64;

    use super::*;
    use crate::phase_space::PhasePoint;

    #[test]
    fn identity_and_rank_one() {
        let t = BasisTruncation::one_dim(8).unwrap();
        assert_eq!(singular_values(&OperatorMatrix::identity(t.clone())).unwrap(), vec![1.0; 8]);
        let u = DVector::from_fn(8, |i, _| Complex64::new((i as f64 + 1.0).sqrt(), 0.3));
        let u = u.unscale(u.norm());
        let v = DVector::from_fn(8, |i, _| Complex64::new(0.0, 1.0 + i as f64));
        let v = v.unscale(v.norm());
        let m = OperatorMatrix::new(t, &u * v.adjoint()).unwrap();
        let sv = singular_values(&m).unwrap();
        assert!((sv[0] - 1.0).abs() < 1e-14);
        assert!(sv[1..].iter().all(|&s| s < 1e-14));
    }

    #[test]
    fn classification_rules() {
        let th = ScanThresholds::default();
        let decay = vec![vec![1.0, 1e-2, 1e-3], vec![1.0, 1e-4, 1e-5, 1e-6]];
        assert_eq!(classify(&decay, th), Trend::Decaying);
        let flat = vec![vec![1.0, 0.5], vec![1.0, 0.9, 0.5, 0.2]];
        assert_eq!(classify(&flat, th), Trend::NonDecaying);
        let mixed = vec![vec![1.0, 0.5], vec![1.0, 0.05, 0.01, 0.0]];
        assert_eq!(classify(&mixed, th), Trend::Inconclusive);
    }

    #[test]
    fn dirac_scan_is_non_decaying() {
        let m = MeasureExpr::Dirac(PhasePoint::planar(0.3, -0.2));
        let r = compactness_scan(&m, &[8, 16, 32], 4, ScanThresholds::default(), &WeylConfig::default()).unwrap();
        assert_eq!(r.trend, Trend::NonDecaying);
        assert!(r.to_csv().starts_with("N,k,sigma_k\n8,1,"));
        assert!(compactness_scan(&m, &[8, 16], 8, ScanThresholds::default(), &WeylConfig::default()).is_err());
        assert!(compactness_scan(&m, &[16, 8], 2, ScanThresholds::default(), &WeylConfig::default()).is_err());
    }
}
