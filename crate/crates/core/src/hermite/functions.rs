//! L^2(R)-orthonormal Hermite functions and Gauss-Hermite rules.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Largest Hermite index accepted by [`hermite_fn`].
pub const DEFAULT_MAX_INDEX: usize = 2048;

const RESCALE_AT: f64 = 1e150;
const LN_RESCALE: f64 = 345.387_763_949_106_8; // ln(1e150)

fn pi_quarter() -> f64 {
    PI.powf(-0.25)
}

/// Writes `h_0(t), .., h_{out.len()-1}(t)` into `out`.
///
/// The recurrence runs on scaled values with the exponent `-t^2/2` carried
/// separately, so large `|t|` neither underflows the start value nor
/// overflows the middle of the sequence.
pub fn hermite_functions_into(t: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let mut log_scale = -0.5 * t * t;
    let mut factor = log_scale.exp();
    let mut prev = 0.0;
    let mut cur = pi_quarter();
    out[0] = emit(cur, factor, log_scale);
    for k in 1..out.len() {
        let kf = k as f64;
        let next = t * (2.0 / kf).sqrt() * cur - ((kf - 1.0) / kf).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_AT {
            cur /= RESCALE_AT;
            prev /= RESCALE_AT;
            log_scale += LN_RESCALE;
            factor = log_scale.exp();
        }
        out[k] = emit(cur, factor, log_scale);
    }
}

#[inline]
fn emit(v: f64, factor: f64, log_scale: f64) -> f64 {
    if factor > 1e-290 || v == 0.0 {
        v * factor
    } else {
        v.signum() * (log_scale + v.abs().ln()).exp()
    }
}

/// `h_0(t), .., h_{count-1}(t)`.
pub fn hermite_functions(t: f64, count: usize) -> Vec<f64> {
    let mut out = vec![0.0; count];
    hermite_functions_into(t, &mut out);
    out
}

/// The `k`-th orthonormal Hermite function `h_k(t)`.
pub fn hermite_fn(k: usize, t: f64) -> Result<f64> {
    hermite_fn_bounded(k, t, DEFAULT_MAX_INDEX)
}

pub fn hermite_fn_bounded(k: usize, t: f64, max_index: usize) -> Result<f64> {
    if t.is_nan() {
        return Err(Error::NonFinite("Hermite function argument is NaN".into()));
    }
    if k > max_index {
        return Err(Error::InvalidArgument(format!(
            "Hermite index {k} exceeds configured maximum {max_index}"
        )));
    }
    if t.is_infinite() {
        return Ok(0.0);
    }
    Ok(*hermite_functions(t, k + 1).last().expect("non-empty"))
}

/// Scaled `(h_{q-1}(t), h_q(t))` sharing one exponent: actual value is `v * exp(log_scale)`.
fn hermite_top_pair(q: usize, t: f64) -> (f64, f64, f64) {
    let mut log_scale = -0.5 * t * t;
    let mut prev = 0.0;
    let mut cur = pi_quarter();
    for k in 1..=q {
        let kf = k as f64;
        let next = t * (2.0 / kf).sqrt() * cur - ((kf - 1.0) / kf).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_AT {
            cur /= RESCALE_AT;
            prev /= RESCALE_AT;
            log_scale += LN_RESCALE;
        }
    }
    (prev, cur, log_scale)
}

/// Gauss-Hermite rule for the weight `exp(-u^2)`.
///
/// `scaled_weights[i] = w_i * exp(u_i^2)`, which stays O(1) for every order;
/// integrate `F` as `sum scaled_weights[i] * F(u_i)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub scaled_weights: Vec<f64>,
}

impl GaussHermite {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("Gauss-Hermite order must be positive".into()));
        }
        let positive = positive_roots(order);
        let mut nodes = Vec::with_capacity(order);
        nodes.extend(positive.iter().rev().map(|u| -u));
        if order % 2 == 1 {
            nodes.push(0.0);
        }
        nodes.extend(positive.iter().copied());
        let scaled_weights = nodes
            .iter()
            .map(|&u| {
                let (hm1, _, log_scale) = hermite_top_pair(order, u);
                let h = hm1.abs().ln() + log_scale;
                1.0 / (order as f64 * (2.0 * h).exp())
            })
            .collect();
        Ok(Self { nodes, scaled_weights })
    }

    /// Shared instance for `order`; rules are cached for the life of the process.
    pub fn cached(order: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&order) {
            return Ok(rule.clone());
        }
        let rule = Arc::new(Self::new(order)?);
        cache.lock().expect("rule cache poisoned").insert(order, rule.clone());
        Ok(rule)
    }
}

/// Number of eigenvalues of the Hermite Jacobi matrix below `lambda` (Sturm count).
fn sturm_count(order: usize, lambda: f64) -> usize {
    let mut count = 0;
    let mut d = -lambda;
    if d < 0.0 {
        count += 1;
    }
    for k in 1..order {
        let b2 = k as f64 / 2.0;
        let denom = if d == 0.0 { f64::MIN_POSITIVE } else { d };
        d = -lambda - b2 / denom;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Positive roots of `H_order`, ascending: bisection on the Jacobi matrix, Newton polish on `h_order`.
fn positive_roots(order: usize) -> Vec<f64> {
    let upper = (2.0 * order as f64 + 1.0).sqrt() + 1.0;
    // ascending eigenvalue indices of the positive roots
    (order.div_ceil(2)..order)
        .map(|idx| {
            let (mut lo, mut hi) = (0.0, upper);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if sturm_count(order, mid) > idx {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= 1e-15 * hi.max(1.0) {
                    break;
                }
            }
            let mut u = 0.5 * (lo + hi);
            for _ in 0..3 {
                let (hm1, h, _) = hermite_top_pair(order, u);
                let deriv = (2.0 * order as f64).sqrt() * hm1 - u * h;
                if deriv == 0.0 {
                    break;
                }
                let step = h / deriv;
                if !step.is_finite() || step.abs() > hi - lo + 1e-12 {
                    break;
                }
                u -= step;
            }
            u
        })
        .collect()
}

/// `ln(k!)` for `k = 0..=max`.
pub fn ln_factorials(max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=max {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_values() {
        assert!((hermite_fn(0, 0.0).unwrap() - 0.751_125_544_464_942_5).abs() < 1e-15);
        assert_eq!(hermite_fn(1, 0.0).unwrap(), 0.0);
        // h_1(t) = sqrt(2) t pi^{-1/4} e^{-t^2/2}
        let t: f64 = 0.8;
        let expect = 2f64.sqrt() * t * pi_quarter() * (-0.5 * t * t).exp();
        assert!((hermite_fn(1, t).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn rejects_nan_and_large_index() {
        assert!(matches!(hermite_fn(3, f64::NAN), Err(Error::NonFinite(_))));
        assert!(hermite_fn(DEFAULT_MAX_INDEX + 1, 0.0).is_err());
        assert_eq!(hermite_fn(4, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn far_tail_is_finite_and_small() {
        // h_0 underflows past |t| ~ 38.6, but high indices are still O(1) near their turning point.
        let v = hermite_functions(45.0, 1100);
        assert!(v.iter().all(|x| x.is_finite()));
        assert_eq!(v[0], 0.0);
        assert!(v[1099].abs() > 1e-3);
    }

    #[test]
    fn gauss_hermite_low_order_matches_table() {
        let gh = GaussHermite::new(3).unwrap();
        let r = (1.5f64).sqrt();
        assert!((gh.nodes[0] + r).abs() < 1e-14);
        assert!(gh.nodes[1].abs() < 1e-15);
        assert!((gh.nodes[2] - r).abs() < 1e-14);
        // unscaled weights sqrt(pi)/6, 2 sqrt(pi)/3, sqrt(pi)/6
        let sp = PI.sqrt();
        let w: Vec<f64> = gh.nodes.iter().zip(&gh.scaled_weights).map(|(u, s)| s * (-u * u).exp()).collect();
        assert!((w[0] - sp / 6.0).abs() < 1e-14);
        assert!((w[1] - 2.0 * sp / 3.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_hermite_moments() {
        for order in [1, 2, 7, 64, 129, 600] {
            let gh = GaussHermite::new(order).unwrap();
            let w: Vec<f64> = gh.nodes.iter().zip(&gh.scaled_weights).map(|(u, s)| s * (-u * u).exp()).collect();
            let m0: f64 = w.iter().sum();
            assert!((m0 - PI.sqrt()).abs() < 1e-12, "order {order}: {m0}");
            if order >= 2 {
                let m2: f64 = w.iter().zip(&gh.nodes).map(|(w, u)| w * u * u).sum();
                assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-12, "order {order}");
            }
            assert!(gh.nodes.windows(2).all(|p| p[0] < p[1]));
        }
    }
}
