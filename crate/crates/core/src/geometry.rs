//! Finite type, tangent-space spanning and hyperplane containment of charts.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{tangent_singular_values, Chart};

/// Relative singular-value tolerance for every rank decision in this module.
pub const RANK_TOL: f64 = 1e-8;

/// Numerical rank of a set of vectors of equal length.
pub fn numerical_rank(vectors: &[Vec<f64>], rel_tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let sv = tangent_singular_values(vectors);
    let top = sv[0];
    if !(top > 0.0) {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TypeOrder {
    Order(usize),
    /// Derivatives through `max_order` do not span.
    Exceeds,
}

impl Serialize for TypeOrder {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            TypeOrder::Order(k) => s.serialize_u64(*k as u64),
            TypeOrder::Exceeds => s.serialize_str("exceeds"),
        }
    }
}

/// Smallest `k` with `span{gamma'(s), .., gamma^(k)(s)}` the whole ambient space.
pub fn finite_type_order(c: &Chart, s: f64, max_order: usize, rel_tol: f64) -> Result<TypeOrder> {
    if c.param_dim() != 1 {
        return Err(Error::InvalidArgument(format!("finite type order needs a curve, chart `{}` has m = {}", c.name(), c.param_dim())));
    }
    if max_order > c.max_jet_order() {
        return Err(Error::JetOrder { requested: max_order, available: c.max_jet_order() });
    }
    let ambient = 2 * c.n();
    let jet = c.jet(&[s], max_order)?;
    let mut stack = Vec::with_capacity(max_order);
    for level in jet.into_iter().skip(1) {
        stack.push(level.into_iter().next().expect("curve jets hold one vector"));
        if numerical_rank(&stack, rel_tol) == ambient {
            return Ok(TypeOrder::Order(stack.len()));
        }
    }
    Ok(TypeOrder::Exceeds)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeReport {
    pub curve: String,
    pub samples: Vec<f64>,
    pub orders: Vec<TypeOrder>,
    pub max_order: usize,
}

impl TypeReport {
    pub fn all_finite(&self) -> bool {
        self.orders.iter().all(|o| matches!(o, TypeOrder::Order(_)))
    }
}

pub fn type_report(c: &Chart, samples: &[f64], max_order: usize, rel_tol: f64) -> Result<TypeReport> {
    let orders = samples
        .iter()
        .map(|&s| finite_type_order(c, s, max_order, rel_tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(TypeReport { curve: c.name().to_string(), samples: samples.to_vec(), orders, max_order })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpanCheck {
    pub spans: bool,
    pub rank: usize,
}

/// Whether the tangent spaces at the given points sum to the ambient space.
pub fn tangent_span_check(points: &[(&Chart, Vec<f64>)], rel_tol: f64) -> Result<SpanCheck> {
    let (first, _) = points
        .first()
        .ok_or_else(|| Error::InvalidArgument("tangent span check needs at least one point".into()))?;
    let ambient = 2 * first.n();
    let mut stack = Vec::new();
    for (c, param) in points {
        if c.n() != first.n() {
            return Err(Error::DimensionMismatch { expected: first.n(), found: c.n() });
        }
        stack.extend(c.tangents(param)?);
    }
    let rank = numerical_rank(&stack, rel_tol);
    Ok(SpanCheck { spans: rank == ambient, rank })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SpanSearch {
    Found { points: Vec<Vec<f64>> },
    NotFound { achieved_rank: usize },
}

/// Scans `samples`, keeping a point iff it raises the stacked tangent rank, until the
/// rank is `2n`. With `pad_even` an odd-length result gets one more sample appended.
pub fn greedy_spanning_points(c: &Chart, samples: &[Vec<f64>], pad_even: bool, rel_tol: f64) -> Result<SpanSearch> {
    let ambient = 2 * c.n();
    let mut stack: Vec<Vec<f64>> = Vec::new();
    let mut chosen: Vec<Vec<f64>> = Vec::new();
    let mut rank = 0;
    for s in samples {
        if rank == ambient {
            break;
        }
        let mut trial = stack.clone();
        trial.extend(c.tangents(s)?);
        let r = numerical_rank(&trial, rel_tol);
        if r > rank {
            rank = r;
            stack = trial;
            chosen.push(s.clone());
        }
    }
    if rank < ambient {
        return Ok(SpanSearch::NotFound { achieved_rank: rank });
    }
    if pad_even && chosen.len() % 2 == 1 {
        let extra = samples.iter().find(|s| !chosen.contains(s)).unwrap_or(&samples[0]).clone();
        chosen.push(extra);
    }
    Ok(SpanSearch::Found { points: chosen })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hyperplane {
    /// Unit normal, sign fixed so its largest-magnitude component is positive.
    pub normal: Vec<f64>,
    /// `normal . p = offset` on the hyperplane.
    pub offset: f64,
    pub max_residual: f64,
}

/// Least-squares affine hyperplane through the sampled image points, returned
/// iff the largest residual is at most `rel_tol * diameter`.
pub fn hyperplane_containment(c: &Chart, samples: &[Vec<f64>], rel_tol: f64) -> Result<Option<Hyperplane>> {
    let ambient = 2 * c.n();
    if samples.len() < ambient + 1 {
        return Err(Error::InvalidArgument(format!(
            "hyperplane fit needs at least {} samples, got {}",
            ambient + 1,
            samples.len()
        )));
    }
    let pts = samples.iter().map(|s| c.eval_flat(s)).collect::<Result<Vec<_>>>()?;
    let k = pts.len();
    let mut diameter = 0.0f64;
    for i in 0..k {
        for j in (i + 1)..k {
            let d: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b).powi(2)).sum();
            diameter = diameter.max(d.sqrt());
        }
    }
    if diameter == 0.0 {
        return Err(Error::InvalidArgument("all sample points coincide".into()));
    }
    let centroid: Vec<f64> = (0..ambient).map(|d| pts.iter().map(|p| p[d]).sum::<f64>() / k as f64).collect();
    let centered = DMatrix::from_fn(k, ambient, |r, d| pts[r][d] - centroid[d]);
    let svd = centered.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("ambient >= 2");
    let mut normal: Vec<f64> = v_t.row(idx).iter().copied().collect();
    let lead = normal.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).expect("non-empty");
    if lead < 0.0 {
        normal.iter_mut().for_each(|v| *v = -*v);
    }
    let offset: f64 = normal.iter().zip(&centroid).map(|(a, b)| a * b).sum();
    let max_residual = pts
        .iter()
        .map(|p| (normal.iter().zip(p).map(|(a, b)| a * b).sum::<f64>() - offset).abs())
        .fold(0.0, f64::max);
    Ok((max_residual <= rel_tol * diameter).then_some(Hyperplane { normal, offset, max_residual }))
}

/// `count` equally spaced samples of the first parameter interval, starting at its left end.
pub fn uniform_samples(c: &Chart, count: usize) -> Vec<f64> {
    let (lo, hi) = c.domain()[0];
    let h = (hi - lo) / count as f64;
    (0..count).map(|i| lo + h * i as f64).collect()
}
