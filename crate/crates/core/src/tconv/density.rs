//! Density of `mu # nu` for two planar curve measures (n = 1).
//!
//! With `S(s, t) = gamma(s) + delta(t)` the density at `z` is
//!
//! ```text
//! sum over S(s, t) = z of  psi_a(s) psi_b(t) |gamma'(s)| |delta'(t)| phi_2(gamma(s), delta(t)) / |det [gamma'(s) delta'(t)]|
//! ```
//!
//! Roots are seeded from a uniform grid of parameter cells and refined by Newton.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::phase::phase_phi_2;
use crate::error::{Error, Result};
use crate::measures::{MeasureExpr, SmoothMeasureSpec};
use crate::parallel::{map_each, Execution};
use crate::phase_space::PhasePoint;
use crate::quadrature::CompositeRule;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityConfig {
    /// Seed cells per parameter axis.
    pub seed_grid: usize,
    pub newton_max_iter: usize,
    /// Newton stops once the step is below this.
    pub newton_tol: f64,
    /// Roots closer than this in parameter space are merged.
    pub dedup_radius: f64,
    /// Exclusion threshold relative to the largest speed product.
    pub eps_j_rel: f64,
}

impl Default for DensityConfig {
    fn default() -> Self {
        Self { seed_grid: 256, newton_max_iter: 32, newton_tol: 1e-12, dedup_radius: 1e-8, eps_j_rel: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySample {
    pub z: PhasePoint,
    pub value: Complex64,
    pub roots_found: usize,
    /// Smallest `|sin|` of the angle between the two tangents over the roots; infinite without roots.
    pub nearest_critical_distance: f64,
    pub roots: Vec<(f64, f64)>,
}

struct Curve {
    spec: SmoothMeasureSpec,
    lo: f64,
    hi: f64,
    periodic: bool,
    /// Image points at the seed cell centers.
    seeds: Vec<[f64; 2]>,
    max_speed: f64,
}

impl Curve {
    fn new(spec: &SmoothMeasureSpec, cells: usize) -> Result<Self> {
        let chart = spec.chart();
        if chart.param_dim() != 1 || chart.n() != 1 {
            return Err(Error::InvalidArgument(format!(
                "coarea density needs planar curves (n = 1), got chart `{}` with m = {}, n = {}",
                chart.name(),
                chart.param_dim(),
                chart.n()
            )));
        }
        let (lo, hi) = chart.domain()[0];
        let h = (hi - lo) / cells as f64;
        let mut seeds = Vec::with_capacity(cells);
        let mut max_speed = 0.0f64;
        for i in 0..=cells {
            // speeds are sampled on the cell edges as well
            let edge = chart.derivative(lo + h * i as f64, 1)?;
            max_speed = max_speed.max(edge[0].hypot(edge[1]));
            if i < cells {
                let s = lo + h * (i as f64 + 0.5);
                let p = chart.eval_flat(&[s])?;
                let v = chart.derivative(s, 1)?;
                max_speed = max_speed.max(v[0].hypot(v[1]));
                seeds.push([p[0], p[1]]);
            }
        }
        Ok(Self { spec: spec.clone(), lo, hi, periodic: chart.periodic()[0], seeds, max_speed })
    }

    fn point_and_tangent(&self, s: f64) -> ([f64; 2], [f64; 2]) {
        let jet = self.spec.chart().jet(&[s], 1).expect("parameter is finite");
        ([jet[0][0][0], jet[0][0][1]], [jet[1][0][0], jet[1][0][1]])
    }

    fn cell_width(&self) -> f64 {
        (self.hi - self.lo) / self.seeds.len() as f64
    }

    /// Maps into the domain, or `None` when outside a non-periodic interval.
    fn normalize(&self, s: f64) -> Option<f64> {
        if self.periodic {
            let w = self.hi - self.lo;
            Some(self.lo + (s - self.lo).rem_euclid(w))
        } else if s >= self.lo - 1e-12 && s <= self.hi + 1e-12 {
            Some(s.clamp(self.lo, self.hi))
        } else {
            None
        }
    }

    fn distance(&self, a: f64, b: f64) -> f64 {
        let d = (a - b).abs();
        if self.periodic {
            d.min(self.hi - self.lo - d)
        } else {
            d
        }
    }
}

/// Precomputed seed grids for density queries against one pair of curves.
pub struct DensityEvaluator {
    a: Curve,
    b: Curve,
    cfg: DensityConfig,
    eps_j: f64,
}

impl DensityEvaluator {
    pub fn new(a: &SmoothMeasureSpec, b: &SmoothMeasureSpec, cfg: DensityConfig) -> Result<Self> {
        if cfg.seed_grid == 0 || cfg.newton_max_iter == 0 || !(cfg.eps_j_rel > 0.0) || !(cfg.newton_tol > 0.0) {
            return Err(Error::InvalidArgument("density configuration values must be positive".into()));
        }
        let a = Curve::new(a, cfg.seed_grid)?;
        let b = Curve::new(b, cfg.seed_grid)?;
        let eps_j = cfg.eps_j_rel * a.max_speed * b.max_speed;
        Ok(Self { a, b, cfg, eps_j })
    }

    /// Exclusion threshold on `|det|`.
    pub fn eps_j(&self) -> f64 {
        self.eps_j
    }

    fn newton(&self, mut s: f64, mut t: f64, z: [f64; 2]) -> Option<(f64, f64)> {
        let scale = 1.0 + z[0].abs() + z[1].abs();
        for _ in 0..self.cfg.newton_max_iter {
            let (g, gd) = self.a.point_and_tangent(s);
            let (d, dd) = self.b.point_and_tangent(t);
            let r = [g[0] + d[0] - z[0], g[1] + d[1] - z[1]];
            let det = gd[0] * dd[1] - dd[0] * gd[1];
            let norm2 = gd[0] * gd[0] + gd[1] * gd[1] + dd[0] * dd[0] + dd[1] * dd[1];
            let (ds, dt) = if det.abs() > 1e-13 * norm2 {
                ((dd[1] * r[0] - dd[0] * r[1]) / det, (gd[0] * r[1] - gd[1] * r[0]) / det)
            } else {
                // rank one: least-squares step J^T r / |J|_F^2
                ((gd[0] * r[0] + gd[1] * r[1]) / norm2, (dd[0] * r[0] + dd[1] * r[1]) / norm2)
            };
            s -= ds;
            t -= dt;
            if !(s.is_finite() && t.is_finite()) {
                return None;
            }
            if ds.hypot(dt) <= self.cfg.newton_tol {
                break;
            }
        }
        let (g, _) = self.a.point_and_tangent(s);
        let (d, _) = self.b.point_and_tangent(t);
        let res = (g[0] + d[0] - z[0]).hypot(g[1] + d[1] - z[1]);
        if res > 1e-9 * scale {
            return None;
        }
        Some((self.a.normalize(s)?, self.b.normalize(t)?))
    }

    /// Roots of `S(s, t) = z`, sorted.
    pub fn roots(&self, z: &PhasePoint) -> Result<Vec<(f64, f64)>> {
        if z.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: z.dim() });
        }
        let zz = [z.x()[0], z.y()[0]];
        let (ha, hb) = (self.a.cell_width(), self.b.cell_width());
        let radius = 1.25 * 0.5 * (self.a.max_speed * ha + self.b.max_speed * hb);
        let mut roots: Vec<(f64, f64)> = Vec::new();
        for (i, ga) in self.a.seeds.iter().enumerate() {
            let ex = zz[0] - ga[0];
            let ey = zz[1] - ga[1];
            for (j, db) in self.b.seeds.iter().enumerate() {
                if (db[0] - ex).hypot(db[1] - ey) > radius {
                    continue;
                }
                let s0 = self.a.lo + ha * (i as f64 + 0.5);
                let t0 = self.b.lo + hb * (j as f64 + 0.5);
                if let Some((s, t)) = self.newton(s0, t0, zz) {
                    let dup = roots.iter().any(|&(rs, rt)| {
                        self.a.distance(rs, s) <= self.cfg.dedup_radius && self.b.distance(rt, t) <= self.cfg.dedup_radius
                    });
                    if !dup {
                        roots.push((s, t));
                    }
                }
            }
        }
        roots.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
        Ok(roots)
    }

    /// Density at `z`; near-critical roots are an error.
    pub fn sample(&self, z: &PhasePoint) -> Result<DensitySample> {
        let roots = self.roots(z)?;
        let mut value = Complex64::new(0.0, 0.0);
        let mut nearest = f64::INFINITY;
        for &(s, t) in &roots {
            let (g, gd) = self.a.point_and_tangent(s);
            let (d, dd) = self.b.point_and_tangent(t);
            let det = gd[0] * dd[1] - dd[0] * gd[1];
            let (va, vb) = (gd[0].hypot(gd[1]), dd[0].hypot(dd[1]));
            if det.abs() < self.eps_j {
                return Err(Error::NearCritical { s, t, jacobian: det.abs(), threshold: self.eps_j });
            }
            nearest = nearest.min(det.abs() / (va * vb));
            let psi = self.a.spec.density().eval(&[s]) * self.b.spec.density().eval(&[t]);
            let phi = phase_phi_2(&PhasePoint::planar(g[0], g[1]), &PhasePoint::planar(d[0], d[1]))?;
            value += phi * (psi * va * vb / det.abs());
        }
        Ok(DensitySample { z: z.clone(), value, roots_found: roots.len(), nearest_critical_distance: nearest, roots })
    }
}

/// Density of `a # b` at `z`.
pub fn tconv_density(a: &SmoothMeasureSpec, b: &SmoothMeasureSpec, z: &PhasePoint, cfg: DensityConfig) -> Result<DensitySample> {
    DensityEvaluator::new(a, b, cfg)?.sample(z)
}

/// `int int g(p + q) phi_2(p, q) d a(p) d b(q)` by product quadrature.
pub fn pairing_oracle<G>(a: &MeasureExpr, b: &MeasureExpr, g: G, rule: CompositeRule) -> Result<Complex64>
where
    G: Fn(&PhasePoint) -> Complex64,
{
    let na = oracle_nodes(a, rule)?;
    let nb = oracle_nodes(b, rule)?;
    if let (Some(p), Some(q)) = (na.first(), nb.first()) {
        p.0.check_dim(&q.0)?;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (p, wp) in &na {
        let mut inner = Complex64::new(0.0, 0.0);
        for (q, wq) in &nb {
            let phi = phase_phi_2(p, q)?;
            inner += g(&p.add(q)?) * phi * *wq;
        }
        acc += inner * *wp;
    }
    Ok(acc)
}

fn oracle_nodes(m: &MeasureExpr, rule: CompositeRule) -> Result<Vec<(PhasePoint, f64)>> {
    match m.simplify() {
        MeasureExpr::Dirac(p) => Ok(vec![(p, 1.0)]),
        MeasureExpr::Smooth(s) => Ok(s.nodes(rule)?.into_iter().map(|n| (n.point, n.weight)).collect()),
        _ => Err(Error::InvalidArgument("pairing oracle takes Dirac or smooth measures".into())),
    }
}

/// A density query for one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub enum CellSample {
    Value(DensitySample),
    /// A fiber point lies within the exclusion radius of the critical set. `sample`
    /// holds the value when the query itself succeeded.
    NearCritical { z: PhasePoint, detail: String, sample: Option<DensitySample> },
}

/// Density at a cell center. The cell is flagged when the query is near-critical or
/// when the smallest tangent-angle sine over the roots is below `half_diagonal`,
/// i.e. the critical set comes within about one cell of the fiber.
pub fn sample_cell(eval: &DensityEvaluator, z: &PhasePoint, half_diagonal: f64) -> Result<CellSample> {
    match eval.sample(z) {
        Ok(s) if s.nearest_critical_distance < half_diagonal => Ok(CellSample::NearCritical {
            z: z.clone(),
            detail: format!("tangent angle sine {:e} below cell half-diagonal {half_diagonal:e}", s.nearest_critical_distance),
            sample: Some(s),
        }),
        Ok(s) => Ok(CellSample::Value(s)),
        Err(e @ Error::NearCritical { .. }) => {
            Ok(CellSample::NearCritical { z: z.clone(), detail: e.to_string(), sample: None })
        }
        Err(e) => Err(e),
    }
}

/// Centers of an `m x m` cell grid on `[x0, x1] x [y0, y1]`, `y` fastest, and the cell half-diagonal.
pub fn cell_centers(bounds: [(f64, f64); 2], m: usize) -> (Vec<PhasePoint>, f64) {
    let [(x0, x1), (y0, y1)] = bounds;
    let (hx, hy) = ((x1 - x0) / m as f64, (y1 - y0) / m as f64);
    let centers = (0..m * m)
        .map(|k| PhasePoint::planar(x0 + hx * ((k / m) as f64 + 0.5), y0 + hy * ((k % m) as f64 + 0.5)))
        .collect();
    (centers, 0.5 * hx.hypot(hy))
}

/// Outcome of integrating the density against a test function on a cell grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPairing {
    pub value: Complex64,
    pub cells: usize,
    /// Cell centers skipped as near-critical.
    pub excluded: Vec<PhasePoint>,
}

/// Midpoint rule of `int g(z) density(z) dz` over `[x0, x1] x [y0, y1]` with `m x m` cells;
/// near-critical cells are skipped and listed.
pub fn grid_pairing<G>(
    eval: &DensityEvaluator,
    g: G,
    bounds: [(f64, f64); 2],
    m: usize,
    exec: Execution,
) -> Result<GridPairing>
where
    G: Fn(&PhasePoint) -> f64 + Sync,
{
    if m == 0 {
        return Err(Error::InvalidArgument("grid needs at least one cell".into()));
    }
    let [(x0, x1), (y0, y1)] = bounds;
    let area = (x1 - x0) * (y1 - y0) / (m * m) as f64;
    let (centers, half_diagonal) = cell_centers(bounds, m);
    let cells: Vec<PhasePoint> = centers.into_iter().filter(|z| g(z) != 0.0).collect();
    let samples = map_each(exec, &cells, |z| sample_cell(eval, z, half_diagonal));
    let mut value = Complex64::new(0.0, 0.0);
    let mut excluded = Vec::new();
    for (z, s) in cells.iter().zip(samples) {
        match s? {
            CellSample::Value(s) => value += s.value * (g(z) * area),
            CellSample::NearCritical { z, .. } => excluded.push(z),
        }
    }
    Ok(GridPairing { value, cells: m * m, excluded })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use serde_json::json;

    use super::*;
    use crate::measures::{curve_catalog, Density};

    fn unit_circle() -> SmoothMeasureSpec {
        SmoothMeasureSpec::new(curve_catalog("circle", &json!({})).unwrap(), Density::default()).unwrap()
    }

    #[test]
    fn two_circles_at_one_zero() {
        let c = unit_circle();
        let s = tconv_density(&c, &c, &PhasePoint::planar(1.0, 0.0), DensityConfig::default()).unwrap();
        assert_eq!(s.roots_found, 2);
        let (r0, r1) = (s.roots[0], s.roots[1]);
        assert!((r0.0 - PI / 3.0).abs() < 1e-10 && (r0.1 - 5.0 * PI / 3.0).abs() < 1e-10, "{r0:?}");
        assert!((r1.0 - 5.0 * PI / 3.0).abs() < 1e-10 && (r1.1 - PI / 3.0).abs() < 1e-10, "{r1:?}");
        let exact = 4.0 * (PI * 3f64.sqrt() / 2.0).cos() / 3f64.sqrt();
        assert!((s.value.re - exact).abs() < 1e-10 && s.value.im.abs() < 1e-12);
        assert!((s.nearest_critical_distance - 3f64.sqrt() / 2.0).abs() < 1e-10);
    }

    #[test]
    fn empty_fiber_and_critical_point() {
        let c = unit_circle();
        let far = tconv_density(&c, &c, &PhasePoint::planar(2.5, 0.3), DensityConfig::default()).unwrap();
        assert_eq!((far.roots_found, far.value), (0, Complex64::new(0.0, 0.0)));
        assert!(far.nearest_critical_distance.is_infinite());
        let err = tconv_density(&c, &c, &PhasePoint::planar(0.0, 0.0), DensityConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NearCritical { .. }), "{err}");
    }

    #[test]
    fn origin_cell_is_flagged() {
        let c = unit_circle();
        let eval = DensityEvaluator::new(&c, &c, DensityConfig::default()).unwrap();
        let (centers, half) = cell_centers([(-2.5, 2.5), (-2.5, 2.5)], 64);
        let near_origin = centers.iter().filter(|z| z.norm() < 0.06).collect::<Vec<_>>();
        assert_eq!(near_origin.len(), 4);
        for z in near_origin {
            assert!(matches!(sample_cell(&eval, z, half).unwrap(), CellSample::NearCritical { .. }));
        }
        let regular = sample_cell(&eval, &PhasePoint::planar(1.0, 0.0), half).unwrap();
        assert!(matches!(regular, CellSample::Value(_)));
    }

    #[test]
    fn oracle_examples() {
        let p = PhasePoint::planar(0.5, 0.25);
        let q = PhasePoint::planar(-1.0, 2.0);
        let one = |_: &PhasePoint| Complex64::new(1.0, 0.0);
        let v = pairing_oracle(&MeasureExpr::Dirac(p.clone()), &MeasureExpr::Dirac(q.clone()), one, CompositeRule::CURVE).unwrap();
        assert!((v - phase_phi_2(&p, &q).unwrap()).norm() < 1e-15);
        let c = MeasureExpr::Smooth(unit_circle());
        let v = pairing_oracle(&MeasureExpr::Dirac(PhasePoint::origin(1)), &c, one, CompositeRule::CURVE).unwrap();
        assert!((v.re - 2.0 * PI).abs() < 1e-10);
    }
}
