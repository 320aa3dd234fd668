//! Parametrized submanifold patches of phase space and the curve catalog.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::PhasePoint;

/// Names accepted by [`curve_catalog`].
pub const CATALOG: [&str; 7] =
    ["circle", "ellipse", "line_segment", "parabola_arc", "cubic_arc", "polynomial_curve", "sphere3"];

fn origin2() -> [f64; 2] {
    [0.0, 0.0]
}

fn origin4() -> [f64; 4] {
    [0.0; 4]
}

fn one() -> f64 {
    1.0
}

fn minus_one() -> f64 {
    -1.0
}

/// Catalog shapes. Planar shapes live in R^2 (n = 1), `sphere3` is the unit
/// 3-sphere in R^4 (n = 2), `line_segment` and `polynomial_curve` take their
/// dimension from the coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    /// `center + r (cos s, sin s)`, `s` in `[0, 2 pi]`.
    Circle {
        #[serde(default = "origin2")]
        center: [f64; 2],
        #[serde(default = "one")]
        r: f64,
    },
    /// `center + (a cos s, b sin s)`, `s` in `[0, 2 pi]`.
    Ellipse {
        #[serde(default = "origin2")]
        center: [f64; 2],
        a: f64,
        b: f64,
    },
    /// `a + s (b - a)`, `s` in `[0, 1]`; points in flat `[x.., y..]` layout.
    LineSegment { a: Vec<f64>, b: Vec<f64> },
    /// `center + (s, c s^2)`, `s` in `[t0, t1]`.
    ParabolaArc {
        #[serde(default = "origin2")]
        center: [f64; 2],
        #[serde(default = "one")]
        c: f64,
        #[serde(default = "minus_one")]
        t0: f64,
        #[serde(default = "one")]
        t1: f64,
    },
    /// `center + (s, c s^3)`, `s` in `[t0, t1]`.
    CubicArc {
        #[serde(default = "origin2")]
        center: [f64; 2],
        #[serde(default = "one")]
        c: f64,
        #[serde(default = "minus_one")]
        t0: f64,
        #[serde(default = "one")]
        t1: f64,
    },
    /// Component `i` is `sum_j coeffs[i][j] s^j`, `s` in `[t0, t1]`.
    PolynomialCurve { coeffs: Vec<Vec<f64>>, t0: f64, t1: f64 },
    /// Hyperspherical angles `(chi, theta, phi)` in `[0, pi] x [0, pi] x [0, 2 pi]`.
    Sphere3 {
        #[serde(default = "origin4")]
        center: [f64; 4],
        #[serde(default = "one")]
        r: f64,
    },
}

impl CurveSpec {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            CurveSpec::Circle { r, .. } | CurveSpec::Sphere3 { r, .. } if !(*r > 0.0 && r.is_finite()) => {
                bad(format!("radius must be positive, got {r}"))
            }
            CurveSpec::Ellipse { a, b, .. } if !(*a > 0.0 && *b > 0.0 && a.is_finite() && b.is_finite()) => {
                bad(format!("ellipse semi-axes must be positive, got a = {a}, b = {b}"))
            }
            CurveSpec::LineSegment { a, b } => {
                if a.len() != b.len() || a.is_empty() || a.len() % 2 != 0 {
                    return bad(format!("segment endpoints need equal even length, got {} and {}", a.len(), b.len()));
                }
                if !finite(a) || !finite(b) {
                    return Err(Error::NonFinite("segment endpoint".into()));
                }
                if a == b {
                    return bad("segment endpoints coincide".into());
                }
                Ok(())
            }
            CurveSpec::ParabolaArc { t0, t1, c, .. } | CurveSpec::CubicArc { t0, t1, c, .. } => {
                if !(t0 < t1) || !c.is_finite() || !t1.is_finite() || !t0.is_finite() {
                    return bad(format!("invalid arc parameters t0 = {t0}, t1 = {t1}, c = {c}"));
                }
                Ok(())
            }
            CurveSpec::PolynomialCurve { coeffs, t0, t1 } => {
                if coeffs.is_empty() || coeffs.len() % 2 != 0 {
                    return bad(format!("polynomial curve needs an even number of components, got {}", coeffs.len()));
                }
                if !(t0 < t1) || !t0.is_finite() || !t1.is_finite() {
                    return bad(format!("invalid parameter interval [{t0}, {t1}]"));
                }
                if !coeffs.iter().all(|c| finite(c)) {
                    return Err(Error::NonFinite("polynomial coefficient".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            CurveSpec::Circle { .. } => "circle",
            CurveSpec::Ellipse { .. } => "ellipse",
            CurveSpec::LineSegment { .. } => "line_segment",
            CurveSpec::ParabolaArc { .. } => "parabola_arc",
            CurveSpec::CubicArc { .. } => "cubic_arc",
            CurveSpec::PolynomialCurve { .. } => "polynomial_curve",
            CurveSpec::Sphere3 { .. } => "sphere3",
        }
    }
}

/// Looks up a catalog shape by name; `params` holds the remaining fields.
pub fn curve_catalog(name: &str, params: &serde_json::Value) -> Result<Chart> {
    if !CATALOG.contains(&name) {
        return Err(Error::UnknownCurve { name: name.to_string(), catalog: CATALOG.join(", ") });
    }
    let mut obj = match params {
        serde_json::Value::Object(m) => m.clone(),
        serde_json::Value::Null => serde_json::Map::new(),
        other => return Err(Error::Schema(format!("curve parameters must be an object, got {other}"))),
    };
    obj.insert("name".into(), serde_json::Value::String(name.into()));
    let spec: CurveSpec =
        serde_json::from_value(serde_json::Value::Object(obj)).map_err(|e| Error::Schema(format!("curve `{name}`: {e}")))?;
    Chart::new(spec)
}

/// A chart: parameter box to phase space, with analytic jets.
///
/// `reflected` negates the image; `reversed` runs the first parameter backwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    spec: CurveSpec,
    reflected: bool,
    reversed: bool,
}

impl Chart {
    pub fn new(spec: CurveSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self { spec, reflected: false, reversed: false })
    }

    pub fn spec(&self) -> &CurveSpec {
        &self.spec
    }

    pub fn name(&self) -> &'static str {
        self.spec.name()
    }

    pub fn is_reflected(&self) -> bool {
        self.reflected
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    /// Same parameter domain, image `p -> -p`.
    pub fn reflect(&self) -> Self {
        Self { reflected: !self.reflected, ..self.clone() }
    }

    /// Orientation-reversing reparametrization of the first parameter.
    pub fn reverse(&self) -> Self {
        Self { reversed: !self.reversed, ..self.clone() }
    }

    /// Phase-space dimension n.
    pub fn n(&self) -> usize {
        self.ambient() / 2
    }

    fn ambient(&self) -> usize {
        match &self.spec {
            CurveSpec::LineSegment { a, .. } => a.len(),
            CurveSpec::PolynomialCurve { coeffs, .. } => coeffs.len(),
            CurveSpec::Sphere3 { .. } => 4,
            _ => 2,
        }
    }

    /// Dimension m of the parameter box.
    pub fn param_dim(&self) -> usize {
        match self.spec {
            CurveSpec::Sphere3 { .. } => 3,
            _ => 1,
        }
    }

    pub fn domain(&self) -> Vec<(f64, f64)> {
        match &self.spec {
            CurveSpec::Circle { .. } | CurveSpec::Ellipse { .. } => vec![(0.0, 2.0 * PI)],
            CurveSpec::LineSegment { .. } => vec![(0.0, 1.0)],
            CurveSpec::ParabolaArc { t0, t1, .. }
            | CurveSpec::CubicArc { t0, t1, .. }
            | CurveSpec::PolynomialCurve { t0, t1, .. } => vec![(*t0, *t1)],
            CurveSpec::Sphere3 { .. } => vec![(0.0, PI), (0.0, PI), (0.0, 2.0 * PI)],
        }
    }

    /// Which parameters wrap around (closed curves, azimuths).
    pub fn periodic(&self) -> Vec<bool> {
        match self.spec {
            CurveSpec::Circle { .. } | CurveSpec::Ellipse { .. } => vec![true],
            CurveSpec::Sphere3 { .. } => vec![false, false, true],
            _ => vec![false],
        }
    }

    /// Highest jet order available.
    pub fn max_jet_order(&self) -> usize {
        match self.spec {
            CurveSpec::Sphere3 { .. } => 1,
            _ => usize::MAX,
        }
    }

    fn check_param(&self, param: &[f64]) -> Result<()> {
        if param.len() != self.param_dim() {
            return Err(Error::InvalidArgument(format!(
                "chart `{}` takes {} parameters, got {}",
                self.name(),
                self.param_dim(),
                param.len()
            )));
        }
        if param.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("chart parameter {param:?}")));
        }
        Ok(())
    }

    fn internal_param(&self, param: &[f64]) -> Vec<f64> {
        let mut q = param.to_vec();
        if self.reversed {
            let (lo, hi) = self.domain()[0];
            q[0] = lo + hi - q[0];
        }
        q
    }

    /// Image point in flat `[x.., y..]` layout.
    pub fn eval_flat(&self, param: &[f64]) -> Result<Vec<f64>> {
        Ok(self.jet(param, 0)?.swap_remove(0).swap_remove(0))
    }

    pub fn eval(&self, param: &[f64]) -> Result<PhasePoint> {
        PhasePoint::from_flat(&self.eval_flat(param)?)
    }

    /// `jet[d]` lists the partial derivatives of order `d` (graded-lex in the
    /// parameters), each in flat `[x.., y..]` layout.
    pub fn jet(&self, param: &[f64], order: usize) -> Result<Vec<Vec<Vec<f64>>>> {
        self.check_param(param)?;
        if order > self.max_jet_order() {
            return Err(Error::JetOrder { requested: order, available: self.max_jet_order() });
        }
        let q = self.internal_param(param);
        let mut out = if self.param_dim() == 1 {
            (0..=order).map(|d| vec![self.curve_derivative(q[0], d)]).collect::<Vec<_>>()
        } else {
            self.sphere_jet(&q, order)
        };
        for (d, level) in out.iter_mut().enumerate() {
            for (i, v) in level.iter_mut().enumerate() {
                // reversal flips the sign once per derivative in the first parameter
                let flips = if self.reversed { first_param_order(self.param_dim(), d, i) } else { 0 };
                let sign = if self.reflected { -1.0 } else { 1.0 } * if flips % 2 == 1 { -1.0 } else { 1.0 };
                if sign < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
        }
        Ok(out)
    }

    /// `d`-th derivative of a curve (m = 1).
    pub fn derivative(&self, s: f64, d: usize) -> Result<Vec<f64>> {
        if self.param_dim() != 1 {
            return Err(Error::InvalidArgument(format!("chart `{}` is not a curve", self.name())));
        }
        Ok(self.jet(&[s], d)?.swap_remove(d).swap_remove(0))
    }

    /// First-order partials: `m` tangent vectors.
    pub fn tangents(&self, param: &[f64]) -> Result<Vec<Vec<f64>>> {
        Ok(self.jet(param, 1)?.swap_remove(1))
    }

    fn curve_derivative(&self, s: f64, d: usize) -> Vec<f64> {
        let shifted = |c: &[f64; 2], v: [f64; 2]| if d == 0 { vec![c[0] + v[0], c[1] + v[1]] } else { v.to_vec() };
        match &self.spec {
            CurveSpec::Circle { center, r } => {
                let (sin, cos) = (s + d as f64 * PI / 2.0).sin_cos();
                shifted(center, [r * cos, r * sin])
            }
            CurveSpec::Ellipse { center, a, b } => {
                let (sin, cos) = (s + d as f64 * PI / 2.0).sin_cos();
                shifted(center, [a * cos, b * sin])
            }
            CurveSpec::LineSegment { a, b } => match d {
                0 => a.iter().zip(b).map(|(a, b)| a + s * (b - a)).collect(),
                1 => a.iter().zip(b).map(|(a, b)| b - a).collect(),
                _ => vec![0.0; a.len()],
            },
            CurveSpec::ParabolaArc { center, c, .. } => {
                let v = match d {
                    0 => [s, c * s * s],
                    1 => [1.0, 2.0 * c * s],
                    2 => [0.0, 2.0 * c],
                    _ => [0.0, 0.0],
                };
                shifted(center, v)
            }
            CurveSpec::CubicArc { center, c, .. } => {
                let v = match d {
                    0 => [s, c * s.powi(3)],
                    1 => [1.0, 3.0 * c * s * s],
                    2 => [0.0, 6.0 * c * s],
                    3 => [0.0, 6.0 * c],
                    _ => [0.0, 0.0],
                };
                shifted(center, v)
            }
            CurveSpec::PolynomialCurve { coeffs, .. } => coeffs.iter().map(|c| poly_derivative(c, s, d)).collect(),
            CurveSpec::Sphere3 { .. } => unreachable!("sphere3 is not a curve"),
        }
    }

    fn sphere_jet(&self, q: &[f64], order: usize) -> Vec<Vec<Vec<f64>>> {
        let CurveSpec::Sphere3 { center, r } = &self.spec else { unreachable!("only sphere3 has m > 1") };
        let (s1, c1) = q[0].sin_cos();
        let (s2, c2) = q[1].sin_cos();
        let (s3, c3) = q[2].sin_cos();
        let point = vec![
            center[0] + r * c1,
            center[1] + r * s1 * c2,
            center[2] + r * s1 * s2 * c3,
            center[3] + r * s1 * s2 * s3,
        ];
        let mut out = vec![vec![point]];
        if order >= 1 {
            out.push(vec![
                vec![-r * s1, r * c1 * c2, r * c1 * s2 * c3, r * c1 * s2 * s3],
                vec![0.0, -r * s1 * s2, r * s1 * c2 * c3, r * s1 * c2 * s3],
                vec![0.0, 0.0, -r * s1 * s2 * s3, r * s1 * s2 * c3],
            ]);
        }
        out
    }
}

/// Order in the first parameter of the `i`-th partial of total order `d`.
fn first_param_order(m: usize, d: usize, i: usize) -> usize {
    match (m, d) {
        (1, d) => d,
        (_, 0) => 0,
        // order-1 partials are listed as d/dq_0, d/dq_1, ...
        (_, 1) => usize::from(i == 0),
        _ => unreachable!("jets of order > 1 exist only for curves"),
    }
}

fn poly_derivative(c: &[f64], s: f64, d: usize) -> f64 {
    // Horner on the d-th derivative coefficients j!/(j-d)! c_j
    let mut acc = 0.0;
    for j in (d..c.len()).rev() {
        let falling: f64 = ((j - d + 1)..=j).map(|k| k as f64).product();
        acc = acc * s + falling * c[j];
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn catalog_examples() {
        let c = curve_catalog("circle", &json!({"r": 1.0, "center": [0.0, 0.0]})).unwrap();
        let p = c.eval_flat(&[PI / 2.0]).unwrap();
        assert!(p[0].abs() < 1e-15 && (p[1] - 1.0).abs() < 1e-15);
        assert_eq!(c.domain(), vec![(0.0, 2.0 * PI)]);

        let cubic = curve_catalog("cubic_arc", &json!({})).unwrap();
        assert_eq!(cubic.eval_flat(&[0.5]).unwrap(), vec![0.5, 0.125]);
        assert_eq!(cubic.domain(), vec![(-1.0, 1.0)]);

        let seg = curve_catalog("line_segment", &json!({"a": [-1.0, 0.0], "b": [1.0, 0.0]})).unwrap();
        assert_eq!(seg.eval_flat(&[0.25]).unwrap(), vec![-0.5, 0.0]);
        assert_eq!(seg.derivative(0.3, 2).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn unknown_name_lists_catalog() {
        let err = curve_catalog("spiral", &json!({})).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("spiral") && msg.contains("cubic_arc") && msg.contains("sphere3"), "{msg}");
        assert!(curve_catalog("circle", &json!({"radius": 2.0})).is_err());
    }

    #[test]
    fn polynomial_derivatives() {
        // (1 + 2s + 3s^2, s^3)
        let c = Chart::new(CurveSpec::PolynomialCurve {
            coeffs: vec![vec![1.0, 2.0, 3.0], vec![0.0, 0.0, 0.0, 1.0]],
            t0: -1.0,
            t1: 2.0,
        })
        .unwrap();
        let s = 0.7;
        assert_eq!(c.derivative(s, 1).unwrap(), vec![2.0 + 6.0 * s, 3.0 * s * s]);
        assert_eq!(c.derivative(s, 3).unwrap(), vec![0.0, 6.0]);
    }

    #[test]
    fn reflection_and_reversal() {
        let c = curve_catalog("circle", &json!({"center": [3.0, 0.0]})).unwrap();
        let r = c.reflect();
        for s in [0.0, 1.0, 2.5] {
            let p = r.eval_flat(&[s]).unwrap();
            assert!(((p[0] + 3.0).powi(2) + p[1] * p[1] - 1.0).abs() < 1e-14);
        }
        assert_eq!(r.reflect(), c);

        let cubic = curve_catalog("cubic_arc", &json!({})).unwrap();
        let rev = cubic.reverse();
        assert_eq!(rev.eval_flat(&[0.5]).unwrap(), cubic.eval_flat(&[-0.5]).unwrap());
        let d1 = rev.derivative(0.5, 1).unwrap();
        assert_eq!(d1, vec![-1.0, -0.75]);
        assert_eq!(rev.derivative(0.5, 2).unwrap(), cubic.derivative(-0.5, 2).unwrap());
    }

    #[test]
    fn sphere_jets_limited_to_first_order() {
        let s = curve_catalog("sphere3", &json!({})).unwrap();
        assert_eq!(s.n(), 2);
        assert_eq!(s.param_dim(), 3);
        let p = s.eval_flat(&[0.3, 1.1, 2.0]).unwrap();
        assert!((p.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(matches!(s.jet(&[0.3, 1.1, 2.0], 2), Err(Error::JetOrder { requested: 2, available: 1 })));
    }
}
