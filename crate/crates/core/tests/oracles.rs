use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use weyl_core::hermite::{rho_matrix_1d, HermiteConfig};
use weyl_core::measures::{curve_catalog, CurveSpec, Density, MeasureExpr, SmoothMeasureSpec, CATALOG};
use weyl_core::quadrature::CompositeRule;
use weyl_core::weyl::{singular_values, weyl_matrix, WeylConfig};
use weyl_core::BasisTruncation;

fn catalog_params(name: &str) -> serde_json::Value {
    match name {
        "ellipse" => json!({"a": 1.5, "b": 0.75}),
        "line_segment" => json!({"a": [-1.0, 0.0], "b": [1.0, 0.0]}),
        "polynomial_curve" => json!({"coeffs": [[0.0, 1.0, 0.5], [0.2, 0.0, -1.0, 0.3]], "t0": -1.0, "t1": 1.0}),
        _ => json!({}),
    }
}

fn circle() -> MeasureExpr {
    let chart = curve_catalog("circle", &json!({})).unwrap();
    MeasureExpr::smooth(SmoothMeasureSpec::new(chart, Density::default()).unwrap())
}

/// `<h_0, rho(x, y) h_0>` and `<h_1, rho(x, y) h_0>` from the displacement form.
fn low_entries(x: f64, y: f64) -> (Complex64, Complex64) {
    let alpha = Complex64::new(-x, TAU * y) / 2f64.sqrt();
    let g = (-alpha.norm_sqr() / 2.0).exp();
    (Complex64::new(g, 0.0), alpha * g)
}

/// Dense composite Gauss-Legendre over the angle, independent of the chart machinery.
fn circle_oracle(panels: usize, f: impl Fn(f64) -> Complex64) -> Complex64 {
    // 5-point Gauss-Legendre
    let x = [0.0, 0.538_469_310_105_683_1, -0.538_469_310_105_683_1, 0.906_179_845_938_664, -0.906_179_845_938_664];
    let w = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = TAU / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..panels {
        let mid = h * (i as f64 + 0.5);
        for (xi, wi) in x.iter().zip(w) {
            acc += f(mid + 0.5 * h * xi) * (0.5 * h * wi);
        }
    }
    acc
}

#[test]
fn circle_low_entries_match_dense_angle_quadrature() {
    let m = weyl_matrix(&circle(), &BasisTruncation::one_dim(32).unwrap(), &WeylConfig::default()).unwrap();
    let e00 = circle_oracle(4096, |t| low_entries(t.cos(), t.sin()).0);
    let e10 = circle_oracle(4096, |t| low_entries(t.cos(), t.sin()).1);
    let r00 = (m.get(0, 0) - e00).norm() / e00.norm();
    assert!(r00 <= 1e-8, "entry (0,0): {} vs {e00}, rel {r00:e}", m.get(0, 0));
    // (1, 0) integrates to zero by symmetry, so compare absolutely
    assert!((m.get(1, 0) - e10).norm() <= 1e-12, "{} vs {e10}", m.get(1, 0));

    let shifted = curve_catalog("circle", &json!({"center": [0.5, -0.25], "r": 0.8})).unwrap();
    let shifted = MeasureExpr::smooth(SmoothMeasureSpec::new(shifted, Density::default()).unwrap());
    let m = weyl_matrix(&shifted, &BasisTruncation::one_dim(32).unwrap(), &WeylConfig::default()).unwrap();
    let point = |t: f64| (0.5 + 0.8 * t.cos(), -0.25 + 0.8 * t.sin());
    let e00 = circle_oracle(4096, |t| low_entries(point(t).0, point(t).1).0 * 0.8);
    let e10 = circle_oracle(4096, |t| low_entries(point(t).0, point(t).1).1 * 0.8);
    assert!((m.get(0, 0) - e00).norm() / e00.norm() <= 1e-8);
    assert!((m.get(1, 0) - e10).norm() / e10.norm() <= 1e-8, "{} vs {e10}", m.get(1, 0));
}

#[test]
fn rho_low_entries_closed_form() {
    for (x, y) in [(0.3, -0.7), (-1.2, 0.4), (0.0, 1.5), (2.0, 0.0)] {
        let m = rho_matrix_1d(x, y, 8, &HermiteConfig::default()).unwrap();
        let (e00, e10) = low_entries(x, y);
        assert!((m.get(0, 0) - e00).norm() <= 1e-13, "({x}, {y})");
        assert!((m.get(1, 0) - e10).norm() <= 1e-13, "({x}, {y})");
    }
}

#[test]
fn laguerre_agrees_with_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut points: Vec<(f64, f64)> = (0..24).map(|_| (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
    for _ in 0..8 {
        let r = 10f64.powf(rng.random_range(-8.0..-1.0));
        let a = rng.random_range(0.0..TAU);
        points.push((r * a.cos(), r * a.sin()));
    }
    points.extend([(1e-12, 0.0), (0.0, -1e-12), (0.5, 0.0), (0.0, 0.5)]);
    let quad = HermiteConfig::default();
    let lag = HermiteConfig::laguerre();
    let mut worst = 0.0f64;
    for (x, y) in points {
        let a = rho_matrix_1d(x, y, 48, &quad).unwrap();
        let b = rho_matrix_1d(x, y, 48, &lag).unwrap();
        let d = a.entries() - b.entries();
        worst = worst.max(d.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    assert!(worst <= 1e-8, "max entry difference {worst:e}");
}

#[test]
fn circle_singular_values_self_converged() {
    let trunc = BasisTruncation::one_dim(64).unwrap();
    let base = WeylConfig::default();
    let q = base.hermite.quadrature_order(64, 1.0);
    let fine = WeylConfig {
        curve_rule: Some(base.rule_for(1, 64).doubled()),
        hermite: HermiteConfig { quad_order: Some(2 * q), ..HermiteConfig::default() },
        ..WeylConfig::default()
    };
    let a = singular_values(&weyl_matrix(&circle(), &trunc, &base).unwrap()).unwrap();
    let b = singular_values(&weyl_matrix(&circle(), &trunc, &fine).unwrap()).unwrap();
    let worst = a.iter().zip(&b).map(|(u, v)| (u - v).abs() / v).fold(0.0, f64::max);
    assert!(worst <= 1e-6, "relative singular value change {worst:e}");
    assert!(a.windows(2).all(|w| w[0] >= w[1]) && a.iter().all(|&s| s >= 0.0));
}

#[test]
fn measure_integrals_converge_under_doubling() {
    let f = |p: &weyl_core::PhasePoint| {
        let s: f64 = p.to_flat().iter().sum();
        Complex64::new((1.3 * s).cos(), (0.7 * s).sin()) * (1.0 + p.norm())
    };
    for name in CATALOG {
        let chart = curve_catalog(name, &catalog_params(name)).unwrap();
        let spec = SmoothMeasureSpec::new(chart, Density::default()).unwrap();
        let rule = weyl_core::measures::default_rule(spec.chart().param_dim());
        let a = spec.integral(rule, f).unwrap();
        let b = spec.integral(CompositeRule::new(rule.panels * 2, rule.order), f).unwrap();
        assert!((a - b).norm() <= 1e-8 * b.norm(), "{name}: {a} vs {b}");
    }
}

#[test]
fn sphere_volume_and_circle_moments() {
    let circle = SmoothMeasureSpec::new(curve_catalog("circle", &json!({})).unwrap(), Density::default()).unwrap();
    let x2 = circle.integral(CompositeRule::CURVE, |p| Complex64::new(p.x()[0].powi(2), 0.0)).unwrap();
    assert!((x2.re - PI).abs() <= 1e-12);
    let sphere = SmoothMeasureSpec::new(
        weyl_core::measures::Chart::new(CurveSpec::Sphere3 { center: [0.0; 4], r: 1.5 }).unwrap(),
        Density::default(),
    )
    .unwrap();
    let vol = sphere.mass(CompositeRule::SURFACE).unwrap();
    assert!((vol - 2.0 * PI * PI * 1.5f64.powi(3)).abs() <= 1e-8 * vol);
}
