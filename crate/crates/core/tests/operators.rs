use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::json;
use weyl_core::geometry::{
    finite_type_order, greedy_spanning_points, hyperplane_containment, uniform_samples, SpanSearch, TypeOrder, RANK_TOL,
};
use weyl_core::measures::{curve_catalog, Chart, Density, MeasureExpr, SmoothMeasureSpec, CATALOG};
use weyl_core::tconv::{tconv_density, DensityConfig};
use weyl_core::weyl::{
    compactness_scan, quantum_translate, singular_values, weyl_matrix, ScanThresholds, TConvMode, Trend, WeylConfig,
};
use weyl_core::{BasisTruncation, HermiteConfig, OperatorMatrix, PhasePoint};

fn params(name: &str) -> serde_json::Value {
    match name {
        "ellipse" => json!({"a": 1.5, "b": 0.75}),
        "line_segment" => json!({"a": [-1.0, 0.0], "b": [1.0, 0.0]}),
        "polynomial_curve" => json!({"coeffs": [[0.0, 1.0, 0.5], [0.2, 0.0, -1.0, 0.3]], "t0": -1.0, "t1": 1.0}),
        _ => json!({}),
    }
}

fn smooth(name: &str, p: serde_json::Value) -> MeasureExpr {
    let chart = curve_catalog(name, &p).unwrap();
    MeasureExpr::smooth(SmoothMeasureSpec::new(chart, Density::default()).unwrap())
}

fn block_err(a: &OperatorMatrix, b: &OperatorMatrix, k: usize) -> f64 {
    weyl_core::hermite::frobenius(&(a.block(k) - b.block(k)))
}

#[test]
fn norm_bounded_by_total_mass() {
    let trunc = BasisTruncation::one_dim(32).unwrap();
    let cfg = WeylConfig::default();
    let measures = [
        smooth("circle", json!({})),
        smooth("ellipse", params("ellipse")),
        smooth("line_segment", params("line_segment")),
        smooth("parabola_arc", json!({})),
        MeasureExpr::sum(vec![
            (Complex64::new(0.5, 0.5), MeasureExpr::dirac(PhasePoint::planar(0.3, -0.2))),
            (Complex64::new(-1.0, 0.0), smooth("circle", json!({"r": 0.5}))),
        ])
        .unwrap(),
    ];
    for m in &measures {
        let s1 = singular_values(&weyl_matrix(m, &trunc, &cfg).unwrap()).unwrap()[0];
        let mass = m.mass().unwrap();
        assert!(s1 <= mass + 1e-8, "sigma_1 {s1} exceeds mass {mass}");
    }
}

#[test]
fn convolution_square_is_psd() {
    let trunc = BasisTruncation::one_dim(24).unwrap();
    let cfg = WeylConfig { tconv_mode: TConvMode::Product, ..WeylConfig::default() };
    for m in [smooth("ellipse", params("ellipse")), smooth("cubic_arc", json!({}))] {
        let sq = MeasureExpr::tconv(vec![m.clone(), MeasureExpr::reflected(m)]).unwrap();
        let w = weyl_matrix(&sq, &trunc, &cfg).unwrap();
        let h = w.entries();
        let herm: DMatrix<Complex64> = (h + h.adjoint()).unscale(2.0);
        assert!(weyl_core::hermite::frobenius(&(h - &herm)) <= 1e-12);
        let min = herm.symmetric_eigenvalues().min();
        assert!(min >= -1e-10, "smallest eigenvalue {min:e}");
    }
}

#[test]
fn reflect_is_adjoint_on_catalog() {
    let cfg = WeylConfig::default();
    for name in CATALOG {
        let per_axis = if name == "sphere3" { 8 } else { 32 };
        let m = smooth(name, params(name));
        let trunc = BasisTruncation::new(m.dim().unwrap(), per_axis).unwrap();
        let a = weyl_matrix(&MeasureExpr::reflected(m.clone()), &trunc, &cfg).unwrap();
        let b = weyl_matrix(&m, &trunc, &cfg).unwrap().adjoint();
        let err = a.sub(&b).unwrap().frobenius();
        assert!(err <= 1e-10, "{name}: {err:e}");
    }
}

#[test]
fn quantum_translate_examples() {
    let trunc = BasisTruncation::one_dim(64).unwrap();
    let hermite = HermiteConfig::default();
    let id = OperatorMatrix::identity(trunc.clone());
    let p = PhasePoint::planar(0.6, -0.4);
    let moved = quantum_translate(&id, &p, &hermite).unwrap();
    assert!(block_err(&moved, &id, 16) <= 1e-6);

    let diag = DMatrix::from_fn(64, 64, |i, j| if i == j { Complex64::new(1.0 / (1.0 + i as f64), 0.0) } else { Complex64::new(0.0, 0.0) });
    let diag = OperatorMatrix::new(trunc.clone(), diag).unwrap();
    let back = quantum_translate(&quantum_translate(&diag, &p, &hermite).unwrap(), &p.neg(), &hermite).unwrap();
    assert!(block_err(&back, &diag, 16) <= 1e-6);
    assert_eq!(quantum_translate(&diag, &PhasePoint::origin(1), &hermite).unwrap(), diag);
}

#[test]
fn direct_matches_product_for_dirac_pair() {
    let trunc = BasisTruncation::one_dim(64).unwrap();
    let p = MeasureExpr::dirac(PhasePoint::planar(0.5, 0.3));
    let q = MeasureExpr::dirac(PhasePoint::planar(-0.2, 0.7));
    let tc = MeasureExpr::tconv(vec![p, q]).unwrap();
    let direct = weyl_matrix(&tc, &trunc, &WeylConfig { tconv_mode: TConvMode::Direct, ..WeylConfig::default() }).unwrap();
    let product = weyl_matrix(&tc, &trunc, &WeylConfig::default()).unwrap();
    assert!(block_err(&direct, &product, 16) <= 1e-6);
}

#[test]
fn circle_convolution_square_block_law() {
    let c = smooth("circle", json!({}));
    let tc = MeasureExpr::tconv(vec![c.clone(), MeasureExpr::reflected(c)]).unwrap();
    let direct = WeylConfig { tconv_mode: TConvMode::Direct, ..WeylConfig::default() };
    let mut errs = Vec::new();
    for per_axis in [32, 64, 128] {
        let trunc = BasisTruncation::one_dim(per_axis).unwrap();
        let a = weyl_matrix(&tc, &trunc, &direct).unwrap();
        let b = weyl_matrix(&tc, &trunc, &WeylConfig::default()).unwrap();
        errs.push(block_err(&a, &b, 8));
    }
    assert!(errs[1] <= 1e-4, "{errs:?}");
    // the N = 64 error already sits at the direct-quadrature floor
    assert!(errs[0] >= 2.0 * errs[1] && errs[2] <= 1e-4, "{errs:?}");
}

#[test]
fn density_of_convolution_square_is_hermitian() {
    let chart = curve_catalog("ellipse", &json!({"center": [0.3, -0.2], "a": 1.2, "b": 0.7})).unwrap();
    let spec = SmoothMeasureSpec::new(chart, Density::default()).unwrap();
    let refl = spec.reflect();
    for (x, y) in [(0.4, 0.9), (-1.1, 0.3), (0.8, -0.5), (0.2, 1.2)] {
        let a = tconv_density(&spec, &refl, &PhasePoint::planar(x, y), DensityConfig::default()).unwrap();
        let b = tconv_density(&spec, &refl, &PhasePoint::planar(-x, -y), DensityConfig::default()).unwrap();
        assert_eq!(a.roots_found, b.roots_found);
        assert!(a.roots_found > 0);
        assert!((a.value - b.value.conj()).norm() <= 1e-8 * a.value.norm().max(1.0), "{} vs {}", a.value, b.value);
    }
}

#[test]
fn dirac_scan_is_non_decaying() {
    let m = MeasureExpr::dirac(PhasePoint::planar(0.3, -0.4));
    let r = compactness_scan(&m, &[16, 32, 64], 4, ScanThresholds::default(), &WeylConfig::default()).unwrap();
    assert_eq!(r.trend, Trend::NonDecaying);
    assert!(compactness_scan(&m, &[16, 32], 16, ScanThresholds::default(), &WeylConfig::default()).is_err());
}

fn curve_samples(c: &Chart) -> Vec<Vec<f64>> {
    if c.param_dim() == 1 {
        return uniform_samples(c, 16).into_iter().map(|s| vec![s]).collect();
    }
    let (a, b, d) = (0.4, 1.3, 2.2);
    (0..27).map(|i| vec![a + 0.9 * (i % 3) as f64, b * (0.3 + 0.6 * ((i / 3) % 3) as f64), d * (i / 9) as f64]).collect()
}

#[test]
fn consistency_triangle_on_catalog() {
    for name in CATALOG {
        let c = curve_catalog(name, &params(name)).unwrap();
        let samples = curve_samples(&c);
        let plane = hyperplane_containment(&c, &samples, RANK_TOL).unwrap();
        let span = greedy_spanning_points(&c, &samples, false, RANK_TOL).unwrap();
        if plane.is_some() {
            assert!(matches!(span, SpanSearch::NotFound { .. }), "{name}");
        }
        if matches!(span, SpanSearch::NotFound { .. }) && c.param_dim() == 1 {
            for s in &samples {
                assert_eq!(finite_type_order(&c, s[0], 6, RANK_TOL).unwrap(), TypeOrder::Exceeds, "{name}");
            }
        }
        assert_eq!(plane.is_some(), name == "line_segment", "{name}");
    }
}

#[test]
fn type_order_invariant_under_reversal() {
    for name in CATALOG.iter().filter(|&&n| n != "sphere3") {
        let c = curve_catalog(name, &params(name)).unwrap();
        let r = c.reverse();
        let (lo, hi) = c.domain()[0];
        for s in uniform_samples(&c, 16) {
            // the reversed chart visits the same point at lo + hi - s
            let a = finite_type_order(&c, s, 6, RANK_TOL).unwrap();
            let b = finite_type_order(&r, lo + hi - s, 6, RANK_TOL).unwrap();
            assert_eq!(a, b, "{name} at {s}");
        }
    }
}
