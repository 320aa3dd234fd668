use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use serde_json::json;
use weyl_core::measures::{curve_catalog, Density, MeasureExpr, SmoothMeasureSpec};
use weyl_core::weyl::{weyl_matrix, WeylConfig};
use weyl_core::{BasisTruncation, Execution, HermiteConfig};

fn circle() -> MeasureExpr {
    let chart = curve_catalog("circle", &json!({})).unwrap();
    MeasureExpr::smooth(SmoothMeasureSpec::new(chart, Density::default()).unwrap())
}

fn assembly(c: &mut Criterion) {
    let m = circle();
    let mut group = c.benchmark_group("circle_assembly");
    group.sample_size(10);
    for per_axis in [32usize, 64] {
        let trunc = BasisTruncation::one_dim(per_axis).unwrap();
        for (label, execution) in [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)] {
            for (backend, hermite) in [("quadrature", HermiteConfig::default()), ("laguerre", HermiteConfig::laguerre())] {
                let cfg = WeylConfig { execution, hermite: hermite.clone(), ..WeylConfig::default() };
                group.bench_with_input(BenchmarkId::new(format!("{label}/{backend}"), per_axis), &trunc, |b, t| {
                    b.iter(|| weyl_matrix(&m, t, &cfg).unwrap())
                });
            }
        }
    }
    group.finish();
}

criterion_group!(benches, assembly);
criterion_main!(benches);
