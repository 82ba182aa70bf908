use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use noncvx::estimators::{estimate_d, estimate_l_hat, estimate_m, estimate_w};
use noncvx::EstimatorConfig;
use noncvx_bench::a1_cloud;

fn estimators(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimators");
    group.sample_size(10);
    let cfg = EstimatorConfig {
        area_override: Some(3.0),
        triple_budget: 50_000,
        ..EstimatorConfig::default()
    };
    for n in [400, 1600] {
        let cloud = a1_cloud(n, 3);
        group.bench_with_input(BenchmarkId::new("D", n), &cloud, |b, c| b.iter(|| estimate_d(c).unwrap()));
        group.bench_with_input(BenchmarkId::new("M", n), &cloud, |b, c| b.iter(|| estimate_m(c, &cfg).unwrap()));
        group.bench_with_input(BenchmarkId::new("W", n), &cloud, |b, c| b.iter(|| estimate_w(c, &cfg).unwrap()));
        group.bench_with_input(BenchmarkId::new("L_hat", n), &cloud, |b, c| {
            b.iter(|| estimate_l_hat(c, &cfg).unwrap())
        });
        let with_ci = EstimatorConfig { level: Some(0.95), ..cfg };
        group.bench_with_input(BenchmarkId::new("L_hat_ci", n), &cloud, |b, c| {
            b.iter(|| estimate_l_hat(c, &with_ci).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, estimators);
criterion_main!(benches);
