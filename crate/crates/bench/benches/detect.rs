use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mid_core::contrast_matrix;
use mid_core::eval::CellSpec;
use mid_core::{detect, DetectionConfig, Interval, NormPolicy, Scenario};
use std::hint::black_box;

fn panel(scenario: Scenario, t_len: usize, dim: usize, n: usize) -> mid_core::MultiSeries {
    CellSpec::standard(scenario, t_len, dim, n, 0.5)
        .replicate_panel(1)
        .unwrap()
        .0
}

fn bench_detect(c: &mut Criterion) {
    let mut group = c.benchmark_group("detect");
    group.sample_size(20);
    for (scenario, n) in [
        (Scenario::PiecewiseConstant, 3),
        (Scenario::PiecewiseConstant, 50),
        (Scenario::PiecewiseLinear, 3),
    ] {
        for dim in [10, 100] {
            let x = panel(scenario, 1500, dim, n);
            let cfg = DetectionConfig::new(scenario, NormPolicy::Auto);
            group.bench_with_input(
                BenchmarkId::new(format!("{scenario}-n{n}"), dim),
                &x,
                |b, x| b.iter(|| detect(black_box(x), &cfg).unwrap()),
            );
        }
    }
    group.finish();
}

fn bench_permutation(c: &mut Criterion) {
    let mut group = c.benchmark_group("permutation");
    group.sample_size(10);
    let x = panel(Scenario::PiecewiseConstant, 500, 10, 3);
    let cfg = DetectionConfig {
        rng_seed: Some(1),
        permutation_count: 200,
        ..DetectionConfig::new(Scenario::PiecewiseConstant, NormPolicy::PermLInf)
    };
    group.bench_function("mean-500x10-k200", |b| {
        b.iter(|| detect(black_box(&x), &cfg).unwrap())
    });
    group.finish();
}

fn bench_contrasts(c: &mut Criterion) {
    let mut group = c.benchmark_group("contrast_matrix");
    for scenario in [Scenario::PiecewiseConstant, Scenario::PiecewiseLinear] {
        let x = panel(scenario, 1500, 50, 3);
        let iv = Interval::new(1, 1500, 1500).unwrap();
        group.bench_function(scenario.as_str(), |b| {
            b.iter(|| contrast_matrix(black_box(&x), iv, scenario).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_detect, bench_permutation, bench_contrasts);
criterion_main!(benches);
