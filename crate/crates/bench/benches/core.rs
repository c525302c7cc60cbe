use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use zalm_core::analytics::{metric_bundle, solve_gain, GainTarget};
use zalm_core::fock::{compare_with_analytics, OracleConfig};
use zalm_core::montecarlo::{simulate, McConfig};
use zalm_core::{HeraldMode, HeraldPattern, SourceParams};

fn design_point() -> SourceParams {
    SourceParams::new(0.0173, 0.9, 0.01, 28, 1e10, HeraldMode::SpciPaper).unwrap()
}

fn analytics(c: &mut Criterion) {
    let p = design_point();
    c.bench_function("metric_bundle", |b| b.iter(|| metric_bundle(black_box(&p))));
    c.bench_function("solve_gain_fidelity", |b| {
        b.iter(|| solve_gain(GainTarget::Fidelity(black_box(0.99)), 0.9, 0.01))
    });
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("cutoff_4_one_pattern", |b| {
        b.iter(|| {
            compare_with_analytics(
                black_box(0.0173),
                0.9,
                0.01,
                HeraldPattern::ALL[0],
                OracleConfig::default(),
            )
        })
    });
    group.finish();
}

fn montecarlo(c: &mut Criterion) {
    let p = design_point();
    let config = McConfig {
        n_pulses: 100_000,
        ..McConfig::default()
    };
    let mut group = c.benchmark_group("montecarlo");
    group.sample_size(10);
    group.bench_function("100k_pulses_28_islands", |b| {
        b.iter(|| simulate(black_box(&p), &config))
    });
    group.finish();
}

criterion_group!(benches, analytics, oracle, montecarlo);
criterion_main!(benches);
