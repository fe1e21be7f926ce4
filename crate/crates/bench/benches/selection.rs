use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use raa_bench::multi_user_channels;
use raa_core::selection::{exhaustive_selection, greedy_selection, sum_rate};
use raa_core::SelectionSet;

fn selection(c: &mut Criterion) {
    let (channels, budget) = multi_user_channels(1);
    let set = SelectionSet::new(vec![2, 7, 12, 17, 22], 5, 25).unwrap();
    c.bench_function("sum_rate/N25_K5_NRF5", |b| {
        b.iter(|| sum_rate(black_box(&set), black_box(&channels), &budget).unwrap())
    });

    let mut group = c.benchmark_group("greedy");
    for n_rf in [1, 3, 5, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(n_rf), &n_rf, |b, &n_rf| {
            b.iter(|| greedy_selection(black_box(&channels), n_rf, &budget).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("exhaustive");
    group.sample_size(10);
    for n_rf in [3, 5] {
        group.bench_with_input(BenchmarkId::from_parameter(n_rf), &n_rf, |b, &n_rf| {
            b.iter(|| exhaustive_selection(black_box(&channels), n_rf, &budget, u128::MAX).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, selection);
criterion_main!(benches);
