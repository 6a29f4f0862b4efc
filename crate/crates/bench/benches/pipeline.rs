use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use netwave::{
    continuation, intensity_report, max_support_set, run, schedule_pair_equal, schedule_pair_unequal,
    schedule_primary,
};
use netwave_bench::{busy_pair, chain, random_matrix};
use std::hint::black_box;

fn cliques(c: &mut Criterion) {
    let mut group = c.benchmark_group("intensity_report");
    for n in [8, 16, 24] {
        let pair = chain(n, 4);
        let nodes = pair.all_nodes();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| intensity_report(black_box(&pair), &nodes).unwrap())
        });
    }
    let (pair, _, _) = busy_pair();
    let nodes = pair.all_nodes();
    group.bench_function("geometric_pair", |b| b.iter(|| intensity_report(&pair, &nodes).unwrap()));
    group.finish();
}

fn matching(c: &mut Criterion) {
    let mut group = c.benchmark_group("max_support_set");
    for size in [6, 12, 24] {
        let m = random_matrix(size, size, 0.4, 1);
        group.bench_with_input(BenchmarkId::from_parameter(size), &m, |b, m| b.iter(|| max_support_set(black_box(m))));
    }
    let tiled = continuation(&random_matrix(4, 5, 0.5, 2), 4, 3).unwrap();
    group.bench_function("tiled_16x15", |b| b.iter(|| max_support_set(&tiled)));
    group.finish();
}

fn scheduling(c: &mut Criterion) {
    let (pair, t1, t2) = busy_pair();
    c.bench_function("schedule_pair_equal", |b| {
        b.iter(|| schedule_pair_equal(&pair, t1, t2, 2).unwrap())
    });
    c.bench_function("schedule_pair_unequal", |b| {
        b.iter(|| schedule_pair_unequal(&pair, t1, t2, 3, 2).unwrap())
    });
}

fn simulation(c: &mut Criterion) {
    let single = chain(12, 3);
    let s = schedule_primary(&single, 1).unwrap();
    c.bench_function("simulate_chain_100_periods", |b| b.iter(|| run(&single, &s, 100, 5).unwrap()));
    let (pair, t1, t2) = busy_pair();
    let s = schedule_pair_equal(&pair, t1, t2, 1).unwrap();
    c.bench_function("simulate_pair_100_periods", |b| b.iter(|| run(&pair, &s, 100, 9).unwrap()));
}

criterion_group!(benches, cliques, matching, scheduling, simulation);
criterion_main!(benches);
