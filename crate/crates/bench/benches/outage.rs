use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use sdf_core::{
    estimate_outage, mutual_info_sdf, optimal_split_numeric, sample_realization,
    sdf_outage_exact_eps, split_outage_exact_eps, ChannelStats, LinkBudget, RngStream,
};
use std::hint::black_box;

fn sampling(c: &mut Criterion) {
    let stats = ChannelStats::unit();
    let mut group = c.benchmark_group("sampling");
    group.throughput(Throughput::Elements(1));
    group.bench_function("realization", |b| {
        let mut rng = RngStream::new(1, 0);
        b.iter(|| black_box(sample_realization(&stats, &mut rng)))
    });
    group.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let stats = ChannelStats::unit();
    let budget = LinkBudget::for_epsilon(0.1, 1e-3).unwrap();
    let trials = 1_000_000;
    let mut group = c.benchmark_group("estimate_outage");
    group.sample_size(10);
    group.throughput(Throughput::Elements(trials));
    for workers in [1usize, 4, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(workers), &workers, |b, &w| {
            b.iter(|| estimate_outage(mutual_info_sdf, &stats, &budget, trials, 7, w).unwrap())
        });
    }
    group.finish();
}

fn analytic(c: &mut Criterion) {
    let stats = ChannelStats::new(1.0, 2.0, 0.5).unwrap();
    c.bench_function("sdf_outage_exact_eps", |b| {
        b.iter(|| sdf_outage_exact_eps(black_box(0.1), &stats).unwrap())
    });
    c.bench_function("optimize_exact_split", |b| {
        b.iter(|| {
            optimal_split_numeric(
                |s| split_outage_exact_eps(0.3, &stats, s).unwrap(),
                (0.01, 0.99),
                1e-6,
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, sampling, monte_carlo, analytic);
criterion_main!(benches);
