//! Per-policy throughput on a large synthetic marketplace.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use tfo_bench::{coherent_stream, guru_scale_market};
use tfo_core::policies::PolicyKind;

fn policy_throughput(c: &mut Criterion) {
    let market = guru_scale_market(0.1, 7);
    let tasks = coherent_stream(&market, 2939, 5.24, 100.0, 1000, 11);
    let mut group = c.benchmark_group("guru_1k_tasks");
    group.sample_size(10);
    for kind in [
        PolicyKind::AlwaysOutsource,
        PolicyKind::AlwaysHire,
        PolicyKind::TfoHeuristic,
        PolicyKind::LumpSum,
        PolicyKind::Tfo,
    ] {
        group.bench_with_input(
            BenchmarkId::from_parameter(kind.cli_name()),
            &kind,
            |b, kind| {
                b.iter(|| {
                    let mut policy = kind.build(market.clone(), 3).unwrap();
                    for task in &tasks {
                        policy.step(task).unwrap();
                    }
                    policy.ledger().total()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, policy_throughput);
criterion_main!(benches);
