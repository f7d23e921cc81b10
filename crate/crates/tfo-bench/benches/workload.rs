//! Generator throughput: marketplace sampling and stream emission.

use criterion::{criterion_group, criterion_main, Criterion};

use tfo_bench::freelancer_scale_market;
use tfo_core::seeding::rng_from;
use tfo_core::workload::{generate_task_pool, DistSpec, StreamConfig, StreamSampler};

fn generators(c: &mut Criterion) {
    let market = freelancer_scale_market(0.1, 5);
    let mut rng = rng_from(9);
    let pool = generate_task_pool(&market, 600, DistSpec::Constant(2.86), 0.0, &mut rng).unwrap();

    c.bench_function("neighbor_index_600_tasks", |b| {
        b.iter(|| StreamSampler::new(&pool, 0.5))
    });

    let sampler = StreamSampler::new(&pool, 0.5);
    c.bench_function("stream_10k_tasks", |b| {
        let cfg = StreamConfig {
            coherence: 100.0,
            length: 10_000,
            similarity_floor: 0.5,
            seed: 17,
        };
        b.iter(|| sampler.generate(&cfg).tasks.len())
    });
}

criterion_group!(benches, generators);
criterion_main!(benches);
