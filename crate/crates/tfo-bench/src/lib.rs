//! Shared fixtures for the criterion benchmarks: marketplaces and streams
//! shaped like the large-marketplace experiments.

use std::sync::Arc;

use tfo_core::model::{Marketplace, Task};
use tfo_core::seeding::rng_from;
use tfo_core::workload::{
    generate_marketplace, generate_stream, generate_task_pool, DistSpec, MarketplaceConfig,
    StreamConfig,
};

/// A large synthetic marketplace (about 6K workers over 1.6K skills).
pub fn guru_scale_market(salary_ratio: f64, seed: u64) -> Arc<Marketplace> {
    let cfg = MarketplaceConfig {
        workers: 6119,
        skills: 1639,
        skills_per_worker: DistSpec::Constant(13.07),
        skill_popularity: DistSpec::Zipf(1.0),
        lambda_dist: DistSpec::Uniform(1.0, 10.0),
        hiring_factor: 4.0,
        salary_ratio,
        seed,
    };
    Arc::new(generate_marketplace(&cfg).expect("valid config"))
}

/// A small synthetic marketplace (about 1.2K workers over 175 skills).
pub fn freelancer_scale_market(salary_ratio: f64, seed: u64) -> Arc<Marketplace> {
    let cfg = MarketplaceConfig {
        workers: 1211,
        skills: 175,
        skills_per_worker: DistSpec::Constant(1.45),
        skill_popularity: DistSpec::Zipf(1.0),
        lambda_dist: DistSpec::Uniform(1.0, 10.0),
        hiring_factor: 4.0,
        salary_ratio,
        seed,
    };
    Arc::new(generate_marketplace(&cfg).expect("valid config"))
}

/// A coherent stream over a fresh task pool for the given marketplace.
pub fn coherent_stream(
    market: &Marketplace,
    pool_size: usize,
    skills_per_task: f64,
    p: f64,
    length: usize,
    seed: u64,
) -> Vec<Task> {
    let mut rng = rng_from(seed);
    let pool = generate_task_pool(
        market,
        pool_size,
        DistSpec::Constant(skills_per_task),
        0.0,
        &mut rng,
    )
    .expect("valid pool config");
    generate_stream(
        &pool,
        &StreamConfig {
            coherence: p,
            length,
            similarity_floor: 0.5,
            seed,
        },
    )
    .tasks
}
