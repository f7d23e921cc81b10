//! Synthetic marketplaces, coherent task streams, and file ingestion.
//!
//! Marketplace generation is calibrated by configurable distributions: a
//! per-worker skill-count distribution, a popularity skew over skills (so
//! pools vary in size), and an outsourcing-fee distribution; hiring fees and
//! salaries derive from the fees via the `alpha`/`beta` factors. Task pools
//! sample worker subsets and take their combined skills as requirements.
//! Streams interleave pivot switches with draws from the pivot's similarity
//! neighborhood, so runs of mutually similar tasks have expected length `p`.
//!
//! File formats are line-oriented text:
//!
//! * marketplace: `worker_id<TAB>lambda<TAB>C<TAB>sigma<TAB>skill,skill,...`
//! * task pool / stream: `task_id<TAB>skill,skill,...`

use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::model::{
    validate_marketplace, Marketplace, SkillId, Task, ValidationReport, WorkerSpec,
};
use crate::money::Money;
use crate::seeding::rng_from;

#[derive(Debug, Error)]
pub enum WorkloadError {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("marketplace rejected:\n{report}")]
    Invalid { report: ValidationReport },
    #[error("infeasible config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Sampling distribution for counts, fees, and skill popularity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistSpec {
    /// Always this value; counts round stochastically to hit the mean.
    Constant(f64),
    /// Uniform on `[a, b]`.
    Uniform(f64, f64),
    /// Zipf with the given exponent (popularity use only: item `i` gets
    /// weight `1 / (i + 1)^s`).
    Zipf(f64),
}

impl DistSpec {
    pub fn mean(&self) -> f64 {
        match self {
            DistSpec::Constant(v) => *v,
            DistSpec::Uniform(a, b) => (a + b) / 2.0,
            DistSpec::Zipf(_) => f64::NAN,
        }
    }

    fn sample_value(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            DistSpec::Constant(v) => *v,
            DistSpec::Uniform(a, b) => rng.gen_range(*a..=*b),
            DistSpec::Zipf(_) => panic!("zipf is a popularity skew, not a value distribution"),
        }
    }

    /// Sample a positive integer whose expectation is the distribution mean
    /// (stochastic rounding of the fractional part).
    fn sample_count(&self, rng: &mut ChaCha8Rng) -> usize {
        let v = self.sample_value(rng).max(0.0);
        let floor = v.floor();
        let frac = v - floor;
        let mut k = floor as usize;
        if rng.gen::<f64>() < frac {
            k += 1;
        }
        k.max(1)
    }
}

/// Parameters for [`generate_marketplace`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarketplaceConfig {
    pub workers: usize,
    pub skills: usize,
    /// Distribution of the number of skills per worker.
    pub skills_per_worker: DistSpec,
    /// Popularity skew over skill ids; `zipf(0.0)` is uniform.
    #[serde(default = "default_popularity")]
    pub skill_popularity: DistSpec,
    /// Distribution of outsourcing fees, in currency units.
    pub lambda_dist: DistSpec,
    /// `C = hiring_factor * lambda`.
    pub hiring_factor: f64,
    /// `sigma = salary_ratio * lambda`; zero for the salary-free setting.
    pub salary_ratio: f64,
    pub seed: u64,
}

fn default_popularity() -> DistSpec {
    DistSpec::Zipf(1.0)
}

impl MarketplaceConfig {
    fn check(&self) -> Result<(), WorkloadError> {
        if self.workers == 0 || self.skills == 0 {
            return Err(WorkloadError::Config(
                "need at least one worker and one skill".into(),
            ));
        }
        if self.hiring_factor < 1.0 {
            return Err(WorkloadError::Config(format!(
                "hiring_factor must be >= 1, got {}",
                self.hiring_factor
            )));
        }
        if !(0.0..1.0).contains(&self.salary_ratio) {
            return Err(WorkloadError::Config(format!(
                "salary_ratio must be in [0, 1), got {}",
                self.salary_ratio
            )));
        }
        if self.hiring_factor + self.salary_ratio <= 1.0 {
            return Err(WorkloadError::Config(
                "hiring_factor + salary_ratio must exceed 1 or hiring never pays".into(),
            ));
        }
        Ok(())
    }
}

/// Weighted skill sampler implementing the popularity skew.
struct SkillSampler {
    /// Cumulative weights over skill ids.
    cumulative: Vec<f64>,
}

impl SkillSampler {
    fn new(m: usize, popularity: DistSpec) -> Self {
        let exponent = match popularity {
            DistSpec::Zipf(s) => s,
            _ => 0.0,
        };
        let mut cumulative = Vec::with_capacity(m);
        let mut acc = 0.0;
        for i in 0..m {
            acc += 1.0 / ((i + 1) as f64).powf(exponent);
            cumulative.push(acc);
        }
        Self { cumulative }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> SkillId {
        let total = *self.cumulative.last().expect("non-empty universe");
        let x = rng.gen::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= x)
    }

    /// Sample `k` distinct skills; falls back to a sweep when rejection
    /// stalls on a heavily skewed universe.
    fn sample_distinct(&self, k: usize, rng: &mut ChaCha8Rng, out: &mut Vec<SkillId>) {
        let m = self.cumulative.len();
        let k = k.min(m);
        out.clear();
        let mut tries = 0;
        while out.len() < k && tries < 20 * k + 50 {
            let s = self.sample(rng);
            if !out.contains(&s) {
                out.push(s);
            }
            tries += 1;
        }
        let mut next = 0;
        while out.len() < k {
            if !out.contains(&next) {
                out.push(next);
            }
            next += 1;
        }
    }
}

/// Generate a marketplace that passes validation: skills sampled under the
/// popularity skew, fees from `lambda_dist`, and `C`/`sigma` derived by the
/// configured factors. Orphan skills are repaired by swapping them into
/// random workers in place of a redundantly covered skill, keeping the
/// per-worker skill counts intact.
pub fn generate_marketplace(cfg: &MarketplaceConfig) -> Result<Marketplace, WorkloadError> {
    cfg.check()?;
    let mut rng = rng_from(cfg.seed);
    let sampler = SkillSampler::new(cfg.skills, cfg.skill_popularity);

    let mut worker_skills: Vec<Vec<SkillId>> = Vec::with_capacity(cfg.workers);
    let mut scratch = Vec::new();
    for _ in 0..cfg.workers {
        let k = cfg.skills_per_worker.sample_count(&mut rng).min(cfg.skills);
        sampler.sample_distinct(k, &mut rng, &mut scratch);
        worker_skills.push(scratch.clone());
    }

    // Pool sizes for the orphan repair pass.
    let mut pool_size = vec![0usize; cfg.skills];
    for skills in &worker_skills {
        for &s in skills {
            pool_size[s] += 1;
        }
    }
    for orphan in 0..cfg.skills {
        if pool_size[orphan] > 0 {
            continue;
        }
        let mut placed = false;
        for _ in 0..200 {
            let w = rng.gen_range(0..cfg.workers);
            // Swap out a skill someone else still covers.
            if let Some(pos) = worker_skills[w]
                .iter()
                .position(|&s| pool_size[s] > 1)
            {
                let old = worker_skills[w][pos];
                pool_size[old] -= 1;
                worker_skills[w][pos] = orphan;
                pool_size[orphan] += 1;
                placed = true;
                break;
            }
        }
        if !placed {
            // Every worker holds only singleton-covered skills; append.
            let w = rng.gen_range(0..cfg.workers);
            worker_skills[w].push(orphan);
            pool_size[orphan] += 1;
        }
    }

    let specs: Vec<WorkerSpec> = worker_skills
        .into_iter()
        .enumerate()
        .map(|(i, skills)| {
            let lambda = Money::from_units(cfg.lambda_dist.sample_value(&mut rng))
                .max(Money::from_cents(1));
            WorkerSpec {
                label: format!("w{i}"),
                skills,
                outsource_fee: lambda,
                hiring_fee: lambda.scale(cfg.hiring_factor),
                salary: lambda.scale(cfg.salary_ratio),
            }
        })
        .collect();

    let skill_names = (0..cfg.skills).map(|i| format!("s{i}")).collect();
    let market = Marketplace::new(skill_names, specs);
    let report = validate_marketplace(&market);
    if !report.is_accepted() {
        return Err(WorkloadError::Invalid { report });
    }
    Ok(market)
}

/// A pool of distinct tasks that streams sample from.
#[derive(Clone, Debug)]
pub struct TaskPool {
    pub tasks: Vec<Task>,
    pub skill_count: usize,
}

/// Build a task pool by sampling worker subsets and taking their combined
/// skills, trimmed to a size drawn from `skills_per_task`. With
/// `worker_exclusion > 0`, that fraction of workers is removed from the
/// candidate pool first (they stay available as workers).
pub fn generate_task_pool(
    market: &Marketplace,
    count: usize,
    skills_per_task: DistSpec,
    worker_exclusion: f64,
    rng: &mut ChaCha8Rng,
) -> Result<TaskPool, WorkloadError> {
    let n = market.worker_count();
    let m = market.skill_count();
    if count == 0 {
        return Err(WorkloadError::Config("task pool must be non-empty".into()));
    }
    let mut candidates: Vec<usize> = (0..n).collect();
    if worker_exclusion > 0.0 {
        candidates.shuffle(rng);
        let keep = ((n as f64) * (1.0 - worker_exclusion)).ceil().max(1.0) as usize;
        candidates.truncate(keep);
        candidates.sort_unstable();
    }
    let available: usize = {
        let mut union = BitSet::new(m);
        for &r in &candidates {
            union.union_with(&market.worker(r).skills);
        }
        union.len()
    };

    let mut tasks = Vec::with_capacity(count);
    for _ in 0..count {
        let target = skills_per_task.sample_count(rng).min(available);
        let mut acc = BitSet::new(m);
        while acc.len() < target {
            let &r = candidates.choose(rng).expect("non-empty candidates");
            acc.union_with(&market.worker(r).skills);
        }
        let skills: Vec<SkillId> = acc.iter().collect();
        let chosen = rand::seq::index::sample(rng, skills.len(), target);
        let mut task_skills: Vec<SkillId> = chosen.iter().map(|i| skills[i]).collect();
        task_skills.sort_unstable();
        tasks.push(Task::new(m, task_skills));
    }
    Ok(TaskPool {
        tasks,
        skill_count: m,
    })
}

/// Jaccard similarity of two skill sets; 1 when both are empty.
pub fn jaccard(a: &BitSet, b: &BitSet) -> f64 {
    let union = a.union_len(b);
    if union == 0 {
        return 1.0;
    }
    a.intersection_len(b) as f64 / union as f64
}

/// Stream generation parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StreamConfig {
    /// Coherence: expected length of a run of similar tasks.
    pub coherence: f64,
    pub length: usize,
    /// Similarity floor for the pivot neighborhood.
    #[serde(default = "default_similarity_floor")]
    pub similarity_floor: f64,
    pub seed: u64,
}

fn default_similarity_floor() -> f64 {
    0.5
}

/// A generated stream plus the pivot bookkeeping used to verify coherence.
#[derive(Clone, Debug)]
pub struct TaskStream {
    pub tasks: Vec<Task>,
    /// Pool index of the pivot governing each emission.
    pub pivots: Vec<usize>,
    /// Whether each step drew a fresh pivot.
    pub switches: Vec<bool>,
}

impl TaskStream {
    /// Lengths of the maximal segments between pivot draws.
    pub fn run_lengths(&self) -> Vec<usize> {
        let mut runs = Vec::new();
        let mut current = 0usize;
        for (i, &switch) in self.switches.iter().enumerate() {
            if i > 0 && switch {
                runs.push(current);
                current = 0;
            }
            current += 1;
        }
        if current > 0 {
            runs.push(current);
        }
        runs
    }
}

/// Precomputed similarity neighborhoods over a task pool.
pub struct StreamSampler<'a> {
    pool: &'a TaskPool,
    /// For each task, the other pool tasks with Jaccard >= floor.
    neighbors: Vec<Vec<usize>>,
}

impl<'a> StreamSampler<'a> {
    /// Pairwise Jaccard among tasks sharing at least one skill, through an
    /// inverted index; quadratic only in the worst case and built once.
    pub fn new(pool: &'a TaskPool, similarity_floor: f64) -> Self {
        let mut by_skill: Vec<Vec<usize>> = vec![Vec::new(); pool.skill_count];
        for (i, task) in pool.tasks.iter().enumerate() {
            for s in task.skills.iter() {
                by_skill[s].push(i);
            }
        }
        let mut neighbors = vec![Vec::new(); pool.tasks.len()];
        let mut seen = vec![usize::MAX; pool.tasks.len()];
        for (i, task) in pool.tasks.iter().enumerate() {
            for s in task.skills.iter() {
                for &j in &by_skill[s] {
                    if j == i || seen[j] == i {
                        continue;
                    }
                    seen[j] = i;
                    if jaccard(&task.skills, &pool.tasks[j].skills) >= similarity_floor {
                        neighbors[i].push(j);
                    }
                }
            }
            neighbors[i].sort_unstable();
        }
        Self { pool, neighbors }
    }

    /// Emit a stream: with probability `1/p` draw a fresh uniform pivot and
    /// emit it; otherwise emit a uniform draw from the pivot's neighborhood
    /// (the pivot itself when it has no neighbors above the floor).
    pub fn generate(&self, cfg: &StreamConfig) -> TaskStream {
        assert!(cfg.coherence >= 1.0, "coherence must be >= 1");
        let mut rng = rng_from(cfg.seed);
        let pool_len = self.pool.tasks.len();
        let switch_prob = 1.0 / cfg.coherence;
        let mut pivot = rng.gen_range(0..pool_len);
        let mut tasks = Vec::with_capacity(cfg.length);
        let mut pivots = Vec::with_capacity(cfg.length);
        let mut switches = Vec::with_capacity(cfg.length);
        for _ in 0..cfg.length {
            if rng.gen::<f64>() < switch_prob {
                pivot = rng.gen_range(0..pool_len);
                tasks.push(self.pool.tasks[pivot].clone());
                switches.push(true);
            } else {
                let nbrs = &self.neighbors[pivot];
                let pick = if nbrs.is_empty() {
                    // No neighbor reaches the floor; repeat the pivot.
                    pivot
                } else {
                    nbrs[rng.gen_range(0..nbrs.len())]
                };
                tasks.push(self.pool.tasks[pick].clone());
                switches.push(false);
            }
            pivots.push(pivot);
        }
        TaskStream {
            tasks,
            pivots,
            switches,
        }
    }
}

/// Convenience wrapper building the sampler per call.
pub fn generate_stream(pool: &TaskPool, cfg: &StreamConfig) -> TaskStream {
    StreamSampler::new(pool, cfg.similarity_floor).generate(cfg)
}

/// Parse a marketplace file without validating the cost assumptions.
pub fn parse_marketplace(path: &Path) -> Result<Marketplace, WorkloadError> {
    let text = fs::read_to_string(path)?;
    let display = path.display().to_string();
    let mut skill_names: Vec<String> = Vec::new();
    let mut skill_ids: std::collections::HashMap<String, SkillId> = std::collections::HashMap::new();
    let mut labels: std::collections::HashSet<String> = std::collections::HashSet::new();
    let mut specs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(WorkloadError::Parse {
                path: display,
                line: lineno,
                message: format!("expected 5 tab-separated fields, got {}", fields.len()),
            });
        }
        let label = fields[0].trim().to_string();
        if label.is_empty() {
            return Err(WorkloadError::Parse {
                path: display,
                line: lineno,
                message: "empty worker id".into(),
            });
        }
        if !labels.insert(label.clone()) {
            return Err(WorkloadError::Parse {
                path: display,
                line: lineno,
                message: format!("duplicate worker id {label:?}"),
            });
        }
        let parse_money = |field: &str, what: &str| {
            Money::parse(field).map_err(|e| WorkloadError::Parse {
                path: display.clone(),
                line: lineno,
                message: format!("{what}: {e}"),
            })
        };
        let outsource_fee = parse_money(fields[1], "outsourcing fee")?;
        let hiring_fee = parse_money(fields[2], "hiring fee")?;
        let salary = parse_money(fields[3], "salary")?;
        let mut skills = Vec::new();
        for name in fields[4].split(',') {
            let name = name.trim();
            if name.is_empty() {
                return Err(WorkloadError::Parse {
                    path: display,
                    line: lineno,
                    message: "empty skill name".into(),
                });
            }
            let id = *skill_ids.entry(name.to_string()).or_insert_with(|| {
                skill_names.push(name.to_string());
                skill_names.len() - 1
            });
            if !skills.contains(&id) {
                skills.push(id);
            }
        }
        specs.push(WorkerSpec {
            label,
            skills,
            outsource_fee,
            hiring_fee,
            salary,
        });
    }
    Ok(Marketplace::new(skill_names, specs))
}

/// Parse and validate a marketplace file. With `force`, cost-rule violations
/// downgrade to warnings; structural defects still reject.
pub fn load_marketplace(path: &Path, force: bool) -> Result<Marketplace, WorkloadError> {
    let market = parse_marketplace(path)?;
    let report = validate_marketplace(&market);
    let ok = if force {
        report.is_accepted_with_force()
    } else {
        report.is_accepted()
    };
    if !ok {
        return Err(WorkloadError::Invalid { report });
    }
    Ok(market)
}

/// Parse a task file (`task_id<TAB>skill,skill,...`) against a marketplace's
/// skill universe. Used for both task pools and replayed streams (line order
/// is stream order).
pub fn load_task_pool(path: &Path, market: &Marketplace) -> Result<TaskPool, WorkloadError> {
    let text = fs::read_to_string(path)?;
    let display = path.display().to_string();
    let mut tasks = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 {
            return Err(WorkloadError::Parse {
                path: display,
                line: lineno,
                message: format!("expected 2 tab-separated fields, got {}", fields.len()),
            });
        }
        let mut skills = Vec::new();
        for name in fields[1].split(',') {
            let name = name.trim();
            if name.is_empty() {
                return Err(WorkloadError::Parse {
                    path: display,
                    line: lineno,
                    message: "empty skill name".into(),
                });
            }
            match market.skill_id(name) {
                Some(id) => skills.push(id),
                None => {
                    return Err(WorkloadError::Parse {
                        path: display,
                        line: lineno,
                        message: format!("skill {name:?} not offered by any worker"),
                    })
                }
            }
        }
        tasks.push(Task::new(market.skill_count(), skills));
    }
    if tasks.is_empty() {
        return Err(WorkloadError::Parse {
            path: display,
            line: 0,
            message: "no tasks in file".into(),
        });
    }
    Ok(TaskPool {
        tasks,
        skill_count: market.skill_count(),
    })
}

/// Write a marketplace in the ingestion format.
pub fn save_marketplace(market: &Marketplace, path: &Path) -> Result<(), WorkloadError> {
    let mut out = fs::File::create(path)?;
    for w in market.workers() {
        let skills: Vec<&str> = w.skills.iter().map(|s| market.skill_name(s)).collect();
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            w.label,
            w.outsource_fee,
            w.hiring_fee,
            w.salary,
            skills.join(",")
        )?;
    }
    Ok(())
}

/// Write tasks in the replay format, one per line with 1-based indices.
pub fn save_tasks(tasks: &[Task], market: &Marketplace, path: &Path) -> Result<(), WorkloadError> {
    let mut out = fs::File::create(path)?;
    for (i, task) in tasks.iter().enumerate() {
        let skills: Vec<&str> = task.skills.iter().map(|s| market.skill_name(s)).collect();
        writeln!(out, "{}\t{}", i + 1, skills.join(","))?;
    }
    Ok(())
}
