//! Experiment orchestration: the verifying policy runner, multi-stream
//! sweeps, aggregation, and CSV emission.
//!
//! Every run goes through [`run_policy`], which checks the step invariants
//! as it goes: each task must be covered by the materialized team plus the
//! outsourced workers, itemized charges must match the id lists, and the
//! ledger must replay exactly from the step outcomes. Experiments derive all
//! seeds from the master seed via [`crate::seeding::mix`]; streams are keyed
//! by (sweep point, stream index) only, so every policy at a sweep point
//! consumes the identical stream, and policy seeds use stable per-policy ids
//! so adding a policy never changes the others' results.

use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::model::{
    validate_marketplace, CostBreakdown, CostLedger, Marketplace, StepOutcome, Task,
};
use crate::money::Money;
use crate::policies::{Policy, PolicyError, PolicyKind};
use crate::seeding::{mix, rng_from};
use crate::workload::{
    generate_marketplace, generate_task_pool, load_marketplace, load_task_pool, save_marketplace,
    save_tasks, DistSpec, MarketplaceConfig, StreamConfig, StreamSampler, TaskPool, WorkloadError,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error("invariant violated at period {t}: {detail}")]
    Invariant { t: usize, detail: String },
    #[error(transparent)]
    Workload(#[from] WorkloadError),
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// What [`run_policy`] should retain beyond the ledger.
#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    pub record_outcomes: bool,
    pub record_dual: bool,
}

/// Everything retained from one policy x stream run.
pub struct RunRecord {
    pub ledger: CostLedger,
    pub outcomes: Option<Vec<StepOutcome>>,
    /// Dual lower bound after each period (primal-dual policies only).
    pub dual_trajectory: Option<Vec<f64>>,
    pub wall: Duration,
}

/// Drive a policy over a stream, enforcing the step invariants.
pub fn run_policy(
    policy: &mut dyn Policy,
    tasks: &[Task],
    market: &Marketplace,
    opts: &RunOptions,
) -> Result<RunRecord, HarnessError> {
    let started = Instant::now();
    let mut team = BitSet::new(market.worker_count());
    let mut team_skills = BitSet::new(market.skill_count());
    let mut cover_count = vec![0u32; market.skill_count()];
    let mut replay = CostBreakdown::ZERO;
    let mut outcomes = opts.record_outcomes.then(Vec::new);
    let mut dual = opts.record_dual.then(Vec::new);
    let track_salary = policy.charges_salary();

    for (i, task) in tasks.iter().enumerate() {
        let t = i + 1;
        let outcome = policy.step(task)?;
        let fail = |detail: String| HarnessError::Invariant { t, detail };
        if outcome.t != t {
            return Err(fail(format!("outcome period {} != {}", outcome.t, t)));
        }
        for &r in &outcome.fired {
            if !team.contains(r) {
                return Err(fail(format!("fired worker {r} was not on the team")));
            }
            if outcome.hired.contains(&r) {
                return Err(fail(format!("worker {r} both hired and fired")));
            }
            team.remove(r);
            for s in market.worker(r).skills.iter() {
                cover_count[s] -= 1;
                if cover_count[s] == 0 {
                    team_skills.remove(s);
                }
            }
        }
        for &r in &outcome.outsourced {
            if team.contains(r) {
                return Err(fail(format!("outsourced worker {r} is already hired")));
            }
        }
        for &r in &outcome.hired {
            if team.contains(r) {
                // Back-to-back interval renewal: the expiring interval's
                // fire and the new hire fall in the same period, so the
                // worker never leaves the team but pays a fresh hiring fee.
                continue;
            }
            team.insert(r);
            for s in market.worker(r).skills.iter() {
                cover_count[s] += 1;
                team_skills.insert(s);
            }
        }

        let mut covered = team_skills.clone();
        for &r in &outcome.outsourced {
            covered.union_with(&market.worker(r).skills);
        }
        if !task.skills.is_subset_of(&covered) {
            return Err(fail("task not covered by team plus outsourced".into()));
        }

        let outsourcing: Money = outcome
            .outsourced
            .iter()
            .map(|&r| market.worker(r).outsource_fee)
            .sum();
        if outsourcing != outcome.step_cost.outsourcing {
            return Err(fail(format!(
                "outsourcing charge {} != sum of fees {}",
                outcome.step_cost.outsourcing, outsourcing
            )));
        }
        let hiring: Money = outcome
            .hired
            .iter()
            .map(|&r| market.worker(r).hiring_fee)
            .sum();
        if hiring != outcome.step_cost.hiring {
            return Err(fail(format!(
                "hiring charge {} != sum of fees {}",
                outcome.step_cost.hiring, hiring
            )));
        }
        if track_salary {
            let salary: Money = team.iter().map(|r| market.worker(r).salary).sum();
            if salary != outcome.step_cost.salary {
                return Err(fail(format!(
                    "salary charge {} != team salaries {}",
                    outcome.step_cost.salary, salary
                )));
            }
        }

        replay.add(&outcome.step_cost);
        if let Some(ds) = dual.as_mut() {
            ds.push(policy.dual_lower_bound().unwrap_or(0.0));
        }
        if let Some(os) = outcomes.as_mut() {
            os.push(outcome);
        }
    }

    let ledger = policy.ledger().clone();
    if replay != *ledger.cumulative() {
        return Err(HarnessError::Invariant {
            t: tasks.len(),
            detail: format!(
                "ledger total {} does not replay from outcomes ({})",
                ledger.total(),
                replay.total()
            ),
        });
    }
    if ledger.periods() != tasks.len() {
        return Err(HarnessError::Invariant {
            t: tasks.len(),
            detail: "ledger trajectory length != stream length".into(),
        });
    }

    Ok(RunRecord {
        ledger,
        outcomes,
        dual_trajectory: dual,
        wall: started.elapsed(),
    })
}

/// Where the marketplace comes from.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MarketSource {
    File(PathBuf),
    Generated(MarketplaceConfig),
}

/// Where the task pool comes from.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolSource {
    File(PathBuf),
    Generated {
        count: usize,
        skills_per_task: DistSpec,
        #[serde(default)]
        worker_exclusion: f64,
    },
}

/// Sweep axes; empty alpha/beta lists mean "keep the source costs".
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SweepAxes {
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default)]
    pub salary_ratio: Vec<f64>,
    #[serde(default)]
    pub hiring_factor: Vec<f64>,
}

/// Full experiment description; mirrors the CLI config file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub market: MarketSource,
    pub pool: PoolSource,
    pub policies: Vec<String>,
    #[serde(default = "default_streams")]
    pub streams: usize,
    #[serde(default = "default_length")]
    pub length: usize,
    #[serde(default)]
    pub sweep: SweepAxes,
    pub master_seed: u64,
    pub out_dir: PathBuf,
    /// Downgrade cost-rule violations in ingested marketplaces to warnings.
    #[serde(default)]
    pub force: bool,
    /// Record a per-step trace of stream 0 for each policy.
    #[serde(default)]
    pub trace: bool,
    /// Export the generated marketplace and the first stream for replay.
    #[serde(default)]
    pub export_inputs: bool,
}

fn default_streams() -> usize {
    100
}

fn default_length() -> usize {
    10_000
}

/// One sweep point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellKey {
    pub p: f64,
    pub salary_ratio: Option<f64>,
    pub hiring_factor: Option<f64>,
}

/// Aggregates for one policy at one sweep point.
pub struct PolicyAggregate {
    pub kind: PolicyKind,
    /// Mean cumulative cost per period, itemized, in currency units.
    pub mean_outsourcing: Vec<f64>,
    pub mean_hiring: Vec<f64>,
    pub mean_salary: Vec<f64>,
    pub mean_total: Vec<f64>,
    pub mean_dual_bound: Vec<f64>,
    /// Per-stream final totals in cents, indexed by stream.
    pub final_totals: Vec<i64>,
    pub mean_final_total: f64,
    pub mean_wall: Duration,
    pub max_wall: Duration,
}

/// Results for one sweep point.
pub struct CellReport {
    pub key: CellKey,
    pub policies: Vec<PolicyAggregate>,
    /// Mean over streams of `total(a) / total(b)` for every ordered pair.
    pub ratios: Vec<(PolicyKind, PolicyKind, f64)>,
    pub errors: Vec<String>,
}

pub struct ExperimentReport {
    pub cells: Vec<CellReport>,
    pub streams: usize,
    pub length: usize,
    pub master_seed: u64,
}

const SALT_MARKET: u64 = 0x6d61_726b;
const SALT_POOL: u64 = 0x706f_6f6c;
const SALT_STREAM: u64 = 0x7374_7265;
const SALT_POLICY: u64 = 0x706f_6c69;

/// Seed for the stream at (cell, stream index); shared by all policies.
pub fn stream_seed(master: u64, cell: usize, stream: usize) -> u64 {
    mix(master, &[SALT_STREAM, cell as u64, stream as u64])
}

/// Seed for a policy run at (cell, stream index, policy).
pub fn policy_seed(master: u64, cell: usize, stream: usize, kind: PolicyKind) -> u64 {
    mix(
        master,
        &[SALT_POLICY, cell as u64, stream as u64, kind.stable_id()],
    )
}

fn parse_policies(names: &[String]) -> Result<Vec<PolicyKind>, HarnessError> {
    if names.is_empty() {
        return Err(HarnessError::Config("no policies requested".into()));
    }
    names
        .iter()
        .map(|n| {
            PolicyKind::from_cli_name(n)
                .ok_or_else(|| HarnessError::Config(format!("unknown policy {n:?}")))
        })
        .collect()
}

fn sweep_cells(sweep: &SweepAxes) -> Vec<CellKey> {
    let ps: Vec<f64> = if sweep.p.is_empty() {
        vec![100.0]
    } else {
        sweep.p.clone()
    };
    let betas: Vec<Option<f64>> = if sweep.salary_ratio.is_empty() {
        vec![None]
    } else {
        sweep.salary_ratio.iter().copied().map(Some).collect()
    };
    let alphas: Vec<Option<f64>> = if sweep.hiring_factor.is_empty() {
        vec![None]
    } else {
        sweep.hiring_factor.iter().copied().map(Some).collect()
    };
    let mut cells = Vec::new();
    for &p in &ps {
        for &beta in &betas {
            for &alpha in &alphas {
                cells.push(CellKey {
                    p,
                    salary_ratio: beta,
                    hiring_factor: alpha,
                });
            }
        }
    }
    cells
}

struct StreamRun {
    final_total: i64,
    trajectory: Vec<CostBreakdown>,
    dual: Vec<f64>,
    wall: Duration,
    trace: Option<Vec<StepOutcome>>,
}

/// Run the full sweep: build the base inputs once, derive each cell's
/// marketplace by cost overrides, and fan (policy x stream) cells out in
/// parallel. Results are deterministic for a fixed master seed regardless of
/// thread count: all randomness is keyed by (cell, stream, policy) and
/// aggregation folds in stream order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, HarnessError> {
    let kinds = parse_policies(&cfg.policies)?;
    if cfg.streams == 0 || cfg.length == 0 {
        return Err(HarnessError::Config(
            "streams and length must be positive".into(),
        ));
    }

    let base_market = match &cfg.market {
        MarketSource::File(path) => load_marketplace(path, cfg.force)?,
        MarketSource::Generated(mc) => {
            let mut mc = mc.clone();
            mc.seed = mix(cfg.master_seed, &[SALT_MARKET, mc.seed]);
            generate_marketplace(&mc)?
        }
    };
    let base_pool = match &cfg.pool {
        PoolSource::File(path) => load_task_pool(path, &base_market)?,
        PoolSource::Generated {
            count,
            skills_per_task,
            worker_exclusion,
        } => {
            let mut rng = rng_from(mix(cfg.master_seed, &[SALT_POOL]));
            generate_task_pool(&base_market, *count, *skills_per_task, *worker_exclusion, &mut rng)?
        }
    };

    let cells = sweep_cells(&cfg.sweep);
    let mut reports = Vec::with_capacity(cells.len());
    for (cell_idx, key) in cells.iter().enumerate() {
        match run_cell(cfg, &kinds, &base_market, &base_pool, cell_idx, key) {
            Ok(report) => reports.push(report),
            Err(err) => reports.push(CellReport {
                key: *key,
                policies: Vec::new(),
                ratios: Vec::new(),
                errors: vec![err.to_string()],
            }),
        }
    }

    Ok(ExperimentReport {
        cells: reports,
        streams: cfg.streams,
        length: cfg.length,
        master_seed: cfg.master_seed,
    })
}

fn run_cell(
    cfg: &ExperimentConfig,
    kinds: &[PolicyKind],
    base_market: &Marketplace,
    pool: &TaskPool,
    cell_idx: usize,
    key: &CellKey,
) -> Result<CellReport, HarnessError> {
    let market = base_market.with_cost_factors(key.hiring_factor, key.salary_ratio);
    let report = validate_marketplace(&market);
    let acceptable = if cfg.force {
        report.is_accepted_with_force()
    } else {
        report.is_accepted()
    };
    if !acceptable {
        return Err(HarnessError::Workload(WorkloadError::Invalid { report }));
    }
    let market = Arc::new(market);
    let sampler = StreamSampler::new(pool, 0.5);

    let jobs: Vec<(usize, usize)> = (0..kinds.len())
        .flat_map(|pi| (0..cfg.streams).map(move |si| (pi, si)))
        .collect();
    let runs: Vec<((usize, usize), Result<StreamRun, HarnessError>)> = jobs
        .into_par_iter()
        .map(|(pi, si)| {
            let kind = kinds[pi];
            let stream = sampler.generate(&StreamConfig {
                coherence: key.p,
                length: cfg.length,
                similarity_floor: 0.5,
                seed: stream_seed(cfg.master_seed, cell_idx, si),
            });
            let run = (|| -> Result<StreamRun, HarnessError> {
                let mut policy =
                    kind.build(market.clone(), policy_seed(cfg.master_seed, cell_idx, si, kind))?;
                let opts = RunOptions {
                    record_outcomes: cfg.trace && si == 0,
                    record_dual: true,
                };
                let record = run_policy(policy.as_mut(), &stream.tasks, &market, &opts)?;
                Ok(StreamRun {
                    final_total: record.ledger.total().cents(),
                    trajectory: record.ledger.trajectory().to_vec(),
                    dual: record.dual_trajectory.unwrap_or_default(),
                    wall: record.wall,
                    trace: record.outcomes,
                })
            })();
            ((pi, si), run)
        })
        .collect();

    // Group by policy, streams in index order, and fold sequentially so
    // float sums are independent of the parallel schedule.
    let mut by_policy: Vec<Vec<Option<StreamRun>>> = (0..kinds.len())
        .map(|_| (0..cfg.streams).map(|_| None).collect())
        .collect();
    for ((pi, si), run) in runs {
        by_policy[pi][si] = Some(run?);
    }

    let mut aggregates = Vec::with_capacity(kinds.len());
    for (pi, kind) in kinds.iter().enumerate() {
        let runs = &by_policy[pi];
        let len = cfg.length;
        let mut sum_out = vec![0i128; len];
        let mut sum_hire = vec![0i128; len];
        let mut sum_sal = vec![0i128; len];
        let mut sum_dual = vec![0.0f64; len];
        let mut finals = Vec::with_capacity(cfg.streams);
        let mut wall_sum = Duration::ZERO;
        let mut wall_max = Duration::ZERO;
        for run in runs.iter().map(|r| r.as_ref().expect("populated")) {
            for (t, cb) in run.trajectory.iter().enumerate() {
                sum_out[t] += cb.outsourcing.cents() as i128;
                sum_hire[t] += cb.hiring.cents() as i128;
                sum_sal[t] += cb.salary.cents() as i128;
            }
            for (t, &d) in run.dual.iter().enumerate() {
                sum_dual[t] += d;
            }
            finals.push(run.final_total);
            wall_sum += run.wall;
            wall_max = wall_max.max(run.wall);
        }
        let streams = cfg.streams as f64;
        let to_mean_units = |sums: &[i128]| -> Vec<f64> {
            sums.iter()
                .map(|&c| c as f64 / streams / 100.0)
                .collect()
        };
        let mean_outsourcing = to_mean_units(&sum_out);
        let mean_hiring = to_mean_units(&sum_hire);
        let mean_salary = to_mean_units(&sum_sal);
        let mean_total: Vec<f64> = (0..len)
            .map(|t| mean_outsourcing[t] + mean_hiring[t] + mean_salary[t])
            .collect();
        let mean_dual_bound: Vec<f64> = sum_dual.iter().map(|d| d / streams).collect();
        let mean_final_total = finals.iter().map(|&c| c as f64 / 100.0).sum::<f64>() / streams;
        aggregates.push(PolicyAggregate {
            kind: *kind,
            mean_outsourcing,
            mean_hiring,
            mean_salary,
            mean_total,
            mean_dual_bound,
            final_totals: finals,
            mean_final_total,
            mean_wall: wall_sum / cfg.streams as u32,
            max_wall: wall_max,
        });
    }

    let mut ratios = Vec::new();
    for a in 0..kinds.len() {
        for b in 0..kinds.len() {
            if a == b {
                continue;
            }
            let mean_ratio = aggregates[a]
                .final_totals
                .iter()
                .zip(&aggregates[b].final_totals)
                .map(|(&ta, &tb)| ta as f64 / tb as f64)
                .sum::<f64>()
                / cfg.streams as f64;
            ratios.push((kinds[a], kinds[b], mean_ratio));
        }
    }

    // Optional per-step trace of stream 0, one file per policy.
    if cfg.trace {
        fs::create_dir_all(&cfg.out_dir)?;
        for (pi, kind) in kinds.iter().enumerate() {
            if let Some(trace) = by_policy[pi][0].as_ref().and_then(|r| r.trace.as_ref()) {
                let path = cfg
                    .out_dir
                    .join(format!("trace_cell{cell_idx}_{}.csv", kind.cli_name()));
                write_trace(&path, trace, &market)?;
            }
        }
    }
    if cfg.export_inputs && cell_idx == 0 {
        fs::create_dir_all(&cfg.out_dir)?;
        save_marketplace(&market, &cfg.out_dir.join("marketplace.tsv"))?;
        let stream = sampler.generate(&StreamConfig {
            coherence: key.p,
            length: cfg.length,
            similarity_floor: 0.5,
            seed: stream_seed(cfg.master_seed, cell_idx, 0),
        });
        save_tasks(&stream.tasks, &market, &cfg.out_dir.join("stream0.tsv"))?;
    }

    Ok(CellReport {
        key: *key,
        policies: aggregates,
        ratios,
        errors: Vec::new(),
    })
}

fn write_trace(
    path: &Path,
    outcomes: &[StepOutcome],
    market: &Marketplace,
) -> Result<(), HarnessError> {
    let mut out = fs::File::create(path)?;
    writeln!(
        out,
        "t,fired,hired,outsourced,cost_outsourcing,cost_hiring,cost_salary"
    )?;
    let labels = |ids: &[usize]| {
        ids.iter()
            .map(|&r| market.worker(r).label.clone())
            .collect::<Vec<_>>()
            .join(";")
    };
    for o in outcomes {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            o.t,
            labels(&o.fired),
            labels(&o.hired),
            labels(&o.outsourced),
            o.step_cost.outsourcing,
            o.step_cost.hiring,
            o.step_cost.salary,
        )?;
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => "source".into(),
    }
}

/// Write `trajectory*.csv`, `heatmap.csv`, `summary.csv`, and
/// `runtimes.csv`; returns the manifest of written paths.
///
/// Data files are byte-deterministic for a fixed config and master seed;
/// wall-clock measurements go to `runtimes.csv` so the data files stay
/// reproducible.
pub fn emit_csv(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir)?;
    let mut manifest = Vec::new();

    for (ci, cell) in report.cells.iter().enumerate() {
        let name = if ci == 0 {
            "trajectory.csv".to_string()
        } else {
            format!("trajectory_cell{ci}.csv")
        };
        let path = dir.join(name);
        let mut out = fs::File::create(&path)?;
        writeln!(
            out,
            "t,policy,mean_cumulative_cost,mean_outsourcing,mean_hiring,mean_salary,dual_lower_bound"
        )?;
        for agg in &cell.policies {
            for t in 0..agg.mean_total.len() {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    t + 1,
                    agg.kind.cli_name(),
                    agg.mean_total[t],
                    agg.mean_outsourcing[t],
                    agg.mean_hiring[t],
                    agg.mean_salary[t],
                    agg.mean_dual_bound[t],
                )?;
            }
        }
        manifest.push(path);
    }

    let heatmap = dir.join("heatmap.csv");
    {
        let mut out = fs::File::create(&heatmap)?;
        writeln!(out, "p,salary_ratio,policy_a,policy_b,mean_ratio")?;
        for cell in &report.cells {
            for (a, b, ratio) in &cell.ratios {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    cell.key.p,
                    fmt_opt(cell.key.salary_ratio),
                    a.cli_name(),
                    b.cli_name(),
                    ratio,
                )?;
            }
        }
    }
    manifest.push(heatmap);

    let summary = dir.join("summary.csv");
    {
        let mut out = fs::File::create(&summary)?;
        writeln!(
            out,
            "p,salary_ratio,hiring_factor,policy,mean_total,streams,length,master_seed,error"
        )?;
        for cell in &report.cells {
            if cell.errors.is_empty() {
                for agg in &cell.policies {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{},",
                        cell.key.p,
                        fmt_opt(cell.key.salary_ratio),
                        fmt_opt(cell.key.hiring_factor),
                        agg.kind.cli_name(),
                        agg.mean_final_total,
                        report.streams,
                        report.length,
                        report.master_seed,
                    )?;
                }
            } else {
                for err in &cell.errors {
                    writeln!(
                        out,
                        "{},{},{},,,{},{},{},{:?}",
                        cell.key.p,
                        fmt_opt(cell.key.salary_ratio),
                        fmt_opt(cell.key.hiring_factor),
                        report.streams,
                        report.length,
                        report.master_seed,
                        err,
                    )?;
                }
            }
        }
    }
    manifest.push(summary);

    // Wall-clock stats live apart from the reproducible data files.
    let runtimes = dir.join("runtimes.csv");
    {
        let mut out = fs::File::create(&runtimes)?;
        writeln!(out, "p,salary_ratio,policy,mean_wall_ms,max_wall_ms")?;
        for cell in &report.cells {
            for agg in &cell.policies {
                writeln!(
                    out,
                    "{},{},{},{:.3},{:.3}",
                    cell.key.p,
                    fmt_opt(cell.key.salary_ratio),
                    agg.kind.cli_name(),
                    agg.mean_wall.as_secs_f64() * 1e3,
                    agg.max_wall.as_secs_f64() * 1e3,
                )?;
            }
        }
    }
    manifest.push(runtimes);

    Ok(manifest)
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cell in &self.cells {
            writeln!(
                f,
                "cell p={} beta={} alpha={}",
                cell.key.p,
                fmt_opt(cell.key.salary_ratio),
                fmt_opt(cell.key.hiring_factor)
            )?;
            for err in &cell.errors {
                writeln!(f, "  error: {err}")?;
            }
            for agg in &cell.policies {
                writeln!(
                    f,
                    "  {:<18} mean total {:>14.2}  (mean wall {:.1} ms)",
                    agg.kind.cli_name(),
                    agg.mean_final_total,
                    agg.mean_wall.as_secs_f64() * 1e3
                )?;
            }
        }
        Ok(())
    }
}
