//! Command-line harness: validate marketplaces, run experiments, and compute
//! exact offline optima on tiny instances.
//!
//! Exit codes: 0 on success, 1 for configuration or validation problems,
//! 2 for runtime failures.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};

use tfo_core::harness::{
    emit_csv, run_experiment, ExperimentConfig, HarnessError, MarketSource, PoolSource, SweepAxes,
};
use tfo_core::model::validate_marketplace;
use tfo_core::oracle::{offline_opt, OracleError};
use tfo_core::workload::{load_marketplace, load_task_pool, parse_marketplace, WorkloadError};

#[derive(Parser)]
#[command(name = "tfo", about = "Online team formation with outsourcing", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a marketplace file against the cost assumptions.
    Validate {
        #[arg(long)]
        market: PathBuf,
        /// Downgrade cost-rule violations to warnings.
        #[arg(long)]
        force: bool,
    },
    /// Run an experiment from a config file or from flags.
    Run(Box<RunArgs>),
    /// Exact offline optimum of a small replayed stream.
    Oracle {
        #[arg(long)]
        market: PathBuf,
        /// Stream file (`t<TAB>skill,skill,...`), replayed in line order.
        #[arg(long)]
        stream: PathBuf,
        #[arg(long)]
        force: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML config mirroring the experiment schema; overrides all flags.
    #[arg(long, conflicts_with_all = ["market", "tasks", "policy"])]
    config: Option<PathBuf>,

    /// Marketplace file (flag mode).
    #[arg(long)]
    market: Option<PathBuf>,
    /// Task pool file (flag mode).
    #[arg(long)]
    tasks: Option<PathBuf>,
    /// Policy name; repeat the flag to compare several.
    #[arg(long)]
    policy: Vec<String>,
    /// Workload coherence parameter.
    #[arg(long, default_value_t = 100.0)]
    p: f64,
    #[arg(long, default_value_t = 100)]
    streams: usize,
    #[arg(long, default_value_t = 10_000)]
    length: usize,
    /// Override hiring fees as `alpha * lambda`.
    #[arg(long)]
    alpha: Option<f64>,
    /// Override salaries as `beta * lambda`.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for the CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
    /// Write a per-step trace of stream 0 for each policy.
    #[arg(long)]
    trace: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code)
        }
    }
}

struct CliError {
    code: u8,
    source: anyhow::Error,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

fn usage(err: impl Into<anyhow::Error>) -> CliError {
    CliError {
        code: 1,
        source: err.into(),
    }
}

fn runtime(err: impl Into<anyhow::Error>) -> CliError {
    CliError {
        code: 2,
        source: err.into(),
    }
}

/// Config and validation problems exit 1; everything else is a runtime
/// failure and exits 2.
fn classify_harness(err: HarnessError) -> CliError {
    match &err {
        HarnessError::Config(_)
        | HarnessError::Workload(WorkloadError::Parse { .. })
        | HarnessError::Workload(WorkloadError::Invalid { .. })
        | HarnessError::Workload(WorkloadError::Config(_)) => usage(err),
        _ => runtime(err),
    }
}

fn classify_workload(err: WorkloadError) -> CliError {
    match &err {
        WorkloadError::Io(_) => runtime(err),
        _ => usage(err),
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Validate { market, force } => {
            let market = parse_marketplace(&market).map_err(classify_workload)?;
            let report = validate_marketplace(&market);
            print!("{report}");
            let ok = if force {
                report.is_accepted_with_force()
            } else {
                report.is_accepted()
            };
            if ok {
                if force && !report.is_accepted() {
                    println!("accepted with --force (guarantees voided)");
                }
                Ok(())
            } else {
                Err(usage(anyhow!("marketplace rejected")))
            }
        }
        Command::Run(args) => {
            let cfg = build_config(*args)?;
            let report = run_experiment(&cfg).map_err(classify_harness)?;
            let manifest = emit_csv(&report, &cfg.out_dir).map_err(runtime)?;
            print!("{report}");
            for path in manifest {
                println!("wrote {}", path.display());
            }
            let failures = report
                .cells
                .iter()
                .map(|c| c.errors.len())
                .sum::<usize>();
            if failures == 0 {
                Ok(())
            } else {
                Err(runtime(anyhow!(
                    "{failures} sweep cell(s) failed; see summary.csv"
                )))
            }
        }
        Command::Oracle {
            market,
            stream,
            force,
        } => {
            let market = load_marketplace(&market, force).map_err(classify_workload)?;
            let pool = load_task_pool(&stream, &market).map_err(classify_workload)?;
            let solution = match offline_opt(&market, &pool.tasks) {
                Ok(s) => s,
                Err(err @ OracleError::TooLarge { .. }) => return Err(usage(err)),
                Err(err) => return Err(runtime(err)),
            };
            println!("offline optimum: {}", solution.cost);
            let label = |ids: &[usize]| {
                ids.iter()
                    .map(|&r| market.worker(r).label.clone())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            for (i, period) in solution.schedule.iter().enumerate() {
                println!(
                    "t={}: hired=[{}] outsourced=[{}]",
                    i + 1,
                    label(&period.team),
                    label(&period.outsourced)
                );
            }
            Ok(())
        }
    }
}

fn build_config(args: RunArgs) -> Result<ExperimentConfig, CliError> {
    if let Some(path) = args.config {
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(usage)?;
        let cfg: ExperimentConfig = toml::from_str(&text)
            .with_context(|| format!("parsing {}", path.display()))
            .map_err(usage)?;
        return Ok(cfg);
    }
    let market = args
        .market
        .ok_or_else(|| usage(anyhow!("--market is required without --config")))?;
    let tasks = args
        .tasks
        .ok_or_else(|| usage(anyhow!("--tasks is required without --config")))?;
    if args.policy.is_empty() {
        return Err(usage(anyhow!("--policy is required without --config")));
    }
    let out_dir = args
        .out
        .ok_or_else(|| usage(anyhow!("--out is required without --config")))?;
    Ok(ExperimentConfig {
        market: MarketSource::File(market),
        pool: PoolSource::File(tasks),
        policies: args.policy,
        streams: args.streams,
        length: args.length,
        sweep: SweepAxes {
            p: vec![args.p],
            salary_ratio: args.beta.into_iter().collect(),
            hiring_factor: args.alpha.into_iter().collect(),
        },
        master_seed: args.seed,
        out_dir,
        force: args.force,
        trace: args.trace,
        export_inputs: false,
    })
}
