//! End-to-end checks of the `tfo` binary: file ingestion, exit codes, and
//! the CSV contract.

use std::path::Path;
use std::process::Command;

fn tfo() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tfo"))
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

const GOOD_MARKET: &str = "\
alice\t2\t8\t0.2\tweld,paint\n\
bob\t3\t12\t0.3\tpaint,wire\n\
carol\t1.5\t6\t0.1\tweld\n";

const BAD_MARKET: &str = "alice\t2\t8\t2\tweld\n"; // salary == outsourcing fee

const TASKS: &str = "1\tweld\n2\tweld,paint\n3\twire\n4\tpaint\n";

#[test]
fn validate_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let market = dir.path().join("market.tsv");
    write(&market, GOOD_MARKET);
    let out = tfo().args(["validate", "--market"]).arg(&market).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    write(&market, BAD_MARKET);
    let out = tfo().args(["validate", "--market"]).arg(&market).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("salary_not_below_outsource"), "{stdout}");

    // The same marketplace is acceptable when forced.
    let out = tfo()
        .args(["validate", "--force", "--market"])
        .arg(&market)
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn run_flag_mode_writes_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let market = dir.path().join("market.tsv");
    let tasks = dir.path().join("tasks.tsv");
    let out_dir = dir.path().join("out");
    write(&market, GOOD_MARKET);
    write(&tasks, TASKS);
    let out = tfo()
        .args(["run", "--policy", "tfo", "--policy", "always-outsource"])
        .args(["--p", "5", "--streams", "3", "--length", "40", "--seed", "7"])
        .arg("--market")
        .arg(&market)
        .arg("--tasks")
        .arg(&tasks)
        .arg("--out")
        .arg(&out_dir)
        .arg("--trace")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["trajectory.csv", "heatmap.csv", "summary.csv", "runtimes.csv"] {
        assert!(out_dir.join(file).exists(), "missing {file}");
    }
    assert!(out_dir.join("trace_cell0_tfo.csv").exists());
    let trajectory = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    let mut lines = trajectory.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,policy,mean_cumulative_cost,mean_outsourcing,mean_hiring,mean_salary,dual_lower_bound"
    );
    assert_eq!(lines.count(), 2 * 40, "one row per period per policy");
}

#[test]
fn run_config_mode_with_generated_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let config = dir.path().join("experiment.toml");
    write(
        &config,
        &format!(
            r#"
master_seed = 11
streams = 2
length = 30
policies = ["always-outsource", "tfo-heuristic"]
out_dir = "{}"

[market.generated]
workers = 25
skills = 8
skills_per_worker = {{ constant = 2.0 }}
skill_popularity = {{ zipf = 1.0 }}
lambda_dist = {{ uniform = [1.0, 4.0] }}
hiring_factor = 4.0
salary_ratio = 0.1
seed = 0

[pool.generated]
count = 15
skills_per_task = {{ constant = 2.0 }}

[sweep]
p = [5.0]
"#,
            out_dir.display()
        ),
    );
    let out = tfo().args(["run", "--config"]).arg(&config).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("summary.csv").exists());
}

#[test]
fn oracle_solves_a_replayed_stream() {
    let dir = tempfile::tempdir().unwrap();
    let market = dir.path().join("market.tsv");
    let stream = dir.path().join("stream.tsv");
    // Single worker, lambda=1, C=3: five repetitions favor hiring (cost 3).
    write(&market, "solo\t1\t3\t0\tweld\n");
    write(&stream, "1\tweld\n2\tweld\n3\tweld\n4\tweld\n5\tweld\n");
    let out = tfo()
        .args(["oracle", "--market"])
        .arg(&market)
        .arg("--stream")
        .arg(&stream)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("offline optimum: 3.00"), "{stdout}");
}

#[test]
fn exit_codes_distinguish_usage_from_success() {
    let dir = tempfile::tempdir().unwrap();
    let market = dir.path().join("market.tsv");
    write(&market, "broken line without tabs\n");
    let out = tfo().args(["validate", "--market"]).arg(&market).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = tfo()
        .args(["run", "--policy", "no-such-policy", "--market"])
        .arg(&market)
        .arg("--tasks")
        .arg(&market)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}
