//! End-to-end tests of the `glamg` binary: subcommands, exit codes, output
//! formats.

use std::path::PathBuf;
use std::process::Command;

fn glamg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_glamg"))
}

fn temp_path(name: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("glamg-cli-{}-{name}", std::process::id()));
    path
}

#[test]
fn solve_poisson_converges_with_exit_zero() {
    let out = temp_path("solution.txt");
    let output = glamg()
        .args(["solve", "--poisson", "32", "32", "--method", "vanek", "--tol", "1e-4"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("converged=true"));
    assert!(stdout.contains("iterations="));

    let solution = std::fs::read_to_string(&out).unwrap();
    assert_eq!(solution.lines().count(), 1024);
    std::fs::remove_file(&out).ok();
}

#[test]
fn malformed_matrix_market_exits_three_with_line_number() {
    let bad = temp_path("bad.mtx");
    std::fs::write(
        &bad,
        "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n1 bogus 2.0\n",
    )
    .unwrap();
    let output = glamg()
        .args(["solve", "--matrix"])
        .arg(&bad)
        .arg("--out")
        .arg(temp_path("unused.txt"))
        .output()
        .unwrap();
    std::fs::remove_file(&bad).ok();
    assert_eq!(output.status.code(), Some(3));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains(":4:"), "stderr must carry the line number: {stderr}");
}

#[test]
fn missing_problem_is_a_usage_error() {
    let output = glamg().args(["solve"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let output = glamg().args(["solve", "--frobnicate"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn exhausted_cycle_budget_exits_two() {
    let output = glamg()
        .args(["solve", "--poisson", "24", "24", "--method", "beck"])
        .args(["--max-cycles", "1"])
        .arg("--out")
        .arg(temp_path("partial.txt"))
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("converged=false"));
}

#[test]
fn bench_emits_the_exact_csv_header() {
    let cfg = temp_path("bench.cfg");
    std::fs::write(&cfg, "sizes = 64\nmethods = vanek\nseeds = 0\n").unwrap();
    let output = glamg().args(["bench", "--config"]).arg(&cfg).output().unwrap();
    std::fs::remove_file(&cfg).ok();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert_eq!(
        stdout.lines().next().unwrap(),
        "size,method,seed,iterations,converged,setup_seconds,solve_seconds"
    );
    assert!(stdout.lines().any(|l| l.starts_with("64,vanek,median,")));
}

#[test]
fn coarsen_writes_a_readable_prolongation() {
    let out = temp_path("p.mtx");
    let output = glamg()
        .args(["coarsen", "--poisson", "8", "8", "--method", "vanek"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let p = glamg::mm::read_matrix_market(&out).unwrap();
    std::fs::remove_file(&out).ok();
    assert_eq!(p.n_rows(), 64);
    assert!(p.n_cols() > 0 && p.n_cols() < 64);
    // Aggregation rows carry exactly one unit entry.
    for i in 0..p.n_rows() {
        let (cols, vals) = p.row(i);
        assert_eq!(cols.len(), 1);
        assert_eq!(vals[0], 1.0);
    }
}

#[test]
fn config_file_drives_the_solver_and_flags_override() {
    let cfg = temp_path("run.cfg");
    std::fs::write(&cfg, "method = beck\ntolerance = 1e-2\n").unwrap();
    let out = temp_path("cfg-solution.txt");
    // Flag overrides the config's method; the config's looser tolerance
    // stays in effect and shortens the run.
    let output = glamg()
        .args(["solve", "--poisson", "16", "16", "--method", "vanek", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    std::fs::remove_file(&cfg).ok();
    std::fs::remove_file(&out).ok();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    let iterations: usize = stdout
        .lines()
        .find_map(|l| l.strip_prefix("iterations="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(iterations < 15, "loose tolerance should stop early");
}
