//! Command-line frontend: `solve`, `bench` and `coarsen` subcommands.
//!
//! Exit codes: 0 success (converged), 1 usage error, 2 non-convergence,
//! 3 I/O or parse error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use glamg::bench::run_benchmark;
use glamg::config::RunConfig;
use glamg::error::Error;
use glamg::mm;
use glamg::poisson::{poisson_2d, PoissonSpec, RhsKind};
use glamg::solver::solve;
use glamg::sparse::CsrMatrix;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "glamg",
    about = "Algebraic multigrid solver with graph-learning, Vanek and Beck coarseners",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a linear system with the AMG V-cycle.
    Solve(SolveArgs),
    /// Sweep Poisson sizes x methods x seeds and print a CSV table.
    Bench(BenchArgs),
    /// Build a prolongation operator and write it in Matrix Market form.
    Coarsen(CoarsenArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// Coefficient matrix in Matrix Market coordinate format.
    #[arg(long, value_name = "FILE", conflicts_with = "poisson")]
    matrix: Option<PathBuf>,
    /// Generate a 2-D Poisson problem on an NX x NY interior grid.
    #[arg(long, num_args = 2, value_names = ["NX", "NY"])]
    poisson: Option<Vec<usize>>,
    /// Right-hand side for generated problems: zero, ones or sin.
    #[arg(long, default_value = "ones")]
    rhs: String,
}

#[derive(Args)]
struct CommonArgs {
    /// Coarsener: gl, vanek or beck.
    #[arg(long)]
    method: Option<String>,
    /// Config file with key = value lines; flags override it.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Convergence tolerance on the residual infinity norm.
    #[arg(long)]
    tol: Option<f64>,
    /// Master seed for the stochastic pipeline.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// V-cycle budget.
    #[arg(long, value_name = "N")]
    max_cycles: Option<usize>,
    /// Where to write the solution vector (one value per line).
    #[arg(long, value_name = "FILE", default_value = "solution.txt")]
    out: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Write the CSV here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoarsenArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// Where to write the prolongation operator (Matrix Market).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Keep clap's rendering but pin the usage exit code; --help and
            // --version still exit 0.
            let code = if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Coarsen(args) => cmd_coarsen(args),
    };
    match code {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) | Error::Parse { .. } => EXIT_IO,
        Error::InvalidConfig(_) => EXIT_USAGE,
        _ => EXIT_NOT_CONVERGED,
    }
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, Error> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    if let Some(method) = &common.method {
        cfg.set("method", method)?;
    }
    if let Some(tol) = common.tol {
        cfg.set("tolerance", &tol.to_string())?;
    }
    if let Some(seed) = common.seed {
        cfg.set("seed", &seed.to_string())?;
    }
    Ok(cfg)
}

fn load_problem(problem: &ProblemArgs) -> Result<(CsrMatrix, Vec<f64>), Error> {
    match (&problem.matrix, &problem.poisson) {
        (Some(path), None) => {
            let a = mm::read_matrix_market(path)?;
            let f = vec![1.0; a.n_rows()];
            Ok((a, f))
        }
        (None, Some(dims)) => {
            let rhs = match problem.rhs.as_str() {
                "zero" => RhsKind::Zero,
                "ones" => RhsKind::Ones,
                "sin" => RhsKind::ManufacturedSin,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown rhs '{other}' (expected zero, ones or sin)"
                    )));
                }
            };
            poisson_2d(&PoissonSpec {
                nx: dims[0],
                ny: dims[1],
                rhs,
            })
        }
        _ => Err(Error::InvalidConfig(
            "exactly one of --matrix FILE or --poisson NX NY is required".into(),
        )),
    }
}

fn cmd_solve(args: SolveArgs) -> Result<u8, Error> {
    let cfg = load_config(&args.common)?;
    let (a, f) = load_problem(&args.problem)?;
    let mut solver_cfg = cfg.solver_config()?;
    if let Some(max) = args.max_cycles {
        solver_cfg.max_vcycles = max;
    }

    let v0 = vec![0.0; a.n_rows()];
    let (v, report) = solve(&a, &f, &v0, &solver_cfg)?;

    let mut file = std::fs::File::create(&args.out)?;
    for value in &v {
        writeln!(file, "{value}")?;
    }
    print!("{}", report.to_kv_block());
    println!("solution_file={}", args.out.display());

    Ok(if report.converged {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn cmd_bench(args: BenchArgs) -> Result<u8, Error> {
    let cfg = load_config(&args.common)?;
    let spec = cfg.benchmark_spec()?;
    let csv = run_benchmark(&spec)?;
    match &args.out {
        Some(path) => std::fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(EXIT_OK)
}

fn cmd_coarsen(args: CoarsenArgs) -> Result<u8, Error> {
    let cfg = load_config(&args.common)?;
    let (a, _) = load_problem(&args.problem)?;
    let p = cfg.coarsener()?.coarsen(&a)?;
    eprintln!(
        "prolongation: {} x {} with {} entries",
        p.n_rows(),
        p.n_cols(),
        p.nnz()
    );
    match &args.out {
        Some(path) => mm::write_matrix_market(&p, path)?,
        None => mm::write_to(&p, std::io::stdout().lock())?,
    }
    Ok(EXIT_OK)
}
