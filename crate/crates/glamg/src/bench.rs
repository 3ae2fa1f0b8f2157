//! Benchmark harness: sweep Poisson problem sizes, coarseners and seeds,
//! and emit one CSV row per run plus a median aggregate per (size, method).
//!
//! Each cell solves the 5-point Poisson system nearest in size to the
//! requested unknown count (the true `n` is reported), with `f = 1` and a
//! zero initial guess. Failing runs become `converged=false` rows; the
//! sweep never aborts. Cells execute in parallel, rows are emitted in
//! deterministic sweep order, so fixed seeds reproduce the CSV except for
//! the two timing columns.

use rayon::prelude::*;

use crate::coarsening::CoarsenerChoice;
use crate::error::Result;
use crate::poisson::{poisson_2d, PoissonSpec, RhsKind};
use crate::solver::{solve, SolveReport, SolverConfig};

pub const CSV_HEADER: &str = "size,method,seed,iterations,converged,setup_seconds,solve_seconds";

#[derive(Debug, Clone)]
pub struct BenchmarkSpec {
    /// Requested unknown counts; each is rounded to the nearest square grid.
    pub sizes: Vec<usize>,
    pub methods: Vec<CoarsenerChoice>,
    pub seeds: Vec<u64>,
    pub tolerance: f64,
    /// Solver settings shared by every cell (its coarsener is replaced per
    /// method).
    pub solver: SolverConfig,
}

impl BenchmarkSpec {
    /// Default desk-scale sweep: 1k and 4k unknowns, all three methods,
    /// five seeds.
    pub fn defaults() -> Self {
        let solver = SolverConfig::new(CoarsenerChoice::vanek());
        Self {
            sizes: vec![1024, 4096],
            methods: vec![
                CoarsenerChoice::beck(),
                CoarsenerChoice::vanek(),
                CoarsenerChoice::gl(0),
            ],
            seeds: vec![0, 1, 2, 3, 4],
            tolerance: 1e-4,
            solver,
        }
    }
}

/// Nearest square grid side for a requested unknown count.
fn grid_side(size: usize) -> usize {
    ((size as f64).sqrt().round() as usize).max(1)
}

struct Cell {
    order: (usize, usize, usize),
    n: usize,
    method: String,
    seed: u64,
    report: Option<SolveReport>,
}

/// Run the sweep and return the CSV table.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<String> {
    let mut cells: Vec<(usize, usize, usize)> = Vec::new();
    for si in 0..spec.sizes.len() {
        for mi in 0..spec.methods.len() {
            for ki in 0..spec.seeds.len() {
                cells.push((si, mi, ki));
            }
        }
    }

    let mut results: Vec<Cell> = cells
        .par_iter()
        .map(|&(si, mi, ki)| {
            let side = grid_side(spec.sizes[si]);
            let n = side * side;
            let seed = spec.seeds[ki];
            let method = spec.methods[mi].name().to_string();
            let report = run_cell(spec, side, &spec.methods[mi], seed);
            Cell {
                order: (si, mi, ki),
                n,
                method,
                seed,
                report,
            }
        })
        .collect();
    results.sort_by_key(|c| c.order);

    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');

    for si in 0..spec.sizes.len() {
        for mi in 0..spec.methods.len() {
            let group: Vec<&Cell> = results
                .iter()
                .filter(|c| c.order.0 == si && c.order.1 == mi)
                .collect();
            for cell in &group {
                match &cell.report {
                    Some(report) => {
                        out.push_str(&report.csv_row(cell.n, &cell.method, &cell.seed.to_string()));
                    }
                    None => {
                        out.push_str(&format!(
                            "{},{},{},0,false,0.000000,0.000000",
                            cell.n, cell.method, cell.seed
                        ));
                    }
                }
                out.push('\n');
            }
            out.push_str(&aggregate_row(&group));
            out.push('\n');
        }
    }
    Ok(out)
}

fn run_cell(spec: &BenchmarkSpec, side: usize, method: &CoarsenerChoice, seed: u64) -> Option<SolveReport> {
    let (a, f) = poisson_2d(&PoissonSpec::square(side, RhsKind::Ones)).ok()?;
    let mut cfg = spec.solver.clone();
    cfg.tolerance = spec.tolerance;
    cfg.coarsener = method.with_seed(seed);
    let v0 = vec![0.0; a.n_rows()];
    solve(&a, &f, &v0, &cfg).ok().map(|(_, report)| report)
}

/// Lower median (element at `(len - 1) / 2` after sorting).
fn median<T: Copy + PartialOrd>(values: &mut [T]) -> T {
    values.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in medians"));
    values[(values.len() - 1) / 2]
}

fn aggregate_row(group: &[&Cell]) -> String {
    let n = group[0].n;
    let method = &group[0].method;
    let mut iterations: Vec<usize> = Vec::new();
    let mut setups: Vec<f64> = Vec::new();
    let mut solves: Vec<f64> = Vec::new();
    let mut all_converged = true;
    for cell in group {
        match &cell.report {
            Some(r) => {
                iterations.push(r.iterations);
                setups.push(r.setup_seconds);
                solves.push(r.solve_seconds);
                all_converged &= r.converged;
            }
            None => all_converged = false,
        }
    }
    if iterations.is_empty() {
        return format!("{n},{method},median,0,false,0.000000,0.000000");
    }
    format!(
        "{n},{method},median,{},{},{:.6},{:.6}",
        median(&mut iterations),
        all_converged,
        median(&mut setups),
        median(&mut solves)
    )
}

/// Median iterations per (size, method) parsed back out of the CSV,
/// keyed by `(n, method)`.
pub fn median_iterations(csv: &str) -> Vec<(usize, String, usize)> {
    csv.lines()
        .skip(1)
        .filter_map(|line| {
            let cells: Vec<&str> = line.split(',').collect();
            if cells.len() == 7 && cells[2] == "median" {
                Some((
                    cells[0].parse().ok()?,
                    cells[1].to_string(),
                    cells[3].parse().ok()?,
                ))
            } else {
                None
            }
        })
        .collect()
}
