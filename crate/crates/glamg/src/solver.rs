//! Multigrid hierarchy construction, the recursive V-cycle, and the outer
//! iterate-until-converged driver.
//!
//! The hierarchy is built once per solve and reused by every cycle. Each
//! V-cycle pre-smooths, restricts the residual through `R = P^T`, recurses
//! (or solves the coarsest system directly), prolongs the coarse correction
//! back, and post-smooths. Coarse corrections always start from a zero
//! guess: the correction of a zero-residual system must be zero.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use crate::coarsening::CoarsenerChoice;
use crate::error::{Error, Result};
use crate::smoothing::{self, SmootherConfig};
use crate::sparse::{inf_norm, residual, CsrMatrix};

/// One level of the hierarchy. `P`/`R` are absent on the coarsest level.
#[derive(Debug, Clone)]
pub struct Level {
    pub a: CsrMatrix,
    pub p: Option<CsrMatrix>,
    pub r: Option<CsrMatrix>,
}

/// Ordered levels, finest first.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub levels: Vec<Level>,
    /// Set when coarsening stopped making progress and the hierarchy was
    /// truncated early.
    pub stall_warning: Option<String>,
}

impl Hierarchy {
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.a.n_rows()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Smoothing sweeps before restriction (2 by default).
    pub pre_sweeps: usize,
    /// Smoothing sweeps after correction (7 by default).
    pub post_sweeps: usize,
    /// Smoother kind and omega; its own sweep count is overridden by
    /// `pre_sweeps`/`post_sweeps`.
    pub smoother: SmootherConfig,
    /// Systems at or below this size are solved directly.
    pub coarsest_size: usize,
    pub max_vcycles: usize,
    /// Convergence threshold on the residual infinity norm.
    pub tolerance: f64,
    pub coarsener: CoarsenerChoice,
    /// Post-smooth on every level of the cycle instead of only the
    /// invocation level. The literal reading of "post-iterations after each
    /// V-cycle" applies them on the finest grid only, which is the default.
    pub post_smooth_all_levels: bool,
}

impl SolverConfig {
    pub fn new(coarsener: CoarsenerChoice) -> Self {
        Self {
            pre_sweeps: 2,
            post_sweeps: 7,
            smoother: SmootherConfig::jacobi(1),
            coarsest_size: 20,
            max_vcycles: 10_000,
            tolerance: 1e-4,
            coarsener,
            post_smooth_all_levels: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.coarsest_size < 1 {
            return Err(Error::InvalidConfig("coarsest_size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a [`solve`] call.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// V-cycles executed; equals `residual_history.len()`.
    pub iterations: usize,
    /// Residual infinity norm after each cycle.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    /// Set when the divergence guard aborted the iteration.
    pub diverged: bool,
    pub setup_seconds: f64,
    pub solve_seconds: f64,
    /// Unknowns per hierarchy level, finest first.
    pub level_sizes: Vec<usize>,
    pub warnings: Vec<String>,
}

impl SolveReport {
    /// Line-oriented `key=value` rendering.
    pub fn to_kv_block(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("converged={}\n", self.converged));
        out.push_str(&format!("diverged={}\n", self.diverged));
        out.push_str(&format!("iterations={}\n", self.iterations));
        let final_residual = self
            .residual_history
            .last()
            .map(|r| r.to_string())
            .unwrap_or_else(|| "n/a".into());
        out.push_str(&format!("final_residual={final_residual}\n"));
        out.push_str(&format!("setup_seconds={:.6}\n", self.setup_seconds));
        out.push_str(&format!("solve_seconds={:.6}\n", self.solve_seconds));
        let sizes: Vec<String> = self.level_sizes.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!("level_sizes={}\n", sizes.join(",")));
        let history: Vec<String> = self.residual_history.iter().map(|r| r.to_string()).collect();
        out.push_str(&format!("residual_history={}\n", history.join(",")));
        for warning in &self.warnings {
            out.push_str(&format!("warning={warning}\n"));
        }
        out
    }

    /// One CSV data row for the benchmark harness.
    pub fn csv_row(&self, size: usize, method: &str, seed: &str) -> String {
        format!(
            "{size},{method},{seed},{},{},{:.6},{:.6}",
            self.iterations, self.converged, self.setup_seconds, self.solve_seconds
        )
    }
}

static HIERARCHY_BUILDS: AtomicUsize = AtomicUsize::new(0);

/// Process-wide count of hierarchy constructions; lets tests assert that a
/// solve builds its transfer operators exactly once.
pub fn hierarchy_build_count() -> usize {
    HIERARCHY_BUILDS.load(Ordering::Relaxed)
}

/// Build the multigrid hierarchy by repeatedly applying the configured
/// coarsener and forming the Galerkin operator `A_c = R A P` (as two sparse
/// products) until the coarsest system is small enough.
///
/// When a coarsener fails to shrink the system (`n_coarse >= n_fine`), the
/// hierarchy is truncated at the current level, which becomes the coarsest,
/// and a warning is recorded.
pub fn build_hierarchy(a: &CsrMatrix, cfg: &SolverConfig) -> Result<Hierarchy> {
    if a.n_cols() != a.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "hierarchy needs a square matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    cfg.validate()?;
    HIERARCHY_BUILDS.fetch_add(1, Ordering::Relaxed);

    let mut levels = Vec::new();
    let mut stall_warning = None;
    let mut current = a.clone();
    loop {
        let n = current.n_rows();
        if n <= cfg.coarsest_size {
            levels.push(Level {
                a: current,
                p: None,
                r: None,
            });
            break;
        }
        let level_idx = levels.len();
        let choice = if level_idx == 0 {
            cfg.coarsener.clone()
        } else {
            cfg.coarsener.reseeded(level_idx as u64)
        };
        let p = choice.coarsen(&current)?;
        if p.n_cols() >= n {
            stall_warning = Some(format!(
                "coarsening stalled at level {level_idx}: {n} -> {} unknowns; treating level {level_idx} as coarsest",
                p.n_cols()
            ));
            levels.push(Level {
                a: current,
                p: None,
                r: None,
            });
            break;
        }
        let r = p.transpose();
        let coarse = r.matmul(&current)?.matmul(&p)?;
        levels.push(Level {
            a: current,
            p: Some(p),
            r: Some(r),
        });
        current = coarse;
    }
    Ok(Hierarchy {
        levels,
        stall_warning,
    })
}

/// One V-cycle at `level`: pre-smooth, restrict the residual, solve or
/// recurse for the coarse correction (from a zero initial guess), prolong
/// and add it, post-smooth. Returns the corrected iterate.
pub fn v_cycle(
    hierarchy: &Hierarchy,
    level: usize,
    f: &[f64],
    v: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    v_cycle_inner(hierarchy, level, f, v, cfg, true)
}

fn v_cycle_inner(
    hierarchy: &Hierarchy,
    level: usize,
    f: &[f64],
    v: &[f64],
    cfg: &SolverConfig,
    post_smooth_here: bool,
) -> Result<Vec<f64>> {
    let lvl = &hierarchy.levels[level];
    let Some(p) = &lvl.p else {
        // Coarsest level: direct solve.
        return lvl.a.dense_solve(f);
    };
    let restriction = lvl.r.as_ref().expect("P and R are set together");

    let mut x = smoothing::smooth(&lvl.a, f, v, &cfg.smoother.with_sweeps(cfg.pre_sweeps))?;

    let r = residual(&lvl.a, f, &x)?;
    let r_coarse = restriction.spmv(&r)?;
    let zero = vec![0.0; r_coarse.len()];
    let e_coarse = v_cycle_inner(
        hierarchy,
        level + 1,
        &r_coarse,
        &zero,
        cfg,
        cfg.post_smooth_all_levels,
    )?;
    let e = p.spmv(&e_coarse)?;
    for (xi, ei) in x.iter_mut().zip(&e) {
        *xi += ei;
    }

    if post_smooth_here {
        x = smoothing::smooth(&lvl.a, f, &x, &cfg.smoother.with_sweeps(cfg.post_sweeps))?;
    }
    Ok(x)
}

/// Solve `A v = f` from the initial guess `v0`: build the hierarchy once,
/// then run V-cycles until the residual infinity norm drops below
/// `cfg.tolerance` or `cfg.max_vcycles` is reached. Aborts early (with
/// `diverged` set) if the residual grows five cycles in a row or stops
/// being finite.
pub fn solve(
    a: &CsrMatrix,
    f: &[f64],
    v0: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, SolveReport)> {
    if f.len() != a.n_rows() || v0.len() != a.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve: matrix is {}x{}, rhs has length {}, guess has length {}",
            a.n_rows(),
            a.n_cols(),
            f.len(),
            v0.len()
        )));
    }

    let setup_start = Instant::now();
    let hierarchy = build_hierarchy(a, cfg)?;
    let setup_seconds = setup_start.elapsed().as_secs_f64();

    let mut warnings = Vec::new();
    if let Some(w) = &hierarchy.stall_warning {
        warnings.push(w.clone());
    }

    let solve_start = Instant::now();
    let mut v = v0.to_vec();
    let mut history = Vec::new();
    let mut converged = false;
    let mut diverged = false;
    let mut prev_norm = inf_norm(&residual(a, f, &v)?);
    let mut growth_streak = 0usize;

    if prev_norm < cfg.tolerance {
        converged = true;
    } else {
        for _ in 0..cfg.max_vcycles {
            v = v_cycle(&hierarchy, 0, f, &v, cfg)?;
            let norm = inf_norm(&residual(a, f, &v)?);
            history.push(norm);
            if norm < cfg.tolerance {
                converged = true;
                break;
            }
            if !norm.is_finite() {
                diverged = true;
                warnings.push("residual is no longer finite".into());
                break;
            }
            growth_streak = if norm > prev_norm { growth_streak + 1 } else { 0 };
            if growth_streak >= 5 {
                diverged = true;
                warnings.push(format!(
                    "residual grew for {growth_streak} consecutive cycles; aborting"
                ));
                break;
            }
            prev_norm = norm;
        }
    }
    let solve_seconds = solve_start.elapsed().as_secs_f64();

    let report = SolveReport {
        iterations: history.len(),
        residual_history: history,
        converged,
        diverged,
        setup_seconds,
        solve_seconds,
        level_sizes: hierarchy.level_sizes(),
        warnings,
    };
    Ok((v, report))
}
