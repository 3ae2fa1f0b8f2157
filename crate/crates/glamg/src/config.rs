//! Flat `key = value` run configuration: one file drives the solver, the
//! coarseners and the benchmark harness, and command-line flags override
//! individual keys.
//!
//! Format: one assignment per line, `#` starts a comment, blank lines are
//! skipped. Unknown keys are errors. Keys taking `auto` fall back to their
//! data-dependent defaults (`walks_per_node`, `batch_size`,
//! `cluster_max_iters`).

use std::fmt::Write as _;
use std::path::Path;

use crate::bench::BenchmarkSpec;
use crate::coarsening::{CoarsenMethod, CoarsenerChoice, GlConfig};
use crate::embedding::EmbeddingConfig;
use crate::error::{Error, Result};
use crate::smoothing::{SmootherConfig, SmootherKind};
use crate::solver::SolverConfig;

/// Every tunable of the pipeline, with the defaults used throughout:
/// 2 pre- and 7 post-smoothing Jacobi sweeps, direct solves at 20 unknowns
/// or less, residual tolerance 1e-4, one aggregate per ~5 nodes, walks of
/// length 10 with p = 0.1 and q = 1, and a 128-dimensional embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // Solver.
    pub method: String,
    pub tolerance: f64,
    pub max_vcycles: usize,
    pub pre_sweeps: usize,
    pub post_sweeps: usize,
    pub coarsest_size: usize,
    pub smoother: String,
    pub smoother_omega: f64,
    pub post_smooth_all_levels: bool,
    // Prolongation smoothing (off unless a kind is named).
    pub prolongation_smoothing: String,
    pub prolongation_omega: f64,
    // Vanek.
    pub vanek_epsilon: f64,
    // GL: walks.
    pub cluster_ratio: f64,
    pub walks_per_node: Option<usize>,
    pub walk_length: usize,
    pub return_p: f64,
    pub in_out_q: f64,
    // GL: embedding.
    pub dimension: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub lr_initial: f64,
    pub lr_final: f64,
    pub parallel_embedding: bool,
    // GL: clustering.
    pub batch_size: Option<usize>,
    pub cluster_max_iters: Option<usize>,
    pub centroid_tol: f64,
    pub seed: u64,
    // Benchmark sweep.
    pub sizes: Vec<usize>,
    pub methods: Vec<String>,
    pub seeds: Vec<u64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            method: "gl".into(),
            tolerance: 1e-4,
            max_vcycles: 10_000,
            pre_sweeps: 2,
            post_sweeps: 7,
            coarsest_size: 20,
            smoother: "jacobi".into(),
            smoother_omega: 2.0 / 3.0,
            post_smooth_all_levels: false,
            prolongation_smoothing: "none".into(),
            prolongation_omega: 2.0 / 3.0,
            vanek_epsilon: 0.08,
            cluster_ratio: 5.0,
            walks_per_node: None,
            walk_length: 10,
            return_p: 0.1,
            in_out_q: 1.0,
            dimension: 128,
            window: 5,
            negatives: 5,
            epochs: 5,
            lr_initial: 0.025,
            lr_final: 0.0001,
            parallel_embedding: false,
            batch_size: None,
            cluster_max_iters: None,
            centroid_tol: 1e-4,
            seed: 0,
            sizes: vec![1024, 4096],
            methods: vec!["beck".into(), "vanek".into(), "gl".into()],
            seeds: vec![0, 1, 2, 3, 4],
        }
    }
}

fn parse_scalar<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| {
        Error::InvalidConfig(format!("cannot parse '{value}' as a value for '{key}'"))
    })
}

fn parse_auto(key: &str, value: &str) -> Result<Option<usize>> {
    let trimmed = value.trim();
    if trimmed.eq_ignore_ascii_case("auto") || trimmed == "0" {
        Ok(None)
    } else {
        Ok(Some(parse_scalar::<usize>(key, trimmed)?))
    }
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(|item| parse_scalar(key, item))
        .collect()
}

impl RunConfig {
    /// Apply a single `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "method" => self.method = value.trim().to_lowercase(),
            "tolerance" | "tol" => self.tolerance = parse_scalar(key, value)?,
            "max_vcycles" => self.max_vcycles = parse_scalar(key, value)?,
            "pre_sweeps" => self.pre_sweeps = parse_scalar(key, value)?,
            "post_sweeps" => self.post_sweeps = parse_scalar(key, value)?,
            "coarsest_size" => self.coarsest_size = parse_scalar(key, value)?,
            "smoother" => self.smoother = value.trim().to_lowercase(),
            "smoother_omega" => self.smoother_omega = parse_scalar(key, value)?,
            "post_smooth_all_levels" => self.post_smooth_all_levels = parse_scalar(key, value)?,
            "prolongation_smoothing" => {
                self.prolongation_smoothing = value.trim().to_lowercase()
            }
            "prolongation_omega" => self.prolongation_omega = parse_scalar(key, value)?,
            "vanek_epsilon" => self.vanek_epsilon = parse_scalar(key, value)?,
            "cluster_ratio" => self.cluster_ratio = parse_scalar(key, value)?,
            "walks_per_node" => self.walks_per_node = parse_auto(key, value)?,
            "walk_length" => self.walk_length = parse_scalar(key, value)?,
            "return_p" => self.return_p = parse_scalar(key, value)?,
            "in_out_q" => self.in_out_q = parse_scalar(key, value)?,
            "dimension" => self.dimension = parse_scalar(key, value)?,
            "window" => self.window = parse_scalar(key, value)?,
            "negatives" => self.negatives = parse_scalar(key, value)?,
            "epochs" => self.epochs = parse_scalar(key, value)?,
            "lr_initial" => self.lr_initial = parse_scalar(key, value)?,
            "lr_final" => self.lr_final = parse_scalar(key, value)?,
            "parallel_embedding" => self.parallel_embedding = parse_scalar(key, value)?,
            "batch_size" => self.batch_size = parse_auto(key, value)?,
            "cluster_max_iters" => self.cluster_max_iters = parse_auto(key, value)?,
            "centroid_tol" => self.centroid_tol = parse_scalar(key, value)?,
            "seed" => self.seed = parse_scalar(key, value)?,
            "sizes" => self.sizes = parse_list(key, value)?,
            "methods" => {
                self.methods = value.split(',').map(|m| m.trim().to_lowercase()).collect()
            }
            "seeds" => self.seeds = parse_list(key, value)?,
            other => {
                return Err(Error::InvalidConfig(format!("unknown key '{other}'")));
            }
        }
        Ok(())
    }

    /// Parse a config file and apply every assignment in order.
    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    path: path.to_string_lossy().into_owned(),
                    line: idx + 1,
                    msg: format!("expected 'key = value', got '{line}'"),
                });
            };
            self.set(key.trim(), value).map_err(|e| Error::Parse {
                path: path.to_string_lossy().into_owned(),
                line: idx + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    fn smoother_config(name: &str, omega: f64) -> Result<SmootherConfig> {
        let kind = match name {
            "jacobi" => SmootherKind::Jacobi,
            "damped-jacobi" | "damped_jacobi" => SmootherKind::DampedJacobi,
            "gauss-seidel" | "gauss_seidel" => SmootherKind::GaussSeidel,
            "sor" => SmootherKind::Sor,
            other => {
                return Err(Error::InvalidConfig(format!("unknown smoother '{other}'")));
            }
        };
        Ok(SmootherConfig {
            kind,
            omega,
            sweeps: 1,
        })
    }

    fn gl_config(&self) -> GlConfig {
        GlConfig {
            cluster_ratio: self.cluster_ratio,
            walks_per_node: self.walks_per_node,
            walk_length: self.walk_length,
            return_p: self.return_p,
            in_out_q: self.in_out_q,
            embedding: EmbeddingConfig {
                dimension: self.dimension,
                window: self.window,
                negatives: self.negatives,
                epochs: self.epochs,
                lr_initial: self.lr_initial,
                lr_final: self.lr_final,
                seed: self.seed,
                parallel: self.parallel_embedding,
            },
            batch_size: self.batch_size,
            max_iters: self.cluster_max_iters,
            centroid_tol: self.centroid_tol,
            seed: self.seed,
        }
    }

    /// Coarsener for a method name ("gl", "vanek" or "beck").
    pub fn coarsener_for(&self, method: &str) -> Result<CoarsenerChoice> {
        let method = match method {
            "gl" | "gl-coarsener" => CoarsenMethod::Gl(self.gl_config()),
            "vanek" => CoarsenMethod::Vanek {
                epsilon: self.vanek_epsilon,
            },
            "beck" => CoarsenMethod::Beck,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown method '{other}' (expected gl, vanek or beck)"
                )));
            }
        };
        let prolongation_smoothing = match self.prolongation_smoothing.as_str() {
            "" | "none" | "off" => None,
            name => Some(Self::smoother_config(name, self.prolongation_omega)?),
        };
        Ok(CoarsenerChoice {
            method,
            prolongation_smoothing,
        })
    }

    pub fn coarsener(&self) -> Result<CoarsenerChoice> {
        self.coarsener_for(&self.method)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::new(self.coarsener()?);
        cfg.pre_sweeps = self.pre_sweeps;
        cfg.post_sweeps = self.post_sweeps;
        cfg.smoother = Self::smoother_config(&self.smoother, self.smoother_omega)?;
        cfg.coarsest_size = self.coarsest_size;
        cfg.max_vcycles = self.max_vcycles;
        cfg.tolerance = self.tolerance;
        cfg.post_smooth_all_levels = self.post_smooth_all_levels;
        Ok(cfg)
    }

    pub fn benchmark_spec(&self) -> Result<BenchmarkSpec> {
        if self.sizes.is_empty() || self.methods.is_empty() || self.seeds.is_empty() {
            return Err(Error::InvalidConfig(
                "benchmark needs nonempty sizes, methods and seeds".into(),
            ));
        }
        let methods = self
            .methods
            .iter()
            .map(|m| self.coarsener_for(m))
            .collect::<Result<Vec<_>>>()?;
        let mut template = self.solver_config()?;
        template.tolerance = self.tolerance;
        Ok(BenchmarkSpec {
            sizes: self.sizes.clone(),
            methods,
            seeds: self.seeds.clone(),
            tolerance: self.tolerance,
            solver: template,
        })
    }

    /// Render the effective configuration as a reloadable config file.
    pub fn to_file_format(&self) -> String {
        let auto = |v: &Option<usize>| v.map_or("auto".to_string(), |x| x.to_string());
        let list = |v: &[u64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut out = String::new();
        let _ = writeln!(out, "method = {}", self.method);
        let _ = writeln!(out, "tolerance = {}", self.tolerance);
        let _ = writeln!(out, "max_vcycles = {}", self.max_vcycles);
        let _ = writeln!(out, "pre_sweeps = {}", self.pre_sweeps);
        let _ = writeln!(out, "post_sweeps = {}", self.post_sweeps);
        let _ = writeln!(out, "coarsest_size = {}", self.coarsest_size);
        let _ = writeln!(out, "smoother = {}", self.smoother);
        let _ = writeln!(out, "smoother_omega = {}", self.smoother_omega);
        let _ = writeln!(out, "post_smooth_all_levels = {}", self.post_smooth_all_levels);
        let _ = writeln!(out, "prolongation_smoothing = {}", self.prolongation_smoothing);
        let _ = writeln!(out, "prolongation_omega = {}", self.prolongation_omega);
        let _ = writeln!(out, "vanek_epsilon = {}", self.vanek_epsilon);
        let _ = writeln!(out, "cluster_ratio = {}", self.cluster_ratio);
        let _ = writeln!(out, "walks_per_node = {}", auto(&self.walks_per_node));
        let _ = writeln!(out, "walk_length = {}", self.walk_length);
        let _ = writeln!(out, "return_p = {}", self.return_p);
        let _ = writeln!(out, "in_out_q = {}", self.in_out_q);
        let _ = writeln!(out, "dimension = {}", self.dimension);
        let _ = writeln!(out, "window = {}", self.window);
        let _ = writeln!(out, "negatives = {}", self.negatives);
        let _ = writeln!(out, "epochs = {}", self.epochs);
        let _ = writeln!(out, "lr_initial = {}", self.lr_initial);
        let _ = writeln!(out, "lr_final = {}", self.lr_final);
        let _ = writeln!(out, "parallel_embedding = {}", self.parallel_embedding);
        let _ = writeln!(out, "batch_size = {}", auto(&self.batch_size));
        let _ = writeln!(out, "cluster_max_iters = {}", auto(&self.cluster_max_iters));
        let _ = writeln!(out, "centroid_tol = {}", self.centroid_tol);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(
            out,
            "sizes = {}",
            self.sizes.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        );
        let _ = writeln!(out, "methods = {}", self.methods.join(","));
        let _ = writeln!(out, "seeds = {}", list(&self.seeds));
        out
    }
}
