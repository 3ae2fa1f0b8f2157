//! K-means++ initialization and mini-batch k-means over the embedding
//! space.
//!
//! Each iteration samples a batch, caches the nearest center of every batch
//! point, then applies the per-center gradient step
//! `c <- (1 - eta) c + eta x` with `eta = 1 / v[c]`, where `v[c]` counts the
//! updates center `c` has received. Final labels assign every point to its
//! nearest centroid; empty clusters are repaired so the downstream
//! aggregation operator has no zero columns.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

use std::io::Write;

/// Row-major view of `n` points in `dim` dimensions.
#[derive(Debug, Clone, Copy)]
pub struct Points<'a> {
    data: &'a [f64],
    n: usize,
    dim: usize,
}

impl<'a> Points<'a> {
    pub fn new(data: &'a [f64], n: usize, dim: usize) -> Result<Self> {
        if data.len() != n * dim {
            return Err(Error::DimensionMismatch(format!(
                "expected {} values for {n} points of dimension {dim}, got {}",
                n * dim,
                data.len()
            )));
        }
        Ok(Self { data, n, dim })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterConfig {
    pub n_clusters: usize,
    pub batch_size: usize,
    pub max_iters: usize,
    /// Early exit once the largest centroid displacement in an iteration
    /// drops below this.
    pub centroid_tol: f64,
    pub seed: u64,
}

impl ClusterConfig {
    /// Defaults for `n` points: batch size `ceil(n / 15)` and enough
    /// iterations to cover the data set about 15 times, with a 1e-4
    /// displacement early exit.
    pub fn for_points(n: usize, n_clusters: usize, seed: u64) -> Self {
        let batch_size = n.div_ceil(15).max(1);
        Self {
            n_clusters,
            batch_size,
            max_iters: 15 * n.div_ceil(batch_size),
            centroid_tol: 1e-4,
            seed,
        }
    }

    fn validate(&self, n_samples: usize) -> Result<()> {
        if self.n_clusters < 1 || self.n_clusters > n_samples {
            return Err(Error::InvalidConfig(format!(
                "n_clusters must lie in 1..={n_samples}, got {}",
                self.n_clusters
            )));
        }
        if self.batch_size < 1 {
            return Err(Error::InvalidConfig("batch_size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Centroid positions plus the per-center update counts that drive the
/// learning rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterState {
    centroids: Vec<f64>,
    counts: Vec<u64>,
    dim: usize,
}

impl ClusterState {
    pub fn n_clusters(&self) -> usize {
        self.counts.len()
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn centroid(&self, c: usize) -> &[f64] {
        &self.centroids[c * self.dim..(c + 1) * self.dim]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// One gradient step of centroid `c` toward `x`: increment the center's
    /// count, then move by `eta = 1 / v[c]`. The first update of a center
    /// therefore lands exactly on `x`.
    pub fn update(&mut self, c: usize, x: &[f64]) {
        self.counts[c] += 1;
        let eta = 1.0 / self.counts[c] as f64;
        let centroid = &mut self.centroids[c * self.dim..(c + 1) * self.dim];
        for (ci, &xi) in centroid.iter_mut().zip(x) {
            *ci = (1.0 - eta) * *ci + eta * xi;
        }
    }

    /// Nearest centroid of `x`; ties break toward the lowest index.
    pub fn nearest(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for c in 0..self.n_clusters() {
            let d = dist2(self.centroid(c), x);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        best
    }
}

/// Surjective node -> cluster map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    labels: Vec<usize>,
    n_clusters: usize,
}

impl ClusterAssignment {
    /// Wrap explicit labels; every label must be below `n_clusters`.
    pub fn from_labels(labels: Vec<usize>, n_clusters: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_clusters) {
            return Err(Error::InvalidConfig(format!(
                "label {bad} exceeds cluster count {n_clusters}"
            )));
        }
        Ok(Self { labels, n_clusters })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    /// Members of each cluster, in ascending node order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.n_clusters];
        for (node, &label) in self.labels.iter().enumerate() {
            members[label].push(node);
        }
        members
    }

    /// Debug dump: one `node cluster` pair per line.
    pub fn write_to(&self, mut writer: impl Write) -> Result<()> {
        for (node, &label) in self.labels.iter().enumerate() {
            writeln!(writer, "{node} {label}")?;
        }
        Ok(())
    }
}

/// K-means++ seeding: the first centroid is uniform over the points, each
/// subsequent one is drawn with probability proportional to the squared
/// distance to the nearest centroid chosen so far. Always returns `k`
/// distinct point indices as centroids.
pub fn kmeanspp_init(points: &Points, k: usize, seed: u64) -> Result<ClusterState> {
    let n = points.len();
    if k < 1 || k > n {
        return Err(Error::InvalidConfig(format!(
            "kmeans++ needs 1 <= k <= {n}, got {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = Vec::with_capacity(k);
    let mut is_chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen.push(first);
    is_chosen[first] = true;

    let mut d2: Vec<f64> = (0..n)
        .map(|i| dist2(points.point(i), points.point(first)))
        .collect();

    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let draw = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                acc += w;
                if draw < acc && !is_chosen[i] {
                    pick = Some(i);
                    break;
                }
            }
            // Numerical edge: fall through to the last unchosen point with
            // positive weight.
            pick.unwrap_or_else(|| {
                (0..n)
                    .rev()
                    .find(|&i| !is_chosen[i] && d2[i] > 0.0)
                    .unwrap_or_else(|| (0..n).find(|&i| !is_chosen[i]).unwrap())
            })
        } else {
            // All remaining points coincide with chosen centroids; pick
            // uniformly among the unchosen so the centroids stay distinct
            // indices.
            let remaining: Vec<usize> = (0..n).filter(|&i| !is_chosen[i]).collect();
            remaining[rng.random_range(0..remaining.len())]
        };
        chosen.push(next);
        is_chosen[next] = true;
        for i in 0..n {
            d2[i] = d2[i].min(dist2(points.point(i), points.point(next)));
        }
    }

    let dim = points.dimension();
    let mut centroids = Vec::with_capacity(k * dim);
    for &idx in &chosen {
        centroids.extend_from_slice(points.point(idx));
    }
    Ok(ClusterState {
        centroids,
        counts: vec![0; k],
        dim,
    })
}

fn assign_all(points: &Points, state: &ClusterState) -> Vec<usize> {
    if points.len() >= 4096 {
        (0..points.len())
            .into_par_iter()
            .map(|i| state.nearest(points.point(i)))
            .collect()
    } else {
        (0..points.len())
            .map(|i| state.nearest(points.point(i)))
            .collect()
    }
}

/// Mini-batch k-means. Runs `max_iters` iterations (or stops early once
/// centroids settle), assigns every point to its nearest centroid, then
/// repairs empty clusters by moving their centroid to the point farthest
/// from it and relabeling (at most `k` repairs). Deterministic for a fixed
/// seed.
///
/// In the degenerate case of fewer distinct points than clusters, repairs
/// cannot succeed; remaining empty clusters are dropped and the labels
/// compacted, so the returned assignment is always surjective.
pub fn minibatch_kmeans(
    points: &Points,
    cfg: &ClusterConfig,
) -> Result<(ClusterState, ClusterAssignment)> {
    run_minibatch(points, cfg, None)
}

/// As [`minibatch_kmeans`], recording a snapshot of the centroids after
/// every iteration (diagnostics and convergence studies).
pub fn minibatch_kmeans_trace(
    points: &Points,
    cfg: &ClusterConfig,
    trace: &mut Vec<ClusterState>,
) -> Result<(ClusterState, ClusterAssignment)> {
    run_minibatch(points, cfg, Some(trace))
}

fn run_minibatch(
    points: &Points,
    cfg: &ClusterConfig,
    mut trace: Option<&mut Vec<ClusterState>>,
) -> Result<(ClusterState, ClusterAssignment)> {
    cfg.validate(points.len())?;
    let n = points.len();
    let k = cfg.n_clusters;
    let mut state = kmeanspp_init(points, k, cfg.seed)?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(1);
    let b = cfg.batch_size.min(n);
    let mut indices: Vec<usize> = (0..n).collect();
    let mut prev = vec![0.0; state.centroids.len()];

    for _ in 0..cfg.max_iters {
        // Sample the batch without replacement (partial Fisher-Yates).
        for j in 0..b {
            let swap_with = j + rng.random_range(0..n - j);
            indices.swap(j, swap_with);
        }
        let batch = &indices[..b];

        // Cache the nearest center of every batch point, then take the
        // gradient steps sequentially in batch order.
        let cached: Vec<usize> = if b >= 4096 {
            batch
                .par_iter()
                .map(|&i| state.nearest(points.point(i)))
                .collect()
        } else {
            batch.iter().map(|&i| state.nearest(points.point(i))).collect()
        };
        prev.copy_from_slice(&state.centroids);
        for (&i, &c) in batch.iter().zip(&cached) {
            state.update(c, points.point(i));
        }
        if let Some(trace) = trace.as_deref_mut() {
            trace.push(state.clone());
        }

        let max_move = (0..k)
            .map(|c| dist2(&prev[c * state.dim..(c + 1) * state.dim], state.centroid(c)).sqrt())
            .fold(0.0f64, f64::max);
        if max_move < cfg.centroid_tol {
            break;
        }
    }

    let mut labels = assign_all(points, &state);

    // Empty-cluster repair: relocate each empty cluster's centroid to the
    // point farthest from it, relabel, and try again (at most k rounds).
    for _ in 0..k {
        let mut sizes = vec![0usize; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            break;
        };
        let farthest = (0..n)
            .max_by(|&i, &j| {
                dist2(points.point(i), state.centroid(empty))
                    .total_cmp(&dist2(points.point(j), state.centroid(empty)))
            })
            .unwrap();
        let span = empty * state.dim..(empty + 1) * state.dim;
        state.centroids[span].copy_from_slice(points.point(farthest));
        labels = assign_all(points, &state);
    }

    // Degenerate inputs (duplicate points) can leave clusters empty even
    // after repairs; drop them so the assignment stays surjective.
    let mut sizes = vec![0usize; k];
    for &l in &labels {
        sizes[l] += 1;
    }
    if sizes.iter().any(|&s| s == 0) {
        let mut remap = vec![usize::MAX; k];
        let mut centroids = Vec::new();
        let mut counts = Vec::new();
        let mut kept = 0;
        for c in 0..k {
            if sizes[c] > 0 {
                remap[c] = kept;
                centroids.extend_from_slice(state.centroid(c));
                counts.push(state.counts[c]);
                kept += 1;
            }
        }
        labels = labels.into_iter().map(|l| remap[l]).collect();
        state = ClusterState {
            centroids,
            counts,
            dim: state.dim,
        };
    }

    let n_clusters = state.n_clusters();
    Ok((state, ClusterAssignment::from_labels(labels, n_clusters)?))
}

/// Sum of squared Euclidean distances from each point to its assigned
/// centroid.
pub fn kmeans_objective(
    points: &Points,
    state: &ClusterState,
    assignment: &ClusterAssignment,
) -> Result<f64> {
    if assignment.labels().len() != points.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} points",
            assignment.labels().len(),
            points.len()
        )));
    }
    Ok(assignment
        .labels()
        .iter()
        .enumerate()
        .map(|(i, &c)| dist2(points.point(i), state.centroid(c)))
        .sum())
}
