//! Coarsener implementations: each one maps a square matrix to a
//! prolongation operator whose columns span the coarse space.
//!
//! Three strategies are provided behind one interface:
//!
//! - [`gl_coarsen`]: embed the matrix graph with biased random walks and
//!   skip-gram training, cluster the embedding with mini-batch k-means, and
//!   aggregate each cluster.
//! - [`vanek_coarsen`]: standard aggregation over strongly coupled
//!   neighborhoods `|A_ij| >= eps * sqrt(|A_ii A_jj|)`.
//! - [`beck_coarsen`]: greedy independent-set coarse/fine splitting by
//!   connection count with averaging interpolation.
//!
//! Aggregation coarseners produce the unit-entry operator (one 1 per fine
//! row, one column per aggregate); an optional smoothing pass turns it into
//! a Jacobi/Gauss-Seidel/SOR-smoothed operator.

use crate::clustering::{self, ClusterAssignment, ClusterConfig, Points};
use crate::embedding::{self, EmbeddingConfig};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::smoothing::{SmootherConfig, SmootherKind};
use crate::sparse::CsrMatrix;
use crate::walks::{self, WalkConfig};

/// Disjoint grouping of `n_fine` nodes into `n_coarse` nonempty aggregates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateSet {
    assignment: ClusterAssignment,
}

impl AggregateSet {
    /// Wrap a cluster assignment, checking surjectivity: every aggregate
    /// must have at least one member, otherwise the prolongation operator
    /// would carry a zero column.
    pub fn new(assignment: ClusterAssignment) -> Result<Self> {
        let mut sizes = vec![0usize; assignment.n_clusters()];
        for &label in assignment.labels() {
            sizes[label] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyCluster(empty));
        }
        Ok(Self { assignment })
    }

    pub fn n_fine(&self) -> usize {
        self.assignment.labels().len()
    }

    pub fn n_coarse(&self) -> usize {
        self.assignment.n_clusters()
    }

    pub fn assignment(&self) -> &ClusterAssignment {
        &self.assignment
    }
}

/// Unit-entry aggregation prolongation: `P[i][j] = 1` when node `i` belongs
/// to aggregate `j`, so each row holds exactly one 1 and column `j` has one
/// entry per member of aggregate `j`.
pub fn prolongation_from_aggregates(aggregates: &AggregateSet) -> Result<CsrMatrix> {
    let entries: Vec<(usize, usize, f64)> = aggregates
        .assignment
        .labels()
        .iter()
        .enumerate()
        .map(|(node, &agg)| (node, agg, 1.0))
        .collect();
    CsrMatrix::from_triplets(aggregates.n_fine(), aggregates.n_coarse(), &entries)
}

/// Smooth a rough prolongation operator with one application of the
/// configured stationary iteration's error propagator:
///
/// - Jacobi: `(I - D^{-1} A) P`
/// - damped Jacobi: `(I - omega D^{-1} A) P`
/// - Gauss-Seidel: `(I - (D + L)^{-1} A) P`
/// - SOR: `(I - omega (D + omega L)^{-1} A) P`
///
/// with `D` the diagonal and `L` the strictly lower triangle of `A`. One
/// application only; `cfg.sweeps` is not consulted.
pub fn smooth_prolongation(
    a: &CsrMatrix,
    p_hat: &CsrMatrix,
    cfg: &SmootherConfig,
) -> Result<CsrMatrix> {
    let n = a.n_rows();
    if a.n_cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "prolongation smoothing needs a square matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    if p_hat.n_rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "operator has {} rows but the matrix is {n}x{n}",
            p_hat.n_rows()
        )));
    }
    let diag = a.diagonal();
    if let Some(row) = diag.iter().position(|&d| d == 0.0) {
        return Err(Error::ZeroDiagonal(row));
    }

    let ap = a.matmul(p_hat)?;
    // Correction C solves M C = A P for the smoother's preconditioner M;
    // the result is P - omega_eff * C assembled entrywise.
    let (correction, scale) = match cfg.kind {
        SmootherKind::Jacobi => (scale_rows(&ap, &diag, 1.0), 1.0),
        SmootherKind::DampedJacobi => {
            check_omega(cfg.omega)?;
            (scale_rows(&ap, &diag, cfg.omega), 1.0)
        }
        SmootherKind::GaussSeidel => (lower_solve(a, &diag, 1.0, &ap), 1.0),
        SmootherKind::Sor => {
            check_omega(cfg.omega)?;
            (lower_solve(a, &diag, cfg.omega, &ap), cfg.omega)
        }
    };

    let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(p_hat.nnz() + correction.nnz());
    for i in 0..n {
        let (cols, vals) = p_hat.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            entries.push((i, j, v));
        }
        let (cols, vals) = correction.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            entries.push((i, j, -scale * v));
        }
    }
    let merged = CsrMatrix::from_triplets(n, p_hat.n_cols(), &entries)?;
    Ok(drop_zeros(&merged))
}

fn check_omega(omega: f64) -> Result<()> {
    if !(omega > 0.0 && omega < 2.0) {
        return Err(Error::InvalidConfig(format!(
            "omega must lie in (0, 2), got {omega}"
        )));
    }
    Ok(())
}

/// `omega * D^{-1} M`, row by row.
fn scale_rows(m: &CsrMatrix, diag: &[f64], omega: f64) -> CsrMatrix {
    let entries: Vec<(usize, usize, f64)> = (0..m.n_rows())
        .flat_map(|i| {
            let (cols, vals) = m.row(i);
            let factor = omega / diag[i];
            cols.iter()
                .zip(vals)
                .map(move |(&j, &v)| (i, j, factor * v))
                .collect::<Vec<_>>()
        })
        .collect();
    CsrMatrix::from_triplets(m.n_rows(), m.n_cols(), &entries).expect("indices are in range")
}

/// Solve `(D + omega L) X = M` column by column by forward substitution,
/// with `L` the strictly lower triangle of `a`.
fn lower_solve(a: &CsrMatrix, diag: &[f64], omega: f64, m: &CsrMatrix) -> CsrMatrix {
    let n = a.n_rows();
    let mt = m.transpose();
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut work = vec![0.0f64; n];
    for col in 0..mt.n_rows() {
        let (rows, vals) = mt.row(col);
        if rows.is_empty() {
            continue;
        }
        for (&i, &v) in rows.iter().zip(vals) {
            work[i] = v;
        }
        let start = rows[0];
        for i in start..n {
            let (cols, avals) = a.row(i);
            let mut s = work[i];
            for (&j, &a_ij) in cols.iter().zip(avals) {
                if j < i {
                    s -= omega * a_ij * work[j];
                }
            }
            work[i] = s / diag[i];
            if work[i] != 0.0 {
                entries.push((i, col, work[i]));
            }
        }
        for w in work.iter_mut() {
            *w = 0.0;
        }
    }
    CsrMatrix::from_triplets(n, m.n_cols(), &entries).expect("indices are in range")
}

fn drop_zeros(m: &CsrMatrix) -> CsrMatrix {
    let entries: Vec<(usize, usize, f64)> = (0..m.n_rows())
        .flat_map(|i| {
            let (cols, vals) = m.row(i);
            cols.iter()
                .zip(vals)
                .filter(|(_, &v)| v != 0.0)
                .map(move |(&j, &v)| (i, j, v))
                .collect::<Vec<_>>()
        })
        .collect();
    CsrMatrix::from_triplets(m.n_rows(), m.n_cols(), &entries).expect("indices are in range")
}

/// Configuration of the graph-learning coarsener. One aggregate is produced
/// per `cluster_ratio` fine nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GlConfig {
    /// Fine-to-coarse reduction: `K = max(1, floor(n / cluster_ratio))`.
    pub cluster_ratio: f64,
    /// Walks started per node; `None` uses `ceil(2 x average degree)`.
    pub walks_per_node: Option<usize>,
    pub walk_length: usize,
    /// Walk return parameter `p`; small values keep walks local, which is
    /// what aggregation wants.
    pub return_p: f64,
    /// Walk in-out parameter `q`.
    pub in_out_q: f64,
    /// Skip-gram hyper-parameters. Its `seed` field is ignored: all stage
    /// seeds derive from [`GlConfig::seed`].
    pub embedding: EmbeddingConfig,
    /// Mini-batch size; `None` uses `ceil(n / 15)`.
    pub batch_size: Option<usize>,
    /// Clustering iteration cap; `None` covers the data about 15 times.
    pub max_iters: Option<usize>,
    pub centroid_tol: f64,
    /// Master seed for walks, training and clustering.
    pub seed: u64,
}

impl GlConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            cluster_ratio: 5.0,
            walks_per_node: None,
            walk_length: 10,
            return_p: 0.1,
            in_out_q: 1.0,
            embedding: EmbeddingConfig::default(),
            batch_size: None,
            max_iters: None,
            centroid_tol: 1e-4,
            seed,
        }
    }

    /// Copy with the master seed mixed with `salt` (per-level reseeding).
    pub fn reseeded(&self, salt: u64) -> Self {
        let mut cfg = self.clone();
        cfg.seed = mix_seed(self.seed, salt);
        cfg
    }

    fn validate(&self) -> Result<()> {
        if !(self.cluster_ratio > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cluster_ratio must exceed 1, got {}",
                self.cluster_ratio
            )));
        }
        Ok(())
    }
}

/// Cheap bit mixer for deriving stage and level seeds from a master seed.
pub(crate) fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Aggregates from the graph-learning pipeline: walks, embedding, k-means.
pub fn gl_aggregates(a: &CsrMatrix, cfg: &GlConfig) -> Result<AggregateSet> {
    cfg.validate()?;
    let n = a.n_rows();
    if a.n_cols() != n || n < 2 {
        return Err(Error::DimensionMismatch(format!(
            "graph-learning coarsening needs a square matrix with n >= 2, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }

    let graph = WeightedGraph::from_matrix(a)?;
    let walks_per_node = match cfg.walks_per_node {
        Some(w) => w,
        None => (2.0 * graph.average_degree()?).ceil().max(1.0) as usize,
    };
    let walk_cfg = WalkConfig {
        walks_per_node,
        walk_length: cfg.walk_length,
        return_p: cfg.return_p,
        in_out_q: cfg.in_out_q,
        seed: mix_seed(cfg.seed, 1),
    };
    let corpus = walks::generate_walks(&graph, &walk_cfg)?;

    let mut emb_cfg = cfg.embedding;
    emb_cfg.seed = mix_seed(cfg.seed, 2);
    let emb = embedding::train_embedding(&corpus, n, &emb_cfg)?;

    let k = ((n as f64 / cfg.cluster_ratio).floor() as usize).max(1);
    let batch_size = cfg.batch_size.unwrap_or_else(|| n.div_ceil(15).max(1));
    let cluster_cfg = ClusterConfig {
        n_clusters: k,
        batch_size,
        max_iters: cfg
            .max_iters
            .unwrap_or_else(|| 15 * n.div_ceil(batch_size)),
        centroid_tol: cfg.centroid_tol,
        seed: mix_seed(cfg.seed, 3),
    };
    let points_data = emb.points();
    let points = Points::new(&points_data, n, emb.dimension())?;
    let (_, assignment) = clustering::minibatch_kmeans(&points, &cluster_cfg)?;
    AggregateSet::new(assignment)
}

/// Graph-learning coarsener: aggregates from [`gl_aggregates`] turned into
/// the unit-entry prolongation operator.
pub fn gl_coarsen(a: &CsrMatrix, cfg: &GlConfig) -> Result<CsrMatrix> {
    prolongation_from_aggregates(&gl_aggregates(a, cfg)?)
}

/// Aggregates by standard aggregation over the strongly coupled
/// neighborhoods `N_i = { j != i : |A_ij| >= eps sqrt(|A_ii A_jj|) }`:
///
/// 1. every node whose neighborhood touches no existing aggregate seeds a
///    new aggregate `{i} U N_i`;
/// 2. remaining nodes attach to the pass-1 aggregate of their most strongly
///    coupled aggregated neighbor;
/// 3. whatever is left becomes singleton aggregates.
pub fn vanek_aggregates(a: &CsrMatrix, epsilon: f64) -> Result<AggregateSet> {
    let n = a.n_rows();
    if a.n_cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "aggregation needs a square matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    if epsilon < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    let diag = a.diagonal();
    if let Some(row) = diag.iter().position(|&d| d == 0.0) {
        return Err(Error::ZeroDiagonal(row));
    }

    let strong: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            let (cols, vals) = a.row(i);
            cols.iter()
                .zip(vals)
                .filter(|&(&j, &v)| {
                    j != i && v != 0.0 && v.abs() >= epsilon * (diag[i] * diag[j]).abs().sqrt()
                })
                .map(|(&j, _)| j)
                .collect()
        })
        .collect();

    const UNAGGREGATED: usize = usize::MAX;
    let mut label = vec![UNAGGREGATED; n];
    let mut n_agg = 0;

    // Pass 1: seed aggregates from untouched neighborhoods.
    for i in 0..n {
        if label[i] != UNAGGREGATED {
            continue;
        }
        if strong[i].iter().any(|&j| label[j] != UNAGGREGATED) {
            continue;
        }
        label[i] = n_agg;
        for &j in &strong[i] {
            label[j] = n_agg;
        }
        n_agg += 1;
    }

    // Pass 2: attach leftovers to the pass-1 aggregate of their strongest
    // aggregated neighbor. Equal couplings (the common case on stencil
    // matrices) break toward the currently smallest aggregate, which keeps
    // aggregate sizes balanced, then toward the lowest aggregate id.
    let pass1 = label.clone();
    let mut sizes = vec![0usize; n_agg];
    for &l in &label {
        if l != UNAGGREGATED {
            sizes[l] += 1;
        }
    }
    for i in 0..n {
        if label[i] != UNAGGREGATED {
            continue;
        }
        let mut best: Option<(f64, usize, usize)> = None;
        for &j in &strong[i] {
            if pass1[j] == UNAGGREGATED {
                continue;
            }
            let agg = pass1[j];
            let w = a.get(i, j).abs();
            let better = match best {
                None => true,
                Some((bw, bsize, bagg)) => {
                    w > bw
                        || (w == bw && (sizes[agg] < bsize || (sizes[agg] == bsize && agg < bagg)))
                }
            };
            if better {
                best = Some((w, sizes[agg], agg));
            }
        }
        if let Some((_, _, agg)) = best {
            label[i] = agg;
            sizes[agg] += 1;
        }
    }

    // Pass 3: singletons for anything still unaggregated.
    for l in label.iter_mut() {
        if *l == UNAGGREGATED {
            *l = n_agg;
            n_agg += 1;
        }
    }

    AggregateSet::new(ClusterAssignment::from_labels(label, n_agg)?)
}

/// Standard aggregation coarsener (see [`vanek_aggregates`]).
pub fn vanek_coarsen(a: &CsrMatrix, epsilon: f64) -> Result<CsrMatrix> {
    prolongation_from_aggregates(&vanek_aggregates(a, epsilon)?)
}

/// Connection-count coarsener: greedy maximal independent set ordered by
/// descending degree becomes the coarse set; every fine node interpolates
/// as the plain average of its coarse neighbors. Strong and weak
/// connections are not distinguished.
pub fn beck_coarsen(a: &CsrMatrix) -> Result<CsrMatrix> {
    let n = a.n_rows();
    if a.n_cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "coarsening needs a square matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    let graph = WeightedGraph::from_matrix(a)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&u| (std::cmp::Reverse(graph.degree(u)), u));

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Unseen,
        Coarse,
        Fine,
    }
    let mut mark = vec![Mark::Unseen; n];
    for &u in &order {
        if mark[u] != Mark::Unseen {
            continue;
        }
        mark[u] = Mark::Coarse;
        for &(v, _) in graph.neighbors(u) {
            if mark[v] == Mark::Unseen {
                mark[v] = Mark::Fine;
            }
        }
    }

    // Coarse nodes keep their relative order as column indices.
    let mut coarse_id = vec![usize::MAX; n];
    let mut n_coarse = 0;
    for u in 0..n {
        if mark[u] == Mark::Coarse {
            coarse_id[u] = n_coarse;
            n_coarse += 1;
        }
    }

    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for u in 0..n {
        match mark[u] {
            Mark::Coarse => entries.push((u, coarse_id[u], 1.0)),
            Mark::Fine => {
                let coarse_neighbors: Vec<usize> = graph
                    .neighbors(u)
                    .iter()
                    .filter(|&&(v, _)| mark[v] == Mark::Coarse)
                    .map(|&(v, _)| coarse_id[v])
                    .collect();
                // The greedy pass only marks a node fine when a neighbor
                // went coarse, so this list is never empty.
                let w = 1.0 / coarse_neighbors.len() as f64;
                for c in coarse_neighbors {
                    entries.push((u, c, w));
                }
            }
            Mark::Unseen => unreachable!("every node is marked"),
        }
    }
    CsrMatrix::from_triplets(n, n_coarse, &entries)
}

/// Which coarsener to run.
#[derive(Debug, Clone, PartialEq)]
pub enum CoarsenMethod {
    Gl(GlConfig),
    Vanek { epsilon: f64 },
    Beck,
}

/// A coarsener plus optional prolongation smoothing, the unit the solver
/// configuration carries.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarsenerChoice {
    pub method: CoarsenMethod,
    /// When set, the rough aggregation operator is smoothed once with this
    /// iteration's error propagator. Off by default: rough aggregation is
    /// what the aggregation coarseners are defined with, and on small
    /// problems it converges faster.
    pub prolongation_smoothing: Option<SmootherConfig>,
}

impl CoarsenerChoice {
    pub fn gl(seed: u64) -> Self {
        Self {
            method: CoarsenMethod::Gl(GlConfig::new(seed)),
            prolongation_smoothing: None,
        }
    }

    /// Standard aggregation with the conventional threshold 0.08.
    pub fn vanek() -> Self {
        Self {
            method: CoarsenMethod::Vanek { epsilon: 0.08 },
            prolongation_smoothing: None,
        }
    }

    pub fn beck() -> Self {
        Self {
            method: CoarsenMethod::Beck,
            prolongation_smoothing: None,
        }
    }

    /// Short method name (CLI and benchmark CSV).
    pub fn name(&self) -> &'static str {
        match self.method {
            CoarsenMethod::Gl(_) => "gl",
            CoarsenMethod::Vanek { .. } => "vanek",
            CoarsenMethod::Beck => "beck",
        }
    }

    /// Copy with stochastic stages reseeded by `salt`; deterministic
    /// methods are returned unchanged.
    pub fn reseeded(&self, salt: u64) -> Self {
        let method = match &self.method {
            CoarsenMethod::Gl(cfg) => CoarsenMethod::Gl(cfg.reseeded(salt)),
            other => other.clone(),
        };
        Self {
            method,
            prolongation_smoothing: self.prolongation_smoothing,
        }
    }

    /// Copy with the master seed of stochastic stages set to `seed`.
    pub fn with_seed(&self, seed: u64) -> Self {
        let method = match &self.method {
            CoarsenMethod::Gl(cfg) => {
                let mut cfg = cfg.clone();
                cfg.seed = seed;
                CoarsenMethod::Gl(cfg)
            }
            other => other.clone(),
        };
        Self {
            method,
            prolongation_smoothing: self.prolongation_smoothing,
        }
    }

    /// Build the prolongation operator for `a`.
    pub fn coarsen(&self, a: &CsrMatrix) -> Result<CsrMatrix> {
        let p = match &self.method {
            CoarsenMethod::Gl(cfg) => gl_coarsen(a, cfg)?,
            CoarsenMethod::Vanek { epsilon } => vanek_coarsen(a, *epsilon)?,
            CoarsenMethod::Beck => beck_coarsen(a)?,
        };
        match &self.prolongation_smoothing {
            Some(cfg) => smooth_prolongation(a, &p, cfg),
            None => Ok(p),
        }
    }
}
