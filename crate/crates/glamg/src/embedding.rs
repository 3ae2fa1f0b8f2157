//! Skip-gram training of node vectors from a walk corpus, with negative
//! sampling.
//!
//! Every node within `window` positions of a walk position forms a positive
//! (center, context) pair; each pair is contrasted against `k` negatives
//! drawn from the corpus unigram distribution raised to the 3/4 power. Two
//! vector tables are kept (center/"in" and context/"out", the standard
//! arrangement for stable SGNS training); the in-vectors are the published
//! embedding.
//!
//! Similarity is the raw dot product of in-vectors, and the downstream
//! clustering measures Euclidean distance in the same space; the two metrics
//! coincide only up to vector norms, which in practice has not mattered for
//! aggregation quality.

use std::io::Write;
use std::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::walks::WalkCorpus;

/// Exponent of the unigram negative-sampling distribution.
const NEGATIVE_POWER: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingConfig {
    /// Embedding dimension `d`.
    pub dimension: usize,
    /// Context radius: positions within `window` of the center pair with it.
    pub window: usize,
    /// Negative samples per positive pair (`k`).
    pub negatives: usize,
    pub epochs: usize,
    /// Learning rate decays linearly from `lr_initial` to `lr_final` by
    /// processed-pair count.
    pub lr_initial: f64,
    pub lr_final: f64,
    pub seed: u64,
    /// Lock-free parallel training over walks. Faster, but gradient
    /// accumulation order becomes nondeterministic; leave off when bitwise
    /// reproducibility matters.
    pub parallel: bool,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            dimension: 128,
            window: 5,
            negatives: 5,
            epochs: 5,
            lr_initial: 0.025,
            lr_final: 0.0001,
            seed: 0,
            parallel: false,
        }
    }
}

impl EmbeddingConfig {
    fn validate(&self) -> Result<()> {
        if self.dimension < 1 || self.window < 1 || self.negatives < 1 {
            return Err(Error::InvalidConfig(format!(
                "dimension, window and negatives must all be at least 1 (got {}, {}, {})",
                self.dimension, self.window, self.negatives
            )));
        }
        if !(self.lr_final > 0.0) || self.lr_initial < self.lr_final {
            return Err(Error::InvalidConfig(format!(
                "learning rates must satisfy lr_initial >= lr_final > 0, got {} and {}",
                self.lr_initial, self.lr_final
            )));
        }
        Ok(())
    }
}

/// Trained node vectors: `n_nodes x dimension` in- and out-tables, stored
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    n_nodes: usize,
    dimension: usize,
    in_vectors: Vec<f64>,
    out_vectors: Vec<f64>,
}

impl Embedding {
    /// Assemble an embedding from raw tables (row-major, `n * d` each).
    pub fn from_parts(
        n_nodes: usize,
        dimension: usize,
        in_vectors: Vec<f64>,
        out_vectors: Vec<f64>,
    ) -> Result<Self> {
        if in_vectors.len() != n_nodes * dimension || out_vectors.len() != n_nodes * dimension {
            return Err(Error::DimensionMismatch(format!(
                "embedding tables must hold {} values, got {} and {}",
                n_nodes * dimension,
                in_vectors.len(),
                out_vectors.len()
            )));
        }
        Ok(Self {
            n_nodes,
            dimension,
            in_vectors,
            out_vectors,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Published embedding vector of node `u` (the in-table row).
    pub fn vector(&self, u: usize) -> &[f64] {
        &self.in_vectors[u * self.dimension..(u + 1) * self.dimension]
    }

    /// Context vector of node `u` (the out-table row).
    pub fn out_vector(&self, u: usize) -> &[f64] {
        &self.out_vectors[u * self.dimension..(u + 1) * self.dimension]
    }

    /// Similarity of two nodes: the plain dot product of their published
    /// vectors (no norm division).
    pub fn similarity(&self, u: usize, v: usize) -> Result<f64> {
        if u >= self.n_nodes || v >= self.n_nodes {
            return Err(Error::IndexOutOfRange {
                row: u.max(v),
                col: 0,
                n_rows: self.n_nodes,
                n_cols: self.dimension,
            });
        }
        Ok(dot(self.vector(u), self.vector(v)))
    }

    /// All published vectors as an `n x d` row-major matrix (clustering
    /// input).
    pub fn points(&self) -> Vec<f64> {
        self.in_vectors.clone()
    }

    /// Plain-text export: header `n d`, then one line per node with `d`
    /// reals.
    pub fn write_to(&self, mut writer: impl Write) -> Result<()> {
        writeln!(writer, "{} {}", self.n_nodes, self.dimension)?;
        for u in 0..self.n_nodes {
            let row: Vec<String> = self.vector(u).iter().map(|v| v.to_string()).collect();
            writeln!(writer, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Negative-sampling loss of one (center, context) pair with the given
/// negatives, reading vectors from the embedding tables (center from the
/// in-table, context and negatives from the out-table).
pub fn sgns_loss(emb: &Embedding, center: usize, context: usize, negatives: &[usize]) -> f64 {
    let neg_vecs: Vec<&[f64]> = negatives.iter().map(|&n| emb.out_vector(n)).collect();
    sgns_loss_parts(emb.vector(center), emb.out_vector(context), &neg_vecs)
}

/// `-log sigma(u . v) - sum_i log sigma(-u . n_i)` on raw vectors.
pub fn sgns_loss_parts(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> f64 {
    let mut loss = -sigmoid(dot(center, context)).ln();
    for neg in negatives {
        loss -= sigmoid(-dot(center, neg)).ln();
    }
    loss
}

/// Analytic gradients of [`sgns_loss_parts`] with respect to the center,
/// context and each negative vector.
pub fn sgns_gradients(
    center: &[f64],
    context: &[f64],
    negatives: &[&[f64]],
) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let d = center.len();
    let g_pos = sigmoid(dot(center, context)) - 1.0;
    let mut grad_center: Vec<f64> = context.iter().map(|&c| g_pos * c).collect();
    let grad_context: Vec<f64> = center.iter().map(|&c| g_pos * c).collect();
    let mut grad_negs = Vec::with_capacity(negatives.len());
    for neg in negatives {
        let g_neg = sigmoid(dot(center, neg));
        for i in 0..d {
            grad_center[i] += g_neg * neg[i];
        }
        grad_negs.push(center.iter().map(|&c| g_neg * c).collect());
    }
    (grad_center, grad_context, grad_negs)
}

/// Per-epoch training statistics.
#[derive(Debug, Clone, Default)]
pub struct TrainStats {
    /// Total SGNS loss accumulated over each epoch (evaluated at the
    /// parameters current when each pair was visited).
    pub epoch_loss: Vec<f64>,
}

/// Cumulative unigram^(3/4) table over corpus occurrences.
struct NegativeTable {
    cumulative: Vec<f64>,
    total: f64,
}

impl NegativeTable {
    fn build(corpus: &WalkCorpus, n_nodes: usize) -> Self {
        let mut counts = vec![0u64; n_nodes];
        for walk in corpus.walks() {
            for &node in walk {
                counts[node] += 1;
            }
        }
        let mut cumulative = Vec::with_capacity(n_nodes);
        let mut running = 0.0;
        for &c in &counts {
            running += (c as f64).powf(NEGATIVE_POWER);
            cumulative.push(running);
        }
        Self {
            cumulative,
            total: running,
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let draw = rng.random::<f64>() * self.total;
        self.cumulative.partition_point(|&c| c <= draw)
    }
}

fn validate_corpus(corpus: &WalkCorpus, n_nodes: usize) -> Result<()> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    for walk in corpus.walks() {
        for &node in walk {
            if node >= n_nodes {
                return Err(Error::IndexOutOfRange {
                    row: node,
                    col: 0,
                    n_rows: n_nodes,
                    n_cols: 1,
                });
            }
        }
    }
    Ok(())
}

fn initial_tables(n_nodes: usize, cfg: &EmbeddingConfig) -> (Vec<f64>, Vec<f64>) {
    let d = cfg.dimension;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let half = 0.5 / d as f64;
    let in_vectors: Vec<f64> = (0..n_nodes * d)
        .map(|_| rng.random::<f64>() * 2.0 * half - half)
        .collect();
    let out_vectors = vec![0.0; n_nodes * d];
    (in_vectors, out_vectors)
}

/// Positive pairs of one walk: every ordered (center, context) pair within
/// `window` positions.
fn walk_pairs(walk: &[usize], window: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
    walk.iter().enumerate().flat_map(move |(i, &center)| {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(walk.len());
        (lo..hi)
            .filter(move |&j| j != i)
            .map(move |j| (center, walk[j]))
    })
}

/// Train node vectors on the walk corpus. Deterministic for a fixed seed
/// and config when `cfg.parallel` is false. `epochs == 0` returns the
/// freshly initialized embedding.
pub fn train_embedding(
    corpus: &WalkCorpus,
    n_nodes: usize,
    cfg: &EmbeddingConfig,
) -> Result<Embedding> {
    train_embedding_with_stats(corpus, n_nodes, cfg).map(|(emb, _)| emb)
}

/// As [`train_embedding`], additionally reporting per-epoch loss totals.
pub fn train_embedding_with_stats(
    corpus: &WalkCorpus,
    n_nodes: usize,
    cfg: &EmbeddingConfig,
) -> Result<(Embedding, TrainStats)> {
    cfg.validate()?;
    validate_corpus(corpus, n_nodes)?;

    let (mut in_vectors, mut out_vectors) = initial_tables(n_nodes, cfg);
    let stats = if cfg.epochs > 0 {
        let table = NegativeTable::build(corpus, n_nodes);
        if cfg.parallel {
            train_parallel(corpus, cfg, &table, &mut in_vectors, &mut out_vectors)
        } else {
            train_sequential(corpus, cfg, &table, &mut in_vectors, &mut out_vectors)
        }
    } else {
        TrainStats::default()
    };

    let emb = Embedding::from_parts(n_nodes, cfg.dimension, in_vectors, out_vectors)?;
    Ok((emb, stats))
}

/// SGD step for one positive pair against `k` sampled negatives; returns the
/// pair loss. `in_row` and the out-table rows are updated in place.
#[inline]
fn pair_step(
    d: usize,
    lr: f64,
    center: usize,
    context: usize,
    table: &NegativeTable,
    rng: &mut ChaCha8Rng,
    negatives: usize,
    in_vectors: &mut [f64],
    out_vectors: &mut [f64],
    grad_center: &mut [f64],
) -> f64 {
    grad_center.fill(0.0);
    let u = &in_vectors[center * d..(center + 1) * d];
    let mut loss = 0.0;
    {
        let v = &mut out_vectors[context * d..(context + 1) * d];
        let s = sigmoid(dot(u, v));
        loss -= s.ln();
        let g = s - 1.0;
        for i in 0..d {
            grad_center[i] += g * v[i];
            v[i] -= lr * g * u[i];
        }
    }
    for _ in 0..negatives {
        let neg = table.sample(rng);
        let nv = &mut out_vectors[neg * d..(neg + 1) * d];
        let dot_un = dot(u, nv);
        loss -= sigmoid(-dot_un).ln();
        let g = sigmoid(dot_un);
        for i in 0..d {
            grad_center[i] += g * nv[i];
            nv[i] -= lr * g * u[i];
        }
    }
    let u_mut = &mut in_vectors[center * d..(center + 1) * d];
    for i in 0..d {
        u_mut[i] -= lr * grad_center[i];
    }
    loss
}

fn train_sequential(
    corpus: &WalkCorpus,
    cfg: &EmbeddingConfig,
    table: &NegativeTable,
    in_vectors: &mut [f64],
    out_vectors: &mut [f64],
) -> TrainStats {
    let d = cfg.dimension;
    let pairs_per_epoch: usize = corpus
        .walks()
        .iter()
        .map(|w| walk_pairs(w, cfg.window).count())
        .sum();
    let total_pairs = (pairs_per_epoch * cfg.epochs).max(1);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let mut grad = vec![0.0; d];
    let mut processed = 0usize;
    let mut stats = TrainStats::default();
    for _ in 0..cfg.epochs {
        let mut epoch_loss = 0.0;
        for walk in corpus.walks() {
            for (center, context) in walk_pairs(walk, cfg.window) {
                let progress = processed as f64 / total_pairs as f64;
                let lr = cfg.lr_initial - (cfg.lr_initial - cfg.lr_final) * progress;
                epoch_loss += pair_step(
                    d,
                    lr,
                    center,
                    context,
                    table,
                    &mut rng,
                    cfg.negatives,
                    in_vectors,
                    out_vectors,
                    &mut grad,
                );
                processed += 1;
            }
        }
        stats.epoch_loss.push(epoch_loss);
    }
    stats
}

/// Atomic view of an `f64` table for lock-free shared updates. Plain
/// relaxed loads and stores: concurrent updates may overwrite each other,
/// which SGD tolerates.
struct AtomicTable(Vec<AtomicU64>);

impl AtomicTable {
    fn from_values(values: &[f64]) -> Self {
        Self(values.iter().map(|&v| AtomicU64::new(v.to_bits())).collect())
    }

    fn into_values(self) -> Vec<f64> {
        self.0
            .into_iter()
            .map(|a| f64::from_bits(a.into_inner()))
            .collect()
    }

    #[inline]
    fn get(&self, i: usize) -> f64 {
        f64::from_bits(self.0[i].load(Ordering::Relaxed))
    }

    #[inline]
    fn set(&self, i: usize, v: f64) {
        self.0[i].store(v.to_bits(), Ordering::Relaxed);
    }

    #[inline]
    fn read_row(&self, row: usize, d: usize, out: &mut [f64]) {
        for i in 0..d {
            out[i] = self.get(row * d + i);
        }
    }
}

fn train_parallel(
    corpus: &WalkCorpus,
    cfg: &EmbeddingConfig,
    table: &NegativeTable,
    in_vectors: &mut [f64],
    out_vectors: &mut [f64],
) -> TrainStats {
    let d = cfg.dimension;
    let in_table = AtomicTable::from_values(in_vectors);
    let out_table = AtomicTable::from_values(out_vectors);
    let pairs_per_epoch: usize = corpus
        .walks()
        .iter()
        .map(|w| walk_pairs(w, cfg.window).count())
        .sum();
    let total_pairs = (pairs_per_epoch * cfg.epochs).max(1);
    let processed = AtomicU64::new(0);

    let mut stats = TrainStats::default();
    for epoch in 0..cfg.epochs {
        let epoch_loss: f64 = corpus
            .walks()
            .par_iter()
            .enumerate()
            .map(|(walk_idx, walk)| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
                rng.set_stream((epoch * corpus.len() + walk_idx) as u64 + 1);
                let mut u = vec![0.0; d];
                let mut v = vec![0.0; d];
                let mut grad = vec![0.0; d];
                let mut loss = 0.0;
                for (center, context) in walk_pairs(walk, cfg.window) {
                    let done = processed.fetch_add(1, Ordering::Relaxed);
                    let progress = done as f64 / total_pairs as f64;
                    let lr = cfg.lr_initial - (cfg.lr_initial - cfg.lr_final) * progress;

                    in_table.read_row(center, d, &mut u);
                    out_table.read_row(context, d, &mut v);
                    grad.fill(0.0);

                    let s = sigmoid(dot(&u, &v));
                    loss -= s.ln();
                    let g = s - 1.0;
                    for i in 0..d {
                        grad[i] += g * v[i];
                        out_table.set(context * d + i, v[i] - lr * g * u[i]);
                    }
                    for _ in 0..cfg.negatives {
                        let neg = table.sample(&mut rng);
                        out_table.read_row(neg, d, &mut v);
                        let dot_un = dot(&u, &v);
                        loss -= sigmoid(-dot_un).ln();
                        let g_neg = sigmoid(dot_un);
                        for i in 0..d {
                            grad[i] += g_neg * v[i];
                            out_table.set(neg * d + i, v[i] - lr * g_neg * u[i]);
                        }
                    }
                    for i in 0..d {
                        in_table.set(center * d + i, u[i] - lr * grad[i]);
                    }
                }
                loss
            })
            .sum();
        stats.epoch_loss.push(epoch_loss);
    }

    in_vectors.copy_from_slice(&in_table.into_values());
    out_vectors.copy_from_slice(&out_table.into_values());
    stats
}

/// Total SGNS loss of the corpus under fixed parameters (no updates), with
/// negatives drawn from the corpus unigram^(3/4) distribution using
/// `eval_seed`.
pub fn corpus_loss(
    emb: &Embedding,
    corpus: &WalkCorpus,
    cfg: &EmbeddingConfig,
    eval_seed: u64,
) -> Result<f64> {
    validate_corpus(corpus, emb.n_nodes())?;
    let table = NegativeTable::build(corpus, emb.n_nodes());
    let mut rng = ChaCha8Rng::seed_from_u64(eval_seed);
    let mut loss = 0.0;
    for walk in corpus.walks() {
        for (center, context) in walk_pairs(walk, cfg.window) {
            let negatives: Vec<usize> = (0..cfg.negatives).map(|_| table.sample(&mut rng)).collect();
            loss += sgns_loss(emb, center, context, &negatives);
        }
    }
    Ok(loss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walks::WalkCorpus;

    fn corpus_of(walks: Vec<Vec<usize>>) -> WalkCorpus {
        WalkCorpus::from_walks(walks)
    }

    #[test]
    fn similarity_examples() {
        let emb = Embedding::from_parts(
            3,
            2,
            vec![1.0, 2.0, 3.0, -1.0, 2.0, -1.0],
            vec![0.0; 6],
        )
        .unwrap();
        // Self-similarity is the squared norm.
        assert_eq!(emb.similarity(0, 0).unwrap(), 5.0);
        // [1,2] . [3,-1] = 1.
        assert_eq!(emb.similarity(0, 1).unwrap(), 1.0);
        // [3,-1] . [2,-1] = 7; orthogonal pair: [1,2] . [2,-1] = 0.
        assert_eq!(emb.similarity(0, 2).unwrap(), 0.0);
        assert!(emb.similarity(0, 3).is_err());
    }

    #[test]
    fn loss_at_zero_vectors() {
        let emb = Embedding::from_parts(2, 2, vec![0.0; 4], vec![0.0; 4]).unwrap();
        let loss = sgns_loss(&emb, 0, 1, &[1]);
        assert!((loss - 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert!((loss - 1.3863).abs() < 1e-4);
    }

    #[test]
    fn loss_vanishes_for_confident_embeddings() {
        // Positive dot large and positive, negative dot large and negative.
        let emb = Embedding::from_parts(
            3,
            2,
            vec![30.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, -1.0, 0.0],
        )
        .unwrap();
        let loss = sgns_loss(&emb, 0, 1, &[2]);
        assert!(loss < 1e-6, "loss = {loss}");
    }

    #[test]
    fn loss_hand_computed() {
        let emb = Embedding::from_parts(
            3,
            2,
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 1.0, 0.0],
        )
        .unwrap();
        let loss = sgns_loss(&emb, 0, 1, &[2]);
        let expected = -(sigmoid(1.0)).ln() - (sigmoid(-1.0)).ln();
        assert!((loss - expected).abs() < 1e-12);
        assert!((loss - 1.6265).abs() < 1e-4);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let d = 4;
            let rand_vec = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                (0..d).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect()
            };
            let center = rand_vec(&mut rng);
            let context = rand_vec(&mut rng);
            let negs = [rand_vec(&mut rng), rand_vec(&mut rng)];
            let neg_refs: Vec<&[f64]> = negs.iter().map(|v| v.as_slice()).collect();
            let (gc, gx, gn) = sgns_gradients(&center, &context, &neg_refs);

            let step = 1e-5;
            let check = |analytic: &[f64], mut eval: Box<dyn FnMut(usize, f64) -> f64>| {
                for i in 0..d {
                    let plus = eval(i, step);
                    let minus = eval(i, -step);
                    let numeric = (plus - minus) / (2.0 * step);
                    let denom = analytic[i].abs().max(1e-8);
                    assert!(
                        (numeric - analytic[i]).abs() / denom < 1e-5,
                        "analytic {} vs numeric {numeric}",
                        analytic[i]
                    );
                }
            };
            let c2 = center.clone();
            let x2 = context.clone();
            let n2 = negs.clone();
            check(
                &gc,
                Box::new(move |i, eps| {
                    let mut c = c2.clone();
                    c[i] += eps;
                    let refs: Vec<&[f64]> = n2.iter().map(|v| v.as_slice()).collect();
                    sgns_loss_parts(&c, &x2, &refs)
                }),
            );
            let c3 = center.clone();
            let x3 = context.clone();
            let n3 = negs.clone();
            check(
                &gx,
                Box::new(move |i, eps| {
                    let mut x = x3.clone();
                    x[i] += eps;
                    let refs: Vec<&[f64]> = n3.iter().map(|v| v.as_slice()).collect();
                    sgns_loss_parts(&c3, &x, &refs)
                }),
            );
            for (k, gnk) in gn.iter().enumerate() {
                let c4 = center.clone();
                let x4 = context.clone();
                let n4 = negs.clone();
                check(
                    gnk,
                    Box::new(move |i, eps| {
                        let mut ns = n4.clone();
                        ns[k][i] += eps;
                        let refs: Vec<&[f64]> = ns.iter().map(|v| v.as_slice()).collect();
                        sgns_loss_parts(&c4, &x4, &refs)
                    }),
                );
            }
        }
    }

    #[test]
    fn zero_epochs_returns_initial_embedding() {
        let corpus = corpus_of(vec![vec![0, 1, 0, 1]]);
        let cfg = EmbeddingConfig {
            dimension: 8,
            epochs: 0,
            seed: 3,
            ..Default::default()
        };
        let a = train_embedding(&corpus, 2, &cfg).unwrap();
        let b = train_embedding(&corpus, 2, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.out_vector(0).iter().all(|&v| v == 0.0));
        let bound = 0.5 / 8.0;
        assert!(a.vector(0).iter().all(|&v| v.abs() <= bound));
        assert!(a.vector(0).iter().any(|&v| v != 0.0));
    }

    #[test]
    fn co_occurring_nodes_outrank_isolated_ones() {
        let walk: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let corpus = corpus_of(vec![walk; 4]);
        let cfg = EmbeddingConfig {
            dimension: 8,
            epochs: 5,
            seed: 5,
            ..Default::default()
        };
        // Node 2 exists but never appears in the corpus.
        let emb = train_embedding(&corpus, 3, &cfg).unwrap();
        let close = emb.similarity(0, 1).unwrap();
        let far = emb.similarity(0, 2).unwrap();
        assert!(close > far, "similarity(0,1) = {close} <= similarity(0,2) = {far}");
    }

    #[test]
    fn training_is_deterministic_for_a_seed() {
        let corpus = corpus_of(vec![vec![0, 1, 2, 1, 0], vec![2, 1, 0, 1, 2]]);
        let cfg = EmbeddingConfig {
            dimension: 6,
            epochs: 3,
            seed: 9,
            ..Default::default()
        };
        let a = train_embedding(&corpus, 3, &cfg).unwrap();
        let b = train_embedding(&corpus, 3, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_corpus_is_rejected() {
        let corpus = corpus_of(vec![]);
        let cfg = EmbeddingConfig::default();
        assert!(matches!(
            train_embedding(&corpus, 3, &cfg),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn out_of_range_nodes_are_rejected() {
        let corpus = corpus_of(vec![vec![0, 5]]);
        let cfg = EmbeddingConfig::default();
        assert!(train_embedding(&corpus, 3, &cfg).is_err());
    }

    #[test]
    fn export_format_has_header_and_one_row_per_node() {
        let emb = Embedding::from_parts(2, 3, vec![1.0, 0.5, -2.0, 0.0, 3.25, 4.0], vec![0.0; 6])
            .unwrap();
        let mut buf = Vec::new();
        emb.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "2 3");
        assert_eq!(lines[1], "1 0.5 -2");
        assert_eq!(lines[2], "0 3.25 4");
    }

    #[test]
    fn parallel_mode_produces_finite_vectors() {
        let walk: Vec<usize> = (0..20).map(|i| i % 4).collect();
        let corpus = corpus_of(vec![walk; 8]);
        let cfg = EmbeddingConfig {
            dimension: 8,
            epochs: 2,
            seed: 2,
            parallel: true,
            ..Default::default()
        };
        let emb = train_embedding(&corpus, 4, &cfg).unwrap();
        for u in 0..4 {
            assert!(emb.vector(u).iter().all(|v| v.is_finite()));
        }
    }
}
