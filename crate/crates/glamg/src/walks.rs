//! Second-order (p, q)-biased random walks over a weighted graph.
//!
//! Each walk chooses its next step from the current node's neighbors with
//! weight `w(cur, x) * alpha`, where `alpha` depends on the previous node:
//! `1/p` to return, `1` to move to a shared neighbor, `1/q` to move outward.
//! Low `p` keeps walks local (breadth-first flavor), low `q` drives them
//! outward (depth-first flavor); `p = q = 1` degenerates to first-order
//! weighted walks.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Walk generation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    /// Walks started from every non-isolated node.
    pub walks_per_node: usize,
    /// Nodes per walk (the start counts).
    pub walk_length: usize,
    /// Return parameter `p`: alpha = 1/p for stepping back to the previous
    /// node.
    pub return_p: f64,
    /// In-out parameter `q`: alpha = 1/q for stepping outside the previous
    /// node's neighborhood.
    pub in_out_q: f64,
    pub seed: u64,
}

impl WalkConfig {
    /// Defaults: `2 x average degree` walks per start node (interpreted per
    /// node, the usual convention), length 10, p = 0.1, q = 1.
    pub fn for_graph(graph: &WeightedGraph, seed: u64) -> Result<Self> {
        let avg = graph.average_degree()?;
        Ok(Self {
            walks_per_node: (2.0 * avg).ceil().max(1.0) as usize,
            walk_length: 10,
            return_p: 0.1,
            in_out_q: 1.0,
            seed,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.walk_length < 2 {
            return Err(Error::InvalidConfig(format!(
                "walk_length must be at least 2, got {}",
                self.walk_length
            )));
        }
        if self.walks_per_node < 1 {
            return Err(Error::InvalidConfig("walks_per_node must be at least 1".into()));
        }
        if !(self.return_p > 0.0) || !(self.in_out_q > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "walk bias parameters must be positive, got p = {}, q = {}",
                self.return_p, self.in_out_q
            )));
        }
        Ok(())
    }
}

/// A set of walks; every consecutive pair in a walk is an edge of the
/// source graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkCorpus {
    walks: Vec<Vec<usize>>,
}

impl WalkCorpus {
    /// Wrap explicit walks (e.g. replayed from a dump).
    pub fn from_walks(walks: Vec<Vec<usize>>) -> Self {
        Self { walks }
    }

    pub fn walks(&self) -> &[Vec<usize>] {
        &self.walks
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }

    pub fn len(&self) -> usize {
        self.walks.len()
    }

    /// Debug dump: one walk per line, space-separated node indices.
    pub fn write_to(&self, mut writer: impl Write) -> Result<()> {
        for walk in &self.walks {
            let line: Vec<String> = walk.iter().map(|n| n.to_string()).collect();
            writeln!(writer, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Unnormalized transition weights out of `cur` given the walk arrived from
/// `prev`. Empty when `cur` has no neighbors.
pub fn walk_step_weights(
    graph: &WeightedGraph,
    prev: usize,
    cur: usize,
    cfg: &WalkConfig,
) -> Vec<(usize, f64)> {
    graph
        .neighbors(cur)
        .iter()
        .map(|&(x, w)| {
            let alpha = if x == prev {
                1.0 / cfg.return_p
            } else if graph.has_edge(prev, x) {
                1.0
            } else {
                1.0 / cfg.in_out_q
            };
            (x, w * alpha)
        })
        .collect()
}

/// Generate `walks_per_node` walks from every node that has at least one
/// neighbor. The first transition is sampled proportional to edge weight,
/// later ones by [`walk_step_weights`]. Deterministic for a fixed seed:
/// every start node draws from its own counter-based stream, so generation
/// parallelizes without changing the corpus.
pub fn generate_walks(graph: &WeightedGraph, cfg: &WalkConfig) -> Result<WalkCorpus> {
    cfg.validate()?;
    let starts: Vec<usize> = (0..graph.n_nodes())
        .filter(|&u| graph.degree(u) > 0)
        .collect();

    let walks: Vec<Vec<Vec<usize>>> = starts
        .par_iter()
        .map(|&start| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(start as u64);
            (0..cfg.walks_per_node)
                .map(|_| single_walk(graph, start, cfg, &mut rng))
                .collect()
        })
        .collect();

    Ok(WalkCorpus {
        walks: walks.into_iter().flatten().collect(),
    })
}

fn single_walk(
    graph: &WeightedGraph,
    start: usize,
    cfg: &WalkConfig,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let mut walk = Vec::with_capacity(cfg.walk_length);
    walk.push(start);

    // First step: plain edge-weight sampling (no previous node yet).
    let first = sample_weighted(graph.neighbors(start).iter().copied(), rng);
    let Some(first) = first else {
        return walk;
    };
    walk.push(first);

    while walk.len() < cfg.walk_length {
        let prev = walk[walk.len() - 2];
        let cur = walk[walk.len() - 1];
        let weights = walk_step_weights(graph, prev, cur, cfg);
        match sample_weighted(weights.into_iter(), rng) {
            Some(next) => walk.push(next),
            None => break,
        }
    }
    walk
}

fn sample_weighted(
    candidates: impl Iterator<Item = (usize, f64)>,
    rng: &mut ChaCha8Rng,
) -> Option<usize> {
    let items: Vec<(usize, f64)> = candidates.collect();
    let total: f64 = items.iter().map(|&(_, w)| w).sum();
    if items.is_empty() || total <= 0.0 {
        return None;
    }
    let mut draw = rng.random::<f64>() * total;
    for &(node, w) in &items {
        draw -= w;
        if draw < 0.0 {
            return Some(node);
        }
    }
    Some(items.last().unwrap().0)
}
