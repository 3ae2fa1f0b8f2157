//! Weighted undirected graph extracted from a coefficient matrix.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

/// Undirected graph with positive edge weights and no self-loops. The
/// adjacency of each node is sorted by neighbor index.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl WeightedGraph {
    /// Build the graph of a square matrix: every off-diagonal nonzero
    /// `A_ij` contributes the edge `(i, j)` with weight
    /// `max(|A_ij|, |A_ji|)`; the diagonal is ignored.
    ///
    /// Taking absolute values keeps walk probabilities nonnegative
    /// (discretized operators carry negative off-diagonals) and the `max`
    /// symmetrizes inputs that are not exactly structurally symmetric.
    pub fn from_matrix(a: &CsrMatrix) -> Result<Self> {
        let n = a.n_rows();
        if a.n_cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "graph extraction needs a square matrix, got {}x{}",
                a.n_rows(),
                a.n_cols()
            )));
        }
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for i in 0..n {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if i != j && v != 0.0 {
                    let w = v.abs().max(a.get(j, i).abs());
                    adjacency[i].push((j, w));
                    if a.get(j, i) == 0.0 {
                        adjacency[j].push((i, w));
                    }
                }
            }
        }
        for list in &mut adjacency {
            list.sort_unstable_by_key(|&(j, _)| j);
            list.dedup_by_key(|&mut (j, _)| j);
        }
        Ok(Self { adjacency })
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.len()
    }

    /// Neighbors of `u` with edge weights, sorted by neighbor index.
    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u]
            .binary_search_by_key(&v, |&(j, _)| j)
            .is_ok()
    }

    /// Average number of directed edge endpoints per node, i.e. each
    /// undirected edge counts twice.
    pub fn average_degree(&self) -> Result<f64> {
        if self.adjacency.is_empty() {
            return Err(Error::InvalidConfig(
                "average degree of an empty graph is undefined".into(),
            ));
        }
        let endpoints: usize = self.adjacency.iter().map(Vec::len).sum();
        Ok(endpoints as f64 / self.adjacency.len() as f64)
    }
}
