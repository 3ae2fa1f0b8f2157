//! Algebraic multigrid (AMG) solver library with three interchangeable
//! coarseners:
//!
//! - **GL**: embed the matrix graph with biased random walks and skip-gram
//!   negative sampling, cluster the embedding with mini-batch k-means, and
//!   aggregate each cluster into one coarse unknown.
//! - **Vanek**: standard aggregation over strongly coupled neighborhoods.
//! - **Beck**: greedy independent-set splitting using connection counts only.
//!
//! The solver runs V-cycles of dynamic depth with stationary smoothers
//! (Jacobi, damped Jacobi, Gauss-Seidel, SOR) and a dense direct solve on the
//! coarsest level. A 2-D Poisson generator, Matrix Market I/O and a CSV
//! benchmark harness round out the crate; the `glamg` binary exposes all of
//! it on the command line.

pub mod bench;
pub mod clustering;
pub mod coarsening;
pub mod config;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod mm;
pub mod poisson;
pub mod smoothing;
pub mod solver;
pub mod sparse;
pub mod walks;

pub use error::{Error, Result};
pub use sparse::CsrMatrix;
