//! Compressed-sparse-row matrices, dense vectors and the linear-algebra
//! kernels the rest of the crate is built on.
//!
//! Dense vectors are plain `Vec<f64>` / `&[f64]`; a system of size `n` pairs
//! with vectors of length `n`. All scalars are `f64`: the solver stopping
//! tolerance (1e-4 on the residual infinity norm) assumes double precision.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Row-parallel kernels only pay off once rows are plentiful.
const PAR_ROW_THRESHOLD: usize = 2048;

/// Sparse matrix in compressed-sparse-row form.
///
/// Invariants (maintained by every constructor):
/// - `row_ptr` is non-decreasing, `row_ptr[0] == 0`, `row_ptr[n_rows] == nnz`
/// - within each row, column indices are strictly increasing and `< n_cols`
///
/// Explicitly stored zeros are allowed; duplicate entries are merged by
/// summation at construction time.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build a matrix from `(row, col, value)` triplets. Duplicates are
    /// summed, rows end up sorted by column.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        entries: &[(usize, usize, f64)],
    ) -> Result<Self> {
        for &(row, col, _) in entries {
            if row >= n_rows || col >= n_cols {
                return Err(Error::IndexOutOfRange {
                    row,
                    col,
                    n_rows,
                    n_cols,
                });
            }
        }

        // Bucket entries by row, then sort and merge within each row.
        let mut counts = vec![0usize; n_rows + 1];
        for &(row, _, _) in entries {
            counts[row + 1] += 1;
        }
        for i in 0..n_rows {
            counts[i + 1] += counts[i];
        }
        let mut scratch: Vec<(usize, f64)> = vec![(0, 0.0); entries.len()];
        let mut fill = counts.clone();
        for &(row, col, val) in entries {
            scratch[fill[row]] = (col, val);
            fill[row] += 1;
        }

        let mut row_ptr = Vec::with_capacity(n_rows + 1);
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        row_ptr.push(0);
        for i in 0..n_rows {
            let row = &mut scratch[counts[i]..counts[i + 1]];
            row.sort_unstable_by_key(|&(col, _)| col);
            for &(col, val) in row.iter() {
                if col_idx.len() > *row_ptr.last().unwrap() && *col_idx.last().unwrap() == col {
                    *values.last_mut().unwrap() += val;
                } else {
                    col_idx.push(col);
                    values.push(val);
                }
            }
            row_ptr.push(col_idx.len());
        }

        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Identity matrix of size `n`.
    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    /// Stored value at `(i, j)`, or 0.0 when the entry is not stored.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    /// Main diagonal as a dense vector (missing entries are 0.0).
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols))
            .map(|i| self.get(i, i))
            .collect()
    }

    /// Sparse matrix-vector product `A x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "spmv: matrix has {} columns, vector has length {}",
                self.n_cols,
                x.len()
            )));
        }
        let row_product = |i: usize| -> f64 {
            let (cols, vals) = self.row(i);
            cols.iter()
                .zip(vals)
                .map(|(&j, &a)| a * x[j])
                .sum()
        };
        let y = if self.n_rows >= PAR_ROW_THRESHOLD {
            (0..self.n_rows).into_par_iter().map(row_product).collect()
        } else {
            (0..self.n_rows).map(row_product).collect()
        };
        Ok(y)
    }

    /// Transpose (CSR to CSR via a counting pass).
    pub fn transpose(&self) -> CsrMatrix {
        let mut row_ptr = vec![0usize; self.n_cols + 1];
        for &j in &self.col_idx {
            row_ptr[j + 1] += 1;
        }
        for j in 0..self.n_cols {
            row_ptr[j + 1] += row_ptr[j];
        }
        let mut col_idx = vec![0usize; self.nnz()];
        let mut values = vec![0.0f64; self.nnz()];
        let mut next = row_ptr.clone();
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let slot = next[j];
                col_idx[slot] = i;
                values[slot] = v;
                next[j] += 1;
            }
        }
        CsrMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Sparse matrix-matrix product `A B` (Gustavson row merge).
    pub fn matmul(&self, b: &CsrMatrix) -> Result<CsrMatrix> {
        if self.n_cols != b.n_rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul: left is {}x{}, right is {}x{}",
                self.n_rows, self.n_cols, b.n_rows, b.n_cols
            )));
        }
        let compute_row = |scratch: &mut RowAccumulator, i: usize| -> (Vec<usize>, Vec<f64>) {
            let (cols, vals) = self.row(i);
            for (&k, &a_ik) in cols.iter().zip(vals) {
                let (b_cols, b_vals) = b.row(k);
                for (&j, &b_kj) in b_cols.iter().zip(b_vals) {
                    scratch.add(j, a_ik * b_kj);
                }
            }
            scratch.take_sorted()
        };
        let rows: Vec<(Vec<usize>, Vec<f64>)> = if self.n_rows >= PAR_ROW_THRESHOLD {
            (0..self.n_rows)
                .into_par_iter()
                .map_init(
                    || RowAccumulator::new(b.n_cols),
                    |scratch, i| compute_row(scratch, i),
                )
                .collect()
        } else {
            let mut scratch = RowAccumulator::new(b.n_cols);
            (0..self.n_rows)
                .map(|i| compute_row(&mut scratch, i))
                .collect()
        };

        let nnz: usize = rows.iter().map(|(c, _)| c.len()).sum();
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for (cols, vals) in rows {
            col_idx.extend(cols);
            values.extend(vals);
            row_ptr.push(col_idx.len());
        }
        Ok(CsrMatrix {
            n_rows: self.n_rows,
            n_cols: b.n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Dense conversion, row-major. Meant for small matrices (direct solves,
    /// debugging); cost is `n_rows * n_cols`.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n_cols]; self.n_rows];
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                dense[i][j] += v;
            }
        }
        dense
    }

    /// Direct solve of `A x = b` by dense LU with partial pivoting. Used for
    /// the coarsest level of the multigrid hierarchy, so `A` is expected to
    /// be small.
    pub fn dense_solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n_rows;
        if self.n_cols != n {
            return Err(Error::DimensionMismatch(format!(
                "dense_solve: matrix is {}x{}, not square",
                self.n_rows, self.n_cols
            )));
        }
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "dense_solve: matrix has {} rows, rhs has length {}",
                n,
                b.len()
            )));
        }
        if n == 0 {
            return Ok(Vec::new());
        }

        let mut lu: Vec<f64> = vec![0.0; n * n];
        for i in 0..n {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                lu[i * n + j] += v;
            }
        }
        let scale = lu.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let pivot_floor = scale * 1e-14 + f64::MIN_POSITIVE;

        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (pivot_row, pivot_abs) = (k..n)
                .map(|r| (r, lu[r * n + k].abs()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if pivot_abs < pivot_floor {
                return Err(Error::Singular(format!(
                    "pivot {pivot_abs:.3e} below threshold at column {k}"
                )));
            }
            if pivot_row != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot_row * n + j);
                }
                perm.swap(k, pivot_row);
            }
            let pivot = lu[k * n + k];
            for r in (k + 1)..n {
                let factor = lu[r * n + k] / pivot;
                lu[r * n + k] = factor;
                for j in (k + 1)..n {
                    lu[r * n + j] -= factor * lu[k * n + j];
                }
            }
        }

        // Forward then backward substitution on the permuted rhs.
        let mut x: Vec<f64> = perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= lu[i * n + j] * x[j];
            }
            x[i] = s / lu[i * n + i];
        }
        Ok(x)
    }
}

/// Sparse accumulator for one output row of a matrix product.
struct RowAccumulator {
    dense: Vec<f64>,
    touched: Vec<usize>,
    occupied: Vec<bool>,
}

impl RowAccumulator {
    fn new(width: usize) -> Self {
        Self {
            dense: vec![0.0; width],
            touched: Vec::new(),
            occupied: vec![false; width],
        }
    }

    fn add(&mut self, col: usize, val: f64) {
        if !self.occupied[col] {
            self.occupied[col] = true;
            self.touched.push(col);
        }
        self.dense[col] += val;
    }

    fn take_sorted(&mut self) -> (Vec<usize>, Vec<f64>) {
        self.touched.sort_unstable();
        let cols = std::mem::take(&mut self.touched);
        let vals = cols.iter().map(|&j| self.dense[j]).collect();
        for &j in &cols {
            self.dense[j] = 0.0;
            self.occupied[j] = false;
        }
        (cols, vals)
    }
}

/// Residual `r = f - A v`.
pub fn residual(a: &CsrMatrix, f: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    if f.len() != a.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "residual: matrix has {} rows, rhs has length {}",
            a.n_rows(),
            f.len()
        )));
    }
    let av = a.spmv(v)?;
    Ok(f.iter().zip(&av).map(|(&fi, &avi)| fi - avi).collect())
}

/// Infinity norm `max |x_i|`; 0 for the empty vector.
pub fn inf_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> CsrMatrix {
        let mut entries = Vec::new();
        for i in 0..n {
            entries.push((i, i, 2.0));
            if i + 1 < n {
                entries.push((i, i + 1, -1.0));
                entries.push((i + 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, n, &entries).unwrap()
    }

    #[test]
    fn from_triplets_identity() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert_eq!(a, CsrMatrix::identity(2));
    }

    #[test]
    fn from_triplets_sums_duplicates() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.0)]).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 0), 3.0);
    }

    #[test]
    fn from_triplets_one_dimensional_laplacian() {
        // Central differences on a line of three nodes, assembled out of order
        // and with the diagonal split into two contributions.
        let entries = [
            (2, 2, 2.0),
            (0, 1, -1.0),
            (1, 1, 1.0),
            (0, 0, 2.0),
            (1, 0, -1.0),
            (1, 2, -1.0),
            (2, 1, -1.0),
            (1, 1, 1.0),
        ];
        let a = CsrMatrix::from_triplets(3, 3, &entries).unwrap();
        assert_eq!(a, tridiag(3));
    }

    #[test]
    fn from_triplets_rejects_out_of_range() {
        let err = CsrMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::IndexOutOfRange { row: 2, .. }));
    }

    #[test]
    fn spmv_identity() {
        let x = vec![3.0, -1.0, 0.5];
        assert_eq!(CsrMatrix::identity(3).spmv(&x).unwrap(), x);
    }

    #[test]
    fn spmv_tridiagonal() {
        let y = tridiag(3).spmv(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(y, vec![1.0, 0.0, 1.0]);
    }

    #[test]
    fn spmv_zero_row() {
        let a = CsrMatrix::from_triplets(2, 2, &[(1, 1, 5.0)]).unwrap();
        let y = a.spmv(&[7.0, 2.0]).unwrap();
        assert_eq!(y, vec![0.0, 10.0]);
    }

    #[test]
    fn spmv_dimension_mismatch() {
        assert!(CsrMatrix::identity(3).spmv(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn transpose_identity_and_single_entry() {
        assert_eq!(CsrMatrix::identity(4).transpose(), CsrMatrix::identity(4));
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 1, 5.0)]).unwrap();
        let t = a.transpose();
        assert_eq!(t.get(1, 0), 5.0);
        assert_eq!(t.nnz(), 1);
    }

    #[test]
    fn transpose_against_dense_oracle() {
        let entries = [
            (0, 0, 1.5),
            (0, 2, -2.0),
            (1, 1, 3.0),
            (2, 0, 4.0),
            (3, 2, -0.5),
            (4, 1, 2.25),
            (4, 2, 1.0),
        ];
        let a = CsrMatrix::from_triplets(5, 3, &entries).unwrap();
        let t = a.transpose();
        let dense = a.to_dense();
        for i in 0..3 {
            for j in 0..5 {
                assert_eq!(t.get(i, j), dense[j][i]);
            }
        }
        assert_eq!(t.transpose(), a);
    }

    #[test]
    fn matmul_identity() {
        let a = tridiag(4);
        assert_eq!(a.matmul(&CsrMatrix::identity(4)).unwrap(), a);
    }

    #[test]
    fn matmul_tridiagonal_square() {
        // Dense expansion of tridiag(-1,2,-1)^2 for n=3.
        let sq = tridiag(3).matmul(&tridiag(3)).unwrap();
        let expected = [
            [5.0, -4.0, 1.0],
            [-4.0, 6.0, -4.0],
            [1.0, -4.0, 5.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(sq.get(i, j), expected[i][j]);
            }
        }
    }

    #[test]
    fn matmul_aggregation_gram_matrix() {
        // Aggregation operator for clusters {0,1} and {2,3,4}: P^T P counts
        // the cluster sizes on the diagonal.
        let p = CsrMatrix::from_triplets(
            5,
            2,
            &[(0, 0, 1.0), (1, 0, 1.0), (2, 1, 1.0), (3, 1, 1.0), (4, 1, 1.0)],
        )
        .unwrap();
        let gram = p.transpose().matmul(&p).unwrap();
        assert_eq!(gram.get(0, 0), 2.0);
        assert_eq!(gram.get(1, 1), 3.0);
        assert_eq!(gram.nnz(), 2);
    }

    #[test]
    fn residual_examples() {
        let id = CsrMatrix::identity(2);
        let f = vec![1.0, 2.0];
        assert_eq!(residual(&id, &f, &f).unwrap(), vec![0.0, 0.0]);
        assert_eq!(residual(&id, &f, &[0.0, 0.0]).unwrap(), f);

        let a = tridiag(3);
        let r = residual(&a, &[1.0, 0.0, 1.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(r, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn inf_norm_examples() {
        assert_eq!(inf_norm(&[1.0, -3.0, 2.0]), 3.0);
        assert_eq!(inf_norm(&[0.0, 0.0]), 0.0);
        assert_eq!(inf_norm(&[]), 0.0);
        assert_eq!(inf_norm(&[-1e-5, 9e-5]), 9e-5);
        assert!(inf_norm(&[-1e-5, 9e-5]) < 1e-4);
    }

    #[test]
    fn dense_solve_identity_and_diagonal() {
        let b = vec![4.0, -2.0];
        assert_eq!(CsrMatrix::identity(2).dense_solve(&b).unwrap(), b);

        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (1, 1, 4.0)]).unwrap();
        assert_eq!(a.dense_solve(&[2.0, 8.0]).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn dense_solve_laplacian() {
        let a = tridiag(5);
        let x = a.dense_solve(&[1.0; 5]).unwrap();
        let expected = [2.5, 4.0, 4.5, 4.0, 2.5];
        for (xi, ei) in x.iter().zip(expected) {
            assert!((xi - ei).abs() < 1e-12);
        }
        // Back-substitution check: A x must reproduce the rhs.
        let ax = a.spmv(&x).unwrap();
        for v in ax {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_solve_singular() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 0, 1.0)]).unwrap();
        assert!(matches!(
            a.dense_solve(&[1.0, 1.0]),
            Err(Error::Singular(_))
        ));
    }
}
