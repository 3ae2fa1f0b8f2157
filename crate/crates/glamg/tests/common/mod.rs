//! Dense oracles shared by the integration and acceptance suites. Every
//! routine here recomputes results independently of the sparse kernels it
//! checks: plain dense arithmetic, Gaussian elimination and a cyclic Jacobi
//! eigensolver.

#![allow(dead_code)]

pub type Dense = Vec<Vec<f64>>;

pub fn dense_from_triplets(n_rows: usize, n_cols: usize, entries: &[(usize, usize, f64)]) -> Dense {
    let mut m = vec![vec![0.0; n_cols]; n_rows];
    for &(i, j, v) in entries {
        m[i][j] += v;
    }
    m
}

pub fn dense_of(a: &glamg::CsrMatrix) -> Dense {
    let mut m = vec![vec![0.0; a.n_cols()]; a.n_rows()];
    for i in 0..a.n_rows() {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            m[i][j] += v;
        }
    }
    m
}

pub fn dense_matvec(m: &Dense, x: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn dense_matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let k = b.len();
    let m = if k > 0 { b[0].len() } else { 0 };
    let mut out = vec![vec![0.0; m]; n];
    for i in 0..n {
        for l in 0..k {
            let a_il = a[i][l];
            if a_il == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += a_il * b[l][j];
            }
        }
    }
    out
}

pub fn dense_transpose(m: &Dense) -> Dense {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    let mut out = vec![vec![0.0; rows]; cols];
    for i in 0..rows {
        for j in 0..cols {
            out[j][i] = m[i][j];
        }
    }
    out
}

/// Gaussian elimination with partial pivoting; panics on singular input
/// (oracle use only).
pub fn dense_solve(m: &Dense, b: &[f64]) -> Vec<f64> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let pivot_row = (k..n)
            .max_by(|&r, &s| a[r][k].abs().total_cmp(&a[s][k].abs()))
            .unwrap();
        assert!(a[pivot_row][k].abs() > 0.0, "singular oracle system");
        a.swap(k, pivot_row);
        x.swap(k, pivot_row);
        let pivot = a[k][k];
        for r in (k + 1)..n {
            let factor = a[r][k] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in k..n {
                let akc = a[k][c];
                a[r][c] -= factor * akc;
            }
            x[r] -= factor * x[k];
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    x
}

/// Matrix rank by row elimination with a relative pivot threshold.
pub fn dense_rank(m: &Dense) -> usize {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    let mut a = m.clone();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    let tol = scale * 1e-10;
    let mut rank = 0;
    let mut row = 0;
    for col in 0..cols {
        let Some(pivot_row) = (row..rows).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
        else {
            break;
        };
        if a[pivot_row][col].abs() <= tol {
            continue;
        }
        a.swap(row, pivot_row);
        let pivot = a[row][col];
        for r in (row + 1)..rows {
            let factor = a[r][col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for c in col..cols {
                let val = a[row][c];
                a[r][c] -= factor * val;
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi rotation method.
pub fn symmetric_eigenvalues(m: &Dense) -> Vec<f64> {
    let n = m.len();
    let mut a = m.clone();
    let off = |a: &Dense| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s
    };
    let scale: f64 = m
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1.0);
    let threshold = (scale * 1e-12).powi(2) * n as f64 * n as f64;
    for _sweep in 0..60 {
        if off(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq.abs() <= scale * 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

pub fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Union-find over node indices (connectivity audits).
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Deterministic xorshift for oracle-side randomness (independent of the
/// crate's RNG choices).
pub struct OracleRng(u64);

impl OracleRng {
    pub fn new(seed: u64) -> Self {
        Self(seed.max(1))
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}
