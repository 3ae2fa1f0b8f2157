//! Stationary iterative smoothers: Jacobi, damped Jacobi, Gauss-Seidel and
//! SOR. These damp high-frequency error components quickly but stall on
//! low-frequency ones, which is exactly the gap the multigrid hierarchy
//! fills. The same configs select the operator used for optional
//! prolongation smoothing in [`crate::coarsening`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

const PAR_THRESHOLD: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmootherKind {
    Jacobi,
    DampedJacobi,
    GaussSeidel,
    Sor,
}

/// Smoother selection plus its parameters.
///
/// `omega` is the damping (damped Jacobi) or relaxation (SOR) parameter and
/// is ignored by the plain Jacobi and Gauss-Seidel kinds. 2/3 is the
/// classical damping optimum for Laplacian-like problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmootherConfig {
    pub kind: SmootherKind,
    pub omega: f64,
    pub sweeps: usize,
}

impl SmootherConfig {
    pub fn jacobi(sweeps: usize) -> Self {
        Self {
            kind: SmootherKind::Jacobi,
            omega: 1.0,
            sweeps,
        }
    }

    pub fn damped_jacobi(omega: f64, sweeps: usize) -> Self {
        Self {
            kind: SmootherKind::DampedJacobi,
            omega,
            sweeps,
        }
    }

    pub fn gauss_seidel(sweeps: usize) -> Self {
        Self {
            kind: SmootherKind::GaussSeidel,
            omega: 1.0,
            sweeps,
        }
    }

    pub fn sor(omega: f64, sweeps: usize) -> Self {
        Self {
            kind: SmootherKind::Sor,
            omega,
            sweeps,
        }
    }

    /// Same smoother with a different sweep count.
    pub fn with_sweeps(mut self, sweeps: usize) -> Self {
        self.sweeps = sweeps;
        self
    }

    fn validate(&self) -> Result<()> {
        let uses_omega = matches!(self.kind, SmootherKind::DampedJacobi | SmootherKind::Sor);
        if uses_omega && !(self.omega > 0.0 && self.omega < 2.0) {
            return Err(Error::InvalidConfig(format!(
                "omega must lie in (0, 2), got {}",
                self.omega
            )));
        }
        Ok(())
    }
}

impl Default for SmootherConfig {
    fn default() -> Self {
        Self::jacobi(1)
    }
}

/// Split a square matrix into its strictly lower (L), diagonal (D) and
/// strictly upper (U) parts, with `D + L + U == A` entry for entry.
///
/// Rows without a stored diagonal simply produce no D entry; Jacobi-type
/// smoothing of such a matrix fails with [`Error::ZeroDiagonal`].
pub fn split_dlu(a: &CsrMatrix) -> Result<(CsrMatrix, CsrMatrix, CsrMatrix)> {
    let n = a.n_rows();
    if a.n_cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "split_dlu: matrix is {}x{}, not square",
            a.n_rows(),
            a.n_cols()
        )));
    }
    let mut d = Vec::new();
    let mut l = Vec::new();
    let mut u = Vec::new();
    for i in 0..n {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            match j.cmp(&i) {
                std::cmp::Ordering::Less => l.push((i, j, v)),
                std::cmp::Ordering::Equal => d.push((i, j, v)),
                std::cmp::Ordering::Greater => u.push((i, j, v)),
            }
        }
    }
    Ok((
        CsrMatrix::from_triplets(n, n, &d)?,
        CsrMatrix::from_triplets(n, n, &l)?,
        CsrMatrix::from_triplets(n, n, &u)?,
    ))
}

/// Run `cfg.sweeps` sweeps of the configured stationary iteration on
/// `A v = f`, starting from `v`. The input vector is not modified;
/// `sweeps == 0` returns it unchanged.
pub fn smooth(a: &CsrMatrix, f: &[f64], v: &[f64], cfg: &SmootherConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let n = a.n_rows();
    if a.n_cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "smooth: matrix is {}x{}, not square",
            a.n_rows(),
            a.n_cols()
        )));
    }
    if f.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "smooth: matrix is {n}x{n}, rhs has length {}, iterate has length {}",
            f.len(),
            v.len()
        )));
    }
    let diag = a.diagonal();
    if let Some(row) = diag.iter().position(|&d| d == 0.0) {
        return Err(Error::ZeroDiagonal(row));
    }

    let mut x = v.to_vec();
    match cfg.kind {
        SmootherKind::Jacobi => {
            let mut next = vec![0.0; n];
            for _ in 0..cfg.sweeps {
                jacobi_sweep(a, f, &diag, &x, &mut next);
                std::mem::swap(&mut x, &mut next);
            }
        }
        SmootherKind::DampedJacobi => {
            let mut next = vec![0.0; n];
            for _ in 0..cfg.sweeps {
                jacobi_sweep(a, f, &diag, &x, &mut next);
                for i in 0..n {
                    next[i] = (1.0 - cfg.omega) * x[i] + cfg.omega * next[i];
                }
                std::mem::swap(&mut x, &mut next);
            }
        }
        SmootherKind::GaussSeidel | SmootherKind::Sor => {
            let omega = if cfg.kind == SmootherKind::Sor {
                cfg.omega
            } else {
                1.0
            };
            for _ in 0..cfg.sweeps {
                // Forward sweep, in place: rows in ascending order see the
                // already-updated values of earlier rows.
                for i in 0..n {
                    let (cols, vals) = a.row(i);
                    let mut sum = f[i];
                    for (&j, &a_ij) in cols.iter().zip(vals) {
                        if j != i {
                            sum -= a_ij * x[j];
                        }
                    }
                    let gs = sum / diag[i];
                    x[i] = (1.0 - omega) * x[i] + omega * gs;
                }
            }
        }
    }
    Ok(x)
}

/// One Jacobi sweep `next = D^{-1} (f - (L + U) x)`, two-buffer form.
fn jacobi_sweep(a: &CsrMatrix, f: &[f64], diag: &[f64], x: &[f64], next: &mut [f64]) {
    let update = |i: usize| -> f64 {
        let (cols, vals) = a.row(i);
        let mut sum = f[i];
        for (&j, &a_ij) in cols.iter().zip(vals) {
            if j != i {
                sum -= a_ij * x[j];
            }
        }
        sum / diag[i]
    };
    if a.n_rows() >= PAR_THRESHOLD {
        next.par_iter_mut()
            .enumerate()
            .for_each(|(i, out)| *out = update(i));
    } else {
        for (i, out) in next.iter_mut().enumerate() {
            *out = update(i);
        }
    }
}
