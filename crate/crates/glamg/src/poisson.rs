//! Self-contained 2-D Poisson test problems on the unit square.
//!
//! Standard 5-point finite differences on an `nx x ny` interior grid with
//! homogeneous Dirichlet boundaries: diagonal `4/h^2`, one `-1/h^2` per
//! interior connection, `h = 1/(nx + 1)`. The resulting matrix is symmetric
//! positive definite. Nodes are numbered row-major, `ix` fastest.

use crate::error::{Error, Result};
use crate::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsKind {
    Zero,
    Ones,
    /// Right-hand side of the manufactured solution
    /// `u(x, y) = sin(pi x) sin(pi y)`, i.e. `2 pi^2 sin(pi x) sin(pi y)`.
    ManufacturedSin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoissonSpec {
    pub nx: usize,
    pub ny: usize,
    pub rhs: RhsKind,
}

impl PoissonSpec {
    pub fn square(n_side: usize, rhs: RhsKind) -> Self {
        Self {
            nx: n_side,
            ny: n_side,
            rhs,
        }
    }

    pub fn unknowns(&self) -> usize {
        self.nx * self.ny
    }
}

/// Assemble the 5-point Poisson system for `spec`. Returns the matrix and
/// the right-hand side.
pub fn poisson_2d(spec: &PoissonSpec) -> Result<(CsrMatrix, Vec<f64>)> {
    if spec.nx < 1 || spec.ny < 1 {
        return Err(Error::InvalidConfig(format!(
            "grid must be at least 1x1, got {}x{}",
            spec.nx, spec.ny
        )));
    }
    let (nx, ny) = (spec.nx, spec.ny);
    let n = nx * ny;
    let h = 1.0 / (nx as f64 + 1.0);
    let scale = 1.0 / (h * h);

    let mut entries = Vec::with_capacity(5 * n);
    for iy in 0..ny {
        for ix in 0..nx {
            let node = iy * nx + ix;
            entries.push((node, node, 4.0 * scale));
            if ix > 0 {
                entries.push((node, node - 1, -scale));
            }
            if ix + 1 < nx {
                entries.push((node, node + 1, -scale));
            }
            if iy > 0 {
                entries.push((node, node - nx, -scale));
            }
            if iy + 1 < ny {
                entries.push((node, node + nx, -scale));
            }
        }
    }
    let a = CsrMatrix::from_triplets(n, n, &entries)?;

    let mut f = vec![0.0; n];
    match spec.rhs {
        RhsKind::Zero => {}
        RhsKind::Ones => f.fill(1.0),
        RhsKind::ManufacturedSin => {
            let pi = std::f64::consts::PI;
            for iy in 0..ny {
                for ix in 0..nx {
                    let x = (ix as f64 + 1.0) * h;
                    let y = (iy as f64 + 1.0) * h;
                    f[iy * nx + ix] = 2.0 * pi * pi * (pi * x).sin() * (pi * y).sin();
                }
            }
        }
    }
    Ok((a, f))
}
