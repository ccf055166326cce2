//! Dense complex linear algebra kernels.
//!
//! Everything here is a pure function of its inputs. Zero tests use the two
//! thresholds carried by [`Tolerance`], always relative to a norm of the
//! operand.

mod eig;
mod matrix;
mod svd;

pub use eig::{herm_eig, inertia, inertia_of, psd_sqrt, HermEig};
pub use matrix::{dot, vec_norm, CMatrix, C64};
pub(crate) use matrix::{ONE, ZERO};
pub use svd::{condition_number, null_basis, pinv, range_basis, rank, spectral_norm, svd, Svd};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thresholds for zero detection and residual checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Singular or eigenvalues at most `rank_tol·‖M‖` count as zero.
    pub rank_tol: f64,
    /// Relative bound for matrix-equation residuals.
    pub residual_tol: f64,
}

impl Tolerance {
    pub const DEFAULT_RANK: f64 = 1e-10;
    pub const DEFAULT_RESIDUAL: f64 = 1e-8;

    pub fn new(rank_tol: f64, residual_tol: f64) -> Result<Self> {
        for (name, v) in [("rank_tol", rank_tol), ("residual_tol", residual_tol)] {
            if !(v > 0.0 && v <= 1e-2) {
                return Err(Error::InvalidTolerance(format!("{name} = {v} must lie in (0, 1e-2]")));
            }
        }
        Ok(Self { rank_tol, residual_tol })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rank_tol: Self::DEFAULT_RANK, residual_tol: Self::DEFAULT_RESIDUAL }
    }
}

/// Inverse by LU with partial pivoting.
pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "cannot invert a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let scale = m.max_abs();
    if n > 0 && scale == 0.0 {
        return Err(Error::NotInvertible);
    }
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let tiny = f64::EPSILON * scale;
    for k in 0..n {
        let (piv, pmag) = (k..n).map(|i| (i, lu[(i, k)].norm())).fold((k, -1.0), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
        if pmag <= tiny {
            return Err(Error::NotInvertible);
        }
        if piv != k {
            perm.swap(k, piv);
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
        }
        let d = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / d;
            lu[(i, k)] = f;
            if f != ZERO {
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= f * u;
                }
            }
        }
    }
    let mut inv = CMatrix::zeros(n, n);
    for col in 0..n {
        let mut y = vec![ZERO; n];
        for i in 0..n {
            let mut acc = if perm[i] == col { ONE } else { ZERO };
            for j in 0..i {
                acc -= lu[(i, j)] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= lu[(i, j)] * inv[(j, col)];
            }
            inv[(i, col)] = acc / lu[(i, i)];
        }
    }
    Ok(inv)
}

/// Orthonormalizes the columns of a full-column-rank matrix by modified
/// Gram-Schmidt with one reorthogonalization pass. The implied triangular
/// factor has a positive real diagonal.
pub fn gram_schmidt(m: &CMatrix) -> Result<CMatrix> {
    let (rows, cols) = m.shape();
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut x = m.column(j);
        let original = vec_norm(&x);
        for _ in 0..2 {
            for b in &q {
                let c = dot(b, &x);
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi -= c * bi;
                }
            }
        }
        let nrm = vec_norm(&x);
        if nrm <= 1e3 * f64::EPSILON * original || nrm == 0.0 {
            return Err(Error::InvalidInput(format!("column {j} is linearly dependent")));
        }
        q.push(x.into_iter().map(|z| z / nrm).collect());
    }
    Ok(CMatrix::from_columns(rows, &q))
}
