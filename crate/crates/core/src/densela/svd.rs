//! One-sided (Hestenes) Jacobi SVD and the rank-revealing helpers built on it.

use super::eig::{jacobi_rotation, rotate_columns};
use super::matrix::{dot, vec_norm, CMatrix, C64, ZERO};
use super::Tolerance;
use crate::error::{Error, Result};

const SVD_SWEEPS: usize = 60;

/// Thin singular value decomposition `M = U diag(σ) V†`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn max_sigma(&self) -> f64 {
        self.sigma.first().copied().unwrap_or(0.0)
    }

    /// Number of singular values strictly above `rank_tol·σ_max`.
    pub fn rank(&self, rank_tol: f64) -> usize {
        let band = rank_tol * self.max_sigma();
        self.sigma.iter().filter(|&&s| s > band).count()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let k = self.sigma.len();
        let us = CMatrix::from_fn(self.u.rows(), k, |i, j| self.u[(i, j)] * self.sigma[j]);
        us.matmul(&self.v.adjoint())
    }
}

/// Singular value decomposition with `k = min(rows, cols)` triplets,
/// singular values nonincreasing.
pub fn svd(m: &CMatrix, _tol: &Tolerance) -> Result<Svd> {
    if m.rows() >= m.cols() {
        hestenes(m)
    } else {
        let t = hestenes(&m.adjoint())?;
        Ok(Svd { u: t.v, sigma: t.sigma, v: t.u })
    }
}

fn hestenes(m: &CMatrix) -> Result<Svd> {
    let (rows, n) = m.shape();
    debug_assert!(rows >= n);
    let mut a = m.clone();
    let mut v = CMatrix::identity(n);
    let thresh = f64::EPSILON * (rows.max(1) as f64);
    // columns this small end up as zero singular values; rotating them only
    // stirs rounding noise and can keep the sweep from settling
    let floor = (f64::EPSILON * m.norm_fro()).powi(2);

    let mut converged = false;
    for _ in 0..SVD_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, ZERO);
                for k in 0..rows {
                    let xp = a[(k, p)];
                    let xq = a[(k, q)];
                    alpha += xp.norm_sqr();
                    beta += xq.norm_sqr();
                    gamma += xp.conj() * xq;
                }
                if gamma.norm() <= thresh * (alpha * beta).sqrt() || alpha.min(beta) <= floor {
                    continue;
                }
                rotated = true;
                let (rpp, rpq, rqp, rqq, _) = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut a, p, q, (rpp, rpq, rqp, rqq));
                rotate_columns(&mut v, p, q, (rpp, rpq, rqp, rqq));
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { solver: "Jacobi SVD", budget: SVD_SWEEPS * n * n });
    }

    let norms: Vec<f64> = (0..n).map(|j| vec_norm(&a.column(j))).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let smax = sigma.first().copied().unwrap_or(0.0);
    let negligible = f64::EPSILON * smax * (rows.max(n) as f64);

    let mut ucols: Vec<Vec<C64>> = Vec::with_capacity(n);
    let mut pending = Vec::new();
    for (slot, &j) in order.iter().enumerate() {
        if norms[j] > negligible && norms[j] > 0.0 {
            let inv = 1.0 / norms[j];
            ucols.push(a.column(j).iter().map(|z| z * inv).collect());
        } else {
            ucols.push(vec![ZERO; rows]);
            pending.push(slot);
        }
    }
    for slot in pending {
        let fixed: Vec<Vec<C64>> = ucols
            .iter()
            .enumerate()
            .filter(|(i, c)| *i != slot && vec_norm(c) > 0.0)
            .map(|(_, c)| c.clone())
            .collect();
        ucols[slot] = complete_orthonormal(rows, &fixed);
    }

    Ok(Svd { u: CMatrix::from_columns(rows, &ucols), sigma, v: v.select_columns(&order) })
}

/// A unit vector orthogonal to all of `basis` (which must have fewer than
/// `n` orthonormal members), picked from the standard basis.
fn complete_orthonormal(n: usize, basis: &[Vec<C64>]) -> Vec<C64> {
    let mut best: Option<(f64, Vec<C64>)> = None;
    for e in 0..n {
        let mut x = vec![ZERO; n];
        x[e] = C64::new(1.0, 0.0);
        for _ in 0..2 {
            for b in basis {
                let c = dot(b, &x);
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi -= c * bi;
                }
            }
        }
        let nrm = vec_norm(&x);
        if best.as_ref().is_none_or(|(bn, _)| nrm > *bn) {
            best = Some((nrm, x));
        }
    }
    let (nrm, x) = best.expect("completion requested in a zero-dimensional space");
    x.into_iter().map(|z| z / nrm).collect()
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    svd(m, &Tolerance::default()).map(|s| s.max_sigma()).unwrap_or_else(|_| m.norm_fro())
}

/// 2-norm condition number; infinite for singular or empty-rank input.
pub fn condition_number(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    match svd(m, &Tolerance::default()) {
        Ok(s) => {
            let min = *s.sigma.last().unwrap();
            if min == 0.0 {
                f64::INFINITY
            } else {
                s.max_sigma() / min
            }
        }
        Err(_) => f64::INFINITY,
    }
}

/// Orthonormal basis of `{x : ‖Mx‖ ≤ rank_tol·‖M‖·‖x‖}`.
pub fn null_basis(m: &CMatrix, tol: &Tolerance) -> CMatrix {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    // pad wide matrices so the right singular vectors span the whole domain
    let padded;
    let work = if rows < cols {
        padded = CMatrix::vcat(cols, &[m, &CMatrix::zeros(cols - rows, cols)]);
        &padded
    } else {
        m
    };
    let s = hestenes(work).expect("Jacobi SVD exceeded its sweep budget");
    let band = tol.rank_tol * s.max_sigma();
    let idx: Vec<usize> = (0..cols).filter(|&j| s.sigma[j] <= band).collect();
    s.v.select_columns(&idx)
}

/// Orthonormal basis of the range of `M` (left singular vectors above the
/// rank band).
pub fn range_basis(m: &CMatrix, tol: &Tolerance) -> CMatrix {
    if m.is_empty() {
        return CMatrix::zeros(m.rows(), 0);
    }
    let s = svd(m, tol).expect("Jacobi SVD exceeded its sweep budget");
    let r = s.rank(tol.rank_tol);
    s.u.submatrix(0..m.rows(), 0..r)
}

pub fn rank(m: &CMatrix, tol: &Tolerance) -> usize {
    if m.is_empty() {
        return 0;
    }
    svd(m, tol).map(|s| s.rank(tol.rank_tol)).unwrap_or(0)
}

/// Moore-Penrose pseudo-inverse, singular values at or below
/// `rank_tol·σ_max` treated as zero.
pub fn pinv(m: &CMatrix, tol: &Tolerance) -> CMatrix {
    let (rows, cols) = m.shape();
    if m.is_empty() {
        return CMatrix::zeros(cols, rows);
    }
    let s = svd(m, tol).expect("Jacobi SVD exceeded its sweep budget");
    let band = tol.rank_tol * s.max_sigma();
    let k = s.sigma.len();
    let vs =
        CMatrix::from_fn(
            cols,
            k,
            |i, j| {
                if s.sigma[j] > band {
                    s.v[(i, j)] / s.sigma[j]
                } else {
                    ZERO
                }
            },
        );
    vs.matmul(&s.u.adjoint())
}
