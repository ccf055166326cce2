//! Cyclic Jacobi eigensolver for Hermitian matrices.

use super::matrix::{CMatrix, C64};
use super::Tolerance;
use crate::error::{Error, Result};

/// Eigendecomposition `M = V diag(λ) V†` of a Hermitian matrix, eigenvalues
/// ascending.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Spectral norm of the decomposed matrix.
    pub fn norm(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, l| m.max(l.abs()))
    }

    /// `V f(Λ) V†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let v = &self.eigenvectors;
        let n = self.dim();
        let scaled = CMatrix::from_fn(n, n, |i, j| v[(i, j)] * f(self.eigenvalues[j]));
        let mut out = scaled.matmul(&v.adjoint());
        // exact Hermitian output
        for i in 0..n {
            out[(i, i)].im = 0.0;
            for j in i + 1..n {
                let z = (out[(i, j)] + out[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply_fn(|l| l)
    }

    /// Eigenvector columns whose eigenvalues satisfy `keep`, in ascending
    /// eigenvalue order.
    pub fn columns_where(&self, keep: impl Fn(f64) -> bool) -> CMatrix {
        let idx: Vec<usize> = (0..self.dim()).filter(|&j| keep(self.eigenvalues[j])).collect();
        self.eigenvectors.select_columns(&idx)
    }
}

/// Unitary 2x2 Jacobi rotation acting on coordinates `(p, q)`, chosen so that
/// `R† [[a, z], [z̄, b]] R` is diagonal. Returns `(R_pp, R_pq, R_qp, R_qq, t)`
/// where the rotated diagonal is `(a - t|z|, b + t|z|)`.
#[inline]
pub(crate) fn jacobi_rotation(a: f64, b: f64, z: C64) -> (C64, C64, C64, C64, f64) {
    let r = z.norm();
    let phase = z / r;
    let theta = (b - a) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();
    (C64::new(c, 0.0), C64::new(s, 0.0), conj_phase * (-s), conj_phase * c, t)
}

/// Applies `X <- X R` on columns `p, q`.
#[inline]
pub(crate) fn rotate_columns(x: &mut CMatrix, p: usize, q: usize, rot: (C64, C64, C64, C64)) {
    let (rpp, rpq, rqp, rqq) = rot;
    for k in 0..x.rows() {
        let xp = x[(k, p)];
        let xq = x[(k, q)];
        x[(k, p)] = xp * rpp + xq * rqp;
        x[(k, q)] = xp * rpq + xq * rqq;
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic two-sided Jacobi
/// rotations. Eigenvalues come back ascending; ties keep the order in which
/// the solver produced them.
pub fn herm_eig(m: &CMatrix, tol: &Tolerance) -> Result<HermEig> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let fro = m.norm_fro();
    let defect = m.skew_defect();
    let bound = tol.residual_tol * fro;
    if defect > bound {
        return Err(Error::NotHermitian { defect, bound });
    }

    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let budget = 30 * n * n;
    let mut rotations = 0usize;
    let skip = 0.1 * f64::EPSILON * fro / (n.max(1) as f64);

    loop {
        let off: f64 = {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        acc += a[(i, j)].norm_sqr();
                    }
                }
            }
            acc.sqrt()
        };
        if off <= f64::EPSILON * fro {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let z = a[(p, q)];
                if z.norm() <= skip {
                    continue;
                }
                rotations += 1;
                if rotations > budget {
                    return Err(Error::NoConvergence { solver: "Jacobi eigensolver", budget });
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let (rpp, rpq, rqp, rqq, t) = jacobi_rotation(app, aqq, z);
                let r = z.norm();
                rotate_columns(&mut a, p, q, (rpp, rpq, rqp, rqq));
                for k in 0..n {
                    let yp = a[(p, k)];
                    let yq = a[(q, k)];
                    a[(p, k)] = rpp.conj() * yp + rqp.conj() * yq;
                    a[(q, k)] = rpq.conj() * yp + rqq.conj() * yq;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(app - t * r, 0.0);
                a[(q, q)] = C64::new(aqq + t * r, 0.0);
                rotate_columns(&mut v, p, q, (rpp, rpq, rqp, rqq));
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    Ok(HermEig {
        eigenvalues: order.iter().map(|&i| diag[i]).collect(),
        eigenvectors: v.select_columns(&order),
    })
}

/// Counts of eigenvalues above, below and inside the zero band
/// `[-rank_tol·‖M‖, rank_tol·‖M‖]`.
pub fn inertia(m: &CMatrix, tol: &Tolerance) -> Result<(usize, usize, usize)> {
    let eig = herm_eig(m, tol)?;
    Ok(inertia_of(&eig.eigenvalues, tol.rank_tol * eig.norm()))
}

/// Inertia of a list of eigenvalues for an explicit zero band.
pub fn inertia_of(eigenvalues: &[f64], band: f64) -> (usize, usize, usize) {
    let plus = eigenvalues.iter().filter(|&&l| l > band).count();
    let minus = eigenvalues.iter().filter(|&&l| l < -band).count();
    (plus, minus, eigenvalues.len() - plus - minus)
}

/// Hermitian positive semidefinite square root.
pub fn psd_sqrt(m: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let eig = herm_eig(m, tol)?;
    let band = tol.rank_tol * eig.norm();
    if let Some(&low) = eig.eigenvalues.first() {
        if low < -band {
            return Err(Error::NotPsd { eigenvalue: low });
        }
    }
    Ok(eig.apply_fn(|l| l.max(0.0).sqrt()))
}
