//! Bognár-Krámli factorizations `C = AA*` with `A: 𝒜 → ℋ` injective, their
//! verification, signature factorizations `C = T†J_A T` on a Hilbert space,
//! and the continuously contained space carried by the range of `A`.

use serde::Serialize;

use crate::densela::{
    herm_eig, inertia_of, inverse, null_basis, range_basis, rank, spectral_norm, CMatrix, HermEig,
    Tolerance,
};
use crate::error::{Error, Result};
use crate::krein::{require_selfadjoint, IndexTriple, KOperator, KreinSpace, Subspace};
use crate::phillips::{check_compatibility, density_ranks, graph_rep, phillips_extend, Sign};

/// Attached to every verification report.
pub const UNIQUENESS_NOTE: &str =
    "finite dimension: the range of A is closed, so the factorization is essentially unique";

/// `C = AA*` with `A: 𝒜 → ℋ` and `ker A = {0}`.
#[derive(Debug, Clone)]
pub struct BKFactorization {
    pub a_space: KreinSpace,
    pub a: KOperator,
}

impl BKFactorization {
    /// Wraps an arbitrary factor; nothing is checked here, see [`bk_verify`].
    pub fn new(a: KOperator) -> Self {
        Self { a_space: a.domain().clone(), a }
    }

    /// `AA*`.
    pub fn product(&self) -> CMatrix {
        self.a.matrix().matmul(self.a.k_adjoint().matrix())
    }
}

fn eig_of_gram(c: &KOperator, tol: &Tolerance) -> Result<(HermEig, f64)> {
    let eig = herm_eig(&c.gram().hermitian_part(), tol)?;
    let band = tol.rank_tol * eig.norm();
    Ok((eig, band))
}

/// Factor built from the spectral subspaces of `D = JC`: `𝒜 = ℋ₊ ⊕ ℋ₋`
/// with `J_𝒜 = diag(I, -I)` and `A = J |D|^{1/2}` restricted to `𝒜`.
pub fn bk_factorize(c: &KOperator, tol: &Tolerance) -> Result<BKFactorization> {
    require_selfadjoint(c, tol)?;
    let n = c.domain().dim();
    let (eig, band) = eig_of_gram(c, tol)?;
    let lam = &eig.eigenvalues;
    // positives descending, ties kept in eigenvector order
    let mut order: Vec<usize> = (0..n).filter(|&i| lam[i] > band).collect();
    order.sort_by(|&i, &k| lam[k].total_cmp(&lam[i]));
    let p = order.len();
    order.extend((0..n).filter(|&i| lam[i] < -band));
    let q = order.len() - p;
    let v = eig.eigenvectors.select_columns(&order);
    let b = CMatrix::from_fn(n, p + q, |i, k| v[(i, k)] * lam[order[k]].abs().sqrt());
    let a_space = KreinSpace::split(p, q);
    let a = KOperator::new(a_space.clone(), c.domain().clone(), c.domain().j().matmul(&b))?;
    Ok(BKFactorization { a_space, a })
}

#[derive(Debug, Clone, Serialize)]
pub struct BKReport {
    /// `‖C - AA*‖ / ‖C‖`, absolute when `C = 0`.
    pub residual: f64,
    pub residual_ok: bool,
    pub kernel_dim: usize,
    pub injective: bool,
    pub space_indices: (usize, usize),
    pub indices: IndexTriple,
    pub indices_equal: bool,
    pub note: &'static str,
    pub passed: bool,
}

fn relative(num: f64, scale: f64) -> f64 {
    if scale == 0.0 {
        num
    } else {
        num / scale
    }
}

/// Inertia of the Hermitian part of `JC`, without a selfadjointness gate.
fn raw_indices(c: &KOperator, tol: &Tolerance) -> Result<IndexTriple> {
    let (eig, band) = eig_of_gram(c, tol)?;
    Ok(inertia_of(&eig.eigenvalues, band).into())
}

/// Checks `C = AA*`, `ker A = {0}` and `ind±𝒜 = h±(C)`.
pub fn bk_verify(c: &KOperator, f: &BKFactorization, tol: &Tolerance) -> Result<BKReport> {
    if !c.is_endo() || !f.a.codomain().same_as(c.domain()) {
        return Err(Error::DimensionMismatch(
            "factor does not map into the operator's space".into(),
        ));
    }
    let residual = relative(spectral_norm(&(c.matrix() - &f.product())), c.norm());
    let kernel_dim = null_basis(f.a.matrix(), tol).cols();
    let space_indices = f.a_space.indices();
    let indices = raw_indices(c, tol)?;
    let residual_ok = residual <= tol.residual_tol;
    let indices_equal = (indices.h_plus, indices.h_minus) == space_indices;
    Ok(BKReport {
        residual,
        residual_ok,
        kernel_dim,
        injective: kernel_dim == 0,
        space_indices,
        indices,
        indices_equal,
        note: UNIQUENESS_NOTE,
        passed: residual_ok && kernel_dim == 0 && indices_equal,
    })
}

/// `C = T† J_A T` with `T: ℋ → 𝒦` and `J_A` selfadjoint and unitary on the
/// Hilbert space `𝒦`.
#[derive(Debug, Clone)]
pub struct SignatureFactorization {
    pub k_space: KreinSpace,
    pub j_a: KOperator,
    pub t: KOperator,
}

impl SignatureFactorization {
    pub fn new(j_a: CMatrix, t: CMatrix) -> Result<Self> {
        let m = j_a.rows();
        let k_space = KreinSpace::hilbert(m);
        let j_a = KOperator::endo(k_space.clone(), j_a)?;
        let t = KOperator::new(KreinSpace::hilbert(t.cols()), k_space.clone(), t)?;
        Ok(Self { k_space, j_a, t })
    }

    /// `T† J_A T`.
    pub fn product(&self) -> CMatrix {
        let t = self.t.matrix();
        t.adjoint().matmul(self.j_a.matrix()).matmul(t)
    }

    /// `max(‖J_A - J_A†‖, ‖J_A² - I‖)`.
    pub fn signature_defect(&self) -> f64 {
        let j = self.j_a.matrix();
        let skew = spectral_norm(&(j - &j.adjoint()));
        let square = spectral_norm(&(&j.matmul(j) - &CMatrix::identity(j.rows())));
        skew.max(square)
    }
}

/// The graph argument run on a signature factorization.
#[derive(Debug, Clone, Serialize)]
pub struct GraphPipeline {
    /// `dim ℳ±`, the projections of `T ℋ±` onto `𝒜±`.
    pub m_dims: (usize, usize),
    pub space_indices: (usize, usize),
    pub bounds_hold: bool,
    pub compatible: bool,
    pub extension_norm: f64,
    /// `rank((I - G†G)|ℳ₊)` and `rank((I - GG†)|ℳ₋)`.
    pub density_ranks: (usize, usize),
    pub density_full: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KeythReport {
    /// `‖C - T†J_A T‖ / ‖C‖`.
    pub residual: f64,
    pub residual_ok: bool,
    pub t_injective: bool,
    pub t_rank: usize,
    pub t_dense_range: bool,
    pub c_indices: IndexTriple,
    pub j_indices: IndexTriple,
    pub indices_equal: bool,
    pub pipeline: std::result::Result<GraphPipeline, String>,
    pub note: &'static str,
    pub passed: bool,
}

/// Verifies `h±(C) = h±(J_A)` for `C = T†J_A T` on a Hilbert space, and runs
/// the graph pipeline: `T ℋ±` are `𝒜`-orthogonal semidefinite subspaces of
/// `𝒜 = (𝒦, J_A)` whose maximal extension has full defect ranks.
pub fn keyth_verify(
    c: &KOperator,
    s: &SignatureFactorization,
    tol: &Tolerance,
) -> Result<KeythReport> {
    let n = c.domain().dim();
    if !c.is_endo() || s.t.domain().dim() != n {
        return Err(Error::DimensionMismatch("T does not act on the operator's space".into()));
    }
    let mut failed = Vec::new();
    if !c.domain().is_hilbert() {
        failed.push("the space of C is not a Hilbert space".to_string());
    }
    if require_selfadjoint(c, tol).is_err() {
        failed.push("C is not selfadjoint".to_string());
    }
    if null_basis(c.matrix(), tol).cols() > 0 || (n > 0 && c.norm() == 0.0) {
        failed.push("C has a nontrivial kernel".to_string());
    }
    let jd = s.signature_defect();
    if jd > tol.residual_tol {
        failed.push(format!("J_A is not a signature operator (defect {jd:.3e})"));
    }
    if !failed.is_empty() {
        return Err(Error::PreconditionFailed(failed));
    }

    let residual = relative(spectral_norm(&(c.matrix() - &s.product())), c.norm());
    let t_injective = null_basis(s.t.matrix(), tol).cols() == 0;
    let t_rank = rank(s.t.matrix(), tol);
    let t_dense_range = t_rank == s.k_space.dim();
    let c_indices = raw_indices(c, tol)?;
    let j_indices = raw_indices(&s.j_a, tol)?;
    let indices_equal = c_indices == j_indices;
    let pipeline = graph_pipeline(c, s, tol).map_err(|e| e.to_string());
    let pipeline_ok =
        pipeline.as_ref().is_ok_and(|p| p.bounds_hold && p.compatible && p.density_full);
    let residual_ok = residual <= tol.residual_tol;
    Ok(KeythReport {
        residual,
        residual_ok,
        t_injective,
        t_rank,
        t_dense_range,
        c_indices,
        j_indices,
        indices_equal,
        pipeline,
        note: UNIQUENESS_NOTE,
        passed: residual_ok && t_injective && t_dense_range && indices_equal && pipeline_ok,
    })
}

fn graph_pipeline(
    c: &KOperator,
    s: &SignatureFactorization,
    tol: &Tolerance,
) -> Result<GraphPipeline> {
    let (eig, band) = eig_of_gram(c, tol)?;
    let n = eig.dim();
    let plus: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > band).collect();
    let minus: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] < -band).collect();
    let a = KreinSpace::new(s.j_a.matrix().clone(), tol)?;
    let t = s.t.matrix();
    let g_plus = Subspace::span(&a, &t.matmul(&eig.eigenvectors.select_columns(&plus)), tol)?;
    let g_minus = Subspace::span(&a, &t.matmul(&eig.eigenvectors.select_columns(&minus)), tol)?;
    let gp = graph_rep(&g_plus, Sign::Plus, tol)?;
    let gm = graph_rep(&g_minus, Sign::Minus, tol)?;
    let m_dims = (gp.dim(), gm.dim());
    let space_indices = a.indices();
    let bounds_hold = m_dims.0 <= space_indices.0 && m_dims.1 <= space_indices.1;
    let compatible = check_compatibility(&gp, &gm, tol);
    let pair = phillips_extend(&gp, &gm, tol)?;
    let density_ranks = density_ranks(&pair.g, &gp, &gm, tol);
    Ok(GraphPipeline {
        m_dims,
        space_indices,
        bounds_hold,
        compatible,
        extension_norm: pair.norm(),
        density_ranks,
        density_full: density_ranks == space_indices,
    })
}

/// `ran A ⊆ ℋ` with the inner product that makes `A` an isomorphism from `𝒜`.
#[derive(Debug, Clone)]
pub struct ContainedSpace {
    /// Euclidean-orthonormal basis of `ran A`.
    pub basis: CMatrix,
    /// Gram matrix of the transferred inner product on `basis`.
    pub gram: CMatrix,
}

impl ContainedSpace {
    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// `basis · gram⁻¹ · basis† · J`, which equals `C`.
    pub fn reconstruct(&self, space: &KreinSpace) -> Result<CMatrix> {
        let g_inv = inverse(&self.gram)?;
        Ok(self.basis.matmul(&g_inv).matmul(&self.basis.adjoint()).matmul(space.j()))
    }

    pub fn inertia(&self, tol: &Tolerance) -> Result<IndexTriple> {
        let eig = herm_eig(&self.gram, tol)?;
        Ok(inertia_of(&eig.eigenvalues, tol.rank_tol * eig.norm()).into())
    }
}

pub fn contained_space(c: &KOperator, tol: &Tolerance) -> Result<ContainedSpace> {
    let f = bk_factorize(c, tol)?;
    let a = f.a.matrix();
    let basis = range_basis(a, tol);
    let r_inv = inverse(&basis.adjoint().matmul(a))?;
    let gram = r_inv.adjoint().matmul(f.a_space.j()).matmul(&r_inv).hermitian_part();
    Ok(ContainedSpace { basis, gram })
}

/// `|D|^{1/2}` for Hermitian `D`.
pub fn abs_sqrt(d: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    Ok(herm_eig(d, tol)?.apply_fn(|l| l.abs().sqrt()))
}

/// Signature of `D` on `(ker D)^⊥`, zero on the kernel.
pub fn range_signature(d: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let eig = herm_eig(d, tol)?;
    let band = tol.rank_tol * eig.norm();
    Ok(eig.apply_fn(|l| {
        if l > band {
            1.0
        } else if l < -band {
            -1.0
        } else {
            0.0
        }
    }))
}

/// `‖|D|^{1/2} J_D |D|^{1/2} - D‖ / ‖D‖`.
pub fn keyfact1_residual(d: &CMatrix, tol: &Tolerance) -> Result<f64> {
    let s = abs_sqrt(d, tol)?;
    let j = range_signature(d, tol)?;
    let r = &s.matmul(&j).matmul(&s) - d;
    Ok(relative(spectral_norm(&r), spectral_norm(d)))
}

/// Largest leak `‖(I - P±) |D|^{1/2} P±‖ / ‖|D|^{1/2}‖` out of the spectral
/// subspaces `ℋ±`.
pub fn keyfact2_residual(d: &CMatrix, tol: &Tolerance) -> Result<f64> {
    let eig = herm_eig(d, tol)?;
    let band = tol.rank_tol * eig.norm();
    let s = eig.apply_fn(|l| l.abs().sqrt());
    let scale = spectral_norm(&s);
    let mut worst: f64 = 0.0;
    for sign in [1.0, -1.0] {
        let p = eig.columns_where(|l| sign * l > band);
        if p.cols() == 0 {
            continue;
        }
        let img = s.matmul(&p);
        let leak = &img - &p.matmul(&p.adjoint().matmul(&img));
        worst = worst.max(relative(spectral_norm(&leak), scale));
    }
    Ok(worst)
}

/// `‖P₀ J A‖ / ‖A‖` with `P₀` the projection onto `ker JC`: how far the
/// Hilbert-side factor `JA` leaves `ℋ₁ = (ker JC)^⊥`.
pub fn kernel_leak(c: &KOperator, a: &KOperator, tol: &Tolerance) -> Result<f64> {
    let (eig, band) = eig_of_gram(c, tol)?;
    let p0 = eig.columns_where(|l| l.abs() <= band);
    if p0.cols() == 0 || a.matrix().is_empty() {
        return Ok(0.0);
    }
    let ja = c.domain().j().matmul(a.matrix());
    let leak = p0.adjoint().matmul(&ja);
    Ok(relative(spectral_norm(&leak), a.norm()))
}
