//! Finite-dimensional Kreĭn spaces.
//!
//! A space is a coordinate space `ℂⁿ` with a fundamental symmetry `J`
//! (`J = J†`, `J² = I`); the indefinite inner product is `⟨f, g⟩ = g† J f`.
//! The associated Hilbert space is always the Euclidean coordinate space, so
//! subspace bases are kept Euclidean-orthonormal.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::densela::{
    dot, herm_eig, inertia_of, range_basis, spectral_norm, CMatrix, Tolerance, C64,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct KreinSpace {
    j: CMatrix,
    ind_plus: usize,
    ind_minus: usize,
}

impl KreinSpace {
    /// Validates `J` as a fundamental symmetry.
    pub fn new(j: CMatrix, tol: &Tolerance) -> Result<Self> {
        if !j.is_square() {
            return Err(Error::NotSymmetry(format!("J is {}x{}, not square", j.rows(), j.cols())));
        }
        let n = j.rows();
        let scale = (n.max(1) as f64).sqrt();
        let skew = j.skew_defect();
        if skew > tol.residual_tol * scale {
            return Err(Error::NotSymmetry(format!("‖J - J†‖ = {skew:.3e}")));
        }
        let j = j.hermitian_part();
        let square = (&j.matmul(&j) - &CMatrix::identity(n)).norm_fro();
        if square > tol.residual_tol * scale {
            return Err(Error::NotSymmetry(format!("‖J² - I‖ = {square:.3e}")));
        }
        let eig = herm_eig(&j, tol)?;
        let (ind_plus, ind_minus, zero) = inertia_of(&eig.eigenvalues, 0.5);
        if zero != 0 {
            return Err(Error::NotSymmetry("J has eigenvalues away from ±1".into()));
        }
        Ok(Self { j, ind_plus, ind_minus })
    }

    /// Euclidean space `ℂⁿ` (`J = I`).
    pub fn hilbert(n: usize) -> Self {
        Self { j: CMatrix::identity(n), ind_plus: n, ind_minus: 0 }
    }

    /// `ℂ^{p+q}` with `J = diag(I_p, -I_q)`.
    pub fn split(p: usize, q: usize) -> Self {
        let mut d = vec![1.0; p];
        d.extend(std::iter::repeat_n(-1.0, q));
        Self { j: CMatrix::from_real_diag(&d), ind_plus: p, ind_minus: q }
    }

    pub fn dim(&self) -> usize {
        self.j.rows()
    }

    pub fn j(&self) -> &CMatrix {
        &self.j
    }

    /// `(ind₊, ind₋)`.
    pub fn indices(&self) -> (usize, usize) {
        (self.ind_plus, self.ind_minus)
    }

    pub fn is_hilbert(&self) -> bool {
        self.ind_minus == 0
    }

    /// `⟨f, g⟩ = g† J f`.
    pub fn inner(&self, f: &[C64], g: &[C64]) -> C64 {
        dot(g, &self.j.mul_vec(f))
    }

    /// Same dimension and the same `J` up to rounding.
    pub fn same_as(&self, other: &KreinSpace) -> bool {
        self.dim() == other.dim()
            && (&self.j - &other.j).norm_fro() <= 1e-12 * (self.dim().max(1) as f64)
    }
}

pub fn make_space(j: CMatrix, tol: &Tolerance) -> Result<KreinSpace> {
    KreinSpace::new(j, tol)
}

pub fn space_indices(h: &KreinSpace) -> (usize, usize) {
    h.indices()
}

/// A matrix acting between two Kreĭn spaces.
#[derive(Debug, Clone)]
pub struct KOperator {
    domain: KreinSpace,
    codomain: KreinSpace,
    matrix: CMatrix,
}

impl KOperator {
    pub fn new(domain: KreinSpace, codomain: KreinSpace, matrix: CMatrix) -> Result<Self> {
        if matrix.shape() != (codomain.dim(), domain.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "operator matrix is {}x{}, spaces need {}x{}",
                matrix.rows(),
                matrix.cols(),
                codomain.dim(),
                domain.dim()
            )));
        }
        Ok(Self { domain, codomain, matrix })
    }

    /// Operator from a space into itself.
    pub fn endo(space: KreinSpace, matrix: CMatrix) -> Result<Self> {
        Self::new(space.clone(), space, matrix)
    }

    pub fn identity(space: &KreinSpace) -> Self {
        Self {
            domain: space.clone(),
            codomain: space.clone(),
            matrix: CMatrix::identity(space.dim()),
        }
    }

    pub fn domain(&self) -> &KreinSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &KreinSpace {
        &self.codomain
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_endo(&self) -> bool {
        self.domain.same_as(&self.codomain)
    }

    /// Kreĭn adjoint `A* = J_dom A† J_cod`.
    pub fn k_adjoint(&self) -> KOperator {
        let m = self.domain.j().matmul(&self.matrix.adjoint()).matmul(self.codomain.j());
        KOperator { domain: self.codomain.clone(), codomain: self.domain.clone(), matrix: m }
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &KOperator) -> Result<KOperator> {
        if !rhs.codomain.same_as(&self.domain) {
            return Err(Error::DimensionMismatch("composition through different spaces".into()));
        }
        Ok(KOperator {
            domain: rhs.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: self.matrix.matmul(&rhs.matrix),
        })
    }

    /// `J C`, Hermitian exactly when the endomorphism `C` is selfadjoint.
    pub fn gram(&self) -> CMatrix {
        self.codomain.j().matmul(&self.matrix)
    }

    pub fn norm(&self) -> f64 {
        spectral_norm(&self.matrix)
    }
}

pub fn k_adjoint(a: &KOperator) -> KOperator {
    a.k_adjoint()
}

/// `⟨f, g⟩_C = ⟨Cf, g⟩ = g† J C f`.
pub fn c_inner(c: &KOperator, f: &[C64], g: &[C64]) -> Result<C64> {
    let n = c.domain.dim();
    if !c.is_endo() || f.len() != n || g.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "C-inner product on a {n}-dimensional space with vectors of length {} and {}",
            f.len(),
            g.len()
        )));
    }
    Ok(c.codomain.inner(&c.matrix.mul_vec(f), g))
}

pub fn is_selfadjoint(c: &KOperator, tol: &Tolerance) -> bool {
    c.is_endo() && selfadjoint_defect(c) <= tol.residual_tol * c.norm()
}

/// `‖JC - (JC)†‖` in the spectral norm.
pub(crate) fn selfadjoint_defect(c: &KOperator) -> f64 {
    let g = c.gram();
    spectral_norm(&(&g - &g.adjoint()))
}

pub(crate) fn require_selfadjoint(c: &KOperator, tol: &Tolerance) -> Result<()> {
    if !c.is_endo() {
        return Err(Error::DimensionMismatch("operator is not an endomorphism".into()));
    }
    let defect = selfadjoint_defect(c);
    let bound = tol.residual_tol * c.norm();
    if defect > bound {
        return Err(Error::NotSelfadjoint { defect, bound });
    }
    Ok(())
}

/// A subspace carried by a Euclidean-orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    space: KreinSpace,
    basis: CMatrix,
}

impl Subspace {
    /// Span of the given columns, re-orthonormalized; dependent columns are
    /// dropped at the rank tolerance.
    pub fn span(space: &KreinSpace, vectors: &CMatrix, tol: &Tolerance) -> Result<Self> {
        if vectors.rows() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vectors of length {} in a {}-dimensional space",
                vectors.rows(),
                space.dim()
            )));
        }
        Ok(Self { space: space.clone(), basis: range_basis(vectors, tol) })
    }

    /// Wraps a basis that is already orthonormal.
    pub fn from_orthonormal(space: &KreinSpace, basis: CMatrix, tol: &Tolerance) -> Result<Self> {
        if basis.rows() != space.dim() {
            return Err(Error::DimensionMismatch("basis length does not match space".into()));
        }
        let k = basis.cols();
        let defect = (&basis.adjoint().matmul(&basis) - &CMatrix::identity(k)).norm_fro();
        if defect > tol.residual_tol * (k.max(1) as f64).sqrt() {
            return Err(Error::InvalidInput(format!("basis is not orthonormal: {defect:.3e}")));
        }
        Ok(Self { space: space.clone(), basis })
    }

    pub(crate) fn from_orthonormal_unchecked(space: &KreinSpace, basis: CMatrix) -> Self {
        debug_assert_eq!(basis.rows(), space.dim());
        Self { space: space.clone(), basis }
    }

    pub fn zero(space: &KreinSpace) -> Self {
        Self { space: space.clone(), basis: CMatrix::zeros(space.dim(), 0) }
    }

    pub fn whole(space: &KreinSpace) -> Self {
        Self { space: space.clone(), basis: CMatrix::identity(space.dim()) }
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn space(&self) -> &KreinSpace {
        &self.space
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// Orthogonal (Euclidean) projector onto the subspace.
    pub fn projector(&self) -> CMatrix {
        self.basis.matmul(&self.basis.adjoint())
    }

    /// Largest distance of a unit vector of `other` from `self`.
    pub fn containment_residual(&self, other: &Subspace) -> f64 {
        if other.dim() == 0 {
            return 0.0;
        }
        let b = other.basis();
        let leak = b - &self.basis.matmul(&self.basis.adjoint().matmul(b));
        spectral_norm(&leak)
    }

    /// `other ⊆ self` within `residual_tol`.
    pub fn contains(&self, other: &Subspace, tol: &Tolerance) -> bool {
        self.space.dim() == other.space.dim()
            && self.containment_residual(other) <= tol.residual_tol
    }
}

/// Sign behaviour of the `C`-quadratic form on a subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubspaceClass {
    StrictlyPositive,
    StrictlyNegative,
    Nonnegative,
    Nonpositive,
    Neutral,
    Indefinite,
}

impl SubspaceClass {
    pub fn is_nonnegative(self) -> bool {
        matches!(self, Self::StrictlyPositive | Self::Nonnegative | Self::Neutral)
    }

    pub fn is_nonpositive(self) -> bool {
        matches!(self, Self::StrictlyNegative | Self::Nonpositive | Self::Neutral)
    }
}

/// Classifies `M` by the inertia of its `C`-Gram matrix `B†(JC)B`, using the
/// zero band `rank_tol·‖C‖`. The zero subspace is `Neutral`.
pub fn classify_subspace(c: &KOperator, m: &Subspace, tol: &Tolerance) -> Result<SubspaceClass> {
    if m.space.dim() != c.domain.dim() {
        return Err(Error::DimensionMismatch("subspace lives in another space".into()));
    }
    let k = m.dim();
    if k == 0 {
        return Ok(SubspaceClass::Neutral);
    }
    let b = m.basis();
    let gram = b.adjoint().matmul(&c.gram()).matmul(b).hermitian_part();
    let eig = herm_eig(&gram, tol)?;
    let (plus, minus, _) = inertia_of(&eig.eigenvalues, tol.rank_tol * c.norm());
    Ok(match (plus, minus) {
        (p, 0) if p == k => SubspaceClass::StrictlyPositive,
        (0, m) if m == k => SubspaceClass::StrictlyNegative,
        (0, 0) => SubspaceClass::Neutral,
        (_, 0) => SubspaceClass::Nonnegative,
        (0, _) => SubspaceClass::Nonpositive,
        _ => SubspaceClass::Indefinite,
    })
}

/// `‖B_N† (JC) B_M‖ ≤ residual_tol·‖C‖`.
pub fn c_orthogonal(c: &KOperator, m: &Subspace, n: &Subspace, tol: &Tolerance) -> bool {
    if m.dim() == 0 || n.dim() == 0 {
        return true;
    }
    let cross = n.basis().adjoint().matmul(&c.gram()).matmul(m.basis());
    spectral_norm(&cross) <= tol.residual_tol * c.norm()
}

/// Hermitian indices `(h₊, h₋, h₀)` of a selfadjoint operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IndexTriple {
    pub h_plus: usize,
    pub h_minus: usize,
    pub h_zero: usize,
}

impl IndexTriple {
    pub fn new(h_plus: usize, h_minus: usize, h_zero: usize) -> Self {
        Self { h_plus, h_minus, h_zero }
    }

    pub fn as_tuple(self) -> (usize, usize, usize) {
        (self.h_plus, self.h_minus, self.h_zero)
    }

    pub fn dim(self) -> usize {
        self.h_plus + self.h_minus + self.h_zero
    }
}

impl From<(usize, usize, usize)> for IndexTriple {
    fn from((p, m, z): (usize, usize, usize)) -> Self {
        Self::new(p, m, z)
    }
}

impl fmt::Display for IndexTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(h+ = {}, h- = {}, h0 = {})", self.h_plus, self.h_minus, self.h_zero)
    }
}
