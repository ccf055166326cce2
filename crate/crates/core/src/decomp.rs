//! Decompositions `ℋ = ℳ₊ + ℳ₋ + ℳ₀` into strictly positive, strictly
//! negative and kernel parts that are pairwise `C`-orthogonal, and the
//! projections onto each part along the other two.

use serde::Serialize;

use crate::densela::{herm_eig, inverse, null_basis, spectral_norm, svd, CMatrix, Tolerance};
use crate::error::{Error, Result};
use crate::hermdex::hermitian_indices;
use crate::krein::{
    c_orthogonal, classify_subspace, require_selfadjoint, IndexTriple, KOperator, Subspace,
    SubspaceClass,
};

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub m_plus: Subspace,
    pub m_minus: Subspace,
    pub m_zero: Subspace,
}

impl Decomposition {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.m_plus.dim(), self.m_minus.dim(), self.m_zero.dim())
    }

    /// `[B₊ B₋ B₀]`.
    pub fn joined_basis(&self) -> CMatrix {
        let n = self.m_plus.space().dim();
        CMatrix::hcat(n, &[self.m_plus.basis(), self.m_minus.basis(), self.m_zero.basis()])
    }
}

/// The spectral decomposition: eigenvectors of `JC` split by the sign of
/// their eigenvalue.
pub fn decompose(c: &KOperator, tol: &Tolerance) -> Result<Decomposition> {
    require_selfadjoint(c, tol)?;
    let space = c.domain();
    let eig = herm_eig(&c.gram().hermitian_part(), tol)?;
    let band = tol.rank_tol * eig.norm();
    let part = |keep: &dyn Fn(f64) -> bool| {
        let idx: Vec<usize> = (0..eig.dim()).filter(|&i| keep(eig.eigenvalues[i])).collect();
        Subspace::from_orthonormal_unchecked(space, eig.eigenvectors.select_columns(&idx))
    };
    Ok(Decomposition {
        m_plus: part(&|l| l > band),
        m_minus: part(&|l| l < -band),
        m_zero: part(&|l| l.abs() <= band),
    })
}

/// One boolean per pair of parts, with a numeric witness each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairCheck {
    pub plus_minus: bool,
    pub plus_zero: bool,
    pub minus_zero: bool,
}

impl PairCheck {
    pub fn all(&self) -> bool {
        self.plus_minus && self.plus_zero && self.minus_zero
    }
}

/// Outcome of every condition, reported together.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub plus_class: SubspaceClass,
    pub minus_class: SubspaceClass,
    pub plus_strict: bool,
    pub minus_strict: bool,
    pub zero_is_kernel: bool,
    pub pairwise_direct: PairCheck,
    /// Smallest singular value of each concatenated pair of bases.
    pub pairwise_sigma_min: [f64; 3],
    pub pairwise_orthogonal: PairCheck,
    pub dims: (usize, usize, usize),
    pub indices: IndexTriple,
    pub dims_match: bool,
    pub direct: bool,
    pub direct_sigma_min: f64,
}

impl DecompositionReport {
    /// (i) strict signs and `ℳ₀ = ker C`.
    pub fn condition_i(&self) -> bool {
        self.plus_strict && self.minus_strict && self.zero_is_kernel
    }

    /// (ii) pairwise sums direct (closedness is automatic here).
    pub fn condition_ii(&self) -> bool {
        self.pairwise_direct.all()
    }

    /// (iii) pairwise `C`-orthogonality.
    pub fn condition_iii(&self) -> bool {
        self.pairwise_orthogonal.all()
    }

    /// (iv) `dim ℳ± = h±(C)`.
    pub fn condition_iv(&self) -> bool {
        self.dims_match
    }

    pub fn passed(&self) -> bool {
        self.condition_i()
            && self.condition_ii()
            && self.condition_iii()
            && self.condition_iv()
            && self.direct
    }
}

fn sigma_min_joined(n: usize, blocks: &[&CMatrix], tol: &Tolerance) -> f64 {
    let joined = CMatrix::hcat(n, blocks);
    if joined.cols() == 0 {
        return 1.0;
    }
    if joined.cols() > n {
        return 0.0;
    }
    svd(&joined, tol).map(|s| *s.sigma.last().unwrap()).unwrap_or(0.0)
}

/// Checks a candidate decomposition against all conditions.
pub fn validate(c: &KOperator, d: &Decomposition, tol: &Tolerance) -> Result<DecompositionReport> {
    require_selfadjoint(c, tol)?;
    let n = c.domain().dim();
    for part in [&d.m_plus, &d.m_minus, &d.m_zero] {
        if part.space().dim() != n {
            return Err(Error::DimensionMismatch("decomposition lives in another space".into()));
        }
    }
    let plus_class = classify_subspace(c, &d.m_plus, tol)?;
    let minus_class = classify_subspace(c, &d.m_minus, tol)?;
    let plus_strict = d.m_plus.dim() == 0 || plus_class == SubspaceClass::StrictlyPositive;
    let minus_strict = d.m_minus.dim() == 0 || minus_class == SubspaceClass::StrictlyNegative;

    let c_norm = c.norm();
    let kernel_dim = null_basis(c.matrix(), tol).cols();
    let annihilated = d.m_zero.dim() == 0
        || spectral_norm(&c.matrix().matmul(d.m_zero.basis())) <= tol.residual_tol * c_norm;
    let zero_is_kernel = kernel_dim == d.m_zero.dim() && annihilated;

    let (bp, bm, bz) = (d.m_plus.basis(), d.m_minus.basis(), d.m_zero.basis());
    let sig = [
        sigma_min_joined(n, &[bp, bm], tol),
        sigma_min_joined(n, &[bp, bz], tol),
        sigma_min_joined(n, &[bm, bz], tol),
    ];
    let pairwise_direct = PairCheck {
        plus_minus: sig[0] > tol.rank_tol,
        plus_zero: sig[1] > tol.rank_tol,
        minus_zero: sig[2] > tol.rank_tol,
    };
    let pairwise_orthogonal = PairCheck {
        plus_minus: c_orthogonal(c, &d.m_plus, &d.m_minus, tol),
        plus_zero: c_orthogonal(c, &d.m_plus, &d.m_zero, tol),
        minus_zero: c_orthogonal(c, &d.m_minus, &d.m_zero, tol),
    };

    let indices = hermitian_indices(c, tol)?;
    let dims = d.dims();
    let dims_match = dims.0 == indices.h_plus && dims.1 == indices.h_minus;

    let direct_sigma_min =
        if dims.0 + dims.1 + dims.2 == n { sigma_min_joined(n, &[bp, bm, bz], tol) } else { 0.0 };
    let direct = dims.0 + dims.1 + dims.2 == n && direct_sigma_min > tol.rank_tol;

    Ok(DecompositionReport {
        plus_class,
        minus_class,
        plus_strict,
        minus_strict,
        zero_is_kernel,
        pairwise_direct,
        pairwise_sigma_min: sig,
        pairwise_orthogonal,
        dims,
        indices,
        dims_match,
        direct,
        direct_sigma_min,
    })
}

/// Oblique projections `Q₊, Q₋, Q₀` of the direct sum.
#[derive(Debug, Clone)]
pub struct DecompositionProjections {
    pub q_plus: KOperator,
    pub q_minus: KOperator,
    pub q_zero: KOperator,
}

impl DecompositionProjections {
    pub fn sum(&self) -> CMatrix {
        &(self.q_plus.matrix() + self.q_minus.matrix()) + self.q_zero.matrix()
    }
}

/// Splits `f = f₊ + f₋ + f₀` by inverting the joined basis.
pub fn projections(
    c: &KOperator,
    d: &Decomposition,
    tol: &Tolerance,
) -> Result<DecompositionProjections> {
    let n = c.domain().dim();
    let (p, m, z) = d.dims();
    if p + m + z != n {
        return Err(Error::NotDirect { sigma_min: 0.0 });
    }
    let joined = d.joined_basis();
    let sigma_min = sigma_min_joined(n, &[&joined], tol);
    if sigma_min <= tol.rank_tol {
        return Err(Error::NotDirect { sigma_min });
    }
    let inv = inverse(&joined).map_err(|_| Error::NotDirect { sigma_min })?;
    let project = |range: std::ops::Range<usize>| {
        let basis = joined.submatrix(0..n, range.clone());
        let coords = inv.submatrix(range, 0..n);
        KOperator::endo(c.domain().clone(), basis.matmul(&coords))
    };
    Ok(DecompositionProjections {
        q_plus: project(0..p)?,
        q_minus: project(p..p + m)?,
        q_zero: project(p + m..n)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densela::C64;
    use crate::krein::KreinSpace;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn rot_on_signed() -> KOperator {
        KOperator::endo(
            KreinSpace::split(1, 1),
            CMatrix::from_real_rows(&[[0.0, 1.0], [-1.0, 0.0]]),
        )
        .unwrap()
    }

    fn spans(s: &Subspace, v: &[f64]) -> bool {
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let col: Vec<C64> = v.iter().map(|x| C64::new(x / nrm, 0.0)).collect();
        s.dim() == 1 && (crate::densela::dot(&s.basis().column(0), &col).norm() - 1.0).abs() < 1e-12
    }

    #[test]
    fn zero_operator_is_all_kernel() {
        let c = KOperator::endo(KreinSpace::hilbert(3), CMatrix::zeros(3, 3)).unwrap();
        let d = decompose(&c, &tol()).unwrap();
        assert_eq!(d.dims(), (0, 0, 3));
        assert!(validate(&c, &d, &tol()).unwrap().passed());
    }

    #[test]
    fn diagonal_hilbert_example() {
        let c = KOperator::endo(KreinSpace::hilbert(3), CMatrix::from_real_diag(&[2.0, -3.0, 0.0]))
            .unwrap();
        let d = decompose(&c, &tol()).unwrap();
        assert!(spans(&d.m_plus, &[1.0, 0.0, 0.0]));
        assert!(spans(&d.m_minus, &[0.0, 1.0, 0.0]));
        assert!(spans(&d.m_zero, &[0.0, 0.0, 1.0]));
        let q = projections(&c, &d, &tol()).unwrap();
        assert!(
            (q.q_plus.matrix() - &CMatrix::from_real_diag(&[1.0, 0.0, 0.0])).norm_fro() < 1e-15
        );
        assert!(
            (q.q_minus.matrix() - &CMatrix::from_real_diag(&[0.0, 1.0, 0.0])).norm_fro() < 1e-15
        );
        assert!(
            (q.q_zero.matrix() - &CMatrix::from_real_diag(&[0.0, 0.0, 1.0])).norm_fro() < 1e-15
        );
    }

    #[test]
    fn krein_rotation_example() {
        let c = rot_on_signed();
        let d = decompose(&c, &tol()).unwrap();
        assert!(spans(&d.m_plus, &[1.0, 1.0]));
        assert!(spans(&d.m_minus, &[1.0, -1.0]));
        assert_eq!(d.m_zero.dim(), 0);
        assert!(validate(&c, &d, &tol()).unwrap().passed());

        // solving the 2x2 splitting system by hand
        let q = projections(&c, &d, &tol()).unwrap();
        let qp = CMatrix::from_real_rows(&[[0.5, 0.5], [0.5, 0.5]]);
        let qm = CMatrix::from_real_rows(&[[0.5, -0.5], [-0.5, 0.5]]);
        assert!((q.q_plus.matrix() - &qp).norm_fro() < 1e-15);
        assert!((q.q_minus.matrix() - &qm).norm_fro() < 1e-15);
        assert_eq!(q.q_zero.matrix().max_abs(), 0.0);
    }

    #[test]
    fn swapped_parts_fail_sign_condition() {
        let c = KOperator::endo(KreinSpace::hilbert(3), CMatrix::from_real_diag(&[2.0, 1.0, -3.0]))
            .unwrap();
        let d = decompose(&c, &tol()).unwrap();
        let swapped = Decomposition {
            m_plus: d.m_minus.clone(),
            m_minus: d.m_plus.clone(),
            m_zero: d.m_zero,
        };
        let r = validate(&c, &swapped, &tol()).unwrap();
        assert!(!r.condition_i());
        assert!(!r.condition_iv());
        assert!(!r.passed());
    }

    #[test]
    fn kernel_shift_keeps_decomposition_valid() {
        // kernel vectors are C-orthogonal to everything, so shearing M+ along
        // ker C produces another valid (non-spectral) decomposition
        let t = tol();
        let c = KOperator::endo(KreinSpace::hilbert(3), CMatrix::from_real_diag(&[2.0, -3.0, 0.0]))
            .unwrap();
        let d = decompose(&c, &t).unwrap();
        let h = c.domain().clone();
        let sheared =
            Subspace::span(&h, &CMatrix::from_real_rows(&[[1.0], [0.0], [0.7]]), &t).unwrap();
        let alt = Decomposition { m_plus: sheared, ..d.clone() };
        let r = validate(&c, &alt, &t).unwrap();
        assert!(r.passed());
        let q = projections(&c, &alt, &t).unwrap();
        assert!((&q.sum() - &CMatrix::identity(3)).norm_fro() < 1e-14);
        assert!(
            spectral_norm(&(&q.q_plus.matrix().matmul(q.q_plus.matrix()) - q.q_plus.matrix()))
                < 1e-14
        );
    }

    #[test]
    fn shear_into_negative_part_breaks_orthogonality() {
        let t = tol();
        let c = KOperator::endo(KreinSpace::hilbert(3), CMatrix::from_real_diag(&[2.0, -3.0, 0.0]))
            .unwrap();
        let d = decompose(&c, &t).unwrap();
        let h = c.domain().clone();
        // still strictly positive (2 - 3·0.25 > 0) but not C-orthogonal to M-
        let sheared =
            Subspace::span(&h, &CMatrix::from_real_rows(&[[1.0], [0.5], [0.0]]), &t).unwrap();
        let alt = Decomposition { m_plus: sheared, ..d };
        let r = validate(&c, &alt, &t).unwrap();
        assert!(r.plus_strict);
        assert!(!r.condition_iii());
        assert!(!r.passed());
    }

    #[test]
    fn invertible_operator_has_zero_kernel_projection() {
        let c = KOperator::endo(KreinSpace::split(2, 1), CMatrix::from_real_diag(&[1.0, 2.0, 3.0]))
            .unwrap();
        let d = decompose(&c, &tol()).unwrap();
        let q = projections(&c, &d, &tol()).unwrap();
        assert_eq!(q.q_zero.matrix().max_abs(), 0.0);
        let r = validate(&c, &d, &tol()).unwrap();
        assert_eq!(r.indices, (2, 1, 0).into());
        assert!(r.passed());
    }

    #[test]
    fn non_direct_decomposition_rejected() {
        let t = tol();
        let h = KreinSpace::hilbert(2);
        let c = KOperator::endo(h.clone(), CMatrix::from_real_diag(&[1.0, -1.0])).unwrap();
        let e1 = Subspace::span(&h, &CMatrix::from_real_rows(&[[1.0], [0.0]]), &t).unwrap();
        let bad = Decomposition { m_plus: e1.clone(), m_minus: e1, m_zero: Subspace::zero(&h) };
        assert!(matches!(projections(&c, &bad, &t), Err(Error::NotDirect { .. })));
        let r = validate(&c, &bad, &t).unwrap();
        assert!(!r.direct && !r.condition_ii());
    }
}
