//! Hermitian indices, congruence and the Sylvester classification.

use crate::densela::{condition_number, herm_eig, inertia_of, inverse, CMatrix, Tolerance};
use crate::error::{Error, Result};
use crate::krein::{require_selfadjoint, IndexTriple, KOperator, KreinSpace};

/// Largest condition number accepted by [`transport`].
pub const CONDITION_CAP: f64 = 1e8;

/// An invertible operator `X: ℋ → 𝒦` with its cached inverse.
#[derive(Debug, Clone)]
pub struct Congruence {
    x: KOperator,
    x_inv: CMatrix,
    cond: f64,
}

impl Congruence {
    pub fn new(x: KOperator) -> Result<Self> {
        if x.domain().dim() != x.codomain().dim() {
            return Err(Error::DimensionMismatch(format!(
                "congruence between spaces of dimension {} and {}",
                x.domain().dim(),
                x.codomain().dim()
            )));
        }
        let x_inv = inverse(x.matrix())?;
        let cond = condition_number(x.matrix());
        Ok(Self { x, x_inv, cond })
    }

    fn with_inverse(x: KOperator, x_inv: CMatrix) -> Self {
        let cond = condition_number(x.matrix());
        Self { x, x_inv, cond }
    }

    /// The coordinate identity viewed as a map between two spaces of equal
    /// dimension.
    pub fn identity_between(domain: &KreinSpace, codomain: &KreinSpace) -> Result<Self> {
        let n = domain.dim();
        let x = KOperator::new(domain.clone(), codomain.clone(), CMatrix::identity(n))?;
        Ok(Self { x, x_inv: CMatrix::identity(n), cond: 1.0 })
    }

    pub fn operator(&self) -> &KOperator {
        &self.x
    }

    pub fn matrix(&self) -> &CMatrix {
        self.x.matrix()
    }

    pub fn inverse_matrix(&self) -> &CMatrix {
        &self.x_inv
    }

    pub fn condition(&self) -> f64 {
        self.cond
    }

    /// The inverse congruence `𝒦 → ℋ`.
    pub fn inverse(&self) -> Congruence {
        let x =
            KOperator::new(self.x.codomain().clone(), self.x.domain().clone(), self.x_inv.clone())
                .expect("inverse shape");
        Congruence { x, x_inv: self.x.matrix().clone(), cond: self.cond }
    }
}

/// `(h₊, h₋, h₀)`: the inertia of the Hermitian matrix `JC`.
pub fn hermitian_indices(c: &KOperator, tol: &Tolerance) -> Result<IndexTriple> {
    require_selfadjoint(c, tol)?;
    let d = c.gram().hermitian_part();
    let eig = herm_eig(&d, tol)?;
    Ok(inertia_of(&eig.eigenvalues, tol.rank_tol * eig.norm()).into())
}

/// `A = X* B X` for `B` selfadjoint on `𝒦` and `X: ℋ → 𝒦`.
pub fn transport(b: &KOperator, x: &Congruence, tol: &Tolerance) -> Result<KOperator> {
    require_selfadjoint(b, tol)?;
    let xo = x.operator();
    if !xo.codomain().same_as(b.domain()) {
        return Err(Error::DimensionMismatch(
            "congruence does not land in the operator's space".into(),
        ));
    }
    if !x.cond.is_finite() {
        return Err(Error::NotInvertible);
    }
    if x.cond > CONDITION_CAP {
        return Err(Error::IllConditioned { cond: x.cond, cap: CONDITION_CAP });
    }
    // J_ℋ A = X† (J_𝒦 B) X is Hermitian by construction
    let xm = xo.matrix();
    let herm = xm.adjoint().matmul(&b.gram()).matmul(xm).hermitian_part();
    let h = xo.domain();
    KOperator::endo(h.clone(), h.j().matmul(&herm))
}

/// Hilbert-space representative `D = JC` with the identity coordinate
/// congruence, so that `C = X* D X`.
pub fn to_hilbert(c: &KOperator, tol: &Tolerance) -> Result<(KOperator, Congruence)> {
    require_selfadjoint(c, tol)?;
    let n = c.domain().dim();
    let hilbert = KreinSpace::hilbert(n);
    let d = KOperator::endo(hilbert.clone(), c.gram().hermitian_part())?;
    let x = Congruence::identity_between(c.domain(), &hilbert)?;
    Ok((d, x))
}

/// `C = X* D X` with `D = diag(I_{h₊}, -I_{h₋}, 0_{h₀})` on a Hilbert space.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub indices: IndexTriple,
    pub d: KOperator,
    pub x: Congruence,
}

impl CanonicalForm {
    /// `X* D X` for the stored factors.
    pub fn reconstruct(&self) -> CMatrix {
        let x = self.x.operator();
        x.k_adjoint().matrix().matmul(self.d.matrix()).matmul(x.matrix())
    }
}

pub fn signature_diagonal(indices: IndexTriple) -> CMatrix {
    let mut d = vec![1.0; indices.h_plus];
    d.extend(std::iter::repeat_n(-1.0, indices.h_minus));
    d.extend(std::iter::repeat_n(0.0, indices.h_zero));
    CMatrix::from_real_diag(&d)
}

/// Canonical form via the eigendecomposition of `JC`, eigenvectors scaled by
/// `|λ|^{1/2}`. Order: positive eigenvalues descending, negative ones by
/// increasing magnitude, then the kernel.
pub fn canonical_form(c: &KOperator, tol: &Tolerance) -> Result<CanonicalForm> {
    require_selfadjoint(c, tol)?;
    let n = c.domain().dim();
    let eig = herm_eig(&c.gram().hermitian_part(), tol)?;
    let band = tol.rank_tol * eig.norm();
    let lam = &eig.eigenvalues;
    let mut order: Vec<usize> = (0..n).filter(|&i| lam[i] > band).rev().collect();
    let plus = order.len();
    order.extend((0..n).filter(|&i| lam[i] < -band).rev());
    let minus = order.len() - plus;
    order.extend((0..n).filter(|&i| lam[i].abs() <= band));
    let indices = IndexTriple::new(plus, minus, n - plus - minus);

    let p = eig.eigenvectors.select_columns(&order);
    let scale: Vec<f64> = order
        .iter()
        .map(|&i| if lam[i].abs() > band { lam[i].abs().sqrt() } else { 1.0 })
        .collect();
    let pa = p.adjoint();
    let x = CMatrix::from_fn(n, n, |i, j| pa[(i, j)] * scale[i]);
    let x_inv = CMatrix::from_fn(n, n, |i, j| p[(i, j)] / scale[j]);

    let hilbert = KreinSpace::hilbert(n);
    let d = KOperator::endo(hilbert.clone(), signature_diagonal(indices))?;
    let x = Congruence::with_inverse(KOperator::new(c.domain().clone(), hilbert, x)?, x_inv);
    Ok(CanonicalForm { indices, d, x })
}

/// Sylvester: equal finite dimension and equal hermitian indices.
pub fn is_congruent(a: &KOperator, b: &KOperator, tol: &Tolerance) -> Result<bool> {
    if a.domain().dim() != b.domain().dim() {
        return Err(Error::DimensionMismatch(format!(
            "congruence needs equal dimensions, got {} and {}",
            a.domain().dim(),
            b.domain().dim()
        )));
    }
    Ok(hermitian_indices(a, tol)? == hermitian_indices(b, tol)?)
}

/// An invertible `X: ℋ → 𝒦` with `A = X* B X`, composed from the canonical
/// congruences of `A` and `B`.
pub fn build_congruence(a: &KOperator, b: &KOperator, tol: &Tolerance) -> Result<Congruence> {
    if a.domain().dim() != b.domain().dim() {
        return Err(Error::DimensionMismatch("congruence needs equal dimensions".into()));
    }
    let ca = canonical_form(a, tol)?;
    let cb = canonical_form(b, tol)?;
    if ca.indices != cb.indices {
        return Err(Error::NotCongruent {
            left: ca.indices.as_tuple(),
            right: cb.indices.as_tuple(),
        });
    }
    let x = cb.x.inverse_matrix().matmul(ca.x.matrix());
    let x_inv = ca.x.inverse_matrix().matmul(cb.x.matrix());
    let op = KOperator::new(a.domain().clone(), b.domain().clone(), x)?;
    Ok(Congruence::with_inverse(op, x_inv))
}

/// `‖A - X* B X‖ / max(‖A‖, ‖B‖)`, zero when both operators vanish.
pub fn congruence_residual(a: &KOperator, b: &KOperator, x: &KOperator) -> f64 {
    let xs = x.k_adjoint();
    let r = a.matrix() - &xs.matrix().matmul(b.matrix()).matmul(x.matrix());
    let scale = a.norm().max(b.norm());
    let num = crate::densela::spectral_norm(&r);
    if scale == 0.0 {
        num
    } else {
        num / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densela::spectral_norm;

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

    #[test]
    fn indices_examples() {
        let t = tol();
        let h = KreinSpace::split(2, 3);
        assert_eq!(hermitian_indices(&KOperator::identity(&h), &t).unwrap(), (2, 3, 0).into());
        let zero = KOperator::endo(h.clone(), CMatrix::zeros(5, 5)).unwrap();
        assert_eq!(hermitian_indices(&zero, &t).unwrap(), (0, 0, 5).into());
        assert_eq!(hermitian_indices(&rot_on_signed(), &t).unwrap(), (1, 1, 0).into());
        let j = KOperator::endo(h.clone(), h.j().clone()).unwrap();
        assert_eq!(hermitian_indices(&j, &t).unwrap(), (5, 0, 0).into());
    }

    #[test]
    fn indices_reject_non_selfadjoint() {
        let flip = KOperator::endo(
            KreinSpace::split(1, 1),
            CMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]),
        )
        .unwrap();
        assert!(matches!(hermitian_indices(&flip, &tol()), Err(Error::NotSelfadjoint { .. })));
    }

    #[test]
    fn transport_examples() {
        let t = tol();
        let h = KreinSpace::hilbert(2);
        let b = KOperator::endo(h.clone(), CMatrix::from_real_diag(&[1.0, -2.0])).unwrap();
        let id = Congruence::identity_between(&h, &h).unwrap();
        assert_eq!(transport(&b, &id, &t).unwrap().matrix(), b.matrix());

        let zero = KOperator::endo(h.clone(), CMatrix::zeros(2, 2)).unwrap();
        let x = Congruence::new(
            KOperator::endo(h.clone(), CMatrix::from_real_diag(&[2.0, 3.0])).unwrap(),
        )
        .unwrap();
        assert_eq!(transport(&zero, &x, &t).unwrap().matrix().max_abs(), 0.0);

        let a = transport(&KOperator::identity(&h), &x, &t).unwrap();
        assert_eq!(a.matrix(), &CMatrix::from_real_diag(&[4.0, 9.0]));
    }

    #[test]
    fn transport_guards() {
        let t = tol();
        let h = KreinSpace::hilbert(2);
        let bad = KOperator::endo(h.clone(), CMatrix::from_real_diag(&[1.0, 1e-9])).unwrap();
        let x = Congruence::new(bad).unwrap();
        assert!(matches!(
            transport(&KOperator::identity(&h), &x, &t),
            Err(Error::IllConditioned { .. })
        ));
        let singular = KOperator::endo(h, CMatrix::from_real_diag(&[1.0, 0.0])).unwrap();
        assert!(matches!(Congruence::new(singular), Err(Error::NotInvertible)));
    }

    #[test]
    fn to_hilbert_examples() {
        let t = tol();
        let h = KreinSpace::hilbert(2);
        let c = KOperator::endo(h, CMatrix::from_real_diag(&[1.0, -1.0])).unwrap();
        let (d, x) = to_hilbert(&c, &t).unwrap();
        assert_eq!(d.matrix(), c.matrix());
        assert_eq!(x.matrix(), &CMatrix::identity(2));

        let (d, x) = to_hilbert(&rot_on_signed(), &t).unwrap();
        assert_eq!(d.matrix(), &CMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]));
        assert!(d.domain().is_hilbert());
        // C = X* D X
        let back = x.operator().k_adjoint().matrix().matmul(d.matrix()).matmul(x.matrix());
        assert_eq!(&back, rot_on_signed().matrix());

        let s = KreinSpace::split(2, 1);
        let (d, _) = to_hilbert(&KOperator::endo(s.clone(), s.j().clone()).unwrap(), &t).unwrap();
        assert_eq!(d.matrix(), &CMatrix::identity(3));
    }

    #[test]
    fn canonical_form_examples() {
        let t = tol();
        let zero = KOperator::endo(KreinSpace::hilbert(3), CMatrix::zeros(3, 3)).unwrap();
        let cf = canonical_form(&zero, &t).unwrap();
        assert_eq!(cf.d.matrix().max_abs(), 0.0);
        assert_eq!(cf.x.matrix(), &CMatrix::identity(3));

        let one = KOperator::identity(&KreinSpace::split(1, 1));
        let cf = canonical_form(&one, &t).unwrap();
        assert_eq!(cf.indices, (1, 1, 0).into());
        assert_eq!(cf.d.matrix(), &CMatrix::from_real_diag(&[1.0, -1.0]));

        let c = KOperator::endo(KreinSpace::hilbert(3), CMatrix::from_real_diag(&[4.0, -9.0, 0.0]))
            .unwrap();
        let cf = canonical_form(&c, &t).unwrap();
        assert_eq!(cf.d.matrix(), &CMatrix::from_real_diag(&[1.0, -1.0, 0.0]));
        let xabs = cf.x.matrix().map(|z| crate::densela::C64::new(z.norm(), 0.0));
        assert_eq!(xabs, CMatrix::from_real_diag(&[2.0, 3.0, 1.0]));
        assert!(spectral_norm(&(&cf.reconstruct() - c.matrix())) < 1e-14);
    }

    #[test]
    fn canonical_order_descending_then_by_magnitude() {
        let t = tol();
        let c = KOperator::endo(
            KreinSpace::hilbert(4),
            CMatrix::from_real_diag(&[-1.0, 4.0, -9.0, 1.0]),
        )
        .unwrap();
        let cf = canonical_form(&c, &t).unwrap();
        let scales: Vec<f64> =
            (0..4).map(|i| cf.x.matrix().row(i).iter().map(|z| z.norm()).sum()).collect();
        assert_eq!(scales, vec![2.0, 1.0, 1.0, 3.0]);
    }

    #[test]
    fn congruence_decisions() {
        let t = tol();
        let a = rot_on_signed();
        assert!(is_congruent(&a, &a, &t).unwrap());
        let one = KOperator::identity(&KreinSpace::split(1, 1));
        let flip = KOperator::endo(
            KreinSpace::hilbert(2),
            CMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]),
        )
        .unwrap();
        assert!(is_congruent(&one, &flip, &t).unwrap());
        let h = KreinSpace::hilbert(2);
        let p = KOperator::endo(h.clone(), CMatrix::from_real_diag(&[1.0, 1.0])).unwrap();
        let s = KOperator::endo(h, CMatrix::from_real_diag(&[1.0, -1.0])).unwrap();
        assert!(!is_congruent(&p, &s, &t).unwrap());
        let big = KOperator::identity(&KreinSpace::hilbert(3));
        assert!(matches!(is_congruent(&p, &big, &t), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn build_congruence_examples() {
        let t = tol();
        let h = KreinSpace::hilbert(2);
        let i = KOperator::identity(&h);
        let x = build_congruence(&i, &i, &t).unwrap();
        assert!(congruence_residual(&i, &i, x.operator()) < 1e-15);

        let a = KOperator::endo(h.clone(), CMatrix::from_real_diag(&[4.0, -9.0])).unwrap();
        let b = KOperator::endo(h.clone(), CMatrix::from_real_diag(&[1.0, -1.0])).unwrap();
        let x = build_congruence(&a, &b, &t).unwrap();
        let xabs = x.matrix().map(|z| crate::densela::C64::new(z.norm(), 0.0));
        assert_eq!(xabs, CMatrix::from_real_diag(&[2.0, 3.0]));
        assert!(congruence_residual(&a, &b, x.operator()) < 1e-15);

        let p = KOperator::identity(&h);
        assert!(matches!(build_congruence(&p, &b, &t), Err(Error::NotCongruent { .. })));
    }
}
