//! Graph (angle operator) representations of semidefinite subspaces and the
//! extension of an orthogonal pair to a maximal orthogonal pair.
//!
//! All graph arithmetic happens in a frame where the fundamental symmetry is
//! `diag(I_p, -I_q)`: coordinates `y = W† x` with `W` unitary. A vector of
//! `𝒜` is written `(y₊, y₋)` with `y₊ ∈ 𝒜₊ ≅ ℂᵖ` and `y₋ ∈ |𝒜₋| ≅ ℂ^q`.

use serde::Serialize;

use crate::densela::{herm_eig, null_basis, rank, spectral_norm, svd, CMatrix, Tolerance, C64};
use crate::error::{Error, Result};
use crate::krein::{classify_subspace, KOperator, KreinSpace, Subspace};

/// Eigenvalues of `I - A†A` at or below this are treated as zero defect.
const DEFECT_FLOOR: f64 = 64.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn name(self) -> &'static str {
        match self {
            Sign::Plus => "plus",
            Sign::Minus => "minus",
        }
    }
}

/// A unitary `W` with `J = W diag(I_p, -I_q) W†`.
#[derive(Debug, Clone)]
pub struct Frame {
    w: CMatrix,
    p: usize,
    q: usize,
}

impl Frame {
    pub fn of(space: &KreinSpace, tol: &Tolerance) -> Result<Self> {
        let (p, q) = space.indices();
        let n = space.dim();
        let j = space.j();
        let split = (0..n).all(|r| {
            (0..n).all(|c| {
                let want = match (r == c, r < p) {
                    (false, _) => 0.0,
                    (true, true) => 1.0,
                    (true, false) => -1.0,
                };
                j[(r, c)] == C64::new(want, 0.0)
            })
        });
        if split {
            return Ok(Self { w: CMatrix::identity(n), p, q });
        }
        let eig = herm_eig(j, tol)?;
        let mut idx: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > 0.0).collect();
        idx.extend((0..n).filter(|&i| eig.eigenvalues[i] < 0.0));
        Ok(Self { w: eig.eigenvectors.select_columns(&idx), p, q })
    }

    pub fn w(&self) -> &CMatrix {
        &self.w
    }

    pub fn indices(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    /// Maps split coordinates back to the original ones.
    pub fn undo(&self, y: &CMatrix) -> CMatrix {
        self.w.matmul(y)
    }
}

/// `{x + Gx : x ∈ ℳ}` with `ℳ` in the `sign` component and `G` into the
/// other one.
#[derive(Debug, Clone)]
pub struct GraphRep {
    pub sign: Sign,
    /// `ℳ` as a subspace of the component `ℂᵖ` (plus) or `ℂ^q` (minus).
    pub m: Subspace,
    /// `G` applied to the basis of `ℳ`.
    pub angle: CMatrix,
    space: KreinSpace,
    frame: Frame,
}

impl GraphRep {
    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn space(&self) -> &KreinSpace {
        &self.space
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// `G P_ℳ`, the angle operator on the whole component; independent of
    /// the basis chosen for `ℳ`.
    pub fn operator(&self) -> CMatrix {
        self.angle.matmul(&self.m.basis().adjoint())
    }

    /// The represented subspace of `𝒜`, in original coordinates.
    pub fn graph(&self, tol: &Tolerance) -> Result<Subspace> {
        let u = self.m.basis();
        let y = match self.sign {
            Sign::Plus => CMatrix::vcat(u.cols(), &[u, &self.angle]),
            Sign::Minus => CMatrix::vcat(u.cols(), &[&self.angle, u]),
        };
        Subspace::span(&self.space, &self.frame.undo(&y), tol)
    }
}

/// Angle operator representation of a nonnegative (`Plus`) or nonpositive
/// (`Minus`) subspace.
pub fn graph_rep(s: &Subspace, sign: Sign, tol: &Tolerance) -> Result<GraphRep> {
    let space = s.space().clone();
    let class = classify_subspace(&KOperator::identity(&space), s, tol)?;
    match sign {
        Sign::Plus if !class.is_nonnegative() => {
            return Err(Error::NotSemidefinite { expected: "nonnegative" })
        }
        Sign::Minus if !class.is_nonpositive() => {
            return Err(Error::NotSemidefinite { expected: "nonpositive" })
        }
        _ => {}
    }
    let frame = Frame::of(&space, tol)?;
    let (p, q) = frame.indices();
    let k = s.dim();
    let y = frame.w().adjoint().matmul(s.basis());
    let top = y.submatrix(0..p, 0..k);
    let bot = y.submatrix(p..p + q, 0..k);
    let (own, other, own_dim) = match sign {
        Sign::Plus => (top, bot, p),
        Sign::Minus => (bot, top, q),
    };
    let component = KreinSpace::hilbert(own_dim);
    if k == 0 {
        return Ok(GraphRep {
            sign,
            m: Subspace::zero(&component),
            angle: CMatrix::zeros(other.rows(), 0),
            space,
            frame,
        });
    }
    if own_dim < k {
        return Err(Error::DegenerateProjection { sign: sign.name(), sigma_min: 0.0 });
    }
    let dec = svd(&own, tol)?;
    let sigma_min = *dec.sigma.last().unwrap();
    // a semidefinite unit vector keeps at least half its mass in its own
    // component, so a collapse here means the sign claim was wrong
    if sigma_min <= tol.rank_tol {
        return Err(Error::DegenerateProjection { sign: sign.name(), sigma_min });
    }
    let v_sinv = CMatrix::from_fn(k, k, |i, j| dec.v[(i, j)] / dec.sigma[j]);
    let angle = other.matmul(&v_sinv);
    Ok(GraphRep {
        sign,
        m: Subspace::from_orthonormal(&component, dec.u, tol)?,
        angle,
        space,
        frame,
    })
}

/// `‖G₋ᴴ U₊ − U₋ᴴ G₊‖` on the bases of `ℳ₊` and `ℳ₋`: the `𝒜`-inner
/// products between the two graphs.
pub fn compatibility_defect(gp: &GraphRep, gm: &GraphRep) -> f64 {
    if gp.dim() == 0 || gm.dim() == 0 {
        return 0.0;
    }
    let lhs = gm.angle.adjoint().matmul(gp.m.basis());
    let rhs = gm.m.basis().adjoint().matmul(&gp.angle);
    spectral_norm(&(&lhs - &rhs))
}

/// True when the two represented subspaces are `𝒜`-orthogonal.
pub fn check_compatibility(gp: &GraphRep, gm: &GraphRep, tol: &Tolerance) -> bool {
    gp.sign == Sign::Plus
        && gm.sign == Sign::Minus
        && gp.space.same_as(&gm.space)
        && compatibility_defect(gp, gm) <= tol.residual_tol
}

/// Maximal orthogonal pair given by a contraction `G: 𝒜₊ → |𝒜₋|`.
#[derive(Debug, Clone)]
pub struct MaximalPair {
    pub g: CMatrix,
    pub g_tilde_plus: Subspace,
    pub g_tilde_minus: Subspace,
}

impl MaximalPair {
    pub fn norm(&self) -> f64 {
        spectral_norm(&self.g)
    }

    /// `‖G U₊ − G₊‖` and `‖G† U₋ − G₋‖`.
    pub fn restriction_defects(&self, gp: &GraphRep, gm: &GraphRep) -> (f64, f64) {
        let plus = if gp.dim() == 0 {
            0.0
        } else {
            spectral_norm(&(&self.g.matmul(gp.m.basis()) - &gp.angle))
        };
        let minus = if gm.dim() == 0 {
            0.0
        } else {
            spectral_norm(&(&self.g.adjoint().matmul(gm.m.basis()) - &gm.angle))
        };
        (plus, minus)
    }
}

/// `(I - M M†)^{+1/2}` restricted to the range where the defect exceeds the
/// floor; zero elsewhere.
fn defect_pinv_sqrt(m: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let n = m.rows();
    let d = (&CMatrix::identity(n) - &m.matmul(&m.adjoint())).hermitian_part();
    let eig = herm_eig(&d, tol)?;
    Ok(eig.apply_fn(|l| if l > DEFECT_FLOOR { 1.0 / l.sqrt() } else { 0.0 }))
}

/// Central completion of `[[a, r], [c, ?]]` for a contractive column
/// `[a; c]` and row `[a r]`.
fn central_fill(a: &CMatrix, r: &CMatrix, c: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    let (rows, cols) = (c.rows(), r.cols());
    if rows == 0 || cols == 0 || a.is_empty() {
        return Ok(CMatrix::zeros(rows, cols));
    }
    let col = CMatrix::vcat(a.cols(), &[a, c]);
    let row = CMatrix::hcat(a.rows(), &[a, r]);
    let mu = spectral_norm(&col).max(spectral_norm(&row));
    if mu == 0.0 {
        return Ok(CMatrix::zeros(rows, cols));
    }
    let (a, r, c) = (a.scale(1.0 / mu), r.scale(1.0 / mu), c.scale(1.0 / mu));
    // r = D_{a†} y and c = z D_a with y, z contractions
    let y = defect_pinv_sqrt(&a, tol)?.matmul(&r);
    let z = c.matmul(&defect_pinv_sqrt(&a.adjoint(), tol)?);
    Ok(z.matmul(&a.adjoint()).matmul(&y).scale(-mu))
}

/// Extends an orthogonal nonnegative/nonpositive pair to a maximal one via
/// the central contraction completion.
pub fn phillips_extend(gp: &GraphRep, gm: &GraphRep, tol: &Tolerance) -> Result<MaximalPair> {
    if gp.sign != Sign::Plus || gm.sign != Sign::Minus {
        return Err(Error::InvalidInput("expected a plus and a minus representation".into()));
    }
    if !gp.space.same_as(&gm.space) {
        return Err(Error::DimensionMismatch("graph representations in different spaces".into()));
    }
    let defect = compatibility_defect(gp, gm);
    if defect > tol.residual_tol {
        return Err(Error::Incompatible { defect });
    }
    let (p, q) = gp.frame.indices();
    let up = gp.m.basis();
    let um = gm.m.basis();
    let up_perp = null_basis(&up.adjoint(), tol);
    let um_perp = null_basis(&um.adjoint(), tol);

    // the corner is fixed twice; the two readings agree up to the defect
    let a = (&um.adjoint().matmul(&gp.angle) + &gm.angle.adjoint().matmul(up)).scale(0.5);
    let c = um_perp.adjoint().matmul(&gp.angle);
    let r = gm.angle.adjoint().matmul(&up_perp);
    let x = central_fill(&a, &r, &c, tol)?;

    let top = CMatrix::hcat(a.rows(), &[&a, &r]);
    let bottom = CMatrix::hcat(c.rows(), &[&c, &x]);
    let blocks = CMatrix::vcat(top.cols(), &[&top, &bottom]);
    let left = CMatrix::hcat(q, &[um, &um_perp]);
    let right = CMatrix::hcat(p, &[up, &up_perp]);
    let g = left.matmul(&blocks).matmul(&right.adjoint());

    let norm = spectral_norm(&g);
    let bound = 1.0 + 10.0 * tol.residual_tol;
    if norm > bound {
        return Err(Error::ContractionOverflow { norm, bound });
    }
    let (g_tilde_plus, g_tilde_minus) = graphs(&g, &gp.space, &gp.frame, tol)?;
    Ok(MaximalPair { g, g_tilde_plus, g_tilde_minus })
}

fn graphs(
    g: &CMatrix,
    space: &KreinSpace,
    frame: &Frame,
    tol: &Tolerance,
) -> Result<(Subspace, Subspace)> {
    let (p, q) = frame.indices();
    let plus = CMatrix::vcat(p, &[&CMatrix::identity(p), g]);
    let minus = CMatrix::vcat(q, &[&g.adjoint(), &CMatrix::identity(q)]);
    Ok((
        Subspace::span(space, &frame.undo(&plus), tol)?,
        Subspace::span(space, &frame.undo(&minus), tol)?,
    ))
}

/// `G̃₊ = {x + Gx}` and `G̃₋ = {G†y + y}` for a contraction `G: 𝒜₊ → |𝒜₋|`
/// in the split frame of `space`.
pub fn maximal_subspaces(
    g: &CMatrix,
    space: &KreinSpace,
    tol: &Tolerance,
) -> Result<(Subspace, Subspace)> {
    let frame = Frame::of(space, tol)?;
    let (p, q) = frame.indices();
    if g.shape() != (q, p) {
        return Err(Error::DimensionMismatch(format!(
            "angle operator is {}x{}, expected {q}x{p}",
            g.rows(),
            g.cols()
        )));
    }
    let norm = spectral_norm(g);
    if norm > 1.0 + tol.residual_tol {
        return Err(Error::NotContraction { norm });
    }
    graphs(g, space, &frame, tol)
}

/// `rank((I - G†G) U₊)` and `rank((I - GG†) U₋)`.
pub fn density_ranks(g: &CMatrix, gp: &GraphRep, gm: &GraphRep, tol: &Tolerance) -> (usize, usize) {
    let (q, p) = g.shape();
    let dp = &CMatrix::identity(p) - &g.adjoint().matmul(g);
    let dm = &CMatrix::identity(q) - &g.matmul(&g.adjoint());
    (rank(&dp.matmul(gp.m.basis()), tol), rank(&dm.matmul(gm.m.basis()), tol))
}
