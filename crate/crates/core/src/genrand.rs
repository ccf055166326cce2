//! Seeded random instances: spaces, selfadjoint operators, congruences,
//! injective factors, `J`-unitaries and semidefinite subspaces.
//!
//! Every draw kind reads its own ChaCha8 stream, so adding draws of one kind
//! never shifts the values of another. Raw entries are complex Gaussians.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bkfact::SignatureFactorization;
use crate::densela::{gram_schmidt, herm_eig, spectral_norm, CMatrix, Tolerance, C64};
use crate::error::{Error, Result};
use crate::hermdex::Congruence;
use crate::krein::{KOperator, KreinSpace};

/// Largest dimension a configuration may request.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub seed: u64,
    /// Inclusive dimension range.
    pub dim_range: (usize, usize),
    /// Cap on condition numbers of invertible factors; also bounds the
    /// ratio between the largest and the smallest nonzero eigenvalue of
    /// generated operators.
    pub cond_cap: f64,
    /// Probability of forcing a nontrivial kernel.
    pub kernel_prob: f64,
}

impl GenConfig {
    pub fn new(seed: u64) -> Self {
        Self { seed, dim_range: (1, 8), cond_cap: 1e3, kernel_prob: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.dim_range;
        if lo > hi || hi > MAX_DIM {
            return Err(Error::InvalidInput(format!(
                "dimension range [{lo}, {hi}] must be ordered and within [0, {MAX_DIM}]"
            )));
        }
        if !(self.cond_cap >= 1.0 && self.cond_cap.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "cond_cap {} must be at least 1",
                self.cond_cap
            )));
        }
        if !(0.0..=1.0).contains(&self.kernel_prob) {
            return Err(Error::InvalidInput(format!(
                "kernel_prob {} outside [0, 1]",
                self.kernel_prob
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
enum Kind {
    Space,
    Operator,
    Congruence,
    Factor,
    Unitary,
    Subspace,
}

const KINDS: usize = 6;

/// Owns one stream per draw kind.
#[derive(Debug, Clone)]
pub struct Generator {
    cfg: GenConfig,
    streams: Vec<ChaCha8Rng>,
}

impl Generator {
    pub fn new(cfg: GenConfig) -> Result<Self> {
        Self::for_case(cfg, 0)
    }

    /// Independent streams for case `case` of a numbered batch.
    pub fn for_case(cfg: GenConfig, case: u64) -> Result<Self> {
        cfg.validate()?;
        let streams = (0..KINDS as u64)
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(case.wrapping_mul(KINDS as u64).wrapping_add(k));
                rng
            })
            .collect();
        Ok(Self { cfg, streams })
    }

    pub fn config(&self) -> &GenConfig {
        &self.cfg
    }

    fn rng(&mut self, kind: Kind) -> &mut ChaCha8Rng {
        &mut self.streams[kind as usize]
    }

    fn dim(&mut self) -> usize {
        let (lo, hi) = self.cfg.dim_range;
        self.rng(Kind::Space).random_range(lo..=hi)
    }

    /// Random space with dimension in `dim_range` and a uniform split.
    pub fn space(&mut self) -> Result<KreinSpace> {
        let n = self.dim();
        self.space_of_dim(n)
    }

    /// Random space of dimension `n` with a uniform split.
    pub fn space_of_dim(&mut self, n: usize) -> Result<KreinSpace> {
        let p = self.rng(Kind::Space).random_range(0..=n);
        self.space_with(p, n - p)
    }

    /// Uniform `(p, q)` with `p + q ≤ n`.
    pub fn signature_within(&mut self, n: usize) -> (usize, usize) {
        let rng = self.rng(Kind::Space);
        let m = rng.random_range(0..=n);
        let p = rng.random_range(0..=m);
        (p, m - p)
    }

    /// `J = U† diag(I_p, -I_q) U` for a random unitary `U`.
    pub fn space_with(&mut self, p: usize, q: usize) -> Result<KreinSpace> {
        let u = random_unitary(self.rng(Kind::Space), p + q)?;
        let j = u.adjoint().matmul(&KreinSpace::split(p, q).j().matmul(&u));
        KreinSpace::new(j.hermitian_part(), &Tolerance::default())
    }

    /// A square matrix with a Hermitian `J`-product whose nonzero
    /// eigenvalues stay within `cond_cap` of the largest one.
    fn hermitian(&mut self, n: usize, force_kernel: bool) -> Result<CMatrix> {
        let cap = self.cfg.cond_cap;
        let rng = self.rng(Kind::Operator);
        let m = gaussian(rng, n, n).hermitian_part();
        let kernel = if force_kernel && n > 0 { rng.random_range(1..=n.div_ceil(2)) } else { 0 };
        if n == 0 {
            return Ok(m);
        }
        let eig = herm_eig(&m, &Tolerance::default())?;
        let top = eig.norm();
        let mut by_size: Vec<usize> = (0..n).collect();
        by_size.sort_by(|&a, &b| eig.eigenvalues[a].abs().total_cmp(&eig.eigenvalues[b].abs()));
        let mut lam = eig.eigenvalues.clone();
        for (rank, &i) in by_size.iter().enumerate() {
            if rank < kernel {
                lam[i] = 0.0;
            } else if lam[i].abs() < top / cap {
                lam[i] = (top / cap).copysign(lam[i]);
            }
        }
        let v = &eig.eigenvectors;
        let vl = CMatrix::from_fn(n, n, |r, c| v[(r, c)] * lam[c]);
        Ok(vl.matmul(&v.adjoint()).hermitian_part())
    }

    /// `C = J M` with `M` Hermitian; with probability `kernel_prob` at least
    /// one eigenvalue of `M` is zeroed.
    pub fn selfadjoint(&mut self, h: &KreinSpace) -> Result<KOperator> {
        let force = self.rng(Kind::Operator).random::<f64>() < self.cfg.kernel_prob;
        let m = self.hermitian(h.dim(), force)?;
        KOperator::endo(h.clone(), h.j().matmul(&m))
    }

    /// Selfadjoint with trivial kernel, regardless of `kernel_prob`.
    pub fn selfadjoint_invertible(&mut self, h: &KreinSpace) -> Result<KOperator> {
        let m = self.hermitian(h.dim(), false)?;
        KOperator::endo(h.clone(), h.j().matmul(&m))
    }

    /// `U diag(σ) V†` with `log σ` uniform in `[-½ log cap, ½ log cap]`.
    fn conditioned(&mut self, kind: Kind, rows: usize, cols: usize) -> Result<CMatrix> {
        let half = 0.5 * self.cfg.cond_cap.ln();
        let rng = self.rng(kind);
        let u = random_unitary(rng, rows)?;
        let v = random_unitary(rng, cols)?;
        let sigma: Vec<f64> =
            (0..cols).map(|_| (rng.random_range(-1.0..=1.0) * half).exp()).collect();
        let us = CMatrix::from_fn(rows, cols, |i, j| u[(i, j)] * sigma[j]);
        Ok(us.matmul(&v.adjoint()))
    }

    /// Invertible `X: ℋ → 𝒦` with condition number at most `cond_cap`.
    pub fn invertible(&mut self, h: &KreinSpace, k: &KreinSpace) -> Result<Congruence> {
        if h.dim() != k.dim() {
            return Err(Error::DimensionMismatch(
                "invertible map between unequal dimensions".into(),
            ));
        }
        let x = self.conditioned(Kind::Congruence, h.dim(), h.dim())?;
        Congruence::new(KOperator::new(h.clone(), k.clone(), x)?)
    }

    /// Full-column-rank `A: 𝒜 → ℋ` with singular values in
    /// `[cond_cap^{-1/2}, cond_cap^{1/2}]`.
    pub fn injective_factor(&mut self, a: &KreinSpace, h: &KreinSpace) -> Result<KOperator> {
        if a.dim() > h.dim() {
            return Err(Error::DimensionMismatch(format!(
                "no injective map from dimension {} into {}",
                a.dim(),
                h.dim()
            )));
        }
        let m = self.conditioned(Kind::Factor, h.dim(), a.dim())?;
        KOperator::new(a.clone(), h.clone(), m)
    }

    /// `exp(J S)` with `S` skew-Hermitian of norm at most 2: satisfies
    /// `U* U = I` in `a`.
    pub fn j_unitary(&mut self, a: &KreinSpace) -> Result<KOperator> {
        let n = a.dim();
        let rng = self.rng(Kind::Unitary);
        let g = gaussian(rng, n, n);
        let s = (&g - &g.adjoint()).scale(0.5);
        let scale = rng.random_range(0.0..=2.0);
        let norm = spectral_norm(&s);
        let s = if norm > 0.0 { s.scale(scale / norm) } else { s };
        KOperator::endo(a.clone(), expm(&a.j().matmul(&s)))
    }

    /// A `q × p` contraction with norm uniform in `[0.2, 1]`.
    pub fn contraction(&mut self, q: usize, p: usize) -> CMatrix {
        let rng = self.rng(Kind::Subspace);
        let g = gaussian(rng, q, p);
        let target = rng.random_range(0.2..=1.0);
        let norm = spectral_norm(&g);
        if norm > 0.0 {
            g.scale(target / norm)
        } else {
            g
        }
    }

    /// `basis · R` for a Gaussian `R` with a random number of columns in
    /// `0..=basis.cols()`.
    pub fn sub_span(&mut self, basis: &CMatrix) -> CMatrix {
        let rng = self.rng(Kind::Subspace);
        let k = rng.random_range(0..=basis.cols());
        basis.matmul(&gaussian(rng, basis.cols(), k))
    }

    /// `C = T† J_A T` for a Hilbert-space `C` with trivial kernel:
    /// `T = W L |Λ|^{1/2} V†` with `W` unitary, `L` a `J₀`-unitary and
    /// `J_A = W J₀ W†`.
    pub fn signature_factorization(&mut self, c: &KOperator) -> Result<SignatureFactorization> {
        let n = c.domain().dim();
        let eig = herm_eig(&c.matrix().hermitian_part(), &Tolerance::default())?;
        let p = eig.eigenvalues.iter().filter(|&&l| l > 0.0).count();
        let mut order: Vec<usize> = (n - p..n).collect();
        order.extend(0..n - p);
        let v = eig.eigenvectors.select_columns(&order);
        let t0 = CMatrix::from_fn(n, n, |i, j| {
            v[(j, i)].conj() * eig.eigenvalues[order[i]].abs().sqrt()
        });
        let split = KreinSpace::split(p, n - p);
        let l = self.j_unitary(&split)?;
        let w = random_unitary(self.rng(Kind::Unitary), n)?;
        let j_a = w.matmul(split.j()).matmul(&w.adjoint()).hermitian_part();
        let t = w.matmul(l.matrix()).matmul(&t0);
        SignatureFactorization::new(j_a, t)
    }
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> Result<CMatrix> {
    gram_schmidt(&gaussian(rng, n, n))
}

/// Matrix exponential by scaling and squaring with a Taylor series.
pub fn expm(m: &CMatrix) -> CMatrix {
    let n = m.rows();
    let norm = m.norm_fro();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let a = m.scale(0.5f64.powi(squarings as i32));
    let mut term = CMatrix::identity(n);
    let mut sum = CMatrix::identity(n);
    for k in 1..=18 {
        term = term.matmul(&a).scale(1.0 / k as f64);
        sum = &sum + &term;
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

pub fn gen_space(cfg: &GenConfig) -> Result<KreinSpace> {
    Generator::new(*cfg)?.space()
}

pub fn gen_selfadjoint(cfg: &GenConfig, h: &KreinSpace) -> Result<KOperator> {
    Generator::new(*cfg)?.selfadjoint(h)
}

pub fn gen_invertible(cfg: &GenConfig, h: &KreinSpace, k: &KreinSpace) -> Result<Congruence> {
    Generator::new(*cfg)?.invertible(h, k)
}

pub fn gen_injective_factor(cfg: &GenConfig, a: &KreinSpace, h: &KreinSpace) -> Result<KOperator> {
    Generator::new(*cfg)?.injective_factor(a, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densela::null_basis;
    use crate::hermdex::hermitian_indices;
    use crate::krein::is_selfadjoint;

    fn cfg(seed: u64) -> GenConfig {
        GenConfig::new(seed)
    }

    #[test]
    fn fixed_dimension_and_empty_space() {
        let two = GenConfig { dim_range: (2, 2), ..cfg(7) };
        assert_eq!(gen_space(&two).unwrap().dim(), 2);
        let zero = GenConfig { dim_range: (0, 0), ..cfg(7) };
        assert_eq!(gen_space(&zero).unwrap().dim(), 0);
    }

    #[test]
    fn same_seed_same_bits() {
        let a = gen_space(&cfg(42)).unwrap();
        let b = gen_space(&cfg(42)).unwrap();
        assert_eq!(a.j().as_slice(), b.j().as_slice());
        let c1 = gen_selfadjoint(&cfg(42), &a).unwrap();
        let c2 = gen_selfadjoint(&cfg(42), &a).unwrap();
        assert_eq!(c1.matrix().as_slice(), c2.matrix().as_slice());
    }

    #[test]
    fn streams_do_not_interfere() {
        let mut g1 = Generator::new(cfg(3)).unwrap();
        let mut g2 = Generator::new(cfg(3)).unwrap();
        let h = KreinSpace::hilbert(3);
        let _ = g1.selfadjoint(&h).unwrap();
        assert_eq!(g1.space().unwrap().j().as_slice(), g2.space().unwrap().j().as_slice());
    }

    #[test]
    fn invalid_configs() {
        assert!(GenConfig { dim_range: (3, 2), ..cfg(0) }.validate().is_err());
        assert!(GenConfig { dim_range: (0, 65), ..cfg(0) }.validate().is_err());
        assert!(GenConfig { cond_cap: 0.5, ..cfg(0) }.validate().is_err());
        assert!(GenConfig { kernel_prob: 1.5, ..cfg(0) }.validate().is_err());
    }

    #[test]
    fn selfadjoint_and_forced_kernel() {
        let tol = Tolerance::default();
        let mut g = Generator::new(GenConfig { kernel_prob: 1.0, ..cfg(9) }).unwrap();
        for _ in 0..20 {
            let h = g.space().unwrap();
            let c = g.selfadjoint(&h).unwrap();
            assert!(is_selfadjoint(&c, &tol));
            assert!(hermitian_indices(&c, &tol).unwrap().h_zero >= 1);
        }
    }

    #[test]
    fn invertible_respects_the_cap() {
        let tol = Tolerance::default();
        let mut g = Generator::new(GenConfig { cond_cap: 50.0, ..cfg(11) }).unwrap();
        for _ in 0..20 {
            let h = g.space().unwrap();
            let x = g.invertible(&h, &h).unwrap();
            assert!(x.condition() <= 50.0 * (1.0 + 1e-10));
            let id = x.matrix().matmul(x.inverse_matrix());
            let err = spectral_norm(&(&id - &CMatrix::identity(h.dim())));
            assert!(err <= tol.residual_tol);
        }
    }

    #[test]
    fn injective_factors() {
        let tol = Tolerance::default();
        let mut g = Generator::new(cfg(5)).unwrap();
        let h = KreinSpace::hilbert(5);
        for p in 0..=3 {
            let a = g.space_with(p, 2).unwrap();
            let f = g.injective_factor(&a, &h).unwrap();
            assert_eq!(null_basis(f.matrix(), &tol).cols(), 0);
        }
        let f = g.injective_factor(&KreinSpace::hilbert(0), &h).unwrap();
        assert_eq!(f.matrix().shape(), (5, 0));
    }

    #[test]
    fn j_unitary_preserves_the_form() {
        let mut g = Generator::new(cfg(8)).unwrap();
        let a = g.space_with(2, 3).unwrap();
        let u = g.j_unitary(&a).unwrap();
        let prod = u.k_adjoint().matrix().matmul(u.matrix());
        assert!(spectral_norm(&(&prod - &CMatrix::identity(5))) < 1e-10);
    }

    #[test]
    fn expm_of_diagonal() {
        let d = CMatrix::from_real_diag(&[1.0, -2.0, 0.0]);
        let e = expm(&d);
        for (i, want) in [1f64.exp(), (-2f64).exp(), 1.0].iter().enumerate() {
            assert!((e[(i, i)].re - want).abs() < 1e-13 * want.max(1.0));
        }
    }

    #[test]
    fn every_split_appears() {
        let mut seen = std::collections::HashSet::new();
        let mut g = Generator::new(GenConfig { dim_range: (1, 8), ..cfg(2024) }).unwrap();
        for _ in 0..1000 {
            seen.insert(g.space().unwrap().indices());
        }
        // all (p, q) with 1 ≤ p + q ≤ 8
        assert_eq!(seen.len(), (1..=8).map(|n| n + 1).sum::<usize>());
    }
}
