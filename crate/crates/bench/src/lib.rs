//! Shared inputs for the benchmarks.

use krein_core::phillips::{graph_rep, maximal_subspaces, Sign};
use krein_core::{GenConfig, Generator, GraphRep, KOperator, KreinSpace, Subspace, Tolerance};

pub fn generator(seed: u64) -> Generator {
    Generator::new(GenConfig { seed, dim_range: (1, 64), cond_cap: 1e3, kernel_prob: 0.3 })
        .expect("valid config")
}

/// A selfadjoint operator on a random space of dimension `n`.
pub fn selfadjoint(n: usize, seed: u64) -> KOperator {
    let mut g = generator(seed);
    let h = g.space_of_dim(n).expect("dimension in range");
    g.selfadjoint(&h).expect("draw")
}

/// Half-dimensional sub-spans of a maximal pair in `split(p, q)`.
pub fn graph_pair(p: usize, q: usize, seed: u64) -> (GraphRep, GraphRep) {
    let tol = Tolerance::default();
    let mut g = generator(seed);
    let a = KreinSpace::split(p, q);
    let (plus, minus) = maximal_subspaces(&g.contraction(q, p), &a, &tol).expect("contraction");
    let half = |g: &mut Generator, s: &Subspace| {
        let keep = s.basis().select_columns(&(0..s.dim().div_ceil(2)).collect::<Vec<_>>());
        Subspace::span(&a, &g.sub_span(&keep), &tol).expect("span")
    };
    let sp = half(&mut g, &plus);
    let sm = half(&mut g, &minus);
    (
        graph_rep(&sp, Sign::Plus, &tol).expect("nonnegative"),
        graph_rep(&sm, Sign::Minus, &tol).expect("nonpositive"),
    )
}
