//! Selfadjoint operators on finite-dimensional Kreĭn spaces: hermitian
//! indices, congruence canonical forms, C-orthogonal decompositions,
//! Bognár-Krámli factorizations `C = AA*` and the graph (angle operator)
//! machinery for maximal semidefinite subspaces.
//!
//! Spaces are coordinate spaces `ℂⁿ` with a fundamental symmetry `J`; the
//! indefinite inner product is `⟨f, g⟩ = g† J f`.

pub mod bkfact;
pub mod decomp;
pub mod densela;
pub mod error;
pub mod genrand;
pub mod hermdex;
pub mod io;
pub mod krein;
pub mod phillips;
pub mod suite;

pub use bkfact::{BKFactorization, ContainedSpace, SignatureFactorization};
pub use decomp::{Decomposition, DecompositionReport};
pub use densela::{CMatrix, Tolerance, C64};
pub use error::{Error, Result};
pub use genrand::{GenConfig, Generator};
pub use hermdex::{CanonicalForm, Congruence};
pub use krein::{IndexTriple, KOperator, KreinSpace, Subspace, SubspaceClass};
pub use phillips::{GraphRep, MaximalPair, Sign};
