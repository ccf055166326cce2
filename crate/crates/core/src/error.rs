use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: defect {defect:.3e} exceeds {bound:.3e}")]
    NotHermitian { defect: f64, bound: f64 },
    #[error("{solver} did not converge within {budget} rotations")]
    NoConvergence { solver: &'static str, budget: usize },
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.3e}")]
    NotPsd { eigenvalue: f64 },
    #[error("not a fundamental symmetry: {0}")]
    NotSymmetry(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("operator is not selfadjoint: defect {defect:.3e} exceeds {bound:.3e}")]
    NotSelfadjoint { defect: f64, bound: f64 },
    #[error("operator is not invertible")]
    NotInvertible,
    #[error("congruence is ill-conditioned: condition number {cond:.3e} exceeds {cap:.1e}")]
    IllConditioned { cond: f64, cap: f64 },
    #[error("operators are not congruent: indices {left:?} vs {right:?}")]
    NotCongruent { left: (usize, usize, usize), right: (usize, usize, usize) },
    #[error("subspace sum is not direct: smallest singular value {sigma_min:.3e}")]
    NotDirect { sigma_min: f64 },
    #[error("precondition failed: {}", .0.join("; "))]
    PreconditionFailed(Vec<String>),
    #[error("subspace is not {expected}")]
    NotSemidefinite { expected: &'static str },
    #[error("projection onto the {sign} component loses rank (sigma_min {sigma_min:.3e})")]
    DegenerateProjection { sign: &'static str, sigma_min: f64 },
    #[error("graph representations are not orthogonal: defect {defect:.3e}")]
    Incompatible { defect: f64 },
    #[error("assembled extension has norm {norm:.12} > {bound:.12}")]
    ContractionOverflow { norm: f64, bound: f64 },
    #[error("operator is not a contraction: norm {norm:.12}")]
    NotContraction { norm: f64 },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True when the input was well formed but violates a mathematical
    /// hypothesis of the requested operation.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. }
                | Error::NotPsd { .. }
                | Error::NotSelfadjoint { .. }
                | Error::NotInvertible
                | Error::IllConditioned { .. }
                | Error::NotCongruent { .. }
                | Error::NotDirect { .. }
                | Error::PreconditionFailed(_)
                | Error::NotSemidefinite { .. }
                | Error::DegenerateProjection { .. }
                | Error::Incompatible { .. }
                | Error::ContractionOverflow { .. }
                | Error::NotContraction { .. }
        )
    }
}
