//! Error type shared by every module of the core crate.

use alloc::string::String;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Failures reported by the numerical and combinatorial routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid rank {rank}: {reason}")]
    InvalidRank { rank: usize, reason: String },
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary (residual {residual:e} > {tolerance:e})")]
    NotUnitary { residual: f64, tolerance: f64 },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("non-finite objective value in restart {restart}")]
    NumericalFailure { restart: usize },
    #[error("net size {net_size:e} exceeds budget {budget:e}")]
    BudgetExceeded { net_size: f64, budget: f64 },
    #[error("domain error: {0}")]
    DomainError(String),
    #[error(
        "construction failed after {attempts} attempts \
         (best margins: subspace {best_subspace_margin:e}, complement {best_complement_margin:e})"
    )]
    ConstructionFailed {
        attempts: usize,
        best_subspace_margin: f64,
        best_complement_margin: f64,
    },
    #[error("ancilla slice vanishes (norm {norm:e})")]
    ZeroSlice { norm: f64 },
    #[error("singular least-squares update for party {party}")]
    SingularUpdate { party: usize },
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
}
