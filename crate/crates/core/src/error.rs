use thiserror::Error;

/// Errors surfaced by constructors and solvers.
///
/// `Validation` covers violated invariants and preconditions, `SizeGuard`
/// covers instances too large for an exact method, and `Infeasible` means a
/// recourse subproblem has no feasible action at all.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("no feasible recourse: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
