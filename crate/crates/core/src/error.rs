use thiserror::Error;

/// Errors raised by the spin-system routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpinError {
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("bad arity: {0}")]
    BadArity(String),

    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("algebra closure did not stabilise within {cap} rounds")]
    CapExceeded { cap: usize },

    #[error("Choi matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    ChoiNotPsd { min_eig: f64 },

    #[error("isometries do not form a partition of unity (residual {residual:.3e})")]
    PartitionOfUnityViolated { residual: f64 },

    #[error("matrix is not in the operator system span (residual {residual:.3e})")]
    NotInSpan { residual: f64 },

    #[error("invalid matrix data: {0}")]
    InvalidData(String),
}

pub type Result<T> = std::result::Result<T, SpinError>;
