use alloc::boxed::Box;

use crate::iterations::IterationLog;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (relative defect {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("matrix is exactly singular (pivot {index})")]
    ExactlySingular { index: usize },
    #[error("pencil is not self-adjoint in the given inner product (residual {residual:e})")]
    NotSelfAdjoint { residual: f64 },
    #[error("no invertible linear combination of M and N was found")]
    SingularPencilFamily,
    #[error("Nx vanishes in the P-norm")]
    NInKernel,
    #[error("(Mx, Nx)_P vanishes; the phase factor is undefined")]
    PhaseUndefined,
    #[error("mu = {mu} is at the quotient-function discontinuity rq = {rq}")]
    AtDiscontinuity { mu: f64, rq: f64 },
    #[error("quotient iteration did not converge in {} iterations", .0.iterations)]
    NonConvergence(Box<IterationLog>),
    #[error("(Ax, Bx)_P vanished at iteration {iteration}; restart from a different vector")]
    PhaseBreakdown { iteration: usize },
    #[error("shift makes M - zeta N singular")]
    SingularShift,
    #[error("eigenvalue of the reformulated pencil is zero; the original eigenvalue is infinite")]
    InfiniteEigenvalue,
    #[error("descent direction is negligible; x is stationary")]
    DirectionNegligible,
    #[error("deflation removed the whole vector")]
    DeflationCollapse,
    #[error("generator facts disagree with the oracle (worst relative deviation {worst:e})")]
    FactsDisagree { worst: f64 },
    #[error("zero vector")]
    ZeroVector,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
