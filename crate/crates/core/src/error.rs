use thiserror::Error;

use crate::subspace::SubspaceUnion;

/// Errors raised by the analysis library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive semi-definite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },

    #[error("basis columns are not orthonormal (deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),

    #[error("Kraus elements are not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("process {index} is not trace preserving")]
    ProcessNotTracePreserving { index: usize },

    #[error("Kraus elements are not trace non-increasing (largest eigenvalue of sum E^dag E is {largest:.6})")]
    NotTraceNonIncreasing { largest: f64 },

    #[error("measurement is incomplete (deviation {deviation:.3e})")]
    IncompleteMeasurement { deviation: f64 },

    #[error("density operator trace {trace} exceeds one")]
    TraceTooLarge { trace: f64 },

    #[error("initial state must have unit trace, found {trace}")]
    TraceNotOne { trace: f64 },

    #[error("state vector has zero norm")]
    ZeroVector,

    #[error("program needs at least one process")]
    NoProcesses,

    #[error("process index {index} out of range (program has {count} processes)")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("invalid schedule fragment: {0}")]
    InvalidFragment(String),

    #[error("diverging-state iteration did not stabilise within {iterations} iterations")]
    IterationCapExceeded {
        iterations: usize,
        /// The last two component sets, older first.
        last: Box<(SubspaceUnion, SubspaceUnion)>,
    },

    #[error("search space of {size} fragments exceeds the cap of {cap}")]
    SearchSpaceTooLarge { size: u128, cap: u128 },

    #[error("no process keeps the state inside the diverging set at step {step}")]
    NoDivergingStep { step: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
