use thiserror::Error;

/// Errors produced by validation and dimension checks across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    DimensionMismatch {
        context: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix entries must be finite (found NaN or infinity)")]
    NonFiniteEntry,

    #[error("entry buffer holds {len} entries, expected {rows}x{cols} = {expected}")]
    BadEntryCount { rows: usize, cols: usize, len: usize, expected: usize },

    #[error("matrix is not Hermitian: max asymmetry {asymmetry:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    #[error("matrix is not unitary: max |U^dag U - I| entry is {deviation:.3e} (tolerance {tolerance:.3e})")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("eigensolver did not converge: off-diagonal mass {off_diagonal:.3e} after {sweeps} sweeps")]
    EigenConvergence { off_diagonal: f64, sweeps: usize },

    #[error("invalid density matrix: {reason}")]
    InvalidState { reason: String },

    #[error("invalid pure state: amplitude norm deviates from 1 by {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("invalid bipartition: {reason}")]
    InvalidBipartition { reason: String },

    #[error("Kraus completeness violated: max |sum K^dag K - I| entry is {deviation:.3e} (tolerance {tolerance:.3e})")]
    KrausIncomplete { deviation: f64, tolerance: f64 },

    #[error("weights must form a probability vector: {reason}")]
    InvalidWeights { reason: String },

    #[error("joint-space distance not preserved by the dilation unitary: input {gamma_in:.6e} vs output {gamma_out:.6e}")]
    GammaDrift { gamma_in: f64, gamma_out: f64 },

    #[error("unknown scenario '{name}' (expected one of: bell, ghz, w)")]
    UnknownScenario { name: String },
}

pub type Result<T> = std::result::Result<T, Error>;
