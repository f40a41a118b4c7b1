use thiserror::Error;

/// Errors raised by the numerical routines and input loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (max |m - m^H| = {0:e})")]
    NotHermitian(f64),

    #[error("Jacobi eigensolver did not converge in {sweeps} sweeps (off-diagonal {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("vector is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("invalid probability vector: {0}")]
    InvalidProbability(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("Kraus operators violate completeness (residual {0:e})")]
    Completeness(f64),

    #[error("basis is not orthonormal and complete (residual {0:e})")]
    InvalidBasis(f64),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("matrix is singular or not positive definite (min eigenvalue {0:e})")]
    Singular(f64),

    #[error("imaginary residue {0:e} on a quantity that must be real")]
    ImaginaryResidue(f64),

    #[error("closed form disagrees with simulation: {0}")]
    ClosedFormMismatch(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("malformed channel spec at `{path}`: {message}")]
    SpecParse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
