use thiserror::Error;

use crate::channel::SpectralReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix has a non-finite entry")]
    NonFinite,

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("not a density matrix: {0}")]
    InvalidDensity(String),

    #[error("empty Kraus family")]
    EmptyFamily,

    #[error("fixed space is degenerate: eigenvalue 1 has multiplicity {0}")]
    DegenerateFixedPoint(usize),

    #[error("no eigenvalue within {tol:.1e} of 1 (closest distance {distance:.3e})")]
    NoUnitEigenvalue { distance: f64, tol: f64 },

    #[error("channel is not ergodic")]
    NotErgodic(Box<SpectralReport>),

    #[error("channel is ergodic but not mixing")]
    NotMixing(Box<SpectralReport>),

    #[error("no ergodicity certificate: Tr(kappa) = {0:.3e}")]
    NoErgodicityCertificate(f64),

    #[error("sphere search needs at least one grid point")]
    EmptySearchGrid,

    #[error("parameter {name} = {value} outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },

    #[error("superoperator does not match the closed form it was paired with (deviation {0:.3e})")]
    ClosedFormMismatch(f64),

    #[error("{what} cap exceeded: {required} > {cap}")]
    CapExceeded {
        what: &'static str,
        required: usize,
        cap: usize,
    },

    #[error("degenerate chain: normalization {0:.3e}")]
    DegenerateNormalization(f64),

    #[error("chain violates the consistency identity (max violation {0:.3e})")]
    NotProjective(f64),

    #[error("transfer channel is not trace preserving (violation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("brute-force and transfer evaluations disagree by {0:.3e}")]
    MethodDisagreement(f64),

    #[error("expectation value is not real (imaginary part {0:.3e})")]
    NotReal(f64),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
