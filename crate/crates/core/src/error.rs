use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (max |M - M†| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("expectation value has imaginary part {imag:e}")]
    NonRealExpectation { imag: f64 },

    #[error("Pauli index {0} out of range 0..=3")]
    InvalidPauliIndex(u8),

    #[error("missing Hamiltonian parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("parameter `{name}` is not finite")]
    NonFiniteParameter { name: &'static str },

    #[error("invalid family weights: {0}")]
    InvalidWeights(String),

    #[error("positivity violated: v² = {v_squared} exceeds bridged product {bound}")]
    PositivityViolation { v_squared: f64, bound: f64 },

    #[error("family id {0} out of range 1..=6")]
    InvalidFamily(u8),

    #[error("mixed initial state kind {0} out of range 1..=6")]
    InvalidMixedKind(u8),

    #[error("square root of negative argument {radicand:e} in {formula}")]
    DomainError {
        formula: &'static str,
        radicand: f64,
    },

    #[error(
        "time scale calibration failed (best kappa {best_kappa}, residual {residual:e}): {reason}"
    )]
    CalibrationFailure {
        best_kappa: f64,
        residual: f64,
        reason: String,
    },

    #[error("pairing not claimed: {0}")]
    UnsupportedPairing(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("figure id {0} out of range 1..=8")]
    InvalidFigure(u8),

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
