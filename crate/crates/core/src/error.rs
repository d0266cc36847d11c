use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain of a formula.
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("radial functions live on different grids")]
    GridMismatch,

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("normalization mismatch: expected {expected}, integrated {actual}")]
    Normalization { expected: f64, actual: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(
        "SCF for Z={z} did not converge after {iterations} iterations \
         (last energy {last_energy:.10}, energy change {energy_change:.3e}, residual {residual:.3e})"
    )]
    NotConverged {
        z: u32,
        iterations: usize,
        last_energy: f64,
        energy_change: f64,
        residual: f64,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("momentum transform of {orbital} lost norm: {norm_in} -> {norm_out}")]
    Parseval {
        orbital: String,
        norm_in: f64,
        norm_out: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        what,
        detail: detail.into(),
    }
}
