use std::path::PathBuf;

use num_complex::Complex64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Root finder did not reach the residual tolerance.
    #[error("root finder did not converge after {iterations} sweeps (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// Numerator and denominator both vanish at a finite point.
    #[error("indeterminate 0/0 evaluation at {at}")]
    Indeterminate { at: Complex64 },

    #[error("affine map a*z + b needs a != 0")]
    DegenerateAffine,

    #[error("invalid Möbius map: {0}")]
    InvalidMobius(&'static str),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// The derivative in the step's denominator vanished (or f itself has a pole).
    #[error("step denominator vanishes at {at}")]
    PoleEncountered { at: Complex64 },

    #[error("map has non-real coefficients (max imaginary part {max_imag:e})")]
    NotRealCoefficients { max_imag: f64 },

    #[error("beta = 1/4 sends a free critical point onto a pole")]
    DegenerateBeta,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("map spec: {0}")]
    Spec(String),
}

impl Error {
    /// Process exit status: 1 for bad input, 2 for numerical failure, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonConvergence { .. } | Error::Indeterminate { .. } | Error::PoleEncountered { .. } => 2,
            Error::Io { .. } => 3,
            Error::DegenerateAffine
            | Error::InvalidMobius(_)
            | Error::InvalidParameters(_)
            | Error::NotRealCoefficients { .. }
            | Error::DegenerateBeta
            | Error::Spec(_) => 1,
        }
    }
}
