use std::path::PathBuf;

use num_complex::Complex64;

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is singular to working precision ({0})")]
    Singular(String),

    #[error("pencil is singular for every value of s")]
    SingularPencil,

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("{s} lies on the branch cut of {function}")]
    BranchCut {
        function: &'static str,
        s: Complex64,
    },

    #[error("{function} has a pole at the origin")]
    PoleAtOrigin { function: &'static str },

    #[error("{0} is a pole of the approximation")]
    Pole(Complex64),

    #[error("support point {0} found inside the active sample set")]
    SupportInGrid(Complex64),

    #[error("sample grid exhausted after {0} support points")]
    GridExhausted(usize),

    #[error("values are not closed under conjugation: {0}")]
    NotConjugateClosed(String),

    #[error("duplicate support point or pole {0}")]
    Duplicate(Complex64),

    #[error("pole {pole} coincides with sample point")]
    PoleOnGrid { pole: Complex64 },

    #[error("C1 is singular; multiplication by s needs an invertible C1")]
    SingularC1,

    #[error("polynomial part would exceed degree two")]
    DegreeOverflow,

    #[error("state became non-finite or exceeded the divergence bound at step {step}")]
    Divergence { step: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix market parse error in {path}: {msg}")]
    MatrixMarket { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
