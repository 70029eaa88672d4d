use thiserror::Error;

use crate::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid spectral set: {0}")]
    InvalidSet(String),

    /// The requested pair of sets has no shift-parameter formula.
    #[error("unsupported set geometry: {0}")]
    UnsupportedGeometry(String),

    /// `(A - shift I)` is singular to working precision.
    #[error("shift {shift} collides with an eigenvalue (singular shifted solve)")]
    SingularShift { shift: C64 },

    #[error("points coincide: z[{i}] = w[{j}]")]
    CoincidentPoints { i: usize, j: usize },

    #[error("operator is not normal: {0}")]
    NotNormal(String),

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("matrix market: {0}")]
    MatrixMarket(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
