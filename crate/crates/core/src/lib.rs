//! Low-rank solvers for Sylvester matrix equations `AX - XB = F` whose
//! right-hand side has rapidly decaying singular values.
//!
//! The crate is organised bottom-up:
//!
//! - [`factors`] and [`svd`]: low-rank factor algebra (`W D Y*`), recompression
//!   and the dense one-sided Jacobi SVD used as the reference everywhere.
//! - [`spectra`]: spectral sets, Zolotarev numbers, elliptic functions and ADI
//!   shift parameters.
//! - [`adi`]: dense ADI, factored ADI, Smith's method and the
//!   factored-independent ADI (FI-ADI) solver.
//! - [`bounds`]: explicit singular value and ε-rank bounds.
//! - [`structured`]: Cauchy-like generators, the Hadamard closed form and the
//!   circulant sharpness construction.
//! - [`poisson`]: a finite-difference low-rank Poisson solver with a fast sine
//!   transform direct solver as reference.
//! - [`oracle`], [`suite`], [`mtx`]: dense reference solvers, random test
//!   problems and Matrix Market I/O.
//!
//! All scalars are `Complex<f64>`; real data is embedded with zero imaginary
//! part.

pub mod adi;
pub mod bounds;
pub mod error;
pub mod factors;
pub mod mtx;
pub mod oracle;
pub mod poisson;
pub mod spectra;
pub mod structured;
pub mod suite;
pub mod svd;

pub use error::{Error, Result};
pub use factors::{FactoredRhs, LowRankFactors};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex column-major matrix.
pub type CMat = nalgebra::DMatrix<C64>;

pub(crate) fn c64(re: f64) -> C64 {
    C64::new(re, 0.0)
}
