//! Factored matrices `L M R*` and factored right-hand sides.

use std::ops::Range;

use nalgebra::DVector;

use crate::svd::dense_svd;
use crate::{c64, CMat, Error, Result, C64};

/// Singular values below this multiple of machine epsilon (relative to the
/// largest) are treated as zero by [`LowRankFactors::compress`].
pub const COMPRESS_FLOOR: f64 = 64.0 * f64::EPSILON;

/// The matrix `left · middle · right*`.
///
/// `middle` is square; ADI produces it diagonal or block diagonal. A rank-0
/// value represents the zero matrix of its shape.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankFactors {
    left: CMat,
    middle: CMat,
    right: CMat,
}

impl LowRankFactors {
    pub fn new(left: CMat, middle: CMat, right: CMat) -> Result<Self> {
        let t = left.ncols();
        if middle.nrows() != t || middle.ncols() != t || right.ncols() != t {
            return Err(Error::Shape(format!(
                "left {}x{}, middle {}x{}, right {}x{}",
                left.nrows(),
                left.ncols(),
                middle.nrows(),
                middle.ncols(),
                right.nrows(),
                right.ncols()
            )));
        }
        Ok(Self { left, middle, right })
    }

    /// Factors with a diagonal middle.
    pub fn from_diagonal(left: CMat, diag: &[C64], right: CMat) -> Result<Self> {
        let middle = CMat::from_diagonal(&DVector::from_column_slice(diag));
        Self::new(left, middle, right)
    }

    pub fn zero(m: usize, n: usize) -> Self {
        Self { left: CMat::zeros(m, 0), middle: CMat::zeros(0, 0), right: CMat::zeros(n, 0) }
    }

    pub fn nrows(&self) -> usize {
        self.left.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.right.nrows()
    }

    /// Number of columns `t` in the factors (an upper bound on the rank).
    pub fn rank(&self) -> usize {
        self.left.ncols()
    }

    pub fn left(&self) -> &CMat {
        &self.left
    }

    pub fn middle(&self) -> &CMat {
        &self.middle
    }

    pub fn right(&self) -> &CMat {
        &self.right
    }

    pub fn into_parts(self) -> (CMat, CMat, CMat) {
        (self.left, self.middle, self.right)
    }

    pub fn materialize(&self) -> CMat {
        if self.rank() == 0 {
            return CMat::zeros(self.nrows(), self.ncols());
        }
        (&self.left * &self.middle) * self.right.adjoint()
    }

    /// Frobenius norm from the Gram matrices: `tr(LᴴL · M · RᴴR · Mᴴ)`.
    pub fn frob_norm(&self) -> f64 {
        if self.rank() == 0 {
            return 0.0;
        }
        let gl = self.left.adjoint() * &self.left;
        let gr = self.right.adjoint() * &self.right;
        let p = gl * &self.middle * gr * self.middle.adjoint();
        p.trace().re.max(0.0).sqrt()
    }

    /// Appends the columns of `other`, giving `self + other` with a block
    /// diagonal middle.
    pub fn concat(&self, other: &LowRankFactors) -> Result<LowRankFactors> {
        if self.nrows() != other.nrows() || self.ncols() != other.ncols() {
            return Err(Error::Shape(format!(
                "cannot add {}x{} and {}x{} factors",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )));
        }
        let (t1, t2) = (self.rank(), other.rank());
        let mut left = CMat::zeros(self.nrows(), t1 + t2);
        left.columns_mut(0, t1).copy_from(&self.left);
        left.columns_mut(t1, t2).copy_from(&other.left);
        let mut right = CMat::zeros(self.ncols(), t1 + t2);
        right.columns_mut(0, t1).copy_from(&self.right);
        right.columns_mut(t1, t2).copy_from(&other.right);
        let mut middle = CMat::zeros(t1 + t2, t1 + t2);
        middle.view_mut((0, 0), (t1, t1)).copy_from(&self.middle);
        middle.view_mut((t1, t1), (t2, t2)).copy_from(&other.middle);
        LowRankFactors::new(left, middle, right)
    }

    pub fn scale(&self, s: C64) -> LowRankFactors {
        LowRankFactors { left: self.left.clone(), middle: &self.middle * s, right: self.right.clone() }
    }

    /// Diagonal of the middle factor as reals, for compressed factors.
    pub fn weights(&self) -> Vec<f64> {
        self.middle.diagonal().iter().map(|z| z.re).collect()
    }

    /// Recompression: `L M = Q_z R_z`, `R = Q_y R_y`, truncated SVD of
    /// `R_z R_y*`. Trailing singular values `<= max(tol, COMPRESS_FLOOR)·s₁`
    /// are dropped.
    ///
    /// The result has orthonormal outer factors and a positive nonincreasing
    /// diagonal middle.
    pub fn compress(&self, tol: f64) -> Result<LowRankFactors> {
        if !(tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("compression tolerance {tol}")));
        }
        let (m, n) = (self.nrows(), self.ncols());
        if self.rank() == 0 || m == 0 || n == 0 {
            return Ok(LowRankFactors::zero(m, n));
        }
        let z = &self.left * &self.middle;
        let (qz, rz) = thin_qr(z);
        let (qy, ry) = thin_qr(self.right.clone());
        let core = &rz * ry.adjoint();
        let svd = dense_svd(&core)?;
        let s1 = svd.values[0];
        if !(s1 > 0.0) {
            return Ok(LowRankFactors::zero(m, n));
        }
        let cut = tol.max(COMPRESS_FLOOR) * s1;
        let keep = svd.values.iter().take_while(|&&s| s > cut).count();
        let left = &qz * svd.u.columns(0, keep);
        let right = &qy * svd.v.columns(0, keep);
        let diag: Vec<C64> = svd.values[..keep].iter().map(|&s| c64(s)).collect();
        LowRankFactors::from_diagonal(left, &diag, right)
    }
}

/// Skinny QR `A = Q R` with `Q` having `min(rows, cols)` orthonormal columns.
pub(crate) fn thin_qr(a: CMat) -> (CMat, CMat) {
    let qr = nalgebra::linalg::QR::new(a);
    (qr.q(), qr.r())
}

/// `F = Σ σ_i u_i v_i*` with `σ` nonincreasing and `‖u_i‖‖v_i‖ = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactoredRhs {
    left_vectors: CMat,
    weights: Vec<f64>,
    right_vectors: CMat,
}

const UNIT_TOL: f64 = 1e-10;

impl FactoredRhs {
    pub fn new(left_vectors: CMat, weights: Vec<f64>, right_vectors: CMat) -> Result<Self> {
        let rho = weights.len();
        if left_vectors.ncols() != rho || right_vectors.ncols() != rho {
            return Err(Error::Shape(format!(
                "{} weights but {} left and {} right vectors",
                rho,
                left_vectors.ncols(),
                right_vectors.ncols()
            )));
        }
        if weights.iter().any(|w| !w.is_finite())
            || left_vectors.iter().chain(right_vectors.iter()).any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NonFinite("right-hand side factors"));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidArgument("negative weight".into()));
        }
        if weights.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument("weights must be nonincreasing".into()));
        }
        for i in 0..rho {
            let p = left_vectors.column(i).norm() * right_vectors.column(i).norm();
            if (p - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidArgument(format!(
                    "outer product {i} has spectral norm {p}, expected 1"
                )));
            }
        }
        Ok(Self { left_vectors, weights, right_vectors })
    }

    /// Accepts arbitrary pairs: rescales each to a unit outer product, folds
    /// the scale into its weight, drops zero terms and sorts.
    pub fn from_pairs(left: CMat, weights: &[f64], right: CMat) -> Result<Self> {
        if left.ncols() != weights.len() || right.ncols() != weights.len() {
            return Err(Error::Shape("pair count mismatch".into()));
        }
        let mut terms: Vec<(f64, usize, f64, f64)> = Vec::new();
        for i in 0..weights.len() {
            let (nu, nv) = (left.column(i).norm(), right.column(i).norm());
            let w = weights[i] * nu * nv;
            if w.is_nan() {
                return Err(Error::NonFinite("right-hand side factors"));
            }
            if w != 0.0 {
                terms.push((w.abs(), i, nu, nv * w.signum()));
            }
        }
        terms.sort_by(|a, b| b.0.total_cmp(&a.0));
        let rho = terms.len();
        let mut lv = CMat::zeros(left.nrows(), rho);
        let mut rv = CMat::zeros(right.nrows(), rho);
        for (k, &(_, i, nu, nv)) in terms.iter().enumerate() {
            lv.set_column(k, &(left.column(i) / c64(nu)));
            rv.set_column(k, &(right.column(i) / c64(nv)));
        }
        Self::new(lv, terms.iter().map(|t| t.0).collect(), rv)
    }

    pub fn zero(m: usize, n: usize) -> Self {
        Self { left_vectors: CMat::zeros(m, 0), weights: Vec::new(), right_vectors: CMat::zeros(n, 0) }
    }

    /// Truncated SVD of a dense matrix, dropping `σ_i <= tol·σ₁`.
    pub fn from_dense(f: &CMat, tol: f64) -> Result<Self> {
        let svd = dense_svd(f)?;
        let s1 = svd.values.first().copied().unwrap_or(0.0);
        if !(s1 > 0.0) {
            return Ok(Self::zero(f.nrows(), f.ncols()));
        }
        let keep = svd.values.iter().take_while(|&&s| s > tol * s1).count();
        Self::new(
            svd.u.columns(0, keep).into_owned(),
            svd.values[..keep].to_vec(),
            svd.v.columns(0, keep).into_owned(),
        )
    }

    /// Exact SVD-based factorization of a factored matrix, dropping
    /// `σ_i <= tol·σ₁`.
    pub fn from_factors(f: &LowRankFactors, tol: f64) -> Result<Self> {
        let c = f.compress(tol)?;
        let w = c.weights();
        let (l, _, r) = c.into_parts();
        Self::new(l, w, r)
    }

    pub fn nrows(&self) -> usize {
        self.left_vectors.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.right_vectors.nrows()
    }

    /// `ρ`, the number of stored terms.
    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn left_vectors(&self) -> &CMat {
        &self.left_vectors
    }

    pub fn right_vectors(&self) -> &CMat {
        &self.right_vectors
    }

    /// `M = U diag(σ)` so that `F = M N*` with `N = V`.
    pub fn scaled_left(&self) -> CMat {
        let mut m = self.left_vectors.clone();
        for (j, w) in self.weights.iter().enumerate() {
            m.column_mut(j).scale_mut(*w);
        }
        m
    }

    /// The terms with indices in `range` (0-based).
    pub fn batch(&self, range: Range<usize>) -> FactoredRhs {
        let len = range.end - range.start;
        FactoredRhs {
            left_vectors: self.left_vectors.columns(range.start, len).into_owned(),
            weights: self.weights[range.clone()].to_vec(),
            right_vectors: self.right_vectors.columns(range.start, len).into_owned(),
        }
    }

    pub fn to_factors(&self) -> LowRankFactors {
        let diag: Vec<C64> = self.weights.iter().map(|&w| c64(w)).collect();
        LowRankFactors::from_diagonal(self.left_vectors.clone(), &diag, self.right_vectors.clone())
            .expect("validated shapes")
    }

    pub fn materialize(&self) -> CMat {
        self.to_factors().materialize()
    }

    /// Frobenius norm of `F`.
    pub fn frob_norm(&self) -> f64 {
        self.to_factors().frob_norm()
    }
}
