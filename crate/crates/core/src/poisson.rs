//! Second-order finite-difference Poisson solver on `[-1,1]²` with zero
//! Dirichlet data: `D₂X + XD₂ = F` on the `n×n` interior grid.
//!
//! [`poisson_direct`] diagonalizes `D₂` with fast sine transforms;
//! [`poisson_lowrank`] runs FI-ADI with `A = D₂`, `B = -D₂` and only
//! tridiagonal solves.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::adi::{fi_adi, FiAdiConfig, LinearOperator, SylvesterProblem, TridiagonalOperator};
use crate::spectra::SpectralSet;
use crate::{c64, CMat, Error, FactoredRhs, LowRankFactors, Result, C64};

/// `D₂ = h⁻² tridiag(1, -2, 1)` with `h = 2/(n+1)`.
#[derive(Debug, Clone)]
pub struct FdLaplacian {
    pub n: usize,
    pub h: f64,
    pub op: Arc<TridiagonalOperator>,
    /// `[λ_n, λ₁]` with `λ_j = -4h⁻² sin²(jπ/(2(n+1)))`.
    pub spectrum: SpectralSet,
}

impl FdLaplacian {
    /// `λ_j`, `j = 1..n`, in increasing magnitude.
    pub fn eigenvalues(&self) -> Vec<f64> {
        fd_eigenvalues(self.n)
    }

    /// Orthonormal sine eigenvectors `S_ij = √(2/(n+1)) sin(ijπ/(n+1))`.
    pub fn eigenvectors(&self) -> CMat {
        let n = self.n;
        let s = (2.0 / (n + 1) as f64).sqrt();
        CMat::from_fn(n, n, |i, j| c64(s * (((i + 1) * (j + 1)) as f64 * PI / (n + 1) as f64).sin()))
    }
}

fn fd_eigenvalues(n: usize) -> Vec<f64> {
    let h = 2.0 / (n + 1) as f64;
    (1..=n).map(|j| -4.0 / (h * h) * (j as f64 * PI / (2 * (n + 1)) as f64).sin().powi(2)).collect()
}

fn tridiag(n: usize, off: f64, diag: f64) -> Result<TridiagonalOperator> {
    TridiagonalOperator::new(vec![c64(off); n - 1], vec![c64(diag); n], vec![c64(off); n - 1])
}

pub fn fd_operator(n: usize) -> Result<FdLaplacian> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need n >= 2 grid points, got {n}")));
    }
    let h = 2.0 / (n + 1) as f64;
    let s = 1.0 / (h * h);
    let eig = fd_eigenvalues(n);
    let (lo, hi) = (eig[n - 1], eig[0]);
    let op = tridiag(n, s, -2.0 * s)?.with_norm(-lo);
    Ok(FdLaplacian { n, h, op: Arc::new(op), spectrum: SpectralSet::interval(lo, hi)? })
}

/// Interior grid `x_i = -1 + ih`, `i = 1..n`.
pub fn grid(n: usize) -> Vec<f64> {
    let h = 2.0 / (n + 1) as f64;
    (1..=n).map(|i| -1.0 + i as f64 * h).collect()
}

#[derive(Debug, Clone)]
pub enum PoissonRhs {
    Dense(CMat),
    Factored(FactoredRhs),
}

#[derive(Debug, Clone)]
pub struct PoissonProblem {
    pub n: usize,
    pub rhs: PoissonRhs,
}

impl PoissonProblem {
    pub fn dense(samples: CMat) -> Result<Self> {
        if samples.nrows() != samples.ncols() || samples.nrows() < 2 {
            return Err(Error::Shape(format!("samples must be n×n with n >= 2, got {}x{}", samples.nrows(), samples.ncols())));
        }
        if samples.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("right-hand side samples"));
        }
        Ok(Self { n: samples.nrows(), rhs: PoissonRhs::Dense(samples) })
    }

    pub fn factored(rhs: FactoredRhs) -> Result<Self> {
        if rhs.nrows() != rhs.ncols() || rhs.nrows() < 2 {
            return Err(Error::Shape(format!("right-hand side must be n×n with n >= 2, got {}x{}", rhs.nrows(), rhs.ncols())));
        }
        Ok(Self { n: rhs.nrows(), rhs: PoissonRhs::Factored(rhs) })
    }

    pub fn h(&self) -> f64 {
        2.0 / (self.n + 1) as f64
    }

    pub fn dense_rhs(&self) -> CMat {
        match &self.rhs {
            PoissonRhs::Dense(f) => f.clone(),
            PoissonRhs::Factored(f) => f.materialize(),
        }
    }
}

/// Orthonormal DST-I `S` via a length `2(n+1)` FFT of the odd extension.
pub struct SineTransform {
    n: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SineTransform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SineTransform").field("n", &self.n).finish()
    }
}

impl SineTransform {
    pub fn new(n: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(2 * (n + 1));
        Self { n, fft }
    }

    /// `S X` for each column of `x`.
    pub fn apply_columns(&self, x: &mut CMat) {
        let n = self.n;
        assert_eq!(x.nrows(), n, "sine transform length");
        let len = 2 * (n + 1);
        let scale = (2.0 / (n + 1) as f64).sqrt();
        let mut buf = vec![C64::new(0.0, 0.0); len];
        let mut scratch = vec![C64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        for col in x.as_mut_slice().chunks_mut(n) {
            buf.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            for (j, &v) in col.iter().enumerate() {
                buf[j + 1] = v;
                buf[len - 1 - j] = -v;
            }
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            // V_k = -2i Σ x_j sin(πjk/(n+1)).
            for (k, out) in col.iter_mut().enumerate() {
                *out = buf[k + 1] * C64::new(0.0, 0.5 * scale);
            }
        }
    }

    /// `S X S` (`S` is symmetric).
    pub fn apply_both(&self, x: &CMat) -> CMat {
        let mut y = x.clone();
        self.apply_columns(&mut y);
        let mut yt = y.transpose();
        self.apply_columns(&mut yt);
        yt.transpose()
    }
}

fn divide_eigen(g: &mut CMat, lam: &[f64]) {
    let n = lam.len();
    for k in 0..n {
        for j in 0..n {
            g[(j, k)] /= c64(lam[j] + lam[k]);
        }
    }
}

/// `X = S (C ∘ (S F S)) S`, `C_jk = 1/(λ_j + λ_k)`, in `O(n² log n)`.
pub fn poisson_direct(problem: &PoissonProblem) -> Result<CMat> {
    let n = problem.n;
    let st = SineTransform::new(n);
    let mut g = st.apply_both(&problem.dense_rhs());
    divide_eigen(&mut g, &fd_eigenvalues(n));
    Ok(st.apply_both(&g))
}

/// [`poisson_direct`] with explicit `O(n³)` eigenvector products.
pub fn poisson_direct_naive(problem: &PoissonProblem) -> Result<CMat> {
    let d = fd_operator(problem.n)?;
    let s = d.eigenvectors();
    let mut g = &s * problem.dense_rhs() * &s;
    divide_eigen(&mut g, &d.eigenvalues());
    Ok(&s * g * &s)
}

/// `D₂X - X(-D₂) = F` as a Sylvester problem.
pub fn poisson_sylvester(n: usize, rhs: FactoredRhs) -> Result<SylvesterProblem> {
    let d = fd_operator(n)?;
    let s = 1.0 / (d.h * d.h);
    let neg = Arc::new(tridiag(n, -s, 2.0 * s)?.with_norm(d.op.norm_bound()));
    SylvesterProblem::new(d.op.clone(), neg, rhs, d.spectrum, d.spectrum.negate())
}

/// FI-ADI on the factored right-hand side; dense data is ingested first
/// with tolerance `ε/4`.
pub fn poisson_lowrank(problem: &PoissonProblem, epsilon: f64) -> Result<LowRankFactors> {
    let rhs = match &problem.rhs {
        PoissonRhs::Factored(f) => f.clone(),
        PoissonRhs::Dense(f) => ingest_rhs(f, epsilon / 4.0)?,
    };
    fi_adi(&poisson_sylvester(problem.n, rhs)?, &FiAdiConfig::new(epsilon))
}

/// Truncated SVD of grid samples with relative spectral error `<= tol`.
pub fn ingest_rhs(samples: &CMat, tol: f64) -> Result<FactoredRhs> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol}")));
    }
    FactoredRhs::from_dense(samples, tol)
}

/// Built-in smooth right-hand sides, each a short sum of separable terms
/// `Σ c_k g_k(x) h_k(y)` so they can be factored without a dense SVD.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsFunction {
    /// `exp(-10(x² + y²))`.
    Gaussian,
    /// `cos(3x + 2y)`.
    Cos3x2y,
    /// `exp(xy)`, as its Taylor series in `xy` truncated at degree 29.
    ExpXy,
    /// `Σ_{k=1}^{10} 2^{1-k} e^{x/2} sin(kπ(x+1)/2) cos(kπy/2 + 1/k)`, rank 10.
    Smooth10,
}

type Term = (f64, Box<dyn Fn(f64) -> f64>, Box<dyn Fn(f64) -> f64>);

impl RhsFunction {
    pub const ALL: [RhsFunction; 4] = [RhsFunction::Gaussian, RhsFunction::Cos3x2y, RhsFunction::ExpXy, RhsFunction::Smooth10];

    pub fn name(self) -> &'static str {
        match self {
            RhsFunction::Gaussian => "gaussian",
            RhsFunction::Cos3x2y => "cos3x2y",
            RhsFunction::ExpXy => "exp-xy",
            RhsFunction::Smooth10 => "smooth10",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown function {name:?}")))
    }

    fn terms(self) -> Vec<Term> {
        match self {
            RhsFunction::Gaussian => vec![(1.0, Box::new(|x: f64| (-10.0 * x * x).exp()), Box::new(|y: f64| (-10.0 * y * y).exp()))],
            RhsFunction::Cos3x2y => vec![
                (1.0, Box::new(|x: f64| (3.0 * x).cos()), Box::new(|y: f64| (2.0 * y).cos())),
                (-1.0, Box::new(|x: f64| (3.0 * x).sin()), Box::new(|y: f64| (2.0 * y).sin())),
            ],
            RhsFunction::ExpXy => {
                let mut fact = 1.0;
                (0..30)
                    .map(|k| {
                        if k > 0 {
                            fact *= k as f64;
                        }
                        let t: Term = (1.0 / fact, Box::new(move |x: f64| x.powi(k)), Box::new(move |y: f64| y.powi(k)));
                        t
                    })
                    .collect()
            }
            RhsFunction::Smooth10 => (1..=10)
                .map(|k| {
                    let kf = k as f64;
                    let t: Term = (
                        2f64.powi(1 - k),
                        Box::new(move |x: f64| (x / 2.0).exp() * (kf * PI * (x + 1.0) / 2.0).sin()),
                        Box::new(move |y: f64| (kf * PI * y / 2.0 + 1.0 / kf).cos()),
                    );
                    t
                })
                .collect(),
        }
    }

    pub fn eval(self, x: f64, y: f64) -> f64 {
        match self {
            RhsFunction::Gaussian => (-10.0 * (x * x + y * y)).exp(),
            RhsFunction::Cos3x2y => (3.0 * x + 2.0 * y).cos(),
            RhsFunction::ExpXy => (x * y).exp(),
            RhsFunction::Smooth10 => self.terms().iter().map(|(c, g, h)| c * g(x) * h(y)).sum(),
        }
    }

    /// `F_ij = f(x_i, y_j)` on the interior grid.
    pub fn sample(self, n: usize) -> CMat {
        let x = grid(n);
        CMat::from_fn(n, n, |i, j| c64(self.eval(x[i], x[j])))
    }

    /// Orthonormalized factors of the separable form, truncated at `tol`.
    pub fn factored(self, n: usize, tol: f64) -> Result<FactoredRhs> {
        let x = grid(n);
        let terms = self.terms();
        let r = terms.len();
        let mut left = CMat::zeros(n, r);
        let mut right = CMat::zeros(n, r);
        let mut diag = Vec::with_capacity(r);
        for (k, (c, g, h)) in terms.iter().enumerate() {
            for i in 0..n {
                left[(i, k)] = c64(g(x[i]));
                right[(i, k)] = c64(h(x[i]));
            }
            diag.push(c64(*c));
        }
        FactoredRhs::from_factors(&LowRankFactors::from_diagonal(left, &diag, right)?, tol)
    }
}
