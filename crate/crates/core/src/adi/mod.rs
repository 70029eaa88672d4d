//! ADI solvers for `AX - XB = F`.
//!
//! - [`adi_dense`]: the two-step iteration on dense iterates, reference only.
//! - [`fadi`]: the factored form `W D Y*`, one shifted block solve with `A`
//!   and one with `B*` per step.
//! - [`smith`]: fADI with a single repeated shift pair.
//! - [`split_fadi`]: independent fADI runs on groups of right-hand side terms.
//! - [`fi_adi`]: batched, individually sized fADI runs with interim
//!   compression.

mod fiadi;
pub mod operator;

use std::ops::Range;
use std::sync::Arc;

pub use fiadi::{estimate_tau, estimate_tau_a_priori, fi_adi, fi_adi_detailed, FiAdiConfig, FiAdiReport, TauMode};
pub use operator::{DenseOperator, DiagonalOperator, LinearOperator, TridiagonalOperator};

use crate::factors::thin_qr;
use crate::spectra::{distance, ShiftSchedule, ShiftSource, SpectralSet};
use crate::{c64, CMat, Error, FactoredRhs, LowRankFactors, Result, C64};

/// `AX - XB = F` with `λ(A) ⊂ E`, `λ(B) ⊂ G`.
#[derive(Debug, Clone)]
pub struct SylvesterProblem {
    pub a: Arc<dyn LinearOperator>,
    pub b: Arc<dyn LinearOperator>,
    pub rhs: FactoredRhs,
    pub a_set: SpectralSet,
    pub b_set: SpectralSet,
}

impl SylvesterProblem {
    pub fn new(
        a: Arc<dyn LinearOperator>,
        b: Arc<dyn LinearOperator>,
        rhs: FactoredRhs,
        a_set: SpectralSet,
        b_set: SpectralSet,
    ) -> Result<Self> {
        if rhs.nrows() != a.dim() || rhs.ncols() != b.dim() {
            return Err(Error::Shape(format!(
                "A is {0}x{0}, B is {1}x{1}, F is {2}x{3}",
                a.dim(),
                b.dim(),
                rhs.nrows(),
                rhs.ncols()
            )));
        }
        a_set.validate()?;
        b_set.validate()?;
        if !(distance(&a_set, &b_set)? > 0.0) {
            return Err(Error::InvalidSet("spectral sets of A and B must be disjoint".into()));
        }
        Ok(Self { a, b, rhs, a_set, b_set })
    }

    pub fn nrows(&self) -> usize {
        self.a.dim()
    }

    pub fn ncols(&self) -> usize {
        self.b.dim()
    }

    /// Same operators and sets with a different right-hand side.
    pub fn with_rhs(&self, rhs: FactoredRhs) -> Result<Self> {
        Self::new(self.a.clone(), self.b.clone(), rhs, self.a_set, self.b_set)
    }

    /// `dist(E, G)`.
    pub fn distance(&self) -> f64 {
        distance(&self.a_set, &self.b_set).expect("sets validated at construction")
    }
}

/// `X B` via `(B* X*)*`.
fn right_multiply(b: &dyn LinearOperator, x: &CMat) -> CMat {
    b.apply_adjoint(&x.adjoint()).adjoint()
}

/// Solves `X (B - σI) = R` via `(B* - σ̄I) X* = R*`.
fn right_solve(b: &dyn LinearOperator, shift: C64, r: &CMat) -> Result<CMat> {
    Ok(b.shifted_solve_adjoint(shift.conj(), &r.adjoint())
        .map_err(|_| Error::SingularShift { shift })?
        .adjoint())
}

/// Dense ADI from `X⁽⁰⁾ = 0`:
/// `(A - βI) X½ = X (B - βI) + F`, then `X' (B - αI) = (A - αI) X½ - F`.
pub fn adi_dense(problem: &SylvesterProblem, shifts: &ShiftSchedule) -> Result<CMat> {
    let f = problem.rhs.materialize();
    let mut x = CMat::zeros(problem.nrows(), problem.ncols());
    for &(alpha, beta) in shifts.pairs() {
        let rhs = right_multiply(problem.b.as_ref(), &x) - &x * beta + &f;
        let half = problem.a.shifted_solve(beta, &rhs)?;
        let r = problem.a.apply(&half) - &half * alpha - &f;
        x = right_solve(problem.b.as_ref(), alpha, &r)?;
    }
    Ok(x)
}

/// Factored ADI for the right-hand side `M N*`.
///
/// Uses `(A - α_j I)(A - β_{j+1} I)⁻¹ = I + (β_{j+1} - α_j)(A - β_{j+1} I)⁻¹`
/// so every step costs one block solve per side.
pub(crate) fn fadi_factors(
    a: &dyn LinearOperator,
    b: &dyn LinearOperator,
    m: &CMat,
    n: &CMat,
    shifts: &ShiftSchedule,
) -> Result<LowRankFactors> {
    let rho = m.ncols();
    let k = shifts.len();
    let (rows, cols) = (m.nrows(), n.nrows());
    if rho == 0 || k == 0 {
        return Ok(LowRankFactors::zero(rows, cols));
    }
    let mut w_all = CMat::zeros(rows, k * rho);
    let mut y_all = CMat::zeros(cols, k * rho);
    let mut diag = Vec::with_capacity(k * rho);
    let pairs = shifts.pairs();
    let mut w = a.shifted_solve(pairs[0].1, m)?;
    let mut y = b.shifted_solve_adjoint(pairs[0].0.conj(), n)?;
    for j in 0..k {
        let (alpha, beta) = pairs[j];
        if j > 0 {
            let (prev_alpha, prev_beta) = pairs[j - 1];
            w = &w + a.shifted_solve(beta, &w)? * (beta - prev_alpha);
            y = &y + b.shifted_solve_adjoint(alpha.conj(), &y)? * (alpha.conj() - prev_beta.conj());
        }
        w_all.columns_mut(j * rho, rho).copy_from(&w);
        y_all.columns_mut(j * rho, rho).copy_from(&y);
        diag.extend(std::iter::repeat(beta - alpha).take(rho));
    }
    LowRankFactors::from_diagonal(w_all, &diag, y_all)
}

/// fADI with `M = U diag(σ)`, `N = V`. The result has `|shifts|·ρ` columns.
pub fn fadi(problem: &SylvesterProblem, shifts: &ShiftSchedule) -> Result<LowRankFactors> {
    fadi_factors(
        problem.a.as_ref(),
        problem.b.as_ref(),
        &problem.rhs.scaled_left(),
        problem.rhs.right_vectors(),
        shifts,
    )
}

/// Smith's method: `k` fADI steps with one shift pair.
pub fn smith(problem: &SylvesterProblem, shift: (C64, C64), k: usize) -> Result<LowRankFactors> {
    let source = match (problem.a_set, problem.b_set) {
        (SpectralSet::Disk { .. }, SpectralSet::Disk { .. }) => ShiftSource::DiskOptimal,
        _ => ShiftSource::User,
    };
    fadi(problem, &ShiftSchedule::repeated(shift, k, source)?)
}

/// Sum of independent fADI runs, one per group of right-hand side terms
/// (0-based index ranges), each with its own schedule. No compression.
pub fn split_fadi(problem: &SylvesterProblem, groups: &[(Range<usize>, ShiftSchedule)]) -> Result<LowRankFactors> {
    let mut acc = LowRankFactors::zero(problem.nrows(), problem.ncols());
    for (range, shifts) in groups {
        if range.end > problem.rhs.rank() {
            return Err(Error::InvalidArgument(format!(
                "group {range:?} exceeds right-hand side rank {}",
                problem.rhs.rank()
            )));
        }
        let part = problem.rhs.batch(range.clone());
        let f = fadi_factors(problem.a.as_ref(), problem.b.as_ref(), &part.scaled_left(), part.right_vectors(), shifts)?;
        acc = acc.concat(&f)?;
    }
    Ok(acc)
}

/// `‖A X̃ - X̃ B - F‖_F` for `X̃ = L M R*`, from the factored residual
/// `[AL, L, U] · blkdiag(M, -M, -Σ) · [R, B*R, V]*`.
pub fn residual_fro(problem: &SylvesterProblem, candidate: &LowRankFactors) -> Result<f64> {
    let (m, n) = (problem.nrows(), problem.ncols());
    if candidate.nrows() != m || candidate.ncols() != n {
        return Err(Error::Shape(format!(
            "candidate is {}x{}, problem is {m}x{n}",
            candidate.nrows(),
            candidate.ncols()
        )));
    }
    let t = candidate.rank();
    let rho = problem.rhs.rank();
    let width = 2 * t + rho;
    if width == 0 {
        return Ok(0.0);
    }
    let mut left = CMat::zeros(m, width);
    let mut right = CMat::zeros(n, width);
    let mut middle = CMat::zeros(width, width);
    left.columns_mut(0, t).copy_from(&problem.a.apply(candidate.left()));
    left.columns_mut(t, t).copy_from(candidate.left());
    left.columns_mut(2 * t, rho).copy_from(problem.rhs.left_vectors());
    right.columns_mut(0, t).copy_from(candidate.right());
    right.columns_mut(t, t).copy_from(&problem.b.apply_adjoint(candidate.right()));
    right.columns_mut(2 * t, rho).copy_from(problem.rhs.right_vectors());
    middle.view_mut((0, 0), (t, t)).copy_from(candidate.middle());
    middle.view_mut((t, t), (t, t)).copy_from(&(-candidate.middle()));
    for (i, w) in problem.rhs.weights().iter().enumerate() {
        middle[(2 * t + i, 2 * t + i)] = c64(-w);
    }
    let (_, rl) = thin_qr(left);
    let (_, rr) = thin_qr(right);
    Ok((rl * middle * rr.adjoint()).norm())
}
