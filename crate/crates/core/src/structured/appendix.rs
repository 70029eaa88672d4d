//! `AX + XAᵀ = F` with `(A+I)(A-I)⁻¹ = Q`, `Q` a scaled circulant shift.
//! The solution is diagonal and the antidiagonal approximant is near-best.

use std::sync::Arc;

use crate::adi::{fadi_factors, DenseOperator, SylvesterProblem};
use crate::spectra::{disk_pair_shift, ShiftSchedule, ShiftSource, SpectralSet};
use crate::{c64, CMat, Error, FactoredRhs, LowRankFactors, Result};

#[derive(Debug, Clone)]
pub struct AppendixProblem {
    pub rho: usize,
    pub c: f64,
    /// `q = √(2/c + 1)`.
    pub q: f64,
    /// `n = ρ²`.
    pub n: usize,
    /// Eigenvalues of `A` lie on the circle `|z - z₀| = η`.
    pub z0: f64,
    pub eta: f64,
    pub q_matrix: CMat,
    pub a: CMat,
    /// `F = Σ_i λ_i (A-I)e_{iρ} ((I-A)e_{iρ})ᵀ`.
    pub f: CMat,
    /// `λ_i = q^{-2i}`.
    pub lambda: Vec<f64>,
}

impl AppendixProblem {
    pub fn a_set(&self) -> SpectralSet {
        SpectralSet::Disk { center: c64(self.z0), radius: self.eta }
    }

    /// Column `iρ` of `A - I` and of `I - A`.
    fn term(&self, i: usize) -> (CMat, CMat) {
        let mut u = self.a.column(i * self.rho).into_owned();
        u[i * self.rho] -= c64(1.0);
        let v = -&u;
        (CMat::from_column_slice(self.n, 1, u.as_slice()), CMat::from_column_slice(self.n, 1, v.as_slice()))
    }

    /// `AX - XB = F` with `B = -Aᵀ` and `F` factored by its defining terms.
    pub fn problem(&self) -> Result<SylvesterProblem> {
        let mut left = CMat::zeros(self.n, self.rho);
        let mut right = CMat::zeros(self.n, self.rho);
        for i in 0..self.rho {
            let (u, v) = self.term(i);
            left.set_column(i, &u.column(0));
            right.set_column(i, &v.column(0));
        }
        let rhs = FactoredRhs::from_pairs(left, &self.lambda, right)?;
        let e = self.a_set();
        SylvesterProblem::new(
            Arc::new(DenseOperator::new(self.a.clone())?),
            Arc::new(DenseOperator::new(-self.a.transpose())?),
            rhs,
            e,
            e.negate(),
        )
    }
}

pub fn appendix_build(rho: usize, c: f64) -> Result<AppendixProblem> {
    if rho < 2 || !(c > 1.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("need rho >= 2 and c > 1, got rho = {rho}, c = {c}")));
    }
    let n = rho * rho;
    let q = (2.0 / c + 1.0).sqrt();
    let q2 = q * q;
    let mut qm = CMat::zeros(n, n);
    for i in 0..n {
        qm[((i + 1) % n, i)] = c64(1.0 / q);
    }
    let id = CMat::identity(n, n);
    let a = (&qm - &id).lu().solve(&(&qm + &id)).ok_or_else(|| Error::SingularShift { shift: c64(1.0) })?;
    let mut f = CMat::zeros(n, n);
    let lambda: Vec<f64> = (0..rho).map(|i| q2.powi(-(i as i32))).collect();
    let a_minus = &a - &id;
    for (i, l) in lambda.iter().enumerate() {
        let u = a_minus.column(i * rho);
        f -= u * u.transpose() * c64(*l);
    }
    Ok(AppendixProblem {
        rho,
        c,
        q,
        n,
        z0: -(q2 + 1.0) / (q2 - 1.0),
        eta: 2.0 * q / (q2 - 1.0),
        q_matrix: qm,
        a,
        f,
        lambda,
    })
}

/// Diagonal of the solution,
/// `d_p = 2/(1 - q^{-2n}) Σ_{s<ρ} q^{-2s} q^{-2((p - sρ) mod n)}`.
pub fn appendix_closed_form(problem: &AppendixProblem) -> Vec<f64> {
    let (n, rho) = (problem.n as i64, problem.rho as i64);
    let q2 = problem.q * problem.q;
    let scale = 2.0 / (1.0 - q2.powi(-(n as i32)));
    (0..n)
        .map(|p| {
            let sum: f64 = (0..rho).map(|s| q2.powi(-(s as i32)) * q2.powi(-((p - s * rho).rem_euclid(n) as i32))).sum();
            scale * sum
        })
        .collect()
}

/// `X̃_t = Σ_{i<k} X_i^{(k-i)}`, `t = k(k+1)/2`: term `i` of `F` (0-based)
/// gets `k - i` Smith steps with the shift `(-1, 1)`.
pub fn appendix_xt(problem: &AppendixProblem, k: usize) -> Result<LowRankFactors> {
    if k == 0 || k > problem.rho {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= rho = {}, got {k}", problem.rho)));
    }
    let e = problem.a_set();
    let shift = disk_pair_shift(&e, &e.negate())?;
    let a = DenseOperator::new(problem.a.clone())?;
    let b = DenseOperator::new(-problem.a.transpose())?;
    let mut acc = LowRankFactors::zero(problem.n, problem.n);
    for i in 0..k {
        let (u, v) = problem.term(i);
        let steps = ShiftSchedule::repeated(shift, k - i, ShiftSource::DiskOptimal)?;
        acc = acc.concat(&fadi_factors(&a, &b, &(u * c64(problem.lambda[i])), &v, &steps)?)?;
    }
    Ok(acc)
}
