use std::sync::Arc;

use crate::adi::{fadi, DiagonalOperator, SylvesterProblem};
use crate::spectra::optimal_shifts;
use crate::{c64, CMat, Error, FactoredRhs, LowRankFactors, Result, C64};

type Eigen = (Vec<C64>, CMat);

fn eigens(problem: &SylvesterProblem) -> Result<(Eigen, Eigen)> {
    let a = problem.a.eigen().ok_or_else(|| Error::NotNormal("A has no known eigendecomposition".into()))?;
    let b = problem.b.eigen().ok_or_else(|| Error::NotNormal("B has no known eigendecomposition".into()))?;
    Ok((a, b))
}

fn eigen_cauchy(la: &[C64], lb: &[C64]) -> Result<CMat> {
    let mut c = CMat::zeros(la.len(), lb.len());
    for (j, &b) in lb.iter().enumerate() {
        for (i, &a) in la.iter().enumerate() {
            if a == b {
                return Err(Error::CoincidentPoints { i, j });
            }
            c[(i, j)] = (a - b).inv();
        }
    }
    Ok(c)
}

/// `X = Y (C ∘ (Y* F W)) W*` with `A = Y Λ_A Y*`, `B = W Λ_B W*` and
/// `C_jk = 1/(λ_j(A) - λ_k(B))`.
pub fn hadamard_solve(problem: &SylvesterProblem) -> Result<CMat> {
    let ((la, y), (lb, w)) = eigens(problem)?;
    let c = eigen_cauchy(&la, &lb)?;
    let g = y.adjoint() * problem.rhs.materialize() * &w;
    Ok(&y * c.component_mul(&g) * w.adjoint())
}

/// Low-rank closed form: term `i <= k` (1-based) uses a `k+1-i` step fADI
/// approximant `L M R*` of the eigenvalue Cauchy matrix, and
/// `C ∘ ũṽ* = diag(ũ) C diag(ṽ)*` turns `σ_i Y (L M R* ∘ ũṽ*) W*` into the
/// factors `(σ_i Y diag(ũ) L) M (W diag(ṽ) R)*`, `ũ = Y*u_i`, `ṽ = W*v_i`.
pub fn hadamard_solve_lowrank(problem: &SylvesterProblem, k: usize) -> Result<LowRankFactors> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let ((la, y), (lb, w)) = eigens(problem)?;
    eigen_cauchy(&la, &lb)?;
    let (m, n) = (la.len(), lb.len());
    let ones = FactoredRhs::from_pairs(CMat::from_element(m, 1, c64(1.0)), &[1.0], CMat::from_element(n, 1, c64(1.0)))?;
    let cauchy_problem = SylvesterProblem::new(
        Arc::new(DiagonalOperator::new(la)?),
        Arc::new(DiagonalOperator::new(lb)?),
        ones,
        problem.a_set,
        problem.b_set,
    )?;
    let rhs = &problem.rhs;
    let mut acc = LowRankFactors::zero(m, n);
    for i in 1..=k.min(rhs.rank()) {
        let approx = fadi(&cauchy_problem, &optimal_shifts(k + 1 - i, &problem.a_set, &problem.b_set)?)?;
        let u = y.ad_mul(&rhs.left_vectors().column(i - 1));
        let v = w.ad_mul(&rhs.right_vectors().column(i - 1));
        let (mut l, mid, mut r) = approx.into_parts();
        scale_rows(&mut l, u.iter().map(|&z| z * rhs.weights()[i - 1]));
        scale_rows(&mut r, v.iter().copied());
        acc = acc.concat(&LowRankFactors::new(&y * l, mid, &w * r)?)?;
    }
    Ok(acc)
}

fn scale_rows(m: &mut CMat, s: impl Iterator<Item = C64>) {
    for (mut row, z) in m.row_iter_mut().zip(s) {
        for e in row.iter_mut() {
            *e *= z;
        }
    }
}
