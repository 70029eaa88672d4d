//! Structured matrix families and their low-rank approximants.
//!
//! - Cauchy-like generators `C`, `C̃`, `C°p` on point sets in antipodal disks.
//! - Antidiagonal (Smith-based) approximants with rank `k(k+1)/2`.
//! - The Hadamard closed form `X = Y (C ∘ (Y*FW)) W*` for normal `A`, `B`.
//! - The circulant example on which the antidiagonal approximant is near-best.

mod appendix;
mod hadamard;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use appendix::{appendix_build, appendix_closed_form, appendix_xt, AppendixProblem};
pub use hadamard::{hadamard_solve, hadamard_solve_lowrank};

use crate::adi::{fi_adi, split_fadi, DiagonalOperator, FiAdiConfig, SylvesterProblem};
use crate::spectra::{optimal_shifts, SpectralSet};
use crate::{c64, CMat, Error, FactoredRhs, LowRankFactors, Result, C64};

/// Points `z_i ∈ E` and `w_j ∈ G`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSets {
    z: Vec<C64>,
    w: Vec<C64>,
    e: SpectralSet,
    g: SpectralSet,
}

impl PointSets {
    pub fn new(z: Vec<C64>, w: Vec<C64>, e: SpectralSet, g: SpectralSet) -> Result<Self> {
        e.validate()?;
        g.validate()?;
        let slack = 1e-12 * e.max_modulus().max(g.max_modulus());
        if let Some(i) = z.iter().position(|&p| !e.contains(p, slack)) {
            return Err(Error::InvalidSet(format!("z[{i}] = {} lies outside {e:?}", z[i])));
        }
        if let Some(j) = w.iter().position(|&p| !g.contains(p, slack)) {
            return Err(Error::InvalidSet(format!("w[{j}] = {} lies outside {g:?}", w[j])));
        }
        for (i, zi) in z.iter().enumerate() {
            if let Some(j) = w.iter().position(|wj| wj == zi) {
                return Err(Error::CoincidentPoints { i, j });
            }
        }
        Ok(Self { z, w, e, g })
    }

    /// `m` points uniform in `disk(z₀, η)` and `n` in `disk(-z₀, η)`, by
    /// rejection from the bounding squares.
    pub fn sample_disks(m: usize, n: usize, z0: f64, eta: f64, seed: u64) -> Result<Self> {
        let e = SpectralSet::disk(c64(z0), eta)?;
        if z0.abs() <= eta {
            return Err(Error::InvalidSet(format!("disks around ±{z0} with radius {eta} intersect")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |center: f64| loop {
            let d = C64::new(rng.gen_range(-eta..eta), rng.gen_range(-eta..eta));
            if d.norm() <= eta {
                return c64(center) + d;
            }
        };
        let z = (0..m).map(|_| draw(z0)).collect();
        let w = (0..n).map(|_| draw(-z0)).collect();
        Self::new(z, w, e, e.negate())
    }

    pub fn z(&self) -> &[C64] {
        &self.z
    }

    pub fn w(&self) -> &[C64] {
        &self.w
    }

    pub fn sets(&self) -> (SpectralSet, SpectralSet) {
        (self.e, self.g)
    }
}

fn entrywise(points: &PointSets, f: impl Fn(C64) -> C64) -> Result<CMat> {
    let (m, n) = (points.z.len(), points.w.len());
    let mut out = CMat::zeros(m, n);
    for j in 0..n {
        for i in 0..m {
            let d = points.z[i] - points.w[j];
            if d.norm() == 0.0 {
                return Err(Error::CoincidentPoints { i, j });
            }
            out[(i, j)] = f(d);
        }
    }
    Ok(out)
}

/// `C_ij = 1/(z_i - w_j)`, so that `D_z C - C D_w = 𝟙𝟙ᵀ`.
pub fn cauchy(points: &PointSets) -> Result<CMat> {
    entrywise(points, |d| d.inv())
}

/// `C̃_ij = 1/|z_i - w_j|²`, so that `conj(D_z) C̃ - C̃ conj(D_w) = C`.
pub fn ctilde(points: &PointSets) -> Result<CMat> {
    entrywise(points, |d| c64(1.0 / d.norm_sqr()))
}

/// `C°p_ij = 1/(z_i - w_j)^p`, so that `D_z C°p - C°p D_w = C°(p-1)`.
pub fn cauchy_power(points: &PointSets, p: usize) -> Result<CMat> {
    if p == 0 {
        return Err(Error::InvalidArgument("Hadamard power must be >= 1".into()));
    }
    entrywise(points, |d| d.inv().powu(p as u32))
}

fn conj_set(s: SpectralSet) -> SpectralSet {
    match s {
        SpectralSet::Disk { center, radius } => SpectralSet::Disk { center: center.conj(), radius },
        other => other,
    }
}

fn diag_op(d: impl Iterator<Item = C64>) -> Result<Arc<DiagonalOperator>> {
    Ok(Arc::new(DiagonalOperator::new(d.collect())?))
}

/// `conj(D_z) X - X conj(D_w) = C` with the SVD of `C` as right-hand side;
/// its solution is `C̃`.
pub fn ctilde_problem(points: &PointSets) -> Result<SylvesterProblem> {
    let rhs = FactoredRhs::from_dense(&cauchy(points)?, 0.0)?;
    SylvesterProblem::new(
        diag_op(points.z.iter().map(|z| z.conj()))?,
        diag_op(points.w.iter().map(|w| w.conj()))?,
        rhs,
        conj_set(points.e),
        conj_set(points.g),
    )
}

/// `D_z X - X D_w = C°(p-1)` with the SVD of `C°(p-1)`; its solution is `C°p`.
pub fn cauchy_power_problem(points: &PointSets, p: usize) -> Result<SylvesterProblem> {
    if p < 2 {
        return Err(Error::InvalidArgument("the recursion starts at p = 2".into()));
    }
    let rhs = FactoredRhs::from_dense(&cauchy_power(points, p - 1)?, 0.0)?;
    SylvesterProblem::new(
        diag_op(points.z.iter().copied())?,
        diag_op(points.w.iter().copied())?,
        rhs,
        points.e,
        points.g,
    )
}

/// FI-ADI approximation of `C̃` with one right-hand side term per batch.
pub fn ctilde_lowrank(points: &PointSets, epsilon: f64) -> Result<LowRankFactors> {
    let p = ctilde_problem(points)?;
    let rho = p.rhs.rank();
    fi_adi(&p, &FiAdiConfig::new(epsilon).one_per_weight(rho))
}

/// `Σ_{i<=k} X_i^{(k+1-i)}`: the `i`-th right-hand side term (1-based) gets
/// `k+1-i` optimal fADI steps, so the rank is at most `k(k+1)/2`.
pub fn antidiagonal_approximant(problem: &SylvesterProblem, k: usize) -> Result<LowRankFactors> {
    grouped_approximant(problem, k, |i| i - 1..i)
}

/// Like [`antidiagonal_approximant`], with group `i` (1-based) holding the
/// terms returned by `group(i)` (0-based ranges).
fn grouped_approximant(
    problem: &SylvesterProblem,
    k: usize,
    group: impl Fn(usize) -> std::ops::Range<usize>,
) -> Result<LowRankFactors> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let rho = problem.rhs.rank();
    let mut groups = Vec::new();
    for i in 1..=k {
        let r = group(i);
        let r = r.start.min(rho)..r.end.min(rho);
        if r.is_empty() {
            break;
        }
        groups.push((r, optimal_shifts(k + 1 - i, &problem.a_set, &problem.b_set)?));
    }
    split_fadi(problem, &groups)
}

/// Approximant to `C°³` from `D_z X - X D_w = C°²`: group `i` carries
/// `σ_j(C°²)` for `i(i+1)/2 <= j <= (i+1)(i+2)/2 - 1` (1-based) and gets
/// `k+1-i` fADI steps.
pub fn c3_lowrank(points: &PointSets, k: usize) -> Result<LowRankFactors> {
    let p = cauchy_power_problem(points, 3)?;
    grouped_approximant(&p, k, |i| i * (i + 1) / 2 - 1..(i + 1) * (i + 2) / 2 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{bound_disk, eps_rank_bound, mu1, triangular_indices, BoundGeometry, BoundParams};
    use crate::svd::{eps_rank, singular_values, spectral_norm};

    fn pair(z: f64, w: f64) -> PointSets {
        let e = SpectralSet::disk(c64(z), 1.0).unwrap();
        PointSets::new(vec![c64(z)], vec![c64(w)], e, e.negate()).unwrap()
    }

    fn diag(v: &[C64]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_column_slice(v))
    }

    #[test]
    fn single_pair_values() {
        let p = pair(2.0, -2.0);
        assert_eq!(cauchy(&p).unwrap()[(0, 0)], c64(0.25));
        assert_eq!(ctilde(&p).unwrap()[(0, 0)], c64(1.0 / 16.0));
        assert_eq!(cauchy_power(&p, 3).unwrap()[(0, 0)], c64(1.0 / 64.0));
    }

    #[test]
    fn first_power_is_cauchy() {
        let p = PointSets::sample_disks(7, 5, 3.0, 1.0, 1).unwrap();
        assert_eq!(cauchy_power(&p, 1).unwrap(), cauchy(&p).unwrap());
    }

    #[test]
    fn coincident_and_outside_rejected() {
        let e = SpectralSet::disk(c64(0.0), 1.0).unwrap();
        assert!(matches!(
            PointSets::new(vec![c64(0.1)], vec![c64(0.1)], e, e),
            Err(Error::CoincidentPoints { i: 0, j: 0 })
        ));
        assert!(PointSets::new(vec![c64(3.0)], vec![c64(0.0)], e, e).is_err());
    }

    #[test]
    fn displacement_residuals() {
        let p = PointSets::sample_disks(50, 40, 4.0, 2.0, 3).unwrap();
        let (dz, dw) = (diag(p.z()), diag(p.w()));
        let c = cauchy(&p).unwrap();
        let ones = CMat::from_element(50, 40, c64(1.0));
        assert!((&dz * &c - &c * &dw - ones).norm() <= 1e-12 * c.norm());
        let ct = ctilde(&p).unwrap();
        let r = dz.map(|z| z.conj()) * &ct - &ct * dw.map(|z| z.conj()) - &c;
        assert!(r.norm() <= 1e-12 * ct.norm());
        for q in 2..5 {
            let cp = cauchy_power(&p, q).unwrap();
            let prev = cauchy_power(&p, q - 1).unwrap();
            assert!((&dz * &cp - &cp * &dw - prev).norm() <= 1e-12 * cp.norm().max(1.0));
        }
    }

    #[test]
    fn cauchy_decay() {
        let p = PointSets::sample_disks(100, 100, 30.0, 10.0, 7).unwrap();
        let s = singular_values(&cauchy(&p).unwrap()).unwrap();
        let mu = mu1(30.0, 10.0);
        for (k, sk) in s.iter().enumerate() {
            assert!(*sk <= 10.0 * (mu.powi(-(k as i32)) + f64::EPSILON) * s[0], "k={k}");
        }
    }

    #[test]
    fn eps_rank_of_cauchy_matches_count() {
        let p = PointSets::sample_disks(64, 64, 30.0, 10.0, 2).unwrap();
        let s = singular_values(&cauchy(&p).unwrap()).unwrap();
        let count = s.iter().filter(|&&x| x > 1e-10 * s[0]).count();
        assert_eq!(eps_rank(&s, 1e-10).unwrap(), count);
    }

    #[test]
    fn ctilde_lowrank_accuracy_and_rank() {
        let p = PointSets::sample_disks(200, 200, 30.0, 10.0, 7).unwrap();
        let ct = ctilde(&p).unwrap();
        let nrm = spectral_norm(&ct).unwrap();
        for eps in [1e-4, 1e-8] {
            let x = ctilde_lowrank(&p, eps).unwrap();
            let err = spectral_norm(&(x.materialize() - &ct)).unwrap();
            assert!(err <= 2.0 * eps * nrm, "eps {eps}: {:e}", err / nrm);
            assert!(x.rank() <= eps_rank_bound(eps, 200, 30.0, 10.0).unwrap());
        }
        assert!(ctilde_lowrank(&p, 0.9).unwrap().rank() <= 3);
    }

    #[test]
    fn antidiagonal_sandwich() {
        let p = PointSets::sample_disks(60, 60, 30.0, 10.0, 4).unwrap();
        let ct = ctilde(&p).unwrap();
        let s = singular_values(&ct).unwrap();
        let prob = ctilde_problem(&p).unwrap();
        let params = BoundParams::new(BoundGeometry::Disk { z0: 30.0, eta: 10.0 }, 60);
        let ts = triangular_indices(60);
        let bound = bound_disk(&params, &ts).unwrap();
        for (k, (t, b)) in (1..).zip(ts.iter().zip(&bound.entries)) {
            let x = antidiagonal_approximant(&prob, k).unwrap();
            assert!(x.rank() <= *t);
            let err = spectral_norm(&(x.materialize() - &ct)).unwrap() / s[0];
            assert!(s[*t] / s[0] <= err * (1.0 + 1e-10) + 1e-15, "t={t}");
            assert!(err <= b.value + 1e-14, "t={t}: {err:e} vs {:e}", b.value);
        }
    }

    #[test]
    fn c3_errors() {
        let p = PointSets::sample_disks(100, 100, 30.0, 10.0, 11).unwrap();
        let c3 = cauchy_power(&p, 3).unwrap();
        let nrm = spectral_norm(&c3).unwrap();
        let mu = mu1(30.0, 10.0);
        let single = c3_lowrank(&p, 1).unwrap();
        assert!(single.rank() <= 2);
        let mut prev = f64::INFINITY;
        for k in 1..=5 {
            let x = c3_lowrank(&p, k).unwrap();
            let err = spectral_norm(&(x.materialize() - &c3)).unwrap() / nrm;
            assert!(err <= 10.0 * (mu.powi(-(k as i32)) + f64::EPSILON), "k={k}: {err:e}");
            assert!(err < prev || err < 1e-13);
            prev = err;
        }
    }
}
