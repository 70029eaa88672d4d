//! Seeded random test problems with normal `A`, `B` and prescribed spectra.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::adi::{DenseOperator, SylvesterProblem};
use crate::factors::thin_qr;
use crate::spectra::SpectralSet;
use crate::{c64, CMat, Error, FactoredRhs, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetKind {
    /// `λ(A) ⊂ disk(30, 10)`, `λ(B) ⊂ disk(-30, 10)`.
    Disk,
    /// `λ(A) ⊂ [-100, -1]`, `λ(B) ⊂ [1, 100]`.
    Interval,
}

impl SetKind {
    pub fn sets(self) -> (SpectralSet, SpectralSet) {
        match self {
            SetKind::Disk => {
                let e = SpectralSet::Disk { center: c64(30.0), radius: 10.0 };
                (e, e.negate())
            }
            SetKind::Interval => (SpectralSet::Interval { lo: -100.0, hi: -1.0 }, SpectralSet::Interval { lo: 1.0, hi: 100.0 }),
        }
    }
}

/// Singular value profile of the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// `σ_i = r^{i-1}`.
    Geometric(f64),
    /// `σ_i = i^{-p}`.
    Algebraic(f64),
}

impl Decay {
    pub fn weights(self, rho: usize) -> Vec<f64> {
        (0..rho)
            .map(|i| match self {
                Decay::Geometric(r) => r.powi(i as i32),
                Decay::Algebraic(p) => ((i + 1) as f64).powf(-p),
            })
            .collect()
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    // Box–Muller.
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let v: f64 = rng.gen();
    let r = (-2.0 * u.ln()).sqrt();
    let t = std::f64::consts::TAU * v;
    C64::new(r * t.cos(), r * t.sin()) * std::f64::consts::FRAC_1_SQRT_2
}

/// `cols` orthonormal columns of a Haar-distributed unitary matrix.
pub fn random_orthonormal(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    let g = CMat::from_fn(rows, cols, |_, _| gaussian(rng));
    let (mut q, r) = thin_qr(g);
    for j in 0..cols.min(rows) {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            for i in 0..rows {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Uniform sample from a disk or interval.
pub fn sample_in(rng: &mut ChaCha8Rng, set: &SpectralSet) -> C64 {
    match *set {
        SpectralSet::Disk { center, radius } => loop {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if z.norm() <= 1.0 {
                return center + z * radius;
            }
        },
        SpectralSet::Interval { lo, hi } => c64(rng.gen_range(lo..=hi)),
    }
}

/// Normal operator with `n` eigenvalues drawn from `set`, including a point
/// on the boundary closest to the other set's side for intervals.
fn normal_operator(rng: &mut ChaCha8Rng, set: &SpectralSet, n: usize) -> Result<DenseOperator> {
    let mut eigs: Vec<C64> = (0..n).map(|_| sample_in(rng, set)).collect();
    if let SpectralSet::Interval { lo, hi } = *set {
        if n >= 2 {
            eigs[0] = c64(lo);
            eigs[1] = c64(hi);
        }
    }
    DenseOperator::normal(eigs, random_orthonormal(rng, n, n))
}

/// `AX - XB = F` with normal `A` (`m×m`) and `B` (`n×n`), spectra drawn from
/// `kind`'s sets, and `F` of rank `rho` with the given weight profile.
pub fn normal_problem_with(kind: SetKind, m: usize, n: usize, weights: &[f64], seed: u64) -> Result<SylvesterProblem> {
    let rho = weights.len();
    if rho > m.min(n) {
        return Err(Error::InvalidArgument(format!("rank {rho} exceeds min({m}, {n})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a_set, b_set) = kind.sets();
    let a = normal_operator(&mut rng, &a_set, m)?;
    let b = normal_operator(&mut rng, &b_set, n)?;
    let u = random_orthonormal(&mut rng, m, rho);
    let v = random_orthonormal(&mut rng, n, rho);
    let rhs = FactoredRhs::new(u, weights.to_vec(), v)?;
    SylvesterProblem::new(Arc::new(a), Arc::new(b), rhs, a_set, b_set)
}

/// [`normal_problem_with`] using weights `2^{-(i-1)}`.
pub fn normal_problem(kind: SetKind, m: usize, n: usize, rho: usize, seed: u64) -> Result<SylvesterProblem> {
    normal_problem_with(kind, m, n, &Decay::Geometric(0.5).weights(rho), seed)
}

#[derive(Debug, Clone)]
pub struct SuiteProblem {
    pub name: String,
    pub problem: SylvesterProblem,
}

/// Twelve problems: disk and interval spectra, `ρ ∈ {1, 5, 20}`, geometric
/// (`10^{-(i-1)/2}`) and algebraic (`i^{-2}`) weight decay, size `n×n`.
pub fn fiadi_suite(n: usize, seed: u64) -> Result<Vec<SuiteProblem>> {
    let mut out = Vec::new();
    let mut s = seed;
    for kind in [SetKind::Disk, SetKind::Interval] {
        for rho in [1, 5, 20] {
            for (tag, decay) in [("geometric", Decay::Geometric(10f64.powf(-0.5))), ("algebraic", Decay::Algebraic(2.0))] {
                let problem = normal_problem_with(kind, n, n, &decay.weights(rho), s)?;
                out.push(SuiteProblem { name: format!("{kind:?}-rho{rho}-{tag}").to_lowercase(), problem });
                s += 1;
            }
        }
    }
    Ok(out)
}
