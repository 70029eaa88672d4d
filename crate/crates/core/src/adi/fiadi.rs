use std::ops::Range;

use super::{fadi_factors, SylvesterProblem};
use crate::spectra::{decay_base, optimal_shifts, zolotarev_bound};
use crate::{Error, LowRankFactors, Result};

/// Largest step count considered when searching for `Z_s <= target`.
const MAX_STEPS: usize = 500;

/// How `τ ≈ ‖X‖₂` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauMode {
    /// Compressed fADI probe on the first batch with this many steps.
    WarmStart { probe_steps: usize },
    /// `σ₁(F) / (‖A‖₂ + ‖B‖₂)`, a lower bound on `‖X‖₂`.
    APriori,
    Given(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiAdiConfig {
    pub epsilon: f64,
    /// `ℓ₁ < … < ℓ_{d+1}` (1-based, `ℓ₁ = 1`, `ℓ_{d+1} = ρ+1`); `None`
    /// groups weights within one factor of the Zolotarev decay base.
    pub batch_boundaries: Option<Vec<usize>>,
    pub tau_mode: TauMode,
    pub compress_each_batch: bool,
}

impl FiAdiConfig {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            batch_boundaries: None,
            tau_mode: TauMode::WarmStart { probe_steps: 3 },
            compress_each_batch: true,
        }
    }

    pub fn with_boundaries(mut self, boundaries: Vec<usize>) -> Self {
        self.batch_boundaries = Some(boundaries);
        self
    }

    /// One weight per batch (`d = ρ`).
    pub fn one_per_weight(mut self, rho: usize) -> Self {
        self.batch_boundaries = Some((1..=rho + 1).collect());
        self
    }

    pub fn with_tau(mut self, mode: TauMode) -> Self {
        self.tau_mode = mode;
        self
    }

    pub fn without_compression(mut self) -> Self {
        self.compress_each_batch = false;
        self
    }
}

#[derive(Debug, Clone)]
pub struct FiAdiReport {
    pub factors: LowRankFactors,
    pub tau: f64,
    /// 0-based weight ranges.
    pub batches: Vec<Range<usize>>,
    /// `s_i*` for each batch after the `K_max` cap.
    pub steps: Vec<usize>,
    pub k_max: usize,
}

/// Smallest `s` with `Z_s(E, G) <= target`.
fn steps_for(problem: &SylvesterProblem, target: f64) -> Result<usize> {
    for s in 0..=MAX_STEPS {
        if zolotarev_bound(s, &problem.a_set, &problem.b_set)? <= target {
            return Ok(s);
        }
    }
    Err(Error::NoConvergence(format!("no s <= {MAX_STEPS} reaches Z_s <= {target:e}")))
}

fn batches_from(problem: &SylvesterProblem, config: &FiAdiConfig) -> Result<Vec<Range<usize>>> {
    let rho = problem.rhs.rank();
    let weights = problem.rhs.weights();
    match &config.batch_boundaries {
        Some(l) => {
            let ok = l.len() >= 2 && l[0] == 1 && *l.last().unwrap() == rho + 1 && l.windows(2).all(|w| w[0] < w[1]);
            if !ok {
                return Err(Error::InvalidArgument(format!(
                    "batch boundaries must increase strictly from 1 to {}, got {l:?}",
                    rho + 1
                )));
            }
            Ok(l.windows(2).map(|w| w[0] - 1..w[1] - 1).collect())
        }
        None => {
            let mu = decay_base(&problem.a_set, &problem.b_set)?;
            let mut out = Vec::new();
            let mut start = 0;
            for i in 1..rho {
                if weights[i] < weights[start] / mu {
                    out.push(start..i);
                    start = i;
                }
            }
            out.push(start..rho);
            Ok(out)
        }
    }
}

/// FI-ADI: split `F` into batches, give batch `i` the smallest `s_i` with
/// `Z_{s_i} <= ε τ dist(E,G) / (d σ_{ℓ_i})`, cap at `K_max` (`Z_{K_max} <= ε`),
/// run fADI per batch and recompress after each one.
pub fn fi_adi(problem: &SylvesterProblem, config: &FiAdiConfig) -> Result<LowRankFactors> {
    Ok(fi_adi_detailed(problem, config)?.factors)
}

pub fn fi_adi_detailed(problem: &SylvesterProblem, config: &FiAdiConfig) -> Result<FiAdiReport> {
    let eps = config.epsilon;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    let (m, n) = (problem.nrows(), problem.ncols());
    // Fails early on geometries without a shift formula.
    decay_base(&problem.a_set, &problem.b_set)?;
    let k_max = steps_for(problem, eps)?;
    if problem.rhs.rank() == 0 {
        return Ok(FiAdiReport { factors: LowRankFactors::zero(m, n), tau: 0.0, batches: Vec::new(), steps: Vec::new(), k_max });
    }
    let batches = batches_from(problem, config)?;
    let d = batches.len();
    let tau = match config.tau_mode {
        TauMode::WarmStart { probe_steps } => estimate_tau(problem, probe_steps.max(1), batches[0].clone())?,
        TauMode::APriori => estimate_tau_a_priori(problem),
        TauMode::Given(t) => t,
    };
    let dist = problem.distance();
    let tol = eps / (2.0 * d as f64);
    let weights = problem.rhs.weights();

    let mut acc = LowRankFactors::zero(m, n);
    let mut steps = Vec::with_capacity(d);
    for range in &batches {
        let lead = weights[range.start];
        let s = if lead == 0.0 { 0 } else { steps_for(problem, eps * tau * dist / (d as f64 * lead))?.min(k_max) };
        steps.push(s);
        if s == 0 {
            continue;
        }
        let shifts = optimal_shifts(s, &problem.a_set, &problem.b_set)?;
        let part = problem.rhs.batch(range.clone());
        let f = fadi_factors(problem.a.as_ref(), problem.b.as_ref(), &part.scaled_left(), part.right_vectors(), &shifts)?;
        acc = acc.concat(&f)?;
        if config.compress_each_batch {
            acc = acc.compress(tol)?;
        }
    }
    Ok(FiAdiReport { factors: acc, tau, batches, steps, k_max })
}

/// Warm-start `τ`: largest singular value of the compressed fADI probe on
/// the given batch with `probe_steps` optimal shifts.
pub fn estimate_tau(problem: &SylvesterProblem, probe_steps: usize, batch: Range<usize>) -> Result<f64> {
    if probe_steps == 0 {
        return Err(Error::InvalidArgument("warm-start needs at least one probe step".into()));
    }
    if problem.rhs.rank() == 0 {
        return Ok(0.0);
    }
    let part = problem.rhs.batch(batch);
    let shifts = optimal_shifts(probe_steps, &problem.a_set, &problem.b_set)?;
    let f = fadi_factors(problem.a.as_ref(), problem.b.as_ref(), &part.scaled_left(), part.right_vectors(), &shifts)?;
    Ok(f.compress(0.0)?.weights().first().copied().unwrap_or(0.0))
}

/// `σ₁(F) / (‖A‖₂ + ‖B‖₂) <= ‖X‖₂`.
pub fn estimate_tau_a_priori(problem: &SylvesterProblem) -> f64 {
    let s1 = problem.rhs.weights().first().copied().unwrap_or(0.0);
    s1 / (problem.a.norm_bound() + problem.b.norm_bound())
}
