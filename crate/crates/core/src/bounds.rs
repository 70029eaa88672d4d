//! Explicit singular value and ε-rank bounds for solutions of `AX - XB = F`.
//!
//! All curves are relative: they bound `σ_{t+1}(X) / ‖X‖₂`.

use std::f64::consts::PI;

use crate::spectra::{cross_ratio, mu2};
use crate::{Error, Result};

/// Geometry of `λ(A)` and `λ(B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundGeometry {
    /// `λ(A) ⊂ disk(z₀, η)`, `λ(B) ⊂ disk(-z₀, η)`, `0 < η < z₀`.
    Disk { z0: f64, eta: f64 },
    /// `λ(A) ⊂ [-b, -a]`, `λ(B) ⊂ [a, b]`, `0 < a < b`.
    Interval { a: f64, b: f64 },
    /// `λ(A) ⊂ [a, b]`, `λ(B) ⊂ [c, d]`, `a < b < c < d`.
    Split { a: f64, b: f64, c: f64, d: f64 },
}

impl BoundGeometry {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            BoundGeometry::Disk { z0, eta } => 0.0 < eta && eta < z0 && z0.is_finite(),
            BoundGeometry::Interval { a, b } => 0.0 < a && a < b && b.is_finite(),
            BoundGeometry::Split { a, b, c, d } => a.is_finite() && a < b && b < c && c < d && d.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSet(format!("{self:?}")))
        }
    }

    /// Decay base of the Zolotarev numbers for the geometry.
    pub fn set_mu(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            BoundGeometry::Disk { z0, eta } => mu1(z0, eta),
            BoundGeometry::Interval { a, b } => mu2(a, b),
            BoundGeometry::Split { a, b, c, d } => (PI * PI / (16.0 * cross_ratio(a, b, c, d)).ln()).exp(),
        })
    }

    /// The `‖A‖ + ‖B‖` over distance factor and the polynomial coefficient
    /// in front of `√t`.
    fn constants(&self) -> (f64, f64) {
        match *self {
            BoundGeometry::Disk { z0, eta } => ((z0 + eta) / (z0 - eta), 1.5),
            BoundGeometry::Interval { a, b } => (b / a, 6.0),
            BoundGeometry::Split { a, b, c, d } => ((a.abs().max(b.abs()) + c.abs().max(d.abs())) / (c - b).abs(), 6.0),
        }
    }
}

/// `μ₁ = (z₀ + φ)/(z₀ - φ)`, `φ = √(z₀² - η²)`.
pub fn mu1(z0: f64, eta: f64) -> f64 {
    let phi = ((z0 - eta) * (z0 + eta)).sqrt();
    (z0 + phi) / (z0 - phi)
}

/// Hypotheses `σ_{i+1}(F) <= K μ_F^{-i} ‖F‖₂` for an `n`-column problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub k: f64,
    /// Defaults to the geometry's own decay base.
    pub mu_f: Option<f64>,
    pub geometry: BoundGeometry,
    pub n: usize,
}

impl BoundParams {
    pub fn new(geometry: BoundGeometry, n: usize) -> Self {
        Self { k: 1.0, mu_f: None, geometry, n }
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub fn with_mu_f(mut self, mu_f: f64) -> Self {
        self.mu_f = Some(mu_f);
        self
    }

    fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if !(self.k >= 1.0 && self.k.is_finite()) {
            return Err(Error::InvalidArgument(format!("K must be >= 1, got {}", self.k)));
        }
        if let Some(m) = self.mu_f {
            if !(m > 1.0) {
                return Err(Error::InvalidArgument(format!("mu_F must exceed 1, got {m}")));
            }
        }
        Ok(())
    }

    /// `(μ, ℓ)` with `μ = min(μ_F, μ_set)` and
    /// `ℓ = ⌊log max(μ_F, μ_set) / log μ⌋`.
    pub fn rate(&self) -> Result<(f64, usize)> {
        self.validate()?;
        let ms = self.geometry.set_mu()?;
        let mf = self.mu_f.unwrap_or(ms);
        let (lo, hi) = (mf.min(ms), mf.max(ms));
        // Guards against ratios like 1.9999999999999998 for μ_F = μ².
        let ell = (hi.ln() / lo.ln() * (1.0 + 1e-12)).floor() as usize;
        Ok((lo, ell.max(1)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    Disk,
    Interval,
    SplitIntervals,
    HadamardCube,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundPoint {
    pub t: usize,
    pub value: f64,
    /// Index whose bound was used; differs from `t` when `t` itself is not
    /// of the admissible form.
    pub admissible_t: usize,
    pub ell: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub entries: Vec<BoundPoint>,
    pub method: BoundMethod,
}

impl BoundCurve {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|p| p.value).collect()
    }

    pub fn value_at(&self, t: usize) -> Option<f64> {
        self.entries.iter().find(|p| p.t == t).map(|p| p.value)
    }
}

/// `‖X‖₂ <= ‖F‖₂ / (2(z₀ - η))` for normal `A`, `B` with spectra in
/// `disk(z₀, η)` and its negation.
pub fn horn_bound(f_norm: f64, z0: f64, eta: f64) -> Result<f64> {
    BoundGeometry::Disk { z0, eta }.validate()?;
    Ok(f_norm / (2.0 * (z0 - eta)))
}

/// `t = ℓ k(k+1)/2` for the given `k`.
pub fn admissible_index(ell: usize, k: usize) -> usize {
    ell * k * (k + 1) / 2
}

/// `K · c · (p√t + 1) · μ^{-ℓ(√(8t/ℓ+1)-1)/2}` at an admissible `t`.
fn growth_bound_value(params: &BoundParams, mu: f64, ell: usize, t: usize) -> f64 {
    let (ratio, p) = params.geometry.constants();
    let tf = t as f64;
    let exponent = ell as f64 * ((8.0 * tf / ell as f64 + 1.0).sqrt() - 1.0) / 2.0;
    params.k * ratio * (p * tf.sqrt() + 1.0) * mu.powf(-exponent)
}

/// Largest `ℓ k(k+1)/2 <= t`, if any.
fn largest_admissible(ell: usize, t: usize) -> Option<usize> {
    let mut best = None;
    let mut k = 1;
    while admissible_index(ell, k) <= t {
        best = Some(admissible_index(ell, k));
        k += 1;
    }
    best
}

fn growth_bound_curve(params: &BoundParams, t_values: &[usize], method: BoundMethod) -> Result<BoundCurve> {
    let (mu, ell) = params.rate()?;
    let mut entries = Vec::with_capacity(t_values.len());
    let mut last = 0;
    for &t in t_values {
        if t == 0 || t >= params.n {
            return Err(Error::InvalidArgument(format!("need 1 <= t < n = {}, got {t}", params.n)));
        }
        if t <= last {
            return Err(Error::InvalidArgument("t values must increase strictly".into()));
        }
        last = t;
        // The hypotheses with ℓ also hold for every smaller ℓ', so a
        // non-admissible t takes the best bound over ℓ' <= ℓ.
        let mut best: Option<BoundPoint> = None;
        for l in 1..=ell {
            if let Some(ta) = largest_admissible(l, t) {
                let value = growth_bound_value(params, mu, l, ta);
                if best.map_or(true, |b| value < b.value) {
                    best = Some(BoundPoint { t, value, admissible_t: ta, ell: l });
                }
            }
            if admissible_index(l, 1) > t {
                break;
            }
        }
        entries.push(best.expect("t >= 1 is admissible for l = 1"));
    }
    Ok(BoundCurve { entries, method })
}

fn expect_geometry(params: &BoundParams, want: BoundMethod) -> Result<()> {
    let ok = matches!(
        (params.geometry, want),
        (BoundGeometry::Disk { .. }, BoundMethod::Disk)
            | (BoundGeometry::Interval { .. }, BoundMethod::Interval)
            | (BoundGeometry::Split { .. }, BoundMethod::SplitIntervals)
    );
    if ok {
        Ok(())
    } else {
        Err(Error::UnsupportedGeometry(format!("{want:?} bound with {:?}", params.geometry)))
    }
}

/// Antipodal disks: `K (z₀+η)/(z₀-η) (1.5√t + 1) μ^{-ℓ(√(8t/ℓ+1)-1)/2}`.
pub fn bound_disk(params: &BoundParams, t_values: &[usize]) -> Result<BoundCurve> {
    expect_geometry(params, BoundMethod::Disk)?;
    growth_bound_curve(params, t_values, BoundMethod::Disk)
}

/// Symmetric intervals: `K (b/a) (6√t + 1) μ^{-ℓ(√(8t/ℓ+1)-1)/2}`.
pub fn bound_interval(params: &BoundParams, t_values: &[usize]) -> Result<BoundCurve> {
    expect_geometry(params, BoundMethod::Interval)?;
    growth_bound_curve(params, t_values, BoundMethod::Interval)
}

/// `[a,b]` and `[c,d]`: constant `(max(|a|,|b|) + max(|c|,|d|))/|c-b|` and
/// base `exp(π²/log 16γ)` with `γ` the cross-ratio.
pub fn bound_split_intervals(params: &BoundParams, t_values: &[usize]) -> Result<BoundCurve> {
    expect_geometry(params, BoundMethod::SplitIntervals)?;
    growth_bound_curve(params, t_values, BoundMethod::SplitIntervals)
}

/// `rank_ε(X) <= k*(k*+1)/2` with
/// `k* = ⌈log((z₀+η)(1.5√n+1)/((z₀-η)ε)) / log μ₁⌉`.
pub fn eps_rank_bound(epsilon: f64, n: usize, z0: f64, eta: f64) -> Result<usize> {
    BoundGeometry::Disk { z0, eta }.validate()?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let arg = (z0 + eta) * (1.5 * (n as f64).sqrt() + 1.0) / ((z0 - eta) * epsilon);
    let k = (arg.ln() / mu1(z0, eta).ln()).ceil().max(0.0) as usize;
    Ok(k * (k + 1) / 2)
}

/// `t = k(k+1)(k+2)(k+3)/24`.
pub fn tetrahedral_index(k: usize) -> usize {
    k * (k + 1) * (k + 2) * (k + 3) / 24
}

/// `σ_{t+1}(C°³) <= K₁ μ₁^{-k} ‖C°³‖₂` at `t = k(k+1)(k+2)(k+3)/24`. Only
/// the order of `K₁` is known (`O(√n)`), so it is an explicit multiplier.
pub fn bound_c3(t_values: &[usize], z0: f64, eta: f64, n: usize, k1: f64) -> Result<BoundCurve> {
    BoundGeometry::Disk { z0, eta }.validate()?;
    if !(k1 > 0.0) {
        return Err(Error::InvalidArgument(format!("K1 must be positive, got {k1}")));
    }
    let mu = mu1(z0, eta);
    let mut entries = Vec::with_capacity(t_values.len());
    for &t in t_values {
        if t == 0 || t >= n {
            return Err(Error::InvalidArgument(format!("need 1 <= t < n = {n}, got {t}")));
        }
        let k = (1..).take_while(|&k| tetrahedral_index(k) <= t).last().unwrap_or(0);
        if tetrahedral_index(k) != t {
            return Err(Error::InvalidArgument(format!("t = {t} is not of the form k(k+1)(k+2)(k+3)/24")));
        }
        entries.push(BoundPoint { t, value: k1 * mu.powi(-(k as i32)), admissible_t: t, ell: 1 });
    }
    Ok(BoundCurve { entries, method: BoundMethod::HadamardCube })
}

/// `1 <= k(k+1)/2 < n`.
pub fn triangular_indices(n: usize) -> Vec<usize> {
    (1..).map(|k| k * (k + 1) / 2).take_while(|&t| t < n).collect()
}
