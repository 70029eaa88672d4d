//! Spectral sets, Zolotarev numbers and ADI shift parameters.
//!
//! Two geometries are supported: a pair of equal-radius disks that are
//! reflections of each other through some point, and a pair of disjoint real
//! intervals. For disks the optimal rational function is `((z-α)/(z-β))^k`
//! and `Z_k = μ₁^{-k}` exactly; for intervals the shifts come from
//! Zolotarev's elliptic-function solution and `Z_k <= 4 exp(-kπ²/log(4α))`
//! where `α` is the normalized outer endpoint.

pub mod elliptic;
pub mod mobius;

use std::f64::consts::PI;

pub use elliptic::{elliptic_k, jacobi, jacobi_dn, Jacobi};
pub use mobius::{cross_ratio, mobius_normalize, MobiusTransform};

use crate::{c64, Error, Result, C64};

/// A closed region enclosing a spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralSet {
    Disk { center: C64, radius: f64 },
    Interval { lo: f64, hi: f64 },
}

impl SpectralSet {
    pub fn disk(center: C64, radius: f64) -> Result<Self> {
        let s = SpectralSet::Disk { center, radius };
        s.validate()?;
        Ok(s)
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        let s = SpectralSet::Interval { lo, hi };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SpectralSet::Disk { center, radius } => {
                if !(radius > 0.0 && radius.is_finite() && center.re.is_finite() && center.im.is_finite()) {
                    return Err(Error::InvalidSet(format!("disk radius {radius}, center {center}")));
                }
            }
            SpectralSet::Interval { lo, hi } => {
                if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                    return Err(Error::InvalidSet(format!("interval [{lo}, {hi}]")));
                }
            }
        }
        Ok(())
    }

    /// `-E`.
    pub fn negate(&self) -> Self {
        match *self {
            SpectralSet::Disk { center, radius } => SpectralSet::Disk { center: -center, radius },
            SpectralSet::Interval { lo, hi } => SpectralSet::Interval { lo: -hi, hi: -lo },
        }
    }

    pub fn contains(&self, z: C64, slack: f64) -> bool {
        match *self {
            SpectralSet::Disk { center, radius } => (z - center).norm() <= radius * (1.0 + slack),
            SpectralSet::Interval { lo, hi } => {
                let w = slack * lo.abs().max(hi.abs());
                z.im.abs() <= w && z.re >= lo - w && z.re <= hi + w
            }
        }
    }

    /// `max_{z ∈ E} |z|`.
    pub fn max_modulus(&self) -> f64 {
        match *self {
            SpectralSet::Disk { center, radius } => center.norm() + radius,
            SpectralSet::Interval { lo, hi } => lo.abs().max(hi.abs()),
        }
    }

    /// Points on which the supremum of an analytic function over the set is
    /// attained up to grid resolution: the boundary circle for disks, a
    /// uniform grid with both endpoints for intervals.
    pub fn sample(&self, count: usize) -> Vec<C64> {
        let count = count.max(2);
        match *self {
            SpectralSet::Disk { center, radius } => (0..count)
                .map(|j| center + C64::from_polar(radius, 2.0 * PI * j as f64 / count as f64))
                .collect(),
            SpectralSet::Interval { lo, hi } => {
                (0..count).map(|j| c64(lo + (hi - lo) * j as f64 / (count - 1) as f64)).collect()
            }
        }
    }
}

/// `dist(E, G) = min |z - w|`; zero when the sets meet.
pub fn distance(e: &SpectralSet, g: &SpectralSet) -> Result<f64> {
    use SpectralSet::*;
    match (*e, *g) {
        (Disk { center: c1, radius: r1 }, Disk { center: c2, radius: r2 }) => Ok(((c1 - c2).norm() - r1 - r2).max(0.0)),
        (Interval { lo: a, hi: b }, Interval { lo: c, hi: d }) => Ok((c - b).max(a - d).max(0.0)),
        (Disk { center, radius }, Interval { lo, hi }) | (Interval { lo, hi }, Disk { center, radius }) => {
            let x = center.re.clamp(lo, hi);
            Ok(((center - c64(x)).norm() - radius).max(0.0))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftSource {
    DiskOptimal,
    IntervalZolotarev,
    User,
}

/// Ordered shift pairs `(α_j, β_j)`: zeros and poles of the ADI rational
/// function `r(z) = Π (z-α_j)/(z-β_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSchedule {
    pairs: Vec<(C64, C64)>,
    source: ShiftSource,
}

impl ShiftSchedule {
    pub fn new(pairs: Vec<(C64, C64)>, source: ShiftSource) -> Result<Self> {
        for (j, (a, b)) in pairs.iter().enumerate() {
            if a == b {
                return Err(Error::InvalidArgument(format!("shift pair {j} has α = β = {a}")));
            }
            if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
                return Err(Error::NonFinite("shift parameters"));
            }
        }
        Ok(Self { pairs, source })
    }

    pub fn user(pairs: Vec<(C64, C64)>) -> Result<Self> {
        Self::new(pairs, ShiftSource::User)
    }

    pub fn repeated(pair: (C64, C64), k: usize, source: ShiftSource) -> Result<Self> {
        Self::new(vec![pair; k], source)
    }

    pub fn pairs(&self) -> &[(C64, C64)] {
        &self.pairs
    }

    pub fn source(&self) -> ShiftSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The first `k` pairs.
    pub fn truncated(&self, k: usize) -> Self {
        Self { pairs: self.pairs[..k.min(self.len())].to_vec(), source: self.source }
    }

    pub fn rational(&self, z: C64) -> C64 {
        self.pairs.iter().fold(c64(1.0), |acc, &(a, b)| acc * (z - a) / (z - b))
    }

    /// `sup_E |r| · sup_G |1/r|` over `count` sample points per set.
    pub fn sampled_ratio(&self, e: &SpectralSet, g: &SpectralSet, count: usize) -> f64 {
        let sup_e = e.sample(count).into_iter().map(|z| self.rational(z).norm()).fold(0.0, f64::max);
        let sup_g = g.sample(count).into_iter().map(|z| 1.0 / self.rational(z).norm()).fold(0.0, f64::max);
        sup_e * sup_g
    }
}

/// Optimal single shift pair for the antipodal disks `E` and `-E`:
/// `(e^{iθ}φ, -e^{iθ}φ)` with `φ = √(|z₀|² - η²)`, `θ = arg z₀`.
pub fn disk_shift(e: &SpectralSet) -> Result<(C64, C64)> {
    let SpectralSet::Disk { center, radius } = *e else {
        return Err(Error::UnsupportedGeometry("disk_shift needs a disk".into()));
    };
    e.validate()?;
    let z0 = center.norm();
    if z0 <= radius {
        return Err(Error::InvalidSet(format!("disks E and -E intersect: |z0| = {z0} <= eta = {radius}")));
    }
    let phi = ((z0 - radius) * (z0 + radius)).sqrt();
    let dir = center / z0;
    Ok((dir * phi, -dir * phi))
}

/// Shift pair for two equal-radius disks: translate so the centers are
/// antipodal, apply [`disk_shift`], translate back.
pub fn disk_pair_shift(e: &SpectralSet, g: &SpectralSet) -> Result<(C64, C64)> {
    let (SpectralSet::Disk { center: ce, radius: re }, SpectralSet::Disk { center: cg, radius: rg }) = (*e, *g) else {
        return Err(Error::UnsupportedGeometry("disk_pair_shift needs two disks".into()));
    };
    if (re - rg).abs() > 1e-12 * re.max(rg) {
        return Err(Error::UnsupportedGeometry(format!("disks of unequal radius {re} and {rg}")));
    }
    let mid = 0.5 * (ce + cg);
    let (a, b) = disk_shift(&SpectralSet::Disk { center: ce - mid, radius: re })?;
    Ok((a + mid, b + mid))
}

/// `μ₁ = (|z₀| + φ)/(|z₀| - φ)` for a disk pair.
pub fn disk_mu(e: &SpectralSet, g: &SpectralSet) -> Result<f64> {
    let (SpectralSet::Disk { center: ce, radius }, SpectralSet::Disk { center: cg, .. }) = (*e, *g) else {
        return Err(Error::UnsupportedGeometry("disk_mu needs two disks".into()));
    };
    disk_pair_shift(e, g)?;
    let z0 = 0.5 * (ce - cg).norm();
    let phi = ((z0 - radius) * (z0 + radius)).sqrt();
    Ok((z0 + phi) / (z0 - phi))
}

/// `Z_k(E, -E) = μ₁^{-k}`.
pub fn zolotarev_disk_bound(k: usize, e: &SpectralSet) -> Result<f64> {
    disk_shift(e)?;
    Ok(disk_mu(e, &e.negate())?.powi(-(k as i32)))
}

/// `4 μ₂^{-k}`, `μ₂ = exp(π² / log(4b/a))`, bounding
/// `Z_k([-b,-a], [a,b])`.
pub fn zolotarev_interval_bound(k: usize, a: f64, b: f64) -> Result<f64> {
    if !(0.0 < a && a < b && b.is_finite()) {
        return Err(Error::InvalidSet(format!("need 0 < a < b, got a = {a}, b = {b}")));
    }
    Ok(4.0 * mu2(a, b).powi(-(k as i32)))
}

pub fn mu2(a: f64, b: f64) -> f64 {
    (PI * PI / (4.0 * b / a).ln()).exp()
}

/// Normalizes an interval pair, whichever side the A-set lies on. Returns
/// the transform, `α`, and whether the A-set maps onto `[1, α]`.
fn normalize_pair(a_set: (f64, f64), b_set: (f64, f64)) -> Result<(MobiusTransform, f64, bool)> {
    let ((alo, ahi), (blo, bhi)) = (a_set, b_set);
    if ahi < blo {
        let (t, alpha, _) = mobius_normalize(alo, ahi, blo, bhi)?;
        Ok((t, alpha, false))
    } else if bhi < alo {
        let (t, alpha, _) = mobius_normalize(blo, bhi, alo, ahi)?;
        Ok((t, alpha, true))
    } else {
        Err(Error::InvalidSet(format!("intervals [{alo}, {ahi}] and [{blo}, {bhi}] overlap")))
    }
}

fn interval_bounds(s: &SpectralSet) -> Result<(f64, f64)> {
    match *s {
        SpectralSet::Interval { lo, hi } => {
            s.validate()?;
            Ok((lo, hi))
        }
        _ => Err(Error::UnsupportedGeometry("expected an interval".into())),
    }
}

/// `J` Zolotarev shift pairs for disjoint intervals: the images under the
/// inverse normalizing map of `∓α·dn((2j-1)K/(2J), κ)`, `κ = √(1-1/α²)`.
pub fn interval_shifts(j: usize, a_set: &SpectralSet, b_set: &SpectralSet) -> Result<ShiftSchedule> {
    let (ia, ib) = (interval_bounds(a_set)?, interval_bounds(b_set)?);
    if j == 0 {
        return Err(Error::InvalidArgument("interval_shifts needs J >= 1".into()));
    }
    let (t, alpha, a_right) = normalize_pair(ia, ib)?;
    let kp = 1.0 / alpha;
    let kappa = ((1.0 - kp) * (1.0 + kp)).sqrt();
    let big_k = elliptic::k_from_complement(kp);
    let inv = t.inverse();
    let sign = if a_right { 1.0 } else { -1.0 };
    let pairs = (1..=j)
        .map(|idx| {
            let u = (2 * idx - 1) as f64 * big_k / (2 * j) as f64;
            let x = alpha * elliptic::jacobi_with_complement(u, kappa, kp).dn;
            (snap_real(inv.apply(c64(sign * x))), snap_real(inv.apply(c64(-sign * x))))
        })
        .collect();
    ShiftSchedule::new(pairs, ShiftSource::IntervalZolotarev)
}

fn snap_real(z: C64) -> C64 {
    c64(z.re)
}

/// Base `μ` of the geometric decay of the Zolotarev bound for the pair:
/// `μ₁` for disks, `exp(π²/log(4α))` for intervals.
pub fn decay_base(e: &SpectralSet, g: &SpectralSet) -> Result<f64> {
    match (e, g) {
        (SpectralSet::Disk { .. }, SpectralSet::Disk { .. }) => disk_mu(e, g),
        (SpectralSet::Interval { .. }, SpectralSet::Interval { .. }) => {
            let (_, alpha, _) = normalize_pair(interval_bounds(e)?, interval_bounds(g)?)?;
            Ok((PI * PI / (4.0 * alpha).ln()).exp())
        }
        _ => Err(Error::UnsupportedGeometry("mixed disk/interval pair".into())),
    }
}

/// Upper bound on `Z_k(E, G)`: `μ₁^{-k}` (exact) for disks,
/// `min(1, 4 μ^{-k})` for intervals.
pub fn zolotarev_bound(k: usize, e: &SpectralSet, g: &SpectralSet) -> Result<f64> {
    let mu = decay_base(e, g)?;
    Ok(match e {
        SpectralSet::Disk { .. } => mu.powi(-(k as i32)),
        SpectralSet::Interval { .. } => (4.0 * mu.powi(-(k as i32))).min(1.0),
    })
}

/// Optimal shifts for the pair with `k` steps.
pub fn optimal_shifts(k: usize, e: &SpectralSet, g: &SpectralSet) -> Result<ShiftSchedule> {
    match (e, g) {
        (SpectralSet::Disk { .. }, SpectralSet::Disk { .. }) => {
            ShiftSchedule::repeated(disk_pair_shift(e, g)?, k, ShiftSource::DiskOptimal)
        }
        (SpectralSet::Interval { .. }, SpectralSet::Interval { .. }) if k == 0 => {
            ShiftSchedule::new(Vec::new(), ShiftSource::IntervalZolotarev)
        }
        (SpectralSet::Interval { .. }, SpectralSet::Interval { .. }) => interval_shifts(k, e, g),
        _ => Err(Error::UnsupportedGeometry("mixed disk/interval pair".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disk(z0: f64, eta: f64) -> SpectralSet {
        SpectralSet::disk(c64(z0), eta).unwrap()
    }

    #[test]
    fn disk_shift_examples() {
        let (a, b) = disk_shift(&disk(5.0, 3.0)).unwrap();
        assert!((a - c64(4.0)).norm() < 1e-15 && (b + c64(4.0)).norm() < 1e-15);
        let (a, b) = disk_shift(&disk(-3.0, 2.0 * 2f64.sqrt())).unwrap();
        assert!((a - c64(-1.0)).norm() < 1e-14 && (b - c64(1.0)).norm() < 1e-14);
        assert!(disk_shift(&disk(2.0, 2.0)).is_err());
    }

    #[test]
    fn disk_bound_examples() {
        let e = disk(5.0, 3.0);
        assert_eq!(zolotarev_disk_bound(0, &e).unwrap(), 1.0);
        assert!((zolotarev_disk_bound(1, &e).unwrap() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn disk_sampled_ratio_matches_mu() {
        let e = disk(30.0, 10.0);
        let g = e.negate();
        let pair = disk_shift(&e).unwrap();
        let mu = disk_mu(&e, &g).unwrap();
        assert!((mu - (17.0 + 12.0 * 2f64.sqrt())).abs() < 1e-12);
        for k in [1, 5] {
            let s = ShiftSchedule::repeated(pair, k, ShiftSource::DiskOptimal).unwrap();
            let ratio = s.sampled_ratio(&e, &g, 1000);
            let z = zolotarev_disk_bound(k, &e).unwrap();
            assert!(ratio <= z * 1.01 && ratio >= z / 1.01, "k={k}: {ratio} vs {z}");
        }
    }

    #[test]
    fn rotated_and_translated_disks() {
        let e = SpectralSet::disk(C64::from_polar(30.0, 0.7), 10.0).unwrap();
        let g = e.negate();
        let s = ShiftSchedule::repeated(disk_shift(&e).unwrap(), 3, ShiftSource::DiskOptimal).unwrap();
        let z = zolotarev_disk_bound(3, &e).unwrap();
        assert!((s.sampled_ratio(&e, &g, 1000) / z - 1.0).abs() < 1e-10);

        let shift = C64::new(-4.0, 2.5);
        let (et, gt) = (
            SpectralSet::disk(C64::new(30.0, 0.0) + shift, 10.0).unwrap(),
            SpectralSet::disk(C64::new(-30.0, 0.0) + shift, 10.0).unwrap(),
        );
        let s = ShiftSchedule::repeated(disk_pair_shift(&et, &gt).unwrap(), 3, ShiftSource::DiskOptimal).unwrap();
        assert!((s.sampled_ratio(&et, &gt, 1000) / z - 1.0).abs() < 1e-10);
        assert!(disk_pair_shift(&et, &SpectralSet::disk(c64(-30.0), 5.0).unwrap()).is_err());
    }

    #[test]
    fn interval_single_pair_symmetric() {
        let (a, b) = (SpectralSet::interval(-2.0, -1.0).unwrap(), SpectralSet::interval(1.0, 2.0).unwrap());
        let s = interval_shifts(1, &a, &b).unwrap();
        let (al, be) = s.pairs()[0];
        assert!((al + be).norm() < 1e-14);
        assert!(a.contains(al, 0.0) && b.contains(be, 0.0));
        assert!(s.sampled_ratio(&a, &b, 1000) <= zolotarev_interval_bound(1, 1.0, 2.0).unwrap());
    }

    #[test]
    fn interval_sampled_ratio_wide() {
        let (a, b) = (SpectralSet::interval(-100.0, -1.0).unwrap(), SpectralSet::interval(1.0, 100.0).unwrap());
        let s = interval_shifts(5, &a, &b).unwrap();
        let bound = 4.0 * (-5.0 * PI * PI / 400f64.ln()).exp();
        assert!(s.sampled_ratio(&a, &b, 1000) <= bound);
        let mut alphas: Vec<f64> = s.pairs().iter().map(|p| -p.0.re).collect();
        let mut betas: Vec<f64> = s.pairs().iter().map(|p| p.1.re).collect();
        alphas.sort_by(f64::total_cmp);
        betas.sort_by(f64::total_cmp);
        for (x, y) in alphas.iter().zip(&betas) {
            assert!((x - y).abs() < 1e-12 * y);
        }
    }

    #[test]
    fn interval_shifts_swapped_sides_and_general() {
        let (a, b) = (SpectralSet::interval(2.0, 8.0).unwrap(), SpectralSet::interval(0.5, 1.0).unwrap());
        for j in 1..=6 {
            let s = interval_shifts(j, &a, &b).unwrap();
            for &(al, be) in s.pairs() {
                assert!(a.contains(al, 1e-12) && b.contains(be, 1e-12));
            }
            let bound = zolotarev_bound(j, &a, &b).unwrap();
            assert!(s.sampled_ratio(&a, &b, 1000) <= bound);
        }
    }

    #[test]
    fn interval_bound_examples() {
        assert_eq!(zolotarev_interval_bound(0, 1.0, 100.0).unwrap(), 4.0);
        assert!(zolotarev_interval_bound(1, 1.0, 1.0).is_err());
        let v = zolotarev_interval_bound(10, 1.0, 100.0).unwrap();
        // mpmath: 4*exp(-10*pi**2/log(400)) at 30 digits
        assert!((v - 2.805_594_834_116_419e-7).abs() < 1e-20, "{v:e}");
    }

    #[test]
    fn distances() {
        assert!((distance(&disk(30.0, 10.0), &disk(-30.0, 10.0)).unwrap() - 40.0).abs() < 1e-13);
        let (a, b) = (SpectralSet::interval(-3.0, -1.0).unwrap(), SpectralSet::interval(2.0, 5.0).unwrap());
        assert_eq!(distance(&a, &b).unwrap(), 3.0);
        assert_eq!(distance(&b, &a).unwrap(), 3.0);
    }

    proptest::proptest! {
        #[test]
        fn negated_disk_negates_shifts(z0 in 1.0f64..100.0, frac in 0.01f64..0.99) {
            let eta = z0 * frac;
            let (a, b) = disk_shift(&disk(z0, eta)).unwrap();
            let (a2, b2) = disk_shift(&disk(-z0, eta)).unwrap();
            proptest::prop_assert!((a + a2).norm() < 1e-12 * z0 && (b + b2).norm() < 1e-12 * z0);
        }

        #[test]
        fn symmetric_interval_shifts_closed_under_negation(a in 0.01f64..10.0, ratio in 1.5f64..1e4, j in 1usize..12) {
            let (sa, sb) = (SpectralSet::interval(-a * ratio, -a).unwrap(), SpectralSet::interval(a, a * ratio).unwrap());
            let s = interval_shifts(j, &sa, &sb).unwrap();
            for &(al, be) in s.pairs() {
                proptest::prop_assert!((al + be).norm() <= 1e-12 * be.norm());
            }
            let ratio_s = s.sampled_ratio(&sa, &sb, 1000);
            proptest::prop_assert!(ratio_s <= zolotarev_interval_bound(j, a, a * ratio).unwrap().min(1.0) * (1.0 + 1e-12));
        }
    }
}
