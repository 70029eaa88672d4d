use crate::{c64, Error, Result, C64};

/// `z ↦ (p z + q) / (r z + s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusTransform {
    pub p: C64,
    pub q: C64,
    pub r: C64,
    pub s: C64,
}

impl MobiusTransform {
    pub fn new(p: C64, q: C64, r: C64, s: C64) -> Result<Self> {
        let t = Self { p, q, r, s };
        let scale = [p, q, r, s].iter().map(|z| z.norm()).fold(0.0, f64::max);
        if !(t.det().norm() > 1e-14 * scale * scale) {
            return Err(Error::InvalidArgument("degenerate Möbius transform".into()));
        }
        Ok(t)
    }

    pub fn identity() -> Self {
        Self { p: c64(1.0), q: c64(0.0), r: c64(0.0), s: c64(1.0) }
    }

    /// `z ↦ z / scale`.
    pub fn scaling(scale: f64) -> Self {
        Self { p: c64(1.0), q: c64(0.0), r: c64(0.0), s: c64(scale) }
    }

    pub fn det(&self) -> C64 {
        self.p * self.s - self.q * self.r
    }

    pub fn apply(&self, z: C64) -> C64 {
        (self.p * z + self.q) / (self.r * z + self.s)
    }

    pub fn inverse(&self) -> Self {
        Self { p: self.s, q: -self.q, r: -self.r, s: self.p }
    }

    pub fn compose(&self, inner: &MobiusTransform) -> Self {
        Self {
            p: self.p * inner.p + self.q * inner.r,
            q: self.p * inner.q + self.q * inner.s,
            r: self.r * inner.p + self.s * inner.r,
            s: self.r * inner.q + self.s * inner.s,
        }
    }

    /// Sends `z1, z2, z3` to `0, 1, ∞`.
    fn to_standard(z1: C64, z2: C64, z3: C64) -> Self {
        let a = z2 - z3;
        let b = z2 - z1;
        Self { p: a, q: -z1 * a, r: b, s: -z3 * b }
    }

    /// The unique transform with `z_i ↦ w_i`; the points in each triple must
    /// be distinct.
    pub fn from_three_points(z: [C64; 3], w: [C64; 3]) -> Result<Self> {
        for pts in [&z, &w] {
            if pts[0] == pts[1] || pts[1] == pts[2] || pts[0] == pts[2] {
                return Err(Error::InvalidArgument("Möbius points must be distinct".into()));
            }
        }
        let tz = Self::to_standard(z[0], z[1], z[2]);
        let tw = Self::to_standard(w[0], w[1], w[2]);
        let t = tw.inverse().compose(&tz);
        Self::new(t.p, t.q, t.r, t.s)
    }
}

/// Cross-ratio `|c-a||d-b| / (|c-b||d-a|)` of the intervals `[a,b]`, `[c,d]`.
pub fn cross_ratio(a: f64, b: f64, c: f64, d: f64) -> f64 {
    ((c - a).abs() * (d - b).abs()) / ((c - b).abs() * (d - a).abs())
}

/// Maps `[a,b] ∪ [c,d]` onto `[-α,-1] ∪ [1,α]` with `a ↦ -α`, `b ↦ -1`,
/// `c ↦ 1`, `d ↦ α`. Returns the transform, `α` and the cross-ratio `γ`.
pub fn mobius_normalize(a: f64, b: f64, c: f64, d: f64) -> Result<(MobiusTransform, f64, f64)> {
    if !(a.is_finite() && d.is_finite() && a < b && b < c && c < d) {
        return Err(Error::InvalidSet(format!("need a < b < c < d, got ({a}, {b}, {c}, {d})")));
    }
    let gamma = cross_ratio(a, b, c, d);
    let alpha = -1.0 + 2.0 * gamma + 2.0 * (gamma * gamma - gamma).sqrt();
    let scale = a.abs().max(d.abs());
    if (a + d).abs() <= 1e-14 * scale && (b + c).abs() <= 1e-14 * scale {
        return Ok((MobiusTransform::scaling(c), d / c, gamma));
    }
    let t = MobiusTransform::from_three_points([c64(a), c64(b), c64(c)], [c64(-alpha), c64(-1.0), c64(1.0)])?;
    let image = t.apply(c64(d));
    if (image - c64(alpha)).norm() > 1e-8 * alpha {
        return Err(Error::NoConvergence(format!("normalized endpoint d ↦ {image}, expected {alpha}")));
    }
    Ok((t, alpha, gamma))
}
