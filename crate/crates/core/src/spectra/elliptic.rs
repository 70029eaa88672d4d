//! Complete elliptic integral `K` and Jacobi `sn`, `cn`, `dn` by the
//! arithmetic-geometric mean.
//!
//! Both entry points also accept the complementary modulus `κ' = √(1-κ²)`
//! directly, which is how the interval shift code calls them: for widely
//! separated intervals `κ` is within rounding of 1 and only `κ'` carries
//! information.

use std::f64::consts::FRAC_PI_2;

use crate::{Error, Result};

const AGM_TOL: f64 = 1e-15;
const MAX_AGM_STEPS: usize = 64;

fn check_modulus(kappa: f64) -> Result<()> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::InvalidArgument(format!("elliptic modulus must lie in [0, 1), got {kappa}")));
    }
    Ok(())
}

fn complement(kappa: f64) -> f64 {
    ((1.0 - kappa) * (1.0 + kappa)).sqrt()
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    0.5 * (a + b)
}

/// `K(κ) = π / (2 AGM(1, κ'))`.
pub fn elliptic_k(kappa: f64) -> Result<f64> {
    check_modulus(kappa)?;
    Ok(k_from_complement(complement(kappa)))
}

/// `K` as a function of the complementary modulus `κ' ∈ (0, 1]`.
pub fn k_from_complement(kp: f64) -> f64 {
    FRAC_PI_2 / agm(1.0, kp)
}

/// Jacobi elliptic functions `sn`, `cn`, `dn`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

pub fn jacobi(u: f64, kappa: f64) -> Result<Jacobi> {
    check_modulus(kappa)?;
    Ok(jacobi_with_complement(u, kappa, complement(kappa)))
}

pub fn jacobi_dn(u: f64, kappa: f64) -> Result<f64> {
    Ok(jacobi(u, kappa)?.dn)
}

/// Descending AGM (`a₀ = 1, b₀ = κ', c₀ = κ`), then the backward amplitude
/// recursion `φ_{n-1} = (φ_n + asin(c_n/a_n sin φ_n)) / 2` from
/// `φ_N = 2ᴺ a_N u`.
pub fn jacobi_with_complement(u: f64, kappa: f64, kp: f64) -> Jacobi {
    if kappa == 0.0 {
        return Jacobi { sn: u.sin(), cn: u.cos(), dn: 1.0 };
    }
    let mut a = vec![1.0];
    let mut c = vec![kappa];
    let mut b = kp;
    while c.len() < MAX_AGM_STEPS {
        let an = *a.last().unwrap();
        let cn = *c.last().unwrap();
        if cn.abs() <= AGM_TOL * an {
            break;
        }
        let next = 0.5 * (an + b);
        b = (an * b).sqrt();
        // c_{n+1} = c_n² / (4 a_{n+1}) avoids the cancellation in (a - b)/2.
        c.push(cn * cn / (4.0 * next));
        a.push(next);
    }
    let n = a.len() - 1;
    let mut phi = (1u64 << n) as f64 * a[n] * u;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (kp * kp + kappa * kappa * cn * cn).sqrt();
    Jacobi { sn, cn, dn }
}
