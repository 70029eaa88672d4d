//! Dense singular value decomposition by one-sided (Hestenes) Jacobi
//! rotations, plus the relative ε-rank.
//!
//! One-sided Jacobi orthogonalises the columns of `G = M V` by plane
//! rotations until every pair satisfies `|g_i* g_j| <= tol ‖g_i‖ ‖g_j‖`. The
//! singular values are then the column norms of `G`, which gives small
//! singular values to high absolute accuracy (`O(u ‖M‖₂)`).

use crate::{c64, CMat, Error, Result, C64};

const MAX_SWEEPS: usize = 80;

/// Thin SVD `M = U diag(values) V*` with `p = min(rows, cols)` columns.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Singular values, nonincreasing.
    pub values: Vec<f64>,
    /// `rows × p`, orthonormal columns.
    pub u: CMat,
    /// `cols × p`, orthonormal columns.
    pub v: CMat,
}

impl Svd {
    pub fn reconstruct(&self) -> CMat {
        let mut us = self.u.clone();
        for (j, s) in self.values.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * self.v.adjoint()
    }
}

/// Full (thin) SVD of a dense complex matrix.
pub fn dense_svd(m: &CMat) -> Result<Svd> {
    check_finite(m)?;
    if m.nrows() < m.ncols() {
        let t = jacobi(&m.adjoint(), true)?;
        return Ok(Svd { values: t.values, u: t.v, v: t.u });
    }
    jacobi(m, true)
}

/// Singular values only (nonincreasing); skips accumulation of `V`.
pub fn singular_values(m: &CMat) -> Result<Vec<f64>> {
    check_finite(m)?;
    let work = if m.nrows() < m.ncols() { m.adjoint() } else { m.clone() };
    Ok(jacobi(&work, false)?.values)
}

/// Spectral norm `σ₁(M)`; zero for empty matrices.
pub fn spectral_norm(m: &CMat) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    Ok(singular_values(m)?[0])
}

/// Smallest `k` such that `σ_{k+1} <= ε σ₁`, treating values beyond the end
/// of the sequence as zero.
pub fn eps_rank(values: &[f64], epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let Some(&first) = values.first() else {
        return Ok(0);
    };
    let threshold = epsilon * first;
    Ok((0..=values.len())
        .find(|&k| values.get(k).copied().unwrap_or(0.0) <= threshold)
        .unwrap_or(values.len()))
}

fn check_finite(m: &CMat) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("svd input"))
    }
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    // x* y
    let (mut re, mut im) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        re += a.re * b.re + a.im * b.im;
        im += a.re * b.im - a.im * b.re;
    }
    C64::new(re, im)
}

fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Applies `[x, y] <- [c x - s e^{-iφ} y,  s x + c e^{-iφ} y]` in place.
fn rotate(x: &mut [C64], y: &mut [C64], c: f64, s: f64, phase: C64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let yb = phase * *b;
        let xa = *a;
        *a = xa * c - yb * s;
        *b = xa * s + yb * c;
    }
}

fn two_columns(data: &mut [C64], rows: usize, i: usize, j: usize) -> (&mut [C64], &mut [C64]) {
    debug_assert!(i < j);
    let (head, tail) = data.split_at_mut(j * rows);
    (&mut head[i * rows..(i + 1) * rows], &mut tail[..rows])
}

/// Jacobi SVD for `rows >= cols`.
fn jacobi(m: &CMat, want_v: bool) -> Result<Svd> {
    let rows = m.nrows();
    let cols = m.ncols();
    debug_assert!(rows >= cols);
    let mut g = m.clone();
    let mut v = if want_v { CMat::identity(cols, cols) } else { CMat::zeros(0, 0) };
    let tol = f64::EPSILON * (rows as f64).sqrt().max(1.0);
    // Columns below this are noise at the O(u ‖M‖) accuracy level; rotating
    // against them never settles.
    let floor = (f64::EPSILON * m.norm()).powi(2);

    let mut converged = cols < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let gs = g.as_mut_slice();
        let mut norms: Vec<f64> = (0..cols).map(|k| norm_sqr(&gs[k * rows..(k + 1) * rows])).collect();
        let mut rotations = 0usize;
        for i in 0..cols - 1 {
            for j in i + 1..cols {
                let (alpha, beta) = (norms[i], norms[j]);
                if alpha <= floor || beta <= floor {
                    continue;
                }
                let (gi, gj) = two_columns(gs, rows, i, j);
                let gamma = dot(gi, gj);
                let abs_gamma = gamma.norm();
                if abs_gamma <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotations += 1;
                let phase = gamma.conj() / abs_gamma;
                let zeta = (beta - alpha) / (2.0 * abs_gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(gi, gj, c, s, phase);
                norms[i] = norm_sqr(gi);
                norms[j] = norm_sqr(gj);
                if want_v {
                    let vs = v.as_mut_slice();
                    let (vi, vj) = two_columns(vs, cols, i, j);
                    rotate(vi, vj, c, s, phase);
                }
            }
        }
        converged = rotations == 0;
    }
    if !converged {
        return Err(Error::NoConvergence(format!(
            "Jacobi SVD did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<(usize, f64)> = (0..cols).map(|k| (k, g.column(k).norm())).collect();
    order.sort_by(|a, b| b.1.total_cmp(&a.1));
    let values: Vec<f64> = order.iter().map(|&(_, s)| s).collect();

    let mut u = CMat::zeros(rows, cols);
    let mut missing = Vec::new();
    for (dst, &(src, s)) in order.iter().enumerate() {
        if s * s > floor {
            let col = g.column(src) / c64(s);
            u.set_column(dst, &col);
        } else {
            missing.push(dst);
        }
    }
    complete_orthonormal(&mut u, &missing);

    let v = if want_v {
        let mut sorted = CMat::zeros(cols, cols);
        for (dst, &(src, _)) in order.iter().enumerate() {
            sorted.set_column(dst, &v.column(src));
        }
        sorted
    } else {
        v
    };
    Ok(Svd { values, u, v })
}

/// Fills the listed columns of `u` with unit vectors orthogonal to all other
/// columns (two-pass Gram-Schmidt against the standard basis).
fn complete_orthonormal(u: &mut CMat, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let rows = u.nrows();
    let mut filled: Vec<bool> = vec![true; u.ncols()];
    for &k in missing {
        filled[k] = false;
    }
    let mut candidate = 0usize;
    for &k in missing {
        loop {
            let mut e = nalgebra::DVector::<C64>::zeros(rows);
            e[candidate % rows] = c64(1.0);
            candidate += 1;
            for _ in 0..2 {
                for (j, ok) in filled.iter().enumerate() {
                    if *ok {
                        let q = u.column(j);
                        let proj = q.dotc(&e);
                        e -= q * proj;
                    }
                }
            }
            let nrm = e.norm();
            if nrm > 0.5 {
                u.set_column(k, &(e / c64(nrm)));
                filled[k] = true;
                break;
            }
            if candidate > 2 * rows + missing.len() {
                break;
            }
        }
    }
}
