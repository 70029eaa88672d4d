//! Dense direct Sylvester solvers used as references.

use nalgebra::linalg::Schur;

use crate::{CMat, Error, Result, C64};

fn check(a: &CMat, b: &CMat, f: &CMat) -> Result<()> {
    if !a.is_square() || !b.is_square() || f.nrows() != a.nrows() || f.ncols() != b.nrows() {
        return Err(Error::Shape(format!(
            "A {}x{}, B {}x{}, F {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            f.nrows(),
            f.ncols()
        )));
    }
    for (name, m) in [("A", a), ("B", b), ("F", f)] {
        if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite(name));
        }
    }
    Ok(())
}

fn schur(m: &CMat) -> Result<(CMat, CMat)> {
    Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .map(|s| s.unpack())
        .ok_or_else(|| Error::NoConvergence("Schur decomposition".into()))
}

/// Bartels–Stewart for `AX - XB = F`. With `A = QTQ*` and `B = PSP*`
/// complex Schur forms, `TY - YS = Q*FP` is solved column by column:
/// `(T - s_jj I) y_j = g_j + Σ_{i<j} s_ij y_i`.
pub fn sylvester_dense(a: &CMat, b: &CMat, f: &CMat) -> Result<CMat> {
    check(a, b, f)?;
    let (m, n) = (a.nrows(), b.nrows());
    if m == 0 || n == 0 {
        return Ok(CMat::zeros(m, n));
    }
    let (q, t) = schur(a)?;
    let (p, s) = schur(b)?;
    let g = q.adjoint() * f * &p;
    let scale = t.iter().chain(s.iter()).map(|z| z.norm()).fold(0.0, f64::max);
    let mut y = CMat::zeros(m, n);
    for j in 0..n {
        let mut rhs = g.column(j).clone_owned();
        for i in 0..j {
            let sij = s[(i, j)];
            if sij != C64::new(0.0, 0.0) {
                rhs += y.column(i) * sij;
            }
        }
        let sjj = s[(j, j)];
        for r in (0..m).rev() {
            let mut acc = rhs[r];
            for c in r + 1..m {
                acc -= t[(r, c)] * rhs[c];
            }
            let pivot = t[(r, r)] - sjj;
            if !(pivot.norm() > 16.0 * f64::EPSILON * scale) {
                return Err(Error::SingularShift { shift: sjj });
            }
            rhs[r] = acc / pivot;
        }
        y.set_column(j, &rhs);
    }
    Ok(q * y * p.adjoint())
}

/// `(I ⊗ A - Bᵀ ⊗ I) vec X = vec F` by dense LU. Only for small sizes.
pub fn kronecker_solve(a: &CMat, b: &CMat, f: &CMat) -> Result<CMat> {
    check(a, b, f)?;
    let (m, n) = (a.nrows(), b.nrows());
    let mn = m * n;
    let mut k = CMat::zeros(mn, mn);
    for j in 0..n {
        k.view_mut((j * m, j * m), (m, m)).copy_from(a);
        for i in 0..n {
            let bij = b[(i, j)];
            for r in 0..m {
                k[(j * m + r, i * m + r)] -= bij;
            }
        }
    }
    let rhs = nalgebra::DVector::from_column_slice(f.as_slice());
    let x = k.lu().solve(&rhs).ok_or_else(|| Error::SingularShift { shift: C64::new(0.0, 0.0) })?;
    Ok(CMat::from_column_slice(m, n, x.as_slice()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, m: usize, n: usize) -> CMat {
        CMat::from_fn(m, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn shifted(rng: &mut ChaCha8Rng, n: usize, s: f64) -> CMat {
        let mut a = random(rng, n, n);
        for i in 0..n {
            a[(i, i)] += c64(s);
        }
        a
    }

    #[test]
    fn scalar() {
        let x = sylvester_dense(&CMat::from_element(1, 1, c64(4.0)), &CMat::from_element(1, 1, c64(-4.0)), &CMat::from_element(1, 1, c64(3.0)))
            .unwrap();
        assert!((x[(0, 0)] - c64(3.0 / 8.0)).norm() < 1e-16);
    }

    #[test]
    fn bartels_stewart_matches_kronecker() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (m, n) in [(1, 1), (3, 5), (8, 8), (16, 12)] {
            let a = shifted(&mut rng, m, 6.0);
            let b = shifted(&mut rng, n, -6.0);
            let f = random(&mut rng, m, n);
            let x1 = sylvester_dense(&a, &b, &f).unwrap();
            let x2 = kronecker_solve(&a, &b, &f).unwrap();
            assert!((&x1 - &x2).norm() <= 1e-12 * x2.norm(), "{m}x{n}");
            assert!((&a * &x1 - &x1 * &b - &f).norm() <= 1e-12 * f.norm());
        }
    }

    #[test]
    fn residual_at_moderate_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = shifted(&mut rng, 60, 10.0);
        let b = shifted(&mut rng, 40, -10.0);
        let f = random(&mut rng, 60, 40);
        let x = sylvester_dense(&a, &b, &f).unwrap();
        assert!((&a * &x - &x * &b - &f).norm() <= 1e-12 * f.norm());
    }

    #[test]
    fn common_eigenvalue_rejected() {
        let a = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c64(1.0), c64(2.0)]));
        let b = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![c64(2.0)]));
        assert!(sylvester_dense(&a, &b, &CMat::zeros(2, 1)).is_err());
    }

    #[test]
    fn shape_checked() {
        assert!(sylvester_dense(&CMat::zeros(2, 2), &CMat::zeros(3, 3), &CMat::zeros(2, 2)).is_err());
    }
}
