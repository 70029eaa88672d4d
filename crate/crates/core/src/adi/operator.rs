//! Square operators with cheap shifted solves.

use std::sync::OnceLock;

use nalgebra::DVector;

use crate::svd::spectral_norm;
use crate::{CMat, Error, Result, C64};

/// A square matrix exposed through products and shifted solves on blocks of
/// columns. Implementations must be usable from several threads at once.
pub trait LinearOperator: Send + Sync + std::fmt::Debug {
    fn dim(&self) -> usize;

    /// `A X`.
    fn apply(&self, x: &CMat) -> CMat;

    /// `A* X`.
    fn apply_adjoint(&self, x: &CMat) -> CMat;

    /// `(A - σI)⁻¹ X`.
    fn shifted_solve(&self, shift: C64, rhs: &CMat) -> Result<CMat>;

    /// `(A* - σI)⁻¹ X`.
    fn shifted_solve_adjoint(&self, shift: C64, rhs: &CMat) -> Result<CMat>;

    /// `‖A‖₂`, or an upper bound on it.
    fn norm_bound(&self) -> f64;

    fn to_dense(&self) -> CMat;

    /// Eigendecomposition `A = V diag(λ) V*` when it is known exactly.
    fn eigen(&self) -> Option<(Vec<C64>, CMat)> {
        None
    }
}

fn check_block(dim: usize, x: &CMat) -> Result<()> {
    if x.nrows() != dim {
        return Err(Error::Shape(format!("operator of order {dim} applied to {} rows", x.nrows())));
    }
    Ok(())
}

/// A dense matrix; shifted solves use an LU factorization per call.
#[derive(Debug)]
pub struct DenseOperator {
    a: CMat,
    eigen: Option<(Vec<C64>, CMat)>,
    norm: OnceLock<f64>,
}

impl DenseOperator {
    pub fn new(a: CMat) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Shape(format!("operator must be square, got {}x{}", a.nrows(), a.ncols())));
        }
        if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("operator"));
        }
        Ok(Self { a, eigen: None, norm: OnceLock::new() })
    }

    /// `V diag(λ) V*` for unitary `V`.
    pub fn normal(eigenvalues: Vec<C64>, v: CMat) -> Result<Self> {
        let n = eigenvalues.len();
        if v.nrows() != n || v.ncols() != n {
            return Err(Error::Shape("eigenvector matrix must be square and match the eigenvalues".into()));
        }
        let defect = (v.adjoint() * &v - CMat::identity(n, n)).norm();
        if defect > 1e-10 * (n as f64).max(1.0) {
            return Err(Error::NotNormal(format!("eigenvectors not unitary (defect {defect:e})")));
        }
        let mut scaled = v.clone();
        for (j, l) in eigenvalues.iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= *l;
            }
        }
        let a = scaled * v.adjoint();
        let norm = eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max);
        let cell = OnceLock::new();
        let _ = cell.set(norm);
        Ok(Self { a, eigen: Some((eigenvalues, v)), norm: cell })
    }

    pub fn matrix(&self) -> &CMat {
        &self.a
    }

    fn solve_with(&self, m: CMat, shift: C64, rhs: &CMat) -> Result<CMat> {
        check_block(self.dim(), rhs)?;
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let lu = m.lu();
        let u = lu.u();
        let min_pivot = u.diagonal().iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
        if !(min_pivot > 4.0 * f64::EPSILON * scale * self.dim() as f64) {
            return Err(Error::SingularShift { shift });
        }
        lu.solve(rhs).ok_or(Error::SingularShift { shift })
    }
}

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.a.nrows()
    }

    fn apply(&self, x: &CMat) -> CMat {
        &self.a * x
    }

    fn apply_adjoint(&self, x: &CMat) -> CMat {
        self.a.ad_mul(x)
    }

    fn shifted_solve(&self, shift: C64, rhs: &CMat) -> Result<CMat> {
        let mut m = self.a.clone();
        for i in 0..m.nrows() {
            m[(i, i)] -= shift;
        }
        self.solve_with(m, shift, rhs)
    }

    fn shifted_solve_adjoint(&self, shift: C64, rhs: &CMat) -> Result<CMat> {
        let mut m = self.a.adjoint();
        for i in 0..m.nrows() {
            m[(i, i)] -= shift;
        }
        self.solve_with(m, shift, rhs)
    }

    fn norm_bound(&self) -> f64 {
        *self.norm.get_or_init(|| spectral_norm(&self.a).unwrap_or(f64::INFINITY))
    }

    fn to_dense(&self) -> CMat {
        self.a.clone()
    }

    fn eigen(&self) -> Option<(Vec<C64>, CMat)> {
        self.eigen.clone()
    }
}

/// `diag(d)`.
#[derive(Debug, Clone)]
pub struct DiagonalOperator {
    d: Vec<C64>,
}

impl DiagonalOperator {
    pub fn new(d: Vec<C64>) -> Result<Self> {
        if d.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("diagonal operator"));
        }
        Ok(Self { d })
    }

    pub fn entries(&self) -> &[C64] {
        &self.d
    }

    fn scale_rows(&self, x: &CMat, f: impl Fn(C64) -> Result<C64>) -> Result<CMat> {
        check_block(self.d.len(), x)?;
        let factors = self.d.iter().map(|&z| f(z)).collect::<Result<Vec<_>>>()?;
        let mut out = x.clone();
        for (i, s) in factors.iter().enumerate() {
            for j in 0..out.ncols() {
                out[(i, j)] *= *s;
            }
        }
        Ok(out)
    }

    fn inverse_shifted(&self, shift: C64, z: C64) -> Result<C64> {
        let den = z - shift;
        if den.norm() <= 4.0 * f64::EPSILON * z.norm().max(shift.norm()) {
            return Err(Error::SingularShift { shift });
        }
        Ok(den.inv())
    }
}

impl LinearOperator for DiagonalOperator {
    fn dim(&self) -> usize {
        self.d.len()
    }

    fn apply(&self, x: &CMat) -> CMat {
        self.scale_rows(x, Ok).expect("row count checked by caller")
    }

    fn apply_adjoint(&self, x: &CMat) -> CMat {
        self.scale_rows(x, |z| Ok(z.conj())).expect("row count checked by caller")
    }

    fn shifted_solve(&self, shift: C64, rhs: &CMat) -> Result<CMat> {
        self.scale_rows(rhs, |z| self.inverse_shifted(shift, z))
    }

    fn shifted_solve_adjoint(&self, shift: C64, rhs: &CMat) -> Result<CMat> {
        self.scale_rows(rhs, |z| self.inverse_shifted(shift, z.conj()))
    }

    fn norm_bound(&self) -> f64 {
        self.d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn to_dense(&self) -> CMat {
        CMat::from_diagonal(&DVector::from_column_slice(&self.d))
    }

    fn eigen(&self) -> Option<(Vec<C64>, CMat)> {
        let n = self.d.len();
        Some((self.d.clone(), CMat::identity(n, n)))
    }
}

/// Tridiagonal matrix with sub-, main and super-diagonals.
#[derive(Debug, Clone)]
pub struct TridiagonalOperator {
    sub: Vec<C64>,
    diag: Vec<C64>,
    sup: Vec<C64>,
    norm: f64,
    eigen: Option<(Vec<C64>, CMat)>,
}

impl TridiagonalOperator {
    pub fn new(sub: Vec<C64>, diag: Vec<C64>, sup: Vec<C64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 || sub.len() + 1 != n || sup.len() + 1 != n {
            return Err(Error::Shape(format!(
                "tridiagonal bands of length {}, {}, {}",
                sub.len(),
                n,
                sup.len()
            )));
        }
        if sub.iter().chain(&diag).chain(&sup).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite("tridiagonal operator"));
        }
        // ‖A‖₂ <= √(‖A‖₁ ‖A‖∞)
        let row = |i: usize| {
            diag[i].norm() + if i > 0 { sub[i - 1].norm() } else { 0.0 } + if i + 1 < n { sup[i].norm() } else { 0.0 }
        };
        let col = |j: usize| {
            diag[j].norm() + if j > 0 { sup[j - 1].norm() } else { 0.0 } + if j + 1 < n { sub[j].norm() } else { 0.0 }
        };
        let inf = (0..n).map(row).fold(0.0, f64::max);
        let one = (0..n).map(col).fold(0.0, f64::max);
        Ok(Self { sub, diag, sup, norm: (inf * one).sqrt(), eigen: None })
    }

    /// Replaces the norm estimate with a known exact value.
    pub fn with_norm(mut self, norm: f64) -> Self {
        self.norm = norm;
        self
    }

    pub fn with_eigen(mut self, eigenvalues: Vec<C64>, v: CMat) -> Self {
        self.eigen = Some((eigenvalues, v));
        self
    }

    fn product(sub: &[C64], diag: &[C64], sup: &[C64], x: &CMat) -> CMat {
        let n = diag.len();
        let mut y = CMat::zeros(n, x.ncols());
        for j in 0..x.ncols() {
            for i in 0..n {
                let mut s = diag[i] * x[(i, j)];
                if i > 0 {
                    s += sub[i - 1] * x[(i - 1, j)];
                }
                if i + 1 < n {
                    s += sup[i] * x[(i + 1, j)];
                }
                y[(i, j)] = s;
            }
        }
        y
    }

    fn adjoint_bands(&self) -> (Vec<C64>, Vec<C64>, Vec<C64>) {
        (
            self.sup.iter().map(|z| z.conj()).collect(),
            self.diag.iter().map(|z| z.conj()).collect(),
            self.sub.iter().map(|z| z.conj()).collect(),
        )
    }
}

/// LU with partial pivoting of a tridiagonal matrix, in the layout of
/// LAPACK's `gttrf` (one extra superdiagonal of fill).
struct TridiagLu {
    dl: Vec<C64>,
    d: Vec<C64>,
    du: Vec<C64>,
    du2: Vec<C64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(sub: &[C64], diag: &[C64], sup: &[C64], shift: C64) -> Result<Self> {
        let n = diag.len();
        let mut dl = sub.to_vec();
        let mut d: Vec<C64> = diag.iter().map(|&z| z - shift).collect();
        let mut du = sup.to_vec();
        let mut du2 = vec![C64::new(0.0, 0.0); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let scale = dl.iter().chain(&d).chain(&du).map(|z| z.norm()).fold(0.0, f64::max);
        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i].norm() == 0.0 {
                    return Err(Error::SingularShift { shift });
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        let tiny = 4.0 * f64::EPSILON * scale * n as f64;
        if d.iter().any(|z| !(z.norm() > tiny)) {
            return Err(Error::SingularShift { shift });
        }
        Ok(Self { dl, d, du, du2, swapped })
    }

    fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.d.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                let t = self.dl[i] * b[i];
                b[i + 1] -= t;
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }

    fn solve(&self, rhs: &CMat) -> CMat {
        let mut x = rhs.clone();
        let n = rhs.nrows();
        for col in x.as_mut_slice().chunks_mut(n) {
            self.solve_in_place(col);
        }
        x
    }
}

impl LinearOperator for TridiagonalOperator {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &CMat) -> CMat {
        Self::product(&self.sub, &self.diag, &self.sup, x)
    }

    fn apply_adjoint(&self, x: &CMat) -> CMat {
        let (l, d, u) = self.adjoint_bands();
        Self::product(&l, &d, &u, x)
    }

    fn shifted_solve(&self, shift: C64, rhs: &CMat) -> Result<CMat> {
        check_block(self.dim(), rhs)?;
        Ok(TridiagLu::factor(&self.sub, &self.diag, &self.sup, shift)?.solve(rhs))
    }

    fn shifted_solve_adjoint(&self, shift: C64, rhs: &CMat) -> Result<CMat> {
        check_block(self.dim(), rhs)?;
        let (l, d, u) = self.adjoint_bands();
        Ok(TridiagLu::factor(&l, &d, &u, shift)?.solve(rhs))
    }

    fn norm_bound(&self) -> f64 {
        self.norm
    }

    fn to_dense(&self) -> CMat {
        let n = self.dim();
        let mut a = CMat::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = self.diag[i];
            if i + 1 < n {
                a[(i + 1, i)] = self.sub[i];
                a[(i, i + 1)] = self.sup[i];
            }
        }
        a
    }

    fn eigen(&self) -> Option<(Vec<C64>, CMat)> {
        self.eigen.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMat {
        CMat::from_fn(rows, cols, |_, _| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
    }

    fn random_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<C64> {
        (0..n).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect()
    }

    fn solve_residual(op: &dyn LinearOperator, shift: C64, rhs: &CMat) -> (f64, f64) {
        let x = op.shifted_solve(shift, rhs).unwrap();
        let r = op.apply(&x) - &x * shift - rhs;
        let xa = op.shifted_solve_adjoint(shift, rhs).unwrap();
        let ra = op.apply_adjoint(&xa) - &xa * shift - rhs;
        (r.norm() / rhs.norm(), ra.norm() / rhs.norm())
    }

    #[test]
    fn operators_agree_with_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 30;
        let tri = TridiagonalOperator::new(random_vec(n - 1, &mut rng), random_vec(n, &mut rng), random_vec(n - 1, &mut rng))
            .unwrap();
        let diag = DiagonalOperator::new(random_vec(n, &mut rng)).unwrap();
        let dense = DenseOperator::new(random(n, n, &mut rng)).unwrap();
        let x = random(n, 3, &mut rng);
        let ops: [&dyn LinearOperator; 3] = [&tri, &diag, &dense];
        for op in ops {
            let a = op.to_dense();
            assert!((op.apply(&x) - &a * &x).norm() < 1e-13);
            assert!((op.apply_adjoint(&x) - a.adjoint() * &x).norm() < 1e-13);
            let (r, ra) = solve_residual(op, C64::new(0.3, -0.2), &x);
            assert!(r < 1e-12 && ra < 1e-12, "{r:e} {ra:e}");
            assert!(op.norm_bound() >= spectral_norm(&a).unwrap() * (1.0 - 1e-12));
        }
    }

    #[test]
    fn tridiagonal_pivots_on_small_diagonal() {
        // Zero diagonal forces row swaps; odd orders would be singular.
        let n = 10;
        let tri = TridiagonalOperator::new(vec![c64(1.0); n - 1], vec![c64(0.0); n], vec![c64(2.0); n - 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = random(n, 2, &mut rng);
        let (r, ra) = solve_residual(&tri, c64(0.0), &b);
        assert!(r < 1e-13 && ra < 1e-13);
    }

    #[test]
    fn singular_shift_reported() {
        let diag = DiagonalOperator::new(vec![c64(1.0), c64(2.0)]).unwrap();
        let b = CMat::from_element(2, 1, c64(1.0));
        assert!(matches!(diag.shifted_solve(c64(2.0), &b), Err(Error::SingularShift { .. })));
        let dense = DenseOperator::new(diag.to_dense()).unwrap();
        assert!(matches!(dense.shifted_solve(c64(1.0), &b), Err(Error::SingularShift { .. })));
        let tri = TridiagonalOperator::new(vec![c64(0.0)], vec![c64(1.0), c64(2.0)], vec![c64(0.0)]).unwrap();
        assert!(matches!(tri.shifted_solve(c64(1.0), &b), Err(Error::SingularShift { .. })));
    }

    #[test]
    fn normal_operator_rebuilds_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (q, _) = crate::factors::thin_qr(random(6, 6, &mut rng));
        let lam = random_vec(6, &mut rng);
        let op = DenseOperator::normal(lam.clone(), q.clone()).unwrap();
        let a = op.to_dense();
        assert!((&a * a.adjoint() - a.adjoint() * &a).norm() < 1e-14);
        assert!((op.norm_bound() - spectral_norm(&a).unwrap()).abs() < 1e-13);
        assert!(DenseOperator::normal(lam, q * c64(2.0)).is_err());
    }
}
