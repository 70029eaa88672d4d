//! Python module `pyfiadi`. Matrices cross the boundary as nested lists of
//! Python `complex` (row-major); real numbers are accepted wherever a
//! complex is expected.

use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use fiadi::adi::{self, DenseOperator, FiAdiConfig, TauMode};
use fiadi::spectra::{self, SpectralSet};
use fiadi::{bounds, mtx, oracle, poisson, structured, suite, svd, CMat, FactoredRhs, LowRankFactors, C64};

fn err(e: fiadi::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_mat(rows: Vec<Vec<C64>>) -> PyResult<CMat> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("ragged matrix rows"));
    }
    Ok(CMat::from_fn(m, n, |i, j| rows[i][j]))
}

fn from_mat(m: &CMat) -> Vec<Vec<C64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// A disk or real interval containing a spectrum.
#[pyclass(name = "SpectralSet", frozen, from_py_object)]
#[derive(Clone)]
struct PySpectralSet(SpectralSet);

#[pymethods]
impl PySpectralSet {
    #[staticmethod]
    fn disk(center: C64, radius: f64) -> PyResult<Self> {
        SpectralSet::disk(center, radius).map(Self).map_err(err)
    }

    #[staticmethod]
    fn interval(lo: f64, hi: f64) -> PyResult<Self> {
        SpectralSet::interval(lo, hi).map(Self).map_err(err)
    }

    fn negate(&self) -> Self {
        Self(self.0.negate())
    }

    fn __repr__(&self) -> String {
        match self.0 {
            SpectralSet::Disk { center, radius } => format!("SpectralSet.disk({center}, {radius})"),
            SpectralSet::Interval { lo, hi } => format!("SpectralSet.interval({lo}, {hi})"),
        }
    }
}

/// `W D Y*` factors of a low-rank matrix.
#[pyclass(name = "LowRank", frozen)]
struct PyLowRank(LowRankFactors);

#[pymethods]
impl PyLowRank {
    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.nrows(), self.0.ncols())
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn left(&self) -> Vec<Vec<C64>> {
        from_mat(self.0.left())
    }

    fn middle(&self) -> Vec<Vec<C64>> {
        from_mat(self.0.middle())
    }

    fn right(&self) -> Vec<Vec<C64>> {
        from_mat(self.0.right())
    }

    fn to_dense(&self) -> Vec<Vec<C64>> {
        from_mat(&self.0.materialize())
    }

    fn compress(&self, tol: f64) -> PyResult<Self> {
        self.0.compress(tol).map(Self).map_err(err)
    }

    /// Writes a factor bundle directory.
    fn save(&self, dir: &str) -> PyResult<()> {
        mtx::write_bundle(dir, &self.0).map_err(err)
    }

    #[staticmethod]
    fn load(dir: &str) -> PyResult<Self> {
        mtx::read_bundle(dir).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("LowRank(shape=({}, {}), rank={})", self.0.nrows(), self.0.ncols(), self.0.rank())
    }
}

/// `AX - XB = F` with `λ(A) ⊂ a_set`, `λ(B) ⊂ b_set`; `F` is truncated at
/// relative tolerance `tol` on construction.
#[pyclass(name = "SylvesterProblem", frozen)]
struct PyProblem(adi::SylvesterProblem);

#[pymethods]
impl PyProblem {
    #[new]
    #[pyo3(signature = (a, b, f, a_set, b_set, tol = 0.0))]
    fn new(
        a: Vec<Vec<C64>>,
        b: Vec<Vec<C64>>,
        f: Vec<Vec<C64>>,
        a_set: PySpectralSet,
        b_set: PySpectralSet,
        tol: f64,
    ) -> PyResult<Self> {
        let a = DenseOperator::new(to_mat(a)?).map_err(err)?;
        let b = DenseOperator::new(to_mat(b)?).map_err(err)?;
        let rhs = FactoredRhs::from_dense(&to_mat(f)?, tol).map_err(err)?;
        adi::SylvesterProblem::new(Arc::new(a), Arc::new(b), rhs, a_set.0, b_set.0).map(Self).map_err(err)
    }

    /// Random normal problem with spectra in `disk(±30, 10)` or `±[1, 100]`
    /// and right-hand side weights `2^{-i}`.
    #[staticmethod]
    #[pyo3(signature = (kind, m, n, rho, seed = 0))]
    fn random_normal(kind: &str, m: usize, n: usize, rho: usize, seed: u64) -> PyResult<Self> {
        let kind = match kind {
            "disk" => suite::SetKind::Disk,
            "interval" => suite::SetKind::Interval,
            other => return Err(PyValueError::new_err(format!("kind must be 'disk' or 'interval', got {other:?}"))),
        };
        suite::normal_problem(kind, m, n, rho, seed).map(Self).map_err(err)
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.0.nrows(), self.0.ncols())
    }

    fn a(&self) -> Vec<Vec<C64>> {
        from_mat(&self.0.a.to_dense())
    }

    fn b(&self) -> Vec<Vec<C64>> {
        from_mat(&self.0.b.to_dense())
    }

    fn rhs(&self) -> Vec<Vec<C64>> {
        from_mat(&self.0.rhs.materialize())
    }

    /// Dense Bartels-Stewart solution.
    fn solve_dense(&self) -> PyResult<Vec<Vec<C64>>> {
        let x = oracle::sylvester_dense(&self.0.a.to_dense(), &self.0.b.to_dense(), &self.0.rhs.materialize()).map_err(err)?;
        Ok(from_mat(&x))
    }

    /// `k` factored ADI steps with Zolotarev-optimal shifts.
    fn fadi(&self, k: usize) -> PyResult<PyLowRank> {
        let shifts = spectra::optimal_shifts(k, &self.0.a_set, &self.0.b_set).map_err(err)?;
        adi::fadi(&self.0, &shifts).map(PyLowRank).map_err(err)
    }

    /// FI-ADI with `‖X - X̃‖₂ <= 2ε‖X‖₂`; `tau` overrides the warm-start
    /// estimate of `‖X‖₂ / ‖F‖₂`.
    #[pyo3(signature = (epsilon, tau = None))]
    fn fi_adi(&self, epsilon: f64, tau: Option<f64>) -> PyResult<PyLowRank> {
        let mut cfg = FiAdiConfig::new(epsilon);
        if let Some(t) = tau {
            cfg = cfg.with_tau(TauMode::Given(t));
        }
        adi::fi_adi(&self.0, &cfg).map(PyLowRank).map_err(err)
    }
}

#[pyfunction]
fn singular_values(m: Vec<Vec<C64>>) -> PyResult<Vec<f64>> {
    svd::singular_values(&to_mat(m)?).map_err(err)
}

#[pyfunction]
fn eps_rank(values: Vec<f64>, epsilon: f64) -> PyResult<usize> {
    svd::eps_rank(&values, epsilon).map_err(err)
}

#[pyfunction]
fn mu1(z0: f64, eta: f64) -> f64 {
    bounds::mu1(z0, eta)
}

/// Upper bound on the ε-rank of `C̃` for `z0`, `eta` disks.
#[pyfunction]
fn eps_rank_bound(epsilon: f64, n: usize, z0: f64, eta: f64) -> PyResult<usize> {
    bounds::eps_rank_bound(epsilon, n, z0, eta).map_err(err)
}

/// Bound on `σ_{t+1}(X)/‖X‖₂` for the disk geometry at each `t`.
#[pyfunction]
fn bound_disk(z0: f64, eta: f64, n: usize, t_values: Vec<usize>) -> PyResult<Vec<f64>> {
    let params = bounds::BoundParams::new(bounds::BoundGeometry::Disk { z0, eta }, n);
    Ok(bounds::bound_disk(&params, &t_values).map_err(err)?.values())
}

#[pyfunction]
fn zolotarev_bound(k: usize, a_set: PySpectralSet, b_set: PySpectralSet) -> PyResult<f64> {
    spectra::zolotarev_bound(k, &a_set.0, &b_set.0).map_err(err)
}

#[pyfunction]
fn elliptic_k(kappa: f64) -> PyResult<f64> {
    spectra::elliptic_k(kappa).map_err(err)
}

/// `C̃_jk = 1/(z̄_j - w̄_k)(z_j - w_k)` with `n` points each in
/// `disk(z0, eta)` and `disk(-z0, eta)`.
#[pyfunction]
#[pyo3(signature = (n, z0, eta, seed = 0))]
fn ctilde(n: usize, z0: f64, eta: f64, seed: u64) -> PyResult<Vec<Vec<C64>>> {
    let p = structured::PointSets::sample_disks(n, n, z0, eta, seed).map_err(err)?;
    Ok(from_mat(&structured::ctilde(&p).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (n, z0, eta, epsilon, seed = 0))]
fn ctilde_lowrank(n: usize, z0: f64, eta: f64, epsilon: f64, seed: u64) -> PyResult<PyLowRank> {
    let p = structured::PointSets::sample_disks(n, n, z0, eta, seed).map_err(err)?;
    structured::ctilde_lowrank(&p, epsilon).map(PyLowRank).map_err(err)
}

/// Samples `f` (a registry name) on the `n×n` interior grid.
#[pyfunction]
fn poisson_rhs(name: &str, n: usize) -> PyResult<Vec<Vec<C64>>> {
    Ok(from_mat(&poisson::RhsFunction::from_name(name).map_err(err)?.sample(n)))
}

/// Fast sine-transform solution of `D₂X + XD₂ = F`.
#[pyfunction]
fn poisson_direct(f: Vec<Vec<C64>>) -> PyResult<Vec<Vec<C64>>> {
    let p = poisson::PoissonProblem::dense(to_mat(f)?).map_err(err)?;
    Ok(from_mat(&poisson::poisson_direct(&p).map_err(err)?))
}

#[pyfunction]
fn poisson_lowrank(f: Vec<Vec<C64>>, epsilon: f64) -> PyResult<PyLowRank> {
    let p = poisson::PoissonProblem::dense(to_mat(f)?).map_err(err)?;
    poisson::poisson_lowrank(&p, epsilon).map(PyLowRank).map_err(err)
}

#[pymodule]
fn pyfiadi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpectralSet>()?;
    m.add_class::<PyLowRank>()?;
    m.add_class::<PyProblem>()?;
    m.add_function(wrap_pyfunction!(singular_values, m)?)?;
    m.add_function(wrap_pyfunction!(eps_rank, m)?)?;
    m.add_function(wrap_pyfunction!(mu1, m)?)?;
    m.add_function(wrap_pyfunction!(eps_rank_bound, m)?)?;
    m.add_function(wrap_pyfunction!(bound_disk, m)?)?;
    m.add_function(wrap_pyfunction!(zolotarev_bound, m)?)?;
    m.add_function(wrap_pyfunction!(elliptic_k, m)?)?;
    m.add_function(wrap_pyfunction!(ctilde, m)?)?;
    m.add_function(wrap_pyfunction!(ctilde_lowrank, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_rhs, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_direct, m)?)?;
    m.add_function(wrap_pyfunction!(poisson_lowrank, m)?)?;
    Ok(())
}
