//! Python bindings (`import pysshsim`).

use std::collections::HashMap;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use sshsim::driving::{self, DrivingSpec};
use sshsim::dynamics::{self, ExcitationDensityMatrix, NoiseSpec};
use sshsim::lattice1d;
use sshsim::lattice2d;
use sshsim::numerics::{self, ComplexMatrix};

create_exception!(pysshsim, NumericalError, PyException);

fn to_py(e: sshsim::Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn matrix_rows(m: &sshsim::RealMatrix) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn complex_matrix(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("expected a square matrix"));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Open SSH chain with `n_cells` two-spin cells.
#[pyclass(name = "SSHChain", frozen)]
pub struct PyChain {
    inner: lattice1d::SSHChain,
}

#[pymethods]
impl PyChain {
    #[new]
    fn new(n_cells: usize, j1: f64, j2: f64) -> PyResult<Self> {
        Ok(Self { inner: lattice1d::SSHChain::new(n_cells, j1, j2).map_err(to_py)? })
    }

    #[staticmethod]
    #[pyo3(signature = (n_cells, delta, m_eff = 1.0))]
    fn from_delta(n_cells: usize, delta: f64, m_eff: f64) -> PyResult<Self> {
        Ok(Self { inner: lattice1d::SSHChain::from_delta(n_cells, m_eff, delta).map_err(to_py)? })
    }

    #[getter]
    fn n_cells(&self) -> usize {
        self.inner.n_cells
    }

    #[getter]
    fn j1(&self) -> f64 {
        self.inner.j1
    }

    #[getter]
    fn j2(&self) -> f64 {
        self.inner.j2
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta()
    }

    #[getter]
    fn m_eff(&self) -> f64 {
        self.inner.m_eff()
    }

    #[getter]
    fn n_spins(&self) -> usize {
        self.inner.n_spins()
    }

    /// `(E_minus, E_plus)` at momentum `k`.
    fn dispersion(&self, k: f64) -> (f64, f64) {
        lattice1d::dispersion(&self.inner, k)
    }

    #[pyo3(signature = (n_k = 1024))]
    fn winding_number(&self, n_k: usize) -> PyResult<i64> {
        lattice1d::winding_number(&self.inner, n_k).map_err(to_py)
    }

    fn band_gap(&self) -> HashMap<&'static str, f64> {
        let g = lattice1d::band_gap(&self.inner);
        HashMap::from([("half_gap", g.half_gap), ("full_gap", g.full_gap), ("k_min", g.k_min)])
    }

    fn open_hamiltonian(&self) -> Vec<Vec<f64>> {
        matrix_rows(&lattice1d::open_chain_hamiltonian(&self.inner))
    }

    /// List of `(energy, amplitudes)` for the midgap states.
    #[pyo3(signature = (tol = lattice1d::DEFAULT_EDGE_TOL))]
    fn edge_states(&self, tol: f64) -> PyResult<Vec<(f64, Vec<f64>)>> {
        let states = lattice1d::edge_states(&self.inner, tol).map_err(to_py)?;
        Ok(states.into_iter().map(|s| (s.energy, s.amplitudes)).collect())
    }

    fn localization_length(&self) -> PyResult<f64> {
        lattice1d::localization_length(self.inner.j1, self.inner.j2).map_err(to_py)
    }

    /// `(times, populations)` after exciting spin 1; `populations[i][m]`.
    #[pyo3(signature = (gamma = 0.0, t_max = 400.0, n_steps = 4000))]
    fn transfer(&self, py: Python<'_>, gamma: f64, t_max: f64, n_steps: usize) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
        let noise = NoiseSpec::new(gamma).map_err(to_py)?;
        let chain = self.inner;
        let table = py
            .detach(move || dynamics::transfer_experiment(&chain, &noise, t_max, n_steps))
            .map_err(to_py)?;
        Ok((table.times, table.populations))
    }

    fn two_level(&self) -> PyResult<HashMap<&'static str, f64>> {
        let tl = dynamics::two_level_approximation(&self.inner).map_err(to_py)?;
        Ok(HashMap::from([
            ("e_plus", tl.e_plus),
            ("e_minus", tl.e_minus),
            ("omega0", tl.omega0),
            ("period", tl.period()),
        ]))
    }

    fn __repr__(&self) -> String {
        format!("SSHChain(n_cells={}, j1={}, j2={})", self.inner.n_cells, self.inner.j1, self.inner.j2)
    }
}

/// Square 2D SSH lattice with `n_cells` cells per side.
#[pyclass(name = "SSHLattice2D", frozen)]
pub struct PyLattice2D {
    inner: lattice2d::SSHLattice2D,
}

#[pymethods]
impl PyLattice2D {
    #[new]
    fn new(n_cells: usize, j1: f64, j2: f64) -> PyResult<Self> {
        Ok(Self { inner: lattice2d::SSHLattice2D::new(n_cells, j1, j2).map_err(to_py)? })
    }

    #[staticmethod]
    #[pyo3(signature = (n_cells, delta, m_eff = 1.0))]
    fn from_delta(n_cells: usize, delta: f64, m_eff: f64) -> PyResult<Self> {
        Ok(Self { inner: lattice2d::SSHLattice2D::from_delta(n_cells, m_eff, delta).map_err(to_py)? })
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta()
    }

    /// Four band energies at `(kx, ky)`, ascending.
    fn dispersion(&self, kx: f64, ky: f64) -> [f64; 4] {
        lattice2d::dispersion_2d(&self.inner, (kx, ky))
    }

    #[pyo3(signature = (band = 0, n_k = 64))]
    fn zak_vector(&self, band: usize, n_k: usize) -> PyResult<(f64, f64)> {
        let z = lattice2d::zak_vector(&self.inner, band, n_k).map_err(to_py)?;
        Ok((z.px, z.py))
    }

    fn open_hamiltonian(&self) -> Vec<Vec<f64>> {
        matrix_rows(&lattice2d::open_lattice_hamiltonian_2d(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("SSHLattice2D(n_cells={}, j1={}, j2={})", self.inner.n_cells, self.inner.j1, self.inner.j2)
    }
}

#[pyfunction]
fn bessel_j0(x: f64) -> PyResult<f64> {
    numerics::bessel_j0(x).map_err(to_py)
}

fn spec(eta: f64, phase0: f64) -> DrivingSpec {
    DrivingSpec { phase0, ..DrivingSpec::with_eta(eta) }
}

#[pyfunction]
#[pyo3(signature = (i, j, eta, phase0 = std::f64::consts::FRAC_PI_4))]
fn renormalization_factor(i: usize, j: usize, eta: f64, phase0: f64) -> PyResult<f64> {
    driving::renormalization_factor(i, j, &spec(eta, phase0)).map_err(to_py)
}

/// Drive-renormalized hoppings for bare strength `m`.
#[pyfunction]
#[pyo3(signature = (m, eta, phase0 = std::f64::consts::FRAC_PI_4))]
fn staggered_couplings(m: f64, eta: f64, phase0: f64) -> PyResult<HashMap<&'static str, f64>> {
    let s = driving::staggered_couplings(m, &spec(eta, phase0)).map_err(to_py)?;
    Ok(HashMap::from([("j1", s.j1), ("j2", s.j2), ("delta", s.delta), ("m_eff", s.m_eff)]))
}

/// Uhlmann fidelity of two density matrices given as nested lists.
#[pyfunction]
fn fidelity(rho: Vec<Vec<Complex64>>, sigma: Vec<Vec<Complex64>>) -> PyResult<f64> {
    let rho = ExcitationDensityMatrix::new(complex_matrix(rho)?).map_err(to_py)?;
    let sigma = ExcitationDensityMatrix::new(complex_matrix(sigma)?).map_err(to_py)?;
    dynamics::fidelity(&rho, &sigma).map_err(to_py)
}

#[pymodule]
fn pysshsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChain>()?;
    m.add_class::<PyLattice2D>()?;
    m.add_function(wrap_pyfunction!(bessel_j0, m)?)?;
    m.add_function(wrap_pyfunction!(renormalization_factor, m)?)?;
    m.add_function(wrap_pyfunction!(staggered_couplings, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    Ok(())
}
