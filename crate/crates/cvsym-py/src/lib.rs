//! Python bindings: the occupation combinatorics, the de Finetti
//! reduction, covariance symmetrization and the channel simulator,
//! exposed as plain functions plus three thin wrapper classes.
//!
//! Exact rationals cross the boundary as `(numerator, denominator)`
//! integer pairs, ready for `fractions.Fraction`.

use num_bigint::{BigInt, BigUint};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cvsym_core::nalgebra::DMatrix;
use cvsym_core::num_rational::BigRational;
use cvsym_core::{channel, classical, combinatorics, definetti, phase_space};

fn value_err(e: cvsym_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational_parts(r: &BigRational) -> (BigInt, BigInt) {
    (r.numer().clone(), r.denom().clone())
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn rows_to_matrix(rows: &[Vec<f64>]) -> PyResult<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("expected a non-empty square matrix"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

// ---------------------------------------------------------------------------
// Combinatorics.
// ---------------------------------------------------------------------------

/// Number of ways to distribute `photons` over `modes`, exact.
#[pyfunction]
fn multiplicity(photons: u64, modes: u64) -> PyResult<BigUint> {
    combinatorics::multiplicity(photons, modes).map_err(value_err)
}

/// All occupation tuples summing to `photons`, lexicographic.
#[pyfunction]
#[pyo3(signature = (photons, modes, cap=None))]
fn enumerate_occupations(photons: u64, modes: u64, cap: Option<u64>) -> PyResult<Vec<Vec<u64>>> {
    let cap = cap.unwrap_or(combinatorics::DEFAULT_ENUMERATION_CAP);
    combinatorics::enumerate_occupations_with_cap(photons, modes, cap).map_err(value_err)
}

/// log2 of the multiplicity via log-gamma.
#[pyfunction]
fn log2_multiplicity(photons: u64, modes: u64) -> PyResult<f64> {
    combinatorics::log2_multiplicity(photons, modes).map_err(value_err)
}

/// Thermal entropy G(z) = (z+1) log2(z+1) - z log2 z.
#[pyfunction]
fn thermal_entropy(mean_photons: f64) -> PyResult<f64> {
    combinatorics::thermal_entropy(mean_photons).map_err(value_err)
}

/// log2 of the Stirling-form multiplicity for `x n` photons over `y n` modes.
#[pyfunction]
fn stirling_log2_multiplicity(
    photon_density: f64,
    mode_density: f64,
    scale: u64,
) -> PyResult<f64> {
    combinatorics::stirling_log2_multiplicity(photon_density, mode_density, scale)
        .map_err(value_err)
}

// ---------------------------------------------------------------------------
// De Finetti reduction.
// ---------------------------------------------------------------------------

/// Keep `kept_modes` of `total_modes` carrying `total_photons` photons.
#[pyclass(frozen)]
struct DefinettiInstance {
    inner: definetti::DefinettiInstance,
}

#[pymethods]
impl DefinettiInstance {
    #[new]
    fn new(kept_modes: u64, total_modes: u64, total_photons: u64) -> PyResult<Self> {
        definetti::DefinettiInstance::new(kept_modes, total_modes, total_photons)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    #[getter]
    fn kept_modes(&self) -> u64 {
        self.inner.kept_modes()
    }

    #[getter]
    fn total_modes(&self) -> u64 {
        self.inner.total_modes()
    }

    #[getter]
    fn total_photons(&self) -> u64 {
        self.inner.total_photons()
    }

    /// Occupation weights of the reduced state, as (numerator, denominator)
    /// pairs for l = 0..=k.
    fn reduced_distribution(&self) -> Vec<(BigInt, BigInt)> {
        definetti::reduced_distribution(&self.inner)
            .weights()
            .iter()
            .map(rational_parts)
            .collect()
    }

    /// Exact likelihood ratio f(l)/g(l) as a fraction pair.
    fn likelihood_ratio(&self, occupation: u64) -> PyResult<(BigInt, BigInt)> {
        definetti::likelihood_ratio(&self.inner, occupation)
            .map(|r| rational_parts(&r))
            .map_err(value_err)
    }

    /// Exact trace distance as a fraction pair.
    fn trace_distance_exact(&self) -> (BigInt, BigInt) {
        rational_parts(&definetti::trace_distance(&self.inner))
    }

    /// Trace distance in the log-domain floating path.
    fn trace_distance(&self) -> f64 {
        definetti::trace_distance_f64(&self.inner)
    }

    /// Exact bound 2 (max_l h - 1) as a fraction pair.
    fn sup_ratio_bound_exact(&self) -> PyResult<(BigInt, BigInt)> {
        definetti::sup_ratio_bound(&self.inner)
            .map(|r| rational_parts(&r))
            .map_err(value_err)
    }

    /// The bound 2 (max_l h - 1) in the floating path.
    fn sup_ratio_bound(&self) -> PyResult<f64> {
        definetti::sup_ratio_bound_f64(&self.inner).map_err(value_err)
    }

    /// Smallest maximizer of the likelihood ratio (exact scan).
    fn argmax_ratio(&self) -> PyResult<u64> {
        definetti::argmax_ratio(&self.inner).map_err(value_err)
    }

    /// Continuum supremum (value, first-order form).
    fn asymptotic_sup(&self) -> PyResult<(f64, f64)> {
        definetti::asymptotic_sup(self.inner.kept_modes(), self.inner.total_modes())
            .map(|s| (s.value, s.first_order))
            .map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "DefinettiInstance(kept_modes={}, total_modes={}, total_photons={})",
            self.inner.kept_modes(),
            self.inner.total_modes(),
            self.inner.total_photons()
        )
    }
}

/// Laplace prefactor A and per-mode exponent B at reduced coordinates.
#[pyfunction]
fn exponent_terms(
    photons_per_mode: f64,
    kept_fraction: f64,
    occupation_fraction: f64,
) -> PyResult<(f64, f64)> {
    let rv =
        definetti::ReducedVariables::new(photons_per_mode, kept_fraction, occupation_fraction)
            .map_err(value_err)?;
    definetti::exponent_terms(&rv)
        .map(|t| (t.prefactor, t.exponent_per_mode))
        .map_err(value_err)
}

/// Closed-form derivative of the per-mode exponent.
#[pyfunction]
fn exponent_derivative(
    photons_per_mode: f64,
    kept_fraction: f64,
    occupation_fraction: f64,
) -> PyResult<f64> {
    let rv =
        definetti::ReducedVariables::new(photons_per_mode, kept_fraction, occupation_fraction)
            .map_err(value_err)?;
    definetti::exponent_derivative(&rv).map_err(value_err)
}

/// Continuum supremum of the likelihood ratio: (1/sqrt(1 - n/N), 1 + n/2N).
#[pyfunction]
fn asymptotic_sup(kept_modes: u64, total_modes: u64) -> PyResult<(f64, f64)> {
    definetti::asymptotic_sup(kept_modes, total_modes)
        .map(|s| (s.value, s.first_order))
        .map_err(value_err)
}

// ---------------------------------------------------------------------------
// Phase space.
// ---------------------------------------------------------------------------

/// A symplectic orthogonal (passive interferometer) transform.
#[pyclass(frozen)]
struct SymplecticOrthogonal {
    inner: phase_space::SymplecticOrthogonal,
}

#[pymethods]
impl SymplecticOrthogonal {
    /// Haar-random transform on `modes` modes.
    #[staticmethod]
    fn haar(modes: usize, seed: u64) -> PyResult<Self> {
        if modes == 0 {
            return Err(PyValueError::new_err("modes must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self {
            inner: phase_space::haar_symplectic_orthogonal(modes, &mut rng),
        })
    }

    /// Phase-space representation of the mode unitary `re + i im`.
    #[staticmethod]
    fn from_unitary(re: Vec<Vec<f64>>, im: Vec<Vec<f64>>) -> PyResult<Self> {
        let re = rows_to_matrix(&re)?;
        let im = rows_to_matrix(&im)?;
        phase_space::unitary_to_symplectic(&re, &im)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    #[getter]
    fn modes(&self) -> usize {
        self.inner.modes()
    }

    fn entries(&self) -> Vec<Vec<f64>> {
        matrix_rows(self.inner.entries())
    }

    /// The conjugate transform D S D.
    fn conjugate(&self) -> Self {
        Self {
            inner: phase_space::conjugate_transform(&self.inner),
        }
    }

    fn orthogonality_residual(&self) -> f64 {
        self.inner.orthogonality_residual()
    }

    fn symplectic_residual(&self) -> f64 {
        self.inner.symplectic_residual()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!("SymplecticOrthogonal(modes={})", self.inner.modes())
    }
}

/// A covariance matrix in shot-noise units, interleaved ordering.
#[pyclass(frozen)]
struct CovarianceMatrix {
    inner: phase_space::CovarianceMatrix,
}

#[pymethods]
impl CovarianceMatrix {
    /// Build from a row-major flat list of 4 m^2 entries.
    #[new]
    fn new(modes: usize, entries: Vec<f64>) -> PyResult<Self> {
        phase_space::CovarianceMatrix::from_rows(modes, &entries)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    /// Two-mode squeezed vacuum with the given quadrature variance.
    #[staticmethod]
    fn epr(alice_variance: f64) -> PyResult<Self> {
        phase_space::epr_covariance(alice_variance)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    /// `pairs` i.i.d. EPR pairs as one two-party matrix.
    #[staticmethod]
    fn epr_pairs(alice_variance: f64, pairs: usize) -> PyResult<Self> {
        phase_space::epr_pairs(alice_variance, pairs)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        phase_space::CovarianceMatrix::from_json(text)
            .map(|inner| Self { inner })
            .map_err(value_err)
    }

    #[getter]
    fn modes(&self) -> usize {
        self.inner.modes()
    }

    fn entries(&self) -> Vec<Vec<f64>> {
        matrix_rows(self.inner.entries())
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Closed-form symmetrization (alice_variance, bob_variance, correlation).
    fn symmetrize(&self) -> PyResult<(f64, f64, f64)> {
        phase_space::symmetrize_covariance(&self.inner)
            .map(|s| (s.alice_variance, s.bob_variance, s.correlation))
            .map_err(value_err)
    }

    /// Max-norm residual under the conjugate pair action of `transform`.
    fn conjugate_invariance_residual(&self, transform: &SymplecticOrthogonal) -> PyResult<f64> {
        phase_space::check_conjugate_invariance(&self.inner, &transform.inner).map_err(value_err)
    }

    /// Monte-Carlo symmetrized per-pair block: dict with keys
    /// `mean`, `std_err` (4x4 row lists) and `samples`.
    fn mc_symmetrize<'py>(
        &self,
        py: Python<'py>,
        samples: u64,
        seed: u64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mc = phase_space::mc_symmetrize(&self.inner, samples, &mut rng).map_err(value_err)?;
        let to_rows = |m: &cvsym_core::nalgebra::Matrix4<f64>| -> Vec<Vec<f64>> {
            (0..4)
                .map(|i| (0..4).map(|j| m[(i, j)]).collect())
                .collect()
        };
        let out = PyDict::new(py);
        out.set_item("mean", to_rows(&mc.mean))?;
        out.set_item("std_err", to_rows(&mc.std_err))?;
        out.set_item("samples", mc.samples)?;
        Ok(out)
    }

    /// Minimum eigenvalue of Gamma + i Omega.
    fn uncertainty_eigenvalue(&self) -> f64 {
        self.inner.uncertainty_eigenvalue()
    }

    #[pyo3(signature = (tol=1e-9))]
    fn is_physical(&self, tol: f64) -> bool {
        self.inner.is_physical(tol)
    }

    fn __repr__(&self) -> String {
        format!("CovarianceMatrix(modes={})", self.inner.modes())
    }
}

// ---------------------------------------------------------------------------
// Classical statements and the channel simulator.
// ---------------------------------------------------------------------------

/// Density of the sphere-marginal law at a point of R^retained.
#[pyfunction]
fn sphere_marginal_density(dimension: usize, retained: usize, point: Vec<f64>) -> PyResult<f64> {
    classical::sphere_marginal_density(dimension, retained, &point).map_err(value_err)
}

/// Variation distance between the sphere marginal and the standard normal.
#[pyfunction]
fn tv_to_gaussian(dimension: usize, retained: usize) -> PyResult<f64> {
    classical::tv_to_gaussian(dimension, retained).map_err(value_err)
}

/// One run of the Gaussian channel `y = t x + z`.
#[pyfunction]
fn simulate_channel(
    transmission: f64,
    noise_variance: f64,
    modulation_variance: f64,
    uses: usize,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let model = channel::ChannelModel::new(transmission, noise_variance, modulation_variance, uses)
        .map_err(value_err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(channel::simulate_channel(&model, &mut rng))
}

/// Estimate (transmission, noise variance, modulation variance).
#[pyfunction]
fn estimate_channel(x: Vec<f64>, y: Vec<f64>) -> PyResult<(f64, f64, f64)> {
    channel::estimate_channel(&x, &y)
        .map(|e| (e.transmission, e.noise_variance, e.modulation_variance))
        .map_err(value_err)
}

/// Apply one Haar-random joint rotation to both strings; the rotation is
/// not returned.
#[pyfunction]
fn symmetrize_data(x: Vec<f64>, y: Vec<f64>, seed: u64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    channel::symmetrize_data(&x, &y, &mut rng).map_err(value_err)
}

#[pymodule]
fn cvsym(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<DefinettiInstance>()?;
    m.add_class::<SymplecticOrthogonal>()?;
    m.add_class::<CovarianceMatrix>()?;
    m.add_function(wrap_pyfunction!(multiplicity, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_occupations, m)?)?;
    m.add_function(wrap_pyfunction!(log2_multiplicity, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(stirling_log2_multiplicity, m)?)?;
    m.add_function(wrap_pyfunction!(exponent_terms, m)?)?;
    m.add_function(wrap_pyfunction!(exponent_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(asymptotic_sup, m)?)?;
    m.add_function(wrap_pyfunction!(sphere_marginal_density, m)?)?;
    m.add_function(wrap_pyfunction!(tv_to_gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_channel, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_channel, m)?)?;
    m.add_function(wrap_pyfunction!(symmetrize_data, m)?)?;
    Ok(())
}
