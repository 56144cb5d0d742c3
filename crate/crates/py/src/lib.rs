use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use qastate::evariables::{self, EVariableSpec};
use qastate::linalg::{self, C64, ComplexMatrix, ComplexVector};
use qastate::qubit::{self, SpecialUnitary2};
use qastate::spin::{self, Direction, HalfInt, QuestionAnswerState, SpinSystem};
use qastate::suite::{self, SuiteConfig};
use qastate::symmetry::{self, FiniteSymmetryModel};
use qastate::{spin_checks, state_format};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn err(e: qastate::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn direction(d: [f64; 3]) -> PyResult<Direction> {
    Direction::normalize_near_unit(d[0], d[1], d[2], qastate::cli::DIRECTION_INPUT_TOL).map_err(err)
}

fn system(j: f64) -> PyResult<SpinSystem> {
    SpinSystem::from_f64(j).map_err(err)
}

fn matrix(rows: Vec<Vec<C64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(err)
}

fn rows(m: &ComplexMatrix) -> Vec<Vec<C64>> {
    (0..m.dim()).map(|i| m.row(i).to_vec()).collect()
}

/// A spin state |a;h⟩: the answer h to the question "what is the spin
/// component along a?".
#[pyclass(frozen, module = "pyqastate")]
struct SpinState {
    inner: QuestionAnswerState,
}

#[pymethods]
impl SpinState {
    #[new]
    #[pyo3(signature = (j, direction, h, oracle = false))]
    fn new(j: f64, direction: [f64; 3], h: f64, oracle: bool) -> PyResult<Self> {
        let sys = system(j)?;
        let a = self::direction(direction)?;
        let h = HalfInt::from_f64(h).map_err(err)?;
        let inner = if oracle { spin::eigenstate_oracle(&sys, &a, h) } else { spin::eigenstate_recursion(&sys, &a, h) };
        Ok(Self { inner: inner.map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: state_format::parse_state("json", text).map_err(err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        state_format::emit_state("json", &self.inner).map_err(err)
    }

    #[getter]
    fn j(&self) -> f64 {
        self.inner.system.j().value()
    }

    #[getter]
    fn direction(&self) -> [f64; 3] {
        self.inner.direction.components()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.inner.answer.value()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<C64> {
        self.inner.ket.amplitudes().to_vec()
    }

    fn transition_probability(&self, other: &SpinState) -> PyResult<f64> {
        spin::transition_probability(&self.inner, &other.inner).map_err(err)
    }

    #[pyo3(signature = (other, eps = 1e-9))]
    fn same_ray(&self, other: &SpinState, eps: f64) -> PyResult<bool> {
        linalg::phase_equal(&self.inner.ket, &other.inner.ket, eps).map_err(err)
    }

    fn __repr__(&self) -> String {
        let [x, y, z] = self.direction();
        format!("SpinState(j={}, direction=({x}, {y}, {z}), h={})", self.j(), self.h())
    }
}

/// Every |a;h⟩ for each direction, answers ascending.
#[pyfunction]
fn state_catalog(j: f64, directions: Vec<[f64; 3]>) -> PyResult<Vec<SpinState>> {
    let dirs = directions.into_iter().map(direction).collect::<PyResult<Vec<_>>>()?;
    let states = spin::state_catalog(&system(j)?, &dirs).map_err(err)?;
    Ok(states.into_iter().map(|inner| SpinState { inner }).collect())
}

/// Matrices of J_x, J_y, J_z on the ascending-m basis.
#[pyfunction]
fn spin_operators(j: f64) -> PyResult<[Vec<Vec<C64>>; 3]> {
    let ops = spin::angular_momentum_operators(&system(j)?);
    Ok([rows(&ops.jx), rows(&ops.jy), rows(&ops.jz)])
}

#[pyfunction]
fn bloch_direction(amplitudes: [C64; 2]) -> PyResult<[f64; 3]> {
    let v = ComplexVector::new(amplitudes.to_vec()).map_err(err)?;
    Ok(qubit::bloch_direction(&v).map_err(err)?.components())
}

#[pyfunction]
fn su2_to_so3(m: [[C64; 2]; 2]) -> PyResult<[[f64; 3]; 3]> {
    let u = SpecialUnitary2::new(m).map_err(err)?;
    Ok(qubit::su2_to_so3(&u).map_err(err)?.entries())
}

/// Result of merging the values of a variable through a map.
#[pyclass(frozen, get_all, module = "pyqastate")]
struct CoarseGraining {
    classes: Vec<Vec<usize>>,
    values: Vec<f64>,
    operator: Vec<Vec<C64>>,
    projectors: Vec<Vec<Vec<C64>>>,
}

#[pyfunction]
#[pyo3(signature = (values, mapping, basis = None))]
fn coarse_grain(values: Vec<f64>, mapping: BTreeMap<usize, f64>, basis: Option<Vec<Vec<C64>>>) -> PyResult<CoarseGraining> {
    let spec = match basis {
        None => EVariableSpec::standard("theta", values.clone()),
        Some(b) => {
            let b = b.into_iter().map(ComplexVector::new).collect::<qastate::Result<Vec<_>>>().map_err(err)?;
            EVariableSpec::new("theta", values.clone(), b)
        }
    }
    .map_err(err)?;
    // Keys are positions in `values` so float dictionary keys are never needed.
    let mut table = Vec::with_capacity(values.len());
    for (i, v) in values.iter().enumerate() {
        let to = mapping.get(&i).ok_or_else(|| PyValueError::new_err(format!("mapping has no entry for index {i}")))?;
        table.push((*v, *to));
    }
    let cg = evariables::coarse_grain(&spec, evariables::table_map(&table)).map_err(err)?;
    Ok(CoarseGraining {
        classes: cg.classes.clone(),
        values: cg.values.clone(),
        operator: rows(&cg.operator),
        projectors: cg.projectors.iter().map(rows).collect(),
    })
}

#[pyfunction]
#[pyo3(signature = (operator, sep = 1e-6))]
fn is_maximally_accessible(operator: Vec<Vec<C64>>, sep: f64) -> PyResult<bool> {
    evariables::is_maximally_accessible(&matrix(operator)?, sep).map_err(err)
}

/// A finite symmetry model loaded from its JSON description.
#[pyclass(frozen, module = "pyqastate")]
struct SymmetryModel {
    inner: FiniteSymmetryModel,
}

#[pymethods]
impl SymmetryModel {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: FiniteSymmetryModel::from_json(text).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: FiniteSymmetryModel::load(&path).map_err(err)? })
    }

    /// The bundled example models by name.
    #[staticmethod]
    fn bundled(name: &str) -> PyResult<Self> {
        let text = suite::bundled_models()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| t)
            .ok_or_else(|| PyValueError::new_err(format!("no bundled model named {name:?}")))?;
        Self::from_json(text)
    }

    #[getter]
    fn phi_size(&self) -> usize {
        self.inner.phi_size()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.variables().iter().map(|v| v.label.clone()).collect()
    }

    /// Structural report as JSON.
    fn check(&self) -> PyResult<String> {
        to_json(&symmetry::validate_model(&self.inner))
    }

    /// Assumption reports as a JSON list.
    #[pyo3(signature = (max_word_len = symmetry::DEFAULT_MAX_WORD_LEN, seed = 0))]
    fn assumptions(&self, max_word_len: usize, seed: u64) -> PyResult<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(100);
        to_json(&symmetry::check_assumptions(&self.inner, max_word_len, &mut rng).map_err(err)?)
    }

    #[pyo3(signature = (max_word_len = symmetry::DEFAULT_MAX_WORD_LEN, eps = 1e-9))]
    fn theorem1(&self, max_word_len: usize, eps: f64) -> PyResult<String> {
        to_json(&symmetry::verify_theorem1(&self.inner, max_word_len, eps).map_err(err)?)
    }
}

/// Recursion against the diagonalization oracle, as a JSON report.
#[pyfunction]
#[pyo3(signature = (j, samples = 100, seed = 0))]
fn verify_spin(j: f64, samples: usize, seed: u64) -> PyResult<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    to_json(&spin_checks::verify_prop1(&[system(j)?], samples, &mut rng).map_err(err)?)
}

/// The full verification suite as JSON.
#[pyfunction]
#[pyo3(signature = (seed = 0))]
fn run_suite(seed: u64) -> PyResult<String> {
    let cfg = SuiteConfig { seed, ..SuiteConfig::default() };
    to_json(&suite::run_suite(&cfg).map_err(err)?)
}

#[pymodule]
fn pyqastate(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SpinState>()?;
    m.add_class::<CoarseGraining>()?;
    m.add_class::<SymmetryModel>()?;
    m.add_function(wrap_pyfunction!(state_catalog, m)?)?;
    m.add_function(wrap_pyfunction!(spin_operators, m)?)?;
    m.add_function(wrap_pyfunction!(bloch_direction, m)?)?;
    m.add_function(wrap_pyfunction!(su2_to_so3, m)?)?;
    m.add_function(wrap_pyfunction!(coarse_grain, m)?)?;
    m.add_function(wrap_pyfunction!(is_maximally_accessible, m)?)?;
    m.add_function(wrap_pyfunction!(verify_spin, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
