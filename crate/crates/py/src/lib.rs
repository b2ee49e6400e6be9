//! Python bindings for the `dualcode` crate.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use dualcode::circuits::{Boundary, CircuitSpec};
use dualcode::distill::{self, AverageMode, DistillOptions};
use dualcode::dual_code::{self as dc};
use dualcode::experiments::{self, SweepConfig};
use dualcode::groups;
use dualcode::tableau::OutcomePolicy;
use dualcode::{Error, SignVector, SubsystemMask};

create_exception!(dualcode_py, DualCodeError, PyException);

fn to_py(e: Error) -> PyErr {
    DualCodeError::new_err(e.to_string())
}

fn mask(n: usize, qubits: Vec<usize>) -> PyResult<SubsystemMask> {
    SubsystemMask::new(n, qubits).map_err(to_py)
}

fn signs(v: Vec<i8>) -> PyResult<SignVector> {
    SignVector::from_signs(&v).map_err(to_py)
}

/// A Pauli operator with a phase, written like `"-XIZ"`.
#[pyclass(name = "PauliString", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyPauliString(dualcode::PauliString);

#[pymethods]
impl PyPauliString {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(Self).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    /// Phase exponent k of i^k.
    #[getter]
    fn phase(&self) -> u8 {
        self.0.phase()
    }

    #[getter]
    fn letters(&self) -> String {
        self.0.letters_string()
    }

    fn is_hermitian(&self) -> bool {
        self.0.is_hermitian()
    }

    /// +1 if the operators commute, −1 otherwise.
    fn commutes(&self, other: PyRef<'_, Self>) -> PyResult<i8> {
        dualcode::pauli::commutes(&self.0, &other.0).map_err(to_py)
    }

    fn __mul__(&self, other: PyRef<'_, Self>) -> PyResult<Self> {
        dualcode::pauli::multiply(&self.0, &other.0)
            .map(Self)
            .map_err(to_py)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PauliString('{}')", self.0)
    }
}

/// An ordered list of measured Pauli operators on n qubits.
#[pyclass(name = "MeasurementSchedule", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySchedule(dualcode::MeasurementSchedule);

#[pymethods]
impl PySchedule {
    #[new]
    fn new(n: usize, ops: Vec<String>) -> PyResult<Self> {
        let ops = ops
            .iter()
            .map(|s| s.parse())
            .collect::<dualcode::Result<Vec<_>>>()
            .map_err(to_py)?;
        dualcode::MeasurementSchedule::new(n, ops)
            .map(Self)
            .map_err(to_py)
    }

    /// Parses the `n=<int>` header plus one operator per line format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        dualcode::MeasurementSchedule::parse(text)
            .map(Self)
            .map_err(to_py)
    }

    /// A built-in example schedule by name, e.g. `"commuting_triple"`.
    #[staticmethod]
    fn fixture(name: &str) -> PyResult<Self> {
        use dualcode::fixtures as f;
        let s = match name {
            "commuting_triple" => f::commuting_triple(),
            "anticommuting_triple" => f::anticommuting_triple(),
            "lossy_triple" => f::lossy_triple(),
            "single_z" => f::single_z(),
            "zz_parity" => f::zz_parity(),
            "xz_then_zz" => f::xz_then_zz(),
            "bell_measurement" => f::bell_measurement(),
            "parity_pair" => f::parity_pair(),
            "alternating_pairs" => f::alternating_pairs(),
            other => {
                return Err(DualCodeError::new_err(format!("unknown fixture '{other}'")));
            }
        };
        Ok(Self(s))
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn ops(&self) -> Vec<String> {
        self.0.ops().iter().map(|p| p.to_string()).collect()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "MeasurementSchedule(n={}, tau={})",
            self.0.n(),
            self.0.len()
        )
    }
}

/// The dual classical code of a schedule. Sign vectors are lists of ±1.
#[pyclass(name = "DualCode", frozen)]
struct PyDualCode(dualcode::DualCode);

#[pymethods]
impl PyDualCode {
    #[new]
    fn new(schedule: PyRef<'_, PySchedule>) -> Self {
        Self(dualcode::DualCode::build(&schedule.0))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn tau(&self) -> usize {
        self.0.tau()
    }

    fn codeword(&self, p: PyRef<'_, PyPauliString>) -> PyResult<Vec<i8>> {
        Ok(self.0.codeword(&p.0).map_err(to_py)?.to_signs())
    }

    /// Error vector of the i-th measurement, counting from 1.
    fn error_vector(&self, i: usize) -> PyResult<Vec<i8>> {
        Ok(self.0.error_vector(i).map_err(to_py)?.to_signs())
    }

    /// Reverse error vector of the i-th measurement, counting from 1.
    fn reverse_error_vector(&self, i: usize) -> PyResult<Vec<i8>> {
        Ok(self.0.reverse_error_vector(i).map_err(to_py)?.to_signs())
    }

    fn log2_null_count(&self, subsystem: Vec<usize>) -> PyResult<usize> {
        let a = mask(self.0.n(), subsystem)?;
        self.0.log2_null_count(&a).map_err(to_py)
    }

    fn recoverable(&self, subsystem: Vec<usize>) -> PyResult<bool> {
        let a = mask(self.0.n(), subsystem)?;
        self.0.recoverable(&a).map_err(to_py)
    }

    fn conditional_entropy(&self, subsystem: Vec<usize>) -> PyResult<i64> {
        let a = mask(self.0.n(), subsystem)?;
        self.0.conditional_entropy(&a).map_err(to_py)
    }

    /// Returns the correction on A and the generators of the null operators.
    fn decode(&self, s: Vec<i8>, subsystem: Vec<usize>) -> PyResult<(String, Vec<String>)> {
        let a = mask(self.0.n(), subsystem)?;
        let d = self.0.decode(&signs(s)?, &a).map_err(to_py)?;
        let nulls = d.null_generators.iter().map(|p| p.to_string()).collect();
        Ok((d.correction.to_string(), nulls))
    }

    /// Returns zero-based measurement indices and their ordered product.
    fn decode_reverse(&self, s: Vec<i8>) -> PyResult<(Vec<usize>, String)> {
        let d = self.0.decode_reverse(&signs(s)?).map_err(to_py)?;
        Ok((d.indices, d.product.to_string()))
    }
}

/// A possibly mixed stabilizer state with its own random stream.
#[pyclass(name = "StabilizerTableau")]
struct PyTableau(dualcode::StabilizerTableau);

#[pymethods]
impl PyTableau {
    #[staticmethod]
    #[pyo3(signature = (n, seed = 0))]
    fn maximally_mixed(n: usize, seed: u64) -> Self {
        Self(dualcode::StabilizerTableau::new_maximally_mixed(n).with_seed(seed))
    }

    /// n system qubits, each in a Bell pair with one of n reference qubits.
    #[staticmethod]
    #[pyo3(signature = (n, seed = 0))]
    fn with_reference(n: usize, seed: u64) -> Self {
        Self(dualcode::StabilizerTableau::new_with_reference(n).with_seed(seed))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn log2_prob(&self) -> i64 {
        self.0.log2_prob()
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.0.generators().iter().map(|p| p.to_string()).collect()
    }

    #[pyo3(signature = (p, forced = None))]
    fn measure(&mut self, p: PyRef<'_, PyPauliString>, forced: Option<i8>) -> PyResult<i8> {
        self.0.measure(&p.0, forced).map_err(to_py)
    }

    /// +1 or −1 for stabilized operators, 0 otherwise.
    fn expectation(&self, p: PyRef<'_, PyPauliString>) -> PyResult<i8> {
        self.0.expectation(&p.0).map_err(to_py)
    }

    fn entropy(&self, qubits: Vec<usize>) -> PyResult<i64> {
        let m = mask(self.0.n(), qubits)?;
        self.0.subsystem_entropy(&m).map_err(to_py)
    }

    /// Runs the schedule on the first qubits and returns (outcomes, log₂ probability).
    #[pyo3(signature = (schedule, forced = None))]
    fn run_schedule(
        &mut self,
        schedule: PyRef<'_, PySchedule>,
        forced: Option<Vec<i8>>,
    ) -> PyResult<(Vec<i8>, i64)> {
        let forced = forced.map(signs).transpose()?;
        let policy = match &forced {
            Some(m) => OutcomePolicy::Forced(m),
            None => OutcomePolicy::Sample,
        };
        let rec = self.0.run_schedule(&schedule.0, policy).map_err(to_py)?;
        Ok((rec.outcomes.to_signs(), rec.log2_prob))
    }
}

#[pyclass(name = "EntropyReport", frozen, get_all)]
struct PyEntropyReport {
    s_a: i64,
    s_b: i64,
    s_r: i64,
    s_ab: i64,
    s_a_given_b: i64,
    s_ab_given_r: i64,
    i_ab: i64,
    i_ar: i64,
    g: i64,
    g_a: i64,
    g_b: i64,
}

/// Entropies and cleaning counts of subsystem A after the schedule.
#[pyfunction]
fn entropy_suite(
    schedule: PyRef<'_, PySchedule>,
    subsystem: Vec<usize>,
) -> PyResult<PyEntropyReport> {
    let a = mask(schedule.0.n(), subsystem)?;
    let e = dc::entropy_suite(&a, &schedule.0).map_err(to_py)?;
    let c = dc::cleaning_report(&a, &schedule.0).map_err(to_py)?;
    Ok(PyEntropyReport {
        s_a: e.s_a,
        s_b: e.s_b,
        s_r: e.s_r,
        s_ab: e.s_ab,
        s_a_given_b: e.s_a_given_b,
        s_ab_given_r: e.s_ab_given_r,
        i_ab: e.i_ab,
        i_ar: e.i_ar,
        g: c.g,
        g_a: c.g_a,
        g_b: c.g_b,
    })
}

#[pyfunction]
fn build_stabilizer(schedule: PyRef<'_, PySchedule>) -> Vec<String> {
    groups::build_stabilizer(&schedule.0)
        .generators()
        .iter()
        .map(|p| p.letters_string())
        .collect()
}

#[pyfunction]
fn build_logical(schedule: PyRef<'_, PySchedule>) -> Vec<String> {
    groups::build_logical(&schedule.0)
        .generators()
        .iter()
        .map(|p| p.letters_string())
        .collect()
}

#[pyfunction]
fn logical_qubit_count(schedule: PyRef<'_, PySchedule>) -> usize {
    groups::logical_qubit_count(&schedule.0)
}

#[pyclass(name = "DistillationRun", frozen, get_all)]
struct PyDistillationRun {
    m: Vec<i8>,
    m_bar: Vec<i8>,
    s: Vec<i8>,
    feedback: String,
    /// log₂ of the fidelity, or None when the fidelity is zero.
    fidelity_log2: Option<i64>,
    seed: u64,
}

/// One sampled run of A–B distillation.
#[pyfunction]
#[pyo3(signature = (schedule, subsystem, seed = 0))]
fn distill_ab(
    schedule: PyRef<'_, PySchedule>,
    subsystem: Vec<usize>,
    seed: u64,
) -> PyResult<PyDistillationRun> {
    let a = mask(schedule.0.n(), subsystem)?;
    let r = distill::distill_ab(&schedule.0, &a, seed, DistillOptions::default()).map_err(to_py)?;
    Ok(PyDistillationRun {
        m: r.m.to_signs(),
        m_bar: r.m_bar.to_signs(),
        s: r.s.to_signs(),
        feedback: r.feedback.to_string(),
        fidelity_log2: r.fidelity_log2,
        seed: r.seed,
    })
}

/// Exact outcome-averaged Bell weights of A–B distillation, as "p/q" strings.
#[pyfunction]
fn distill_ab_average(
    schedule: PyRef<'_, PySchedule>,
    subsystem: Vec<usize>,
) -> PyResult<BTreeMap<String, String>> {
    let a = mask(schedule.0.n(), subsystem)?;
    let avg =
        distill::distill_ab_average(&schedule.0, &a, AverageMode::Exhaustive).map_err(to_py)?;
    Ok(avg
        .weights
        .into_iter()
        .map(|(k, v)| (k, v.to_string()))
        .collect())
}

#[pyclass(name = "SweepRow", frozen, get_all)]
struct PySweepRow {
    n: usize,
    p: f64,
    sample: usize,
    seed: u64,
    s_half: f64,
    s_half_final: i64,
    s_r: i64,
    i_ar_half: i64,
    decoupled_sites: usize,
    depth: usize,
    spec_hash: String,
}

/// Half-chain entropies of random monitored circuits for every (n, p).
#[pyfunction]
#[pyo3(signature = (ns, ps, samples, depth = None, periodic = false, seed = 0))]
fn sweep(
    ns: Vec<usize>,
    ps: Vec<f64>,
    samples: usize,
    depth: Option<usize>,
    periodic: bool,
    seed: u64,
) -> PyResult<Vec<PySweepRow>> {
    let cfg = SweepConfig {
        ns,
        ps,
        samples,
        depth,
        boundary: if periodic {
            Boundary::Periodic
        } else {
            Boundary::Open
        },
        seed,
    };
    let rows = experiments::sweep_measurement_rate(&cfg).map_err(to_py)?;
    Ok(rows
        .into_iter()
        .map(|r| PySweepRow {
            n: r.n,
            p: r.p,
            sample: r.sample,
            seed: r.seed,
            s_half: r.s_half,
            s_half_final: r.s_half_final,
            s_r: r.s_r,
            i_ar_half: r.i_ar_half,
            decoupled_sites: r.decoupled_sites,
            depth: r.depth,
            spec_hash: r.spec_hash,
        })
        .collect())
}

/// Schedule of time-evolved measurements of a random brickwork circuit.
#[pyfunction]
#[pyo3(signature = (n, depth, p, seed = 0))]
fn random_monitored_circuit(n: usize, depth: usize, p: f64, seed: u64) -> PyResult<PySchedule> {
    let spec = CircuitSpec::new(n, depth, p, Boundary::Open, seed).map_err(to_py)?;
    dualcode::circuits::gen_random_monitored_circuit(&spec)
        .map(PySchedule)
        .map_err(to_py)
}

/// Fits S(L) = a L + b L^γ + c log₂ L; returns (a, b, γ, c, rms).
#[pyfunction]
fn subleading_fit(points: Vec<(f64, f64)>) -> PyResult<(f64, f64, f64, f64, f64)> {
    let f = experiments::subleading_fit(&points).map_err(to_py)?;
    Ok((f.a, f.b, f.gamma, f.c, f.rms))
}

#[pymodule]
fn dualcode_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DualCodeError", m.py().get_type::<DualCodeError>())?;
    m.add_class::<PyPauliString>()?;
    m.add_class::<PySchedule>()?;
    m.add_class::<PyDualCode>()?;
    m.add_class::<PyTableau>()?;
    m.add_class::<PyEntropyReport>()?;
    m.add_class::<PyDistillationRun>()?;
    m.add_class::<PySweepRow>()?;
    m.add_function(wrap_pyfunction!(entropy_suite, m)?)?;
    m.add_function(wrap_pyfunction!(build_stabilizer, m)?)?;
    m.add_function(wrap_pyfunction!(build_logical, m)?)?;
    m.add_function(wrap_pyfunction!(logical_qubit_count, m)?)?;
    m.add_function(wrap_pyfunction!(distill_ab, m)?)?;
    m.add_function(wrap_pyfunction!(distill_ab_average, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(random_monitored_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(subleading_fit, m)?)?;
    Ok(())
}
