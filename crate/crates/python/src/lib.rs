use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde::Deserialize;
use serde_json::Value;

use absum::error::Error;
use absum::harness::{self, CertificateFile, FalsifierBudget, Pipeline, Report};
use absum::norm2::{classify as classify_norm, AbsoluteNorm, NormSpec};
use absum::real::{format_q, parse_q, Real};
use absum::spaces::{DeskSpace, SliceSpec, Vector};
use absum::sums::{conjugate_pair_exists, DeltaIndexSet};

create_exception!(absum_py, AbsumError, PyException);

fn err(e: Error) -> PyErr {
    AbsumError::new_err(format!("[{}] {e}", e.code()))
}

fn parse<T: for<'de> Deserialize<'de>>(what: &str, text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| AbsumError::new_err(format!("[Parse] {what}: {e}")))
}

fn dump(r: &Report) -> String {
    serde_json::to_string(r).expect("report serializes")
}

fn real_arg(s: &str) -> PyResult<Real> {
    match parse_q(s) {
        Ok(v) => Ok(Real::Exact(v)),
        Err(_) => s
            .trim()
            .parse::<f64>()
            .map(Real::Approx)
            .map_err(|_| AbsumError::new_err(format!("[Parse] not a number: {s}"))),
    }
}

fn real_out(r: &Real) -> String {
    match r {
        Real::Exact(v) => format_q(v),
        Real::Approx(x) => x.to_string(),
    }
}

/// An absolute normalized norm on the plane.
///
/// Built from a JSON norm spec such as `{"kind": "lp", "p": 2}` or
/// `{"kind": "pl", "knots": [["0","1"], ["1","1"]]}`.
#[pyclass(name = "Norm", module = "absum_py", frozen)]
struct PyNorm {
    inner: AbsoluteNorm,
}

#[pymethods]
impl PyNorm {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        let spec: NormSpec = parse("norm spec", spec)?;
        Ok(PyNorm { inner: AbsoluteNorm::from_spec(spec).map_err(err)? })
    }

    #[staticmethod]
    fn lp(p: f64) -> PyResult<Self> {
        Ok(PyNorm { inner: AbsoluteNorm::lp(p).map_err(err)? })
    }

    #[staticmethod]
    fn hexagonal() -> Self {
        PyNorm { inner: AbsoluteNorm::hex() }
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label()
    }

    #[getter]
    fn exact(&self) -> bool {
        self.inner.is_exact()
    }

    /// Norm of `(a, b)`. Arguments are decimal or rational strings; the result is
    /// `"n/d"` when exact.
    fn eval(&self, a: &str, b: &str) -> PyResult<String> {
        let v = self.inner.eval(&real_arg(a)?, &real_arg(b)?).map_err(err)?;
        Ok(real_out(&v))
    }

    fn dual_eval(&self, c: &str, d: &str) -> PyResult<String> {
        let v = self.inner.dual_eval(&real_arg(c)?, &real_arg(d)?).map_err(err)?;
        Ok(real_out(&v))
    }

    fn eval_f64(&self, a: f64, b: f64) -> f64 {
        self.inner.eval_f64(a, b)
    }

    /// Classification as a JSON string.
    fn classify(&self) -> String {
        serde_json::to_string(&classify_norm(&self.inner)).expect("classification serializes")
    }

    fn is_aoh(&self) -> bool {
        classify_norm(&self.inner).is_aoh()
    }

    fn __repr__(&self) -> String {
        format!("Norm({})", self.inner.label())
    }
}

/// Classification report for a JSON norm spec.
#[pyfunction]
fn classify(norm: &str) -> PyResult<String> {
    let spec: NormSpec = parse("norm spec", norm)?;
    Ok(dump(&harness::classify_report(&spec)))
}

/// Witness report. `space`, `x` and `slice` are JSON strings in the CLI file formats.
#[pyfunction]
fn witness(space: &str, x: &str, slice: &str, eps: &str) -> PyResult<String> {
    let space: DeskSpace = parse("space", space)?;
    let x: Vector = parse("vector", x)?;
    let slice: SliceSpec = parse("slice", slice)?;
    let slice = SliceSpec::new(&space, slice.functional, slice.alpha).map_err(err)?;
    let eps = parse_q(eps).map_err(err)?;
    Ok(dump(&harness::witness_report(&space, &x, &slice, &eps)))
}

/// Run a demo pipeline; `config` is an optional JSON object.
#[pyfunction]
#[pyo3(signature = (pipeline, config = None))]
fn demo(pipeline: &str, config: Option<&str>) -> PyResult<String> {
    let p: Pipeline = pipeline.parse().map_err(err)?;
    let cfg: Value = match config {
        Some(c) => parse("config", c)?,
        None => Value::Object(Default::default()),
    };
    Ok(dump(&harness::run_demo(p, &cfg)))
}

#[pyfunction]
fn pipelines() -> Vec<String> {
    Pipeline::ALL.iter().map(|p| p.name().to_string()).collect()
}

/// Falsify a certificate file (JSON string with `space`, `point`, `certificate`).
#[pyfunction]
#[pyo3(signature = (cert, samples = 100_000, seed = 0, ascent_steps = 200))]
fn falsify(py: Python<'_>, cert: &str, samples: usize, seed: u64, ascent_steps: usize) -> PyResult<String> {
    let file: CertificateFile = parse("certificate", cert)?;
    let budget = FalsifierBudget { samples, ascent_steps, seed };
    Ok(py.detach(|| dump(&harness::falsify_report(&file, &budget))))
}

/// Conjugate exponents `(p, q)` with `p >= a`, `q >= b`, or `None`.
/// Pass `None` for an infinite index.
#[pyfunction]
#[pyo3(signature = (a, b))]
fn conjugate_pair(a: Option<&str>, b: Option<&str>) -> PyResult<Option<(String, String)>> {
    let set = |s: Option<&str>| -> PyResult<DeltaIndexSet> {
        match s {
            None => Ok(DeltaIndexSet::never()),
            Some(s) => DeltaIndexSet::from(parse_q(s).map_err(err)?).map_err(err),
        }
    };
    Ok(conjugate_pair_exists(&set(a)?, &set(b)?).map(|(p, q)| (format_q(&p), format_q(&q))))
}

#[pymodule]
fn absum_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("AbsumError", m.py().get_type::<AbsumError>())?;
    m.add_class::<PyNorm>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(demo, m)?)?;
    m.add_function(wrap_pyfunction!(pipelines, m)?)?;
    m.add_function(wrap_pyfunction!(falsify, m)?)?;
    m.add_function(wrap_pyfunction!(conjugate_pair, m)?)?;
    Ok(())
}
