//! Python module `nlca`: load a presentation, evaluate brackets and normal
//! ordering, and run the axiom checks. Tensors cross the boundary as DSL text.

use std::str::FromStr;

use nlca_core::ansatz::{self, AnsatzError};
use nlca_core::frontend::presentation_json;
use nlca_core::pbw;
use nlca_core::verify::{self, Status};
use nlca_core::{parse, parse_tpoly, render, Degree, Engine, ParamSpace, Presentation, Scalar, TPoly};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_python(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(value_error)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

#[pyclass(module = "nlca", frozen)]
struct Algebra {
    pres: Presentation,
}

impl Algebra {
    fn tensor(&self, text: &str) -> PyResult<TPoly> {
        parse_tpoly(&self.pres, text).map_err(value_error)
    }

    fn require_valid(&self) -> PyResult<()> {
        let s = verify::check_validate(&self.pres);
        if s.status == Status::Pass {
            Ok(())
        } else {
            let msgs: Vec<String> = s.witnesses.iter().map(|w| w.residue.clone()).collect();
            Err(PyValueError::new_err(format!("invalid presentation: {}", msgs.join("; "))))
        }
    }
}

#[pymethods]
impl Algebra {
    /// Parses a presentation from source text.
    #[new]
    fn new(source: &str) -> PyResult<Self> {
        parse(source).map(|pres| Algebra { pres }).map_err(value_error)
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| value_error(format!("{path}: {e}")))?;
        Self::new(&text)
    }

    #[getter]
    fn name(&self) -> Option<String> {
        self.pres.name.clone()
    }

    #[getter]
    fn params(&self) -> Vec<String> {
        self.pres.params().to_vec()
    }

    #[getter]
    fn unknowns(&self) -> Vec<String> {
        self.pres.unknowns().to_vec()
    }

    #[getter]
    fn generators(&self) -> Vec<String> {
        self.pres.generators().iter().map(|g| g.name.clone()).collect()
    }

    /// Source text that reparses to the same presentation.
    fn source(&self) -> String {
        render(&self.pres)
    }

    fn to_json(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_python(py, &presentation_json(&self.pres))
    }

    /// Full axiom report as a dict; timing under `timing_ms`.
    fn check(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_python(py, &verify::run_all(&self.pres).to_json())
    }

    /// Lambda-bracket of two tensors, optionally normal-ordered per coefficient.
    #[pyo3(signature = (a, b, reduce = false))]
    fn bracket(&self, a: &str, b: &str, reduce: bool) -> PyResult<String> {
        self.require_valid()?;
        let engine = Engine::new(&self.pres);
        let mut r = engine.pbracket(&self.tensor(a)?, &self.tensor(b)?).map_err(value_error)?;
        if reduce {
            r = verify::reduce_coefficients(&engine, &r).map_err(value_error)?;
        }
        Ok(self.pres.render_lpoly(&r))
    }

    /// Normally ordered product of two tensors.
    fn nprod(&self, a: &str, b: &str) -> PyResult<String> {
        self.require_valid()?;
        let engine = Engine::new(&self.pres);
        let r = engine.nprod(&self.tensor(a)?, &self.tensor(b)?).map_err(value_error)?;
        Ok(self.pres.render_tpoly(&r))
    }

    fn normal_order(&self, expr: &str) -> PyResult<String> {
        self.require_valid()?;
        let engine = Engine::new(&self.pres);
        let r = pbw::normal_order(&engine, &self.tensor(expr)?).map_err(value_error)?;
        Ok(self.pres.render_tpoly(&r))
    }

    /// Ordered monomials of the given conformal weight (e.g. "4" or "3/2").
    fn basis(&self, weight: &str) -> PyResult<Vec<String>> {
        let w = Degree::from_str(weight.trim()).map_err(value_error)?;
        let b = pbw::enumerate_basis(&self.pres, w).map_err(value_error)?;
        Ok(b.iter().map(|m| self.pres.render_mono(m)).collect())
    }

    /// `[(weight, dimension), ...]` up to `max_weight`.
    fn character(&self, max_weight: &str) -> PyResult<Vec<(String, u64)>> {
        let w = Degree::from_str(max_weight.trim()).map_err(value_error)?;
        let table = pbw::character(&self.pres, w).map_err(value_error)?;
        Ok(table.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
    }

    /// Solves the ansatz unknowns; returns `(values, solved algebra, report)`.
    fn solve(&self, py: Python<'_>, pin: &str, triples: &str) -> PyResult<(Vec<(String, String)>, Algebra, Py<PyAny>)> {
        let (name, value) = pin.split_once('=').ok_or_else(|| value_error("pin expects NAME=VALUE"))?;
        let space = ParamSpace::new(self.pres.params().iter().cloned());
        let value = Scalar::parse(value.trim(), &space).map_err(value_error)?;
        let triples = ansatz::parse_triples(&self.pres, triples).map_err(value_error)?;
        let sys = ansatz::extract_system(&self.pres, &triples).map_err(value_error)?;
        match ansatz::solve_and_substitute(&self.pres, &sys, (name.trim(), &value)) {
            Ok(s) => {
                let values = s.values.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
                let report = to_python(py, &s.report.to_json())?;
                Ok((values, Algebra { pres: s.presentation }, report))
            }
            Err(
                e @ (AnsatzError::EmptySolutionSpace | AnsatzError::Annihilated | AnsatzError::MultiDimensional { .. }),
            ) => Err(PyRuntimeError::new_err(e.to_string())),
            Err(e) => Err(value_error(e)),
        }
    }

    fn __repr__(&self) -> String {
        let name = self.pres.name.as_deref().unwrap_or("unnamed");
        format!("<Algebra {name} with generators {}>", self.generators().join(", "))
    }
}

#[pymodule]
fn nlca(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Algebra>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
