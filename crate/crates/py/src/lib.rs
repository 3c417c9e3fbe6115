//! Python bindings: automaton systems, Katsura triples, algebra elements and
//! the structured reports. Reports and verdicts come back as plain dicts.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde_json::Value;

use selfsim_core::action::{self, builtin, load_spec, parse_sys_word, AutomatonSystem};
use selfsim_core::germs::{default_witness_periods, regular_open_test};
use selfsim_core::isg::Triple;
use selfsim_core::katsura::{kats_condition_s, kats_lattice_reduce, KatsuraTriple, LatticeClass};
use selfsim_core::report::{self, KatsReportOptions};
use selfsim_core::steinberg::{singular_test, AlgebraElement};
use selfsim_core::{Error, EventuallyPeriodic, Field, SelfSimilar};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_bound_py_any(py)?,
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.into_bound_py_any(py)?,
            (None, Some(f)) => f.into_bound_py_any(py)?,
            _ => n.to_string().into_bound_py_any(py)?,
        },
        Value::String(s) => s.into_bound_py_any(py)?,
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(m) => {
            let dict = PyDict::new(py);
            for (k, x) in m {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn field(name: &str) -> PyResult<Field> {
    name.parse().map_err(err)
}

fn element_json<S: SelfSimilar>(sys: &S, field: Field, terms: &str) -> PyResult<AlgebraElement<S::Elem, S::Key>> {
    let v: Value = serde_json::from_str(terms).map_err(|e| PyValueError::new_err(format!("malformed element JSON: {e}")))?;
    AlgebraElement::from_json(sys, field, &v).map_err(err)
}

/// A self-similar group given by a finite automaton.
#[pyclass(name = "Automaton", frozen)]
struct PyAutomaton {
    sys: AutomatonSystem,
}

#[pymethods]
impl PyAutomaton {
    /// `grigorchuk` or `odometer2`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Ok(PyAutomaton { sys: builtin(name).map_err(err)? })
    }

    /// Loads a JSON or TOML automaton table.
    #[staticmethod]
    fn from_spec(path: &str) -> PyResult<Self> {
        Ok(PyAutomaton {
            sys: load_spec(std::path::Path::new(path)).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.sys.name().to_string()
    }

    fn equal(&self, g: &str, h: &str) -> PyResult<bool> {
        let (g, h) = (self.sys.parse_element(g).map_err(err)?, self.sys.parse_element(h).map_err(err)?);
        self.sys.equal(&g, &h).map_err(err)
    }

    /// `(g·w, g|_w)` for a finite word such as `"0110"`.
    fn act(&self, g: &str, word: &str) -> PyResult<(String, String)> {
        let g = self.sys.parse_element(g).map_err(err)?;
        let w = parse_sys_word(&self.sys, word).map_err(err)?;
        let (img, r) = action::act_word(&self.sys, &g, &w).map_err(err)?;
        Ok((self.sys.format_word(&img), self.sys.format_elem(&r)))
    }

    fn nucleus(&self) -> PyResult<Vec<String>> {
        let n = self.sys.nucleus().map_err(err)?;
        Ok(n.elements().iter().map(|g| self.sys.format_elem(g)).collect())
    }

    /// Minimal strongly fixed words of `g` up to `max_len`.
    fn msfw(&self, g: &str, max_len: usize) -> PyResult<Vec<String>> {
        let g = self.sys.parse_element(g).map_err(err)?;
        let ws = action::enumerate_msfw(&self.sys, &g, max_len).map_err(err)?;
        Ok(ws.iter().map(|w| self.sys.format_word(w)).collect())
    }

    fn hausdorff<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let n = self.sys.nucleus().map_err(err)?.elements().to_vec();
        let v = action::hausdorff_test(&self.sys, &n).map_err(err)?;
        to_py(py, &report::hausdorff_json(&self.sys, &v))
    }

    /// Regular-openness of a union of bisections given as `(alpha, g, beta)`.
    #[pyo3(signature = (sets, depth=4))]
    fn regular_open<'py>(&self, py: Python<'py>, sets: Vec<(String, String, String)>, depth: usize) -> PyResult<Bound<'py, PyAny>> {
        let sys = &self.sys;
        let ts = sets
            .iter()
            .map(|(a, g, b)| {
                Triple::new(sys, parse_sys_word(sys, a)?, sys.parse_element(g)?, parse_sys_word(sys, b)?)
            })
            .collect::<selfsim_core::Result<Vec<_>>>()
            .map_err(err)?;
        let r = regular_open_test(sys, &ts, depth, &default_witness_periods()).map_err(err)?;
        to_py(py, &report::region_verdict_json(sys, &r))
    }

    /// Support test for an element given as a JSON term list.
    #[pyo3(signature = (terms, field_name="Q"))]
    fn singular<'py>(&self, py: Python<'py>, terms: &str, field_name: &str) -> PyResult<Bound<'py, PyAny>> {
        let f = element_json(&self.sys, field(field_name)?, terms)?;
        let r = singular_test(&self.sys, &f).map_err(err)?;
        to_py(py, &report::support_json(&self.sys, &r))
    }

    /// Convolution of two JSON term lists; returns the product's term list.
    #[pyo3(signature = (f, g, field_name="Q"))]
    fn convolve<'py>(&self, py: Python<'py>, f: &str, g: &str, field_name: &str) -> PyResult<Bound<'py, PyAny>> {
        let k = field(field_name)?;
        let (f, g) = (element_json(&self.sys, k, f)?, element_json(&self.sys, k, g)?);
        let h = f.convolve(&self.sys, &g).map_err(err)?;
        to_py(py, &h.to_json(&self.sys))
    }

    #[pyo3(signature = (msfw_len=12, samples=200, seed=7))]
    fn grig_report<'py>(&self, py: Python<'py>, msfw_len: usize, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &report::grig_report(&self.sys, msfw_len, samples, seed).map_err(err)?)
    }
}

/// A Katsura triple built from matrices `A` and `B`.
#[pyclass(name = "Katsura", frozen)]
struct PyKatsura {
    t: KatsuraTriple,
}

fn small(n: BigInt) -> PyResult<i64> {
    n.to_i64().ok_or_else(|| PyValueError::new_err(format!("{n} does not fit in 64 bits")))
}

impl PyKatsura {
    fn infinite(&self, pre: &str, period: &str) -> PyResult<EventuallyPeriodic> {
        self.t.infinite_path(pre, period).map_err(err)
    }
}

#[pymethods]
impl PyKatsura {
    #[new]
    fn new(a: Vec<Vec<i64>>, b: Vec<Vec<i64>>) -> PyResult<Self> {
        Ok(PyKatsura {
            t: KatsuraTriple::new("katsura", a, b).map_err(err)?,
        })
    }

    #[staticmethod]
    fn paper() -> PyResult<Self> {
        Ok(PyKatsura { t: KatsuraTriple::paper().map_err(err)? })
    }

    fn edges(&self) -> Vec<String> {
        (0..self.t.alphabet_size()).map(|e| self.t.edge_name(e)).collect()
    }

    /// `(m·e, φ(m, e))` for an edge name such as `"e11^0"`.
    fn act(&self, m: i64, edge: &str) -> PyResult<(String, i64)> {
        let e = self.t.edge_by_name(edge).map_err(err)?;
        let (y, q) = self.t.kats_act(&BigInt::from(m), e).map_err(err)?;
        Ok((self.t.edge_name(y), small(q)?))
    }

    /// Whether `ℓ` fixes the path `pre (period)^∞`.
    fn fixed(&self, l: i64, pre: &str, period: &str) -> PyResult<bool> {
        self.t.kats_fixed(l, &self.infinite(pre, period)?).map_err(err)
    }

    fn trivially_fixed(&self, l: i64, pre: &str, period: &str) -> PyResult<bool> {
        self.t.kats_trivially_fixed(l, &self.infinite(pre, period)?).map_err(err)
    }

    /// `0` for odd `ℓ`, else the exponent of 2 in `ℓ`.
    #[staticmethod]
    fn lattice_reduce(l: i64) -> PyResult<u32> {
        Ok(match kats_lattice_reduce(l).map_err(err)? {
            LatticeClass::Odd => 0,
            LatticeClass::Pow2(n) => n,
        })
    }

    /// Checks the fixator condition for `ells` at a vertex (1-based).
    #[pyo3(signature = (ells, vertex, samples=60, seed=1))]
    fn condition_s<'py>(&self, py: Python<'py>, ells: Vec<i64>, vertex: usize, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        if vertex == 0 {
            return Err(PyValueError::new_err("vertices are numbered from 1"));
        }
        let r = kats_condition_s(&self.t, &ells, vertex - 1, samples, seed).map_err(err)?;
        to_py(py, &serde_json::to_value(&r).map_err(|e| PyValueError::new_err(e.to_string()))?)
    }

    #[pyo3(signature = (max_ell=8, max_size=3, samples=60))]
    fn report<'py>(&self, py: Python<'py>, max_ell: i64, max_size: usize, samples: usize) -> PyResult<Bound<'py, PyAny>> {
        let opts = KatsReportOptions {
            max_ell,
            max_set_size: max_size,
            samples_per_vertex: samples,
            ..KatsReportOptions::default()
        };
        to_py(py, &report::kats_report(&self.t, opts).map_err(err)?)
    }
}

#[pymodule]
fn selfsim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAutomaton>()?;
    m.add_class::<PyKatsura>()?;
    m.add("REPORT_SCHEMA", report::REPORT_SCHEMA)?;
    Ok(())
}
