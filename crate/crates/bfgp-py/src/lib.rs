//! Python bindings: domains, problems, programs, and the synthesize /
//! validate / evaluate / encode operations over them.
//!
//! ```python
//! import bfgp_py as bp
//! problem = bp.Domain("tsum").training_problem()
//! result = bp.synthesize(problem, lines=5)
//! report = bp.validate(result["program"], problem)
//! ```

use std::time::Duration;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bfgp::program::encoding::{decode as decode_bits, encode as encode_bits, ProgramEncoding};
use bfgp::{
    bfgp as run_search, evaluate as evaluate_record, make_problem, parse_eval_list, parse_program,
    status_token, validate as run_validation, Aggregator, DomainId, EvalFn, ExecOptions,
    GPProblem, GenParams, PlanningProgram, SearchConfig, SearchOutcome, ValidationMode,
};

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// One of the built-in problem families.
#[pyclass(frozen)]
struct Domain {
    id: DomainId,
}

#[pymethods]
impl Domain {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        Ok(Domain { id: DomainId::parse(name).map_err(value_err)? })
    }

    #[staticmethod]
    fn names() -> Vec<&'static str> {
        DomainId::ALL.iter().map(|d| d.name()).collect()
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.id.name()
    }

    /// Program length known to suffice for this domain.
    #[getter]
    fn default_lines(&self) -> usize {
        self.id.default_lines()
    }

    #[getter]
    fn pointer_names(&self) -> Vec<&'static str> {
        self.id.pointer_names().to_vec()
    }

    /// The small instances used for synthesis.
    fn training_problem(&self) -> Problem {
        Problem { inner: self.id.training_problem() }
    }

    /// The larger unseen instances; `full=True` selects the big sweep.
    #[pyo3(signature = (full = false))]
    fn validation_problem(&self, full: bool) -> Problem {
        Problem { inner: self.id.validation_problem(full) }
    }

    /// A fresh random problem set drawn from this family.
    #[pyo3(signature = (count, min_size, max_size, seed = 0, bound = 100))]
    fn generate(
        &self,
        count: usize,
        min_size: usize,
        max_size: usize,
        seed: u64,
        bound: i64,
    ) -> PyResult<Problem> {
        let params =
            GenParams { count, min_size, max_size, seed, arithmetic_bound: bound };
        Ok(Problem { inner: make_problem(self.id, params).map_err(value_err)? })
    }

    /// The hand-written program known to solve this family.
    fn reference_program(&self) -> Program {
        let actions = self.id.actions();
        Program { inner: self.id.reference_solution(&actions) }
    }

    fn __repr__(&self) -> String {
        format!("Domain({:?})", self.id.name())
    }
}

/// A set of instances sharing one grounded action table.
#[pyclass(frozen)]
struct Problem {
    inner: GPProblem,
}

#[pymethods]
impl Problem {
    #[getter]
    fn instance_count(&self) -> usize {
        self.inner.instances.len()
    }

    #[getter]
    fn instance_labels(&self) -> Vec<String> {
        self.inner.instances.iter().map(|i| i.label.clone()).collect()
    }

    #[getter]
    fn pointer_names(&self) -> Vec<String> {
        self.inner.pointer_names.clone()
    }

    #[getter]
    fn action_names(&self) -> Vec<String> {
        self.inner.actions.iter().map(|a| a.name.clone()).collect()
    }

    #[getter]
    fn arithmetic_bound(&self) -> i64 {
        self.inner.arithmetic_bound
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem({} instances, {} actions, {} pointers)",
            self.inner.instances.len(),
            self.inner.actions.len(),
            self.inner.pointer_names.len()
        )
    }
}

/// A fixed-length program over a problem's action table.
#[pyclass(frozen)]
struct Program {
    inner: PlanningProgram,
}

#[pymethods]
impl Program {
    /// Parses the numbered-line text format against `problem`'s actions.
    #[staticmethod]
    fn parse(text: &str, problem: &Problem) -> PyResult<Self> {
        Ok(Program { inner: parse_program(text, &problem.inner.actions).map_err(value_err)? })
    }

    #[getter]
    fn line_count(&self) -> usize {
        self.inner.len()
    }

    /// Renders the numbered-line text format.
    fn to_text(&self, problem: &Problem) -> String {
        self.inner.to_text(&problem.inner.actions)
    }

    fn __repr__(&self) -> String {
        format!("Program({} lines)", self.inner.len())
    }
}

/// Best-first search for a program solving every instance. Returns a dict
/// with the program and search statistics, or None when the budgets run out
/// or the space is exhausted.
#[pyfunction]
#[pyo3(signature = (
    problem,
    lines,
    evals = "h5,f1",
    anytime = false,
    timeout_secs = None,
    node_budget = None,
    max_steps = None,
    workers = 1,
))]
#[allow(clippy::too_many_arguments)]
fn synthesize<'py>(
    py: Python<'py>,
    problem: &Problem,
    lines: usize,
    evals: &str,
    anytime: bool,
    timeout_secs: Option<f64>,
    node_budget: Option<u64>,
    max_steps: Option<u64>,
    workers: usize,
) -> PyResult<Option<Bound<'py, PyDict>>> {
    if lines < 2 {
        return Err(PyValueError::new_err("a program needs at least 2 lines"));
    }
    if workers == 0 {
        return Err(PyValueError::new_err("workers must be at least 1"));
    }
    let config = SearchConfig {
        eval_fns: parse_eval_list(evals).map_err(value_err)?,
        aggregator: Aggregator::Sum,
        max_steps,
        node_budget,
        time_budget: timeout_secs.map(Duration::from_secs_f64),
        anytime,
        workers,
        check_duplicates: false,
    };
    let outcome = py.detach(|| run_search(&problem.inner, lines, &config));
    let stats = outcome.stats().clone();
    let dict = PyDict::new(py);
    dict.set_item("expanded", stats.expanded)?;
    dict.set_item("evaluated", stats.evaluated)?;
    dict.set_item("peak_open", stats.peak_open)?;
    dict.set_item("elapsed_secs", stats.elapsed.as_secs_f64())?;
    match outcome {
        SearchOutcome::Solved { program, .. } => {
            dict.set_item("program", Py::new(py, Program { inner: program })?)?;
            Ok(Some(dict))
        }
        _ => Ok(None),
    }
}

/// The six ranking metrics of `program` against `problem`, plus the node
/// status (`"solution"`, `"promising"`, or `"dead-end"`).
#[pyfunction]
fn evaluate<'py>(
    py: Python<'py>,
    program: &Program,
    problem: &Problem,
) -> PyResult<Bound<'py, PyDict>> {
    let record = evaluate_record(
        &program.inner,
        &problem.inner,
        &ExecOptions::validation(),
        Aggregator::Sum,
    );
    let dict = PyDict::new(py);
    dict.set_item("f1", record.goto_count)?;
    dict.set_item("f2", record.undefined_count)?;
    dict.set_item("f3", record.repeated_actions)?;
    dict.set_item("h4", record.lines_unreached)?;
    dict.set_item("h5", record.goal_distance)?;
    dict.set_item("f6", record.applied_actions)?;
    let status = match record.status {
        bfgp::NodeStatus::Solution => "solution",
        bfgp::NodeStatus::DeadEnd => "dead-end",
        bfgp::NodeStatus::Promising => "promising",
    };
    dict.set_item("status", status)?;
    Ok(dict)
}

/// Runs `program` on every instance of `problem`; returns per-instance rows
/// and the aggregate counts.
#[pyfunction]
#[pyo3(signature = (program, problem, detect_infinite = false, max_steps = 10_000_000))]
fn validate<'py>(
    py: Python<'py>,
    program: &Program,
    problem: &Problem,
    detect_infinite: bool,
    max_steps: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let mode =
        if detect_infinite { ValidationMode::DetectInfinite } else { ValidationMode::Fast };
    let report = py.detach(|| run_validation(&program.inner, &problem.inner, mode, max_steps));
    let dict = PyDict::new(py);
    dict.set_item("mode", report.mode.name())?;
    dict.set_item("solved", report.solved)?;
    dict.set_item("total", report.rows.len())?;
    dict.set_item("all_solved", report.all_solved())?;
    dict.set_item("total_duration_secs", report.total_duration.as_secs_f64())?;
    dict.set_item("peak_memory_estimate", report.peak_memory_estimate)?;
    let rows: Vec<Bound<'py, PyDict>> = report
        .rows
        .iter()
        .map(|row| {
            let r = PyDict::new(py);
            r.set_item("label", &row.label)?;
            r.set_item("status", status_token(row.status))?;
            r.set_item("steps", row.steps)?;
            Ok(r)
        })
        .collect::<PyResult<_>>()?;
    dict.set_item("rows", rows)?;
    Ok(dict)
}

/// Encodes `program` as a 0/1 string over `problem`'s action table.
#[pyfunction]
fn encode(program: &Program, problem: &Problem) -> PyResult<String> {
    let encoding =
        encode_bits(&program.inner, problem.inner.actions.len()).map_err(value_err)?;
    Ok(encoding.bits.iter().map(|&b| if b { '1' } else { '0' }).collect())
}

/// Decodes a 0/1 string produced by [`encode`] back into a program.
#[pyfunction]
fn decode(bits: &str, lines: usize, problem: &Problem) -> PyResult<Program> {
    let parsed: Vec<bool> = bits
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(PyValueError::new_err(format!("invalid bit {other:?}"))),
        })
        .collect::<PyResult<_>>()?;
    let encoding = ProgramEncoding {
        n: lines,
        action_count: problem.inner.actions.len(),
        bits: parsed,
    };
    Ok(Program { inner: decode_bits(&encoding).map_err(value_err)? })
}

/// The per-function names usable in `synthesize(evals=...)`.
#[pyfunction]
fn eval_function_names() -> Vec<&'static str> {
    EvalFn::ALL.iter().map(|f| f.name()).collect()
}

#[pymodule]
fn bfgp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Domain>()?;
    m.add_class::<Problem>()?;
    m.add_class::<Program>()?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(eval_function_names, m)?)?;
    Ok(())
}
