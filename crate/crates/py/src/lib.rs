//! Python module `dard`: database queries, corpus export, evaluation, corpus
//! runs and a template-agent chat session.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use dard::agents::{ExampleBank, Policy};
use dard::corpus::{export_dst as export, Corpus, ExportMode, Split};
use dard::domain::Domain;
use dard::dst::{DialogueState, FuzzyMatcher};
use dard::kb;
use dard::metrics::{self, Evaluator, PredictionSet};
use dard::orchestrator::{Pipeline, Registry, RunMode, Session};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = E>, E: std::fmt::Display>(s: &str) -> PyResult<T> {
    s.parse().map_err(value_err)
}

/// Converts through JSON so Python receives plain dicts and lists.
fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (s,))
}

fn from_py<T: serde::de::DeserializeOwned>(py: Python<'_>, obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let s: String = py.import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&s).map_err(value_err)
}

fn load_corpus(root: &str) -> PyResult<Corpus> {
    Ok(Corpus::load(root).map_err(|e| PyIOError::new_err(e.to_string()))?.filter_active())
}

fn template_pipeline(db: kb::Database, policy: Policy) -> PyResult<Pipeline> {
    Pipeline::build_with_key(&Registry::template(policy), Arc::new(db), Arc::new(ExampleBank::default()), None)
        .map_err(value_err)
}

/// Venue database; the bundled files unless a directory is given.
#[pyclass(name = "Database", frozen)]
struct PyDatabase {
    inner: kb::Database,
}

#[pymethods]
impl PyDatabase {
    #[new]
    #[pyo3(signature = (directory=None))]
    fn new(directory: Option<&str>) -> PyResult<Self> {
        let inner = match directory {
            Some(d) => kb::Database::load_dir(d).map_err(|e| PyIOError::new_err(e.to_string()))?,
            None => kb::Database::bundled(),
        };
        Ok(PyDatabase { inner })
    }

    /// Matching venues as dicts of attributes.
    #[pyo3(signature = (domain, constraints=None))]
    fn query<'py>(
        &self,
        py: Python<'py>,
        domain: &str,
        constraints: Option<BTreeMap<String, String>>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let venues = self
            .inner
            .query(parse::<Domain, _>(domain)?, &constraints.unwrap_or_default())
            .map_err(value_err)?;
        let rows: Vec<_> = venues.iter().map(|v| &v.attributes).collect();
        to_py(py, &rows)
    }

    #[pyo3(signature = (domain, constraints=None))]
    fn count(&self, domain: &str, constraints: Option<BTreeMap<String, String>>) -> PyResult<usize> {
        self.inner
            .count(parse::<Domain, _>(domain)?, &constraints.unwrap_or_default())
            .map_err(value_err)
    }
}

/// Template-agent conversation.
#[pyclass(name = "ChatSession", unsendable)]
struct PyChatSession {
    pipeline: Pipeline,
    session: Session,
}

#[pymethods]
impl PyChatSession {
    #[new]
    #[pyo3(signature = (policy="suggest_and_ask", dialogue_id="python"))]
    fn new(policy: &str, dialogue_id: &str) -> PyResult<Self> {
        Ok(PyChatSession {
            pipeline: template_pipeline(kb::Database::bundled(), parse(policy)?)?,
            session: Session::new(dialogue_id),
        })
    }

    /// One user turn; returns surface, delexicalized text, domain, state and error.
    fn turn<'py>(&mut self, py: Python<'py>, utterance: &str) -> PyResult<Bound<'py, PyAny>> {
        #[derive(Serialize)]
        struct Out {
            surface: String,
            delex: String,
            domain: Option<Domain>,
            state: DialogueState,
            error: Option<String>,
        }
        let t = self.pipeline.run_turn(&mut self.session, utterance);
        to_py(
            py,
            &Out {
                surface: t.surface,
                delex: t.delex.text,
                domain: t.domain,
                state: t.state,
                error: t.error,
            },
        )
    }

    fn state<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.session.state)
    }

    /// (speaker, utterance) pairs so far.
    fn transcript(&self) -> Vec<(String, String)> {
        self.session
            .transcript
            .iter()
            .map(|t| (if t.is_user() { "user" } else { "system" }.to_string(), t.utterance.clone()))
            .collect()
    }
}

/// Split sizes of a MultiWOZ 2.2 directory after removing inactive domains.
#[pyfunction]
fn split_sizes(root: &str) -> PyResult<BTreeMap<String, usize>> {
    let c = load_corpus(root)?;
    Ok(Split::ALL.iter().map(|s| (s.to_string(), c.split(*s).len())).collect())
}

/// State-tracking examples as dicts with `context`, `state` and optional `domain`.
#[pyfunction]
#[pyo3(signature = (root, split="train", mode="single"))]
fn export_dst<'py>(py: Python<'py>, root: &str, split: &str, mode: &str) -> PyResult<Bound<'py, PyAny>> {
    let c = load_corpus(root)?;
    to_py(py, &export(&c, parse(split)?, parse::<ExportMode, _>(mode)?))
}

/// Template-agent predictions for a split, as PredictionSet JSON text.
#[pyfunction]
#[pyo3(signature = (root, split="test", mode="end_to_end", policy="suggest_and_ask", concurrency=4))]
fn run(root: &str, split: &str, mode: &str, policy: &str, concurrency: usize) -> PyResult<String> {
    let c = load_corpus(root)?;
    let db = kb::Database::for_corpus(root).map_err(value_err)?;
    let p = template_pipeline(db, parse(policy)?)?;
    Ok(p.run_corpus(c.split(parse(split)?), parse::<RunMode, _>(mode)?, concurrency).to_json())
}

/// Scores PredictionSet JSON text against a split; returns the report dict.
#[pyfunction]
#[pyo3(signature = (root, predictions, split="test", fuzzy_threshold=0.9))]
fn evaluate<'py>(
    py: Python<'py>,
    root: &str,
    predictions: &str,
    split: &str,
    fuzzy_threshold: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let preds = PredictionSet::from_json(predictions).map_err(value_err)?;
    let c = load_corpus(root)?;
    let db = kb::Database::for_corpus(root)
        .map_err(value_err)?
        .with_fuzzy_threshold(fuzzy_threshold);
    let r = Evaluator::new(&db, fuzzy_threshold).evaluate(c.split(parse(split)?), &preds);
    to_py(py, &r)
}

/// Gold states and gold delexicalized responses as PredictionSet JSON text.
#[pyfunction]
#[pyo3(signature = (root, split="test"))]
fn gold_predictions(root: &str, split: &str) -> PyResult<String> {
    let c = load_corpus(root)?;
    let db = kb::Database::for_corpus(root).map_err(value_err)?;
    Ok(PredictionSet::from_gold(c.split(parse(split)?), &db).to_json())
}

#[pyfunction]
#[pyo3(signature = (a, b, threshold=0.9))]
fn fuzzy_match(a: &str, b: &str, threshold: f64) -> bool {
    FuzzyMatcher::new(threshold).matches(a, b)
}

/// Corpus BLEU over (hypothesis, reference) pairs on a 0-100 scale.
#[pyfunction]
fn corpus_bleu(pairs: Vec<(String, String)>) -> f64 {
    metrics::corpus_bleu(pairs.iter().map(|(h, r)| (h.as_str(), r.as_str())))
}

#[pyfunction]
fn combined(inform: f64, success: f64, bleu: f64) -> f64 {
    metrics::combined(inform, success, bleu)
}

/// Error category of a predicted state against gold; states are
/// `{domain: {slot: [values]}}` dicts.
#[pyfunction]
#[pyo3(signature = (pred, gold, threshold=0.9))]
fn classify_dst_error(
    py: Python<'_>,
    pred: &Bound<'_, PyAny>,
    gold: &Bound<'_, PyAny>,
    threshold: f64,
) -> PyResult<String> {
    let p: DialogueState = from_py(py, pred)?;
    let g: DialogueState = from_py(py, gold)?;
    Ok(metrics::classify_dst_error(&p, &g, &FuzzyMatcher::new(threshold)).as_str().to_string())
}

#[pymodule]
fn dard_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDatabase>()?;
    m.add_class::<PyChatSession>()?;
    m.add_function(wrap_pyfunction!(split_sizes, m)?)?;
    m.add_function(wrap_pyfunction!(export_dst, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(gold_predictions, m)?)?;
    m.add_function(wrap_pyfunction!(fuzzy_match, m)?)?;
    m.add_function(wrap_pyfunction!(corpus_bleu, m)?)?;
    m.add_function(wrap_pyfunction!(combined, m)?)?;
    m.add_function(wrap_pyfunction!(classify_dst_error, m)?)?;
    Ok(())
}
