//! Python bindings for the hyperdimensional classifier: the binary vector
//! algebra, item memories, n-gram encoders, and the trained-model pipeline
//! with both the digital and the simulated-array search path.
//!
//! Enum-like knobs are plain strings on this side (`"two-minterm"`,
//! `"circular"`, `"invhamm"`, ...), matching the command-line spellings;
//! underscores are accepted wherever the CLI uses hyphens.

use std::path::{Path, PathBuf};

use pyo3::exceptions::{PyIOError, PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use hdcsim::crossbar::{AmCrossbar, NoiseModel};
use hdcsim::datasets::synth::{self, SynthConfig};
use hdcsim::datasets::text::preprocess;
use hdcsim::encoder::{encode_symbol_sequence, ngram};
use hdcsim::itemmem::text_symbols;
use hdcsim::model::EncoderState;
use hdcsim::runner::{evaluate, load_data, train_model, LoadedData};
use hdcsim::{
    Backend, EncoderConfig, EncoderKind, Metric, PermMode, PermuteMode, RunConfig, TaskKind,
};

fn err(e: hdcsim::Error) -> PyErr {
    match e {
        hdcsim::Error::Io(_) | hdcsim::Error::Ingest { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_kind(s: &str) -> PyResult<EncoderKind> {
    match s.replace('_', "-").as_str() {
        "exact" => Ok(EncoderKind::Exact),
        "all-minterm" => Ok(EncoderKind::AllMinterm),
        "two-minterm" => Ok(EncoderKind::TwoMinterm),
        other => Err(PyValueError::new_err(format!("unknown encoder kind {other:?}"))),
    }
}

fn parse_perm(s: &str) -> PyResult<PermMode> {
    match s {
        "circular" => Ok(PermMode::Circular),
        "plain" => Ok(PermMode::Plain),
        other => Err(PyValueError::new_err(format!("unknown permutation mode {other:?}"))),
    }
}

fn parse_metric(s: &str) -> PyResult<Metric> {
    match s.replace('_', "").as_str() {
        "dotp" => Ok(Metric::Dotp),
        "invhamm" => Ok(Metric::InvHamm),
        other => Err(PyValueError::new_err(format!("unknown metric {other:?}"))),
    }
}

fn parse_task(s: &str) -> PyResult<TaskKind> {
    match s {
        "language" => Ok(TaskKind::Language),
        "news" => Ok(TaskKind::News),
        "emg" => Ok(TaskKind::Emg),
        "synth" => Ok(TaskKind::Synth),
        other => Err(PyValueError::new_err(format!("unknown task {other:?}"))),
    }
}

fn parse_noise(s: &str, seed: u64) -> PyResult<NoiseModel> {
    match s {
        "ideal" => Ok(NoiseModel::ideal(seed)),
        "pcm" => Ok(NoiseModel::pcm(seed)),
        other => Err(PyValueError::new_err(format!("unknown noise preset {other:?}"))),
    }
}

/// A d-dimensional binary vector. Supports `^` (XOR), `&`, `|`, `~`, and
/// equality; `len()` is the dimension.
#[pyclass(name = "Hypervector", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct Hv(hdcsim::Hypervector);

#[pymethods]
impl Hv {
    /// Seeded uniform random vector; `index` selects the draw.
    #[staticmethod]
    fn random(dim: usize, seed: u64, index: u64) -> PyResult<Self> {
        hdcsim::Hypervector::random(dim, seed, index).map(Hv).map_err(err)
    }

    #[staticmethod]
    fn from_bitstring(s: &str) -> PyResult<Self> {
        hdcsim::Hypervector::from_bitstring(s).map(Hv).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn popcount(&self) -> usize {
        self.0.popcount()
    }

    fn get(&self, j: usize) -> PyResult<bool> {
        if j >= self.0.dim() {
            return Err(PyIndexError::new_err(format!("component {j} out of range")));
        }
        Ok(self.0.get(j))
    }

    fn to_bitstring(&self) -> String {
        self.0.to_bitstring()
    }

    /// Component-wise binding (XNOR).
    fn xnor(&self, other: &Self) -> PyResult<Self> {
        self.0.xnor(&other.0).map(Hv).map_err(err)
    }

    /// Rotate (`"circular"`) or shift with zero fill (`"plain-right"`,
    /// `"plain-left"`) by `k` positions.
    #[pyo3(signature = (k, mode = "circular"))]
    fn permute(&self, k: usize, mode: &str) -> PyResult<Self> {
        let mode = match mode.replace('_', "-").as_str() {
            "circular" => PermuteMode::Circular,
            "plain-right" => PermuteMode::PlainRight,
            "plain-left" => PermuteMode::PlainLeft,
            other => {
                return Err(PyValueError::new_err(format!("unknown permute mode {other:?}")))
            }
        };
        Ok(Hv(self.0.permute_power(k, mode)))
    }

    fn hamming(&self, other: &Self) -> PyResult<usize> {
        self.0.hamming(&other.0).map_err(err)
    }

    fn dot(&self, other: &Self) -> PyResult<usize> {
        self.0.dot(&other.0).map_err(err)
    }

    fn inv_hamming(&self, other: &Self) -> PyResult<usize> {
        self.0.inv_hamming(&other.0).map_err(err)
    }

    fn __xor__(&self, other: &Self) -> PyResult<Self> {
        self.0.xor(&other.0).map(Hv).map_err(err)
    }

    fn __and__(&self, other: &Self) -> PyResult<Self> {
        self.0.and(&other.0).map(Hv).map_err(err)
    }

    fn __or__(&self, other: &Self) -> PyResult<Self> {
        self.0.or(&other.0).map(Hv).map_err(err)
    }

    fn __invert__(&self) -> Self {
        Hv(self.0.not())
    }

    fn __len__(&self) -> usize {
        self.0.dim()
    }

    fn __repr__(&self) -> String {
        format!("Hypervector(dim={}, popcount={})", self.0.dim(), self.0.popcount())
    }
}

/// Seeded table of quasiorthogonal symbol vectors.
#[pyclass(name = "ItemMemory", frozen)]
struct Im(hdcsim::ItemMemory);

#[pymethods]
impl Im {
    #[new]
    fn new(symbols: Vec<String>, dim: usize, seed: u64) -> PyResult<Self> {
        hdcsim::ItemMemory::generate(&symbols, dim, seed).map(Im).map_err(err)
    }

    /// The 27-symbol text alphabet (`a`..`z` and space).
    #[staticmethod]
    fn text(dim: usize, seed: u64) -> PyResult<Self> {
        hdcsim::ItemMemory::generate(&text_symbols(), dim, seed).map(Im).map_err(err)
    }

    #[getter]
    fn symbols(&self) -> Vec<String> {
        self.0.symbols().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn get(&self, index: usize) -> PyResult<Hv> {
        self.0.get(index).map(|v| Hv(v.clone())).map_err(err)
    }

    fn lookup(&self, symbol: &str) -> PyResult<Hv> {
        self.0.lookup(symbol).map(|v| Hv(v.clone())).map_err(err)
    }

    /// Slide an n-gram window over `text` (lowercased, folded to the
    /// alphabet) and bundle the windows into one vector.
    #[pyo3(signature = (text, n = 4, kind = "exact", perm = "circular"))]
    fn encode_text(&self, text: &str, n: usize, kind: &str, perm: &str) -> PyResult<Hv> {
        let cfg = EncoderConfig::new(n, parse_kind(kind)?, parse_perm(perm)?).map_err(err)?;
        encode_symbol_sequence(&preprocess(text), &self.0, &cfg).map(Hv).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

/// Bind a list of vectors into one n-gram (`kind`: `"exact"`,
/// `"all-minterm"`, or `"two-minterm"`).
#[pyfunction(name = "ngram")]
#[pyo3(signature = (items, kind = "exact", perm = "circular"))]
fn ngram_py(items: Vec<Hv>, kind: &str, perm: &str) -> PyResult<Hv> {
    let cfg = EncoderConfig::new(items.len().max(1), parse_kind(kind)?, parse_perm(perm)?)
        .map_err(err)?;
    let refs: Vec<&hdcsim::Hypervector> = items.iter().map(|h| &h.0).collect();
    ngram(&refs, &cfg).map(Hv).map_err(err)
}

/// Fold arbitrary text onto the 27-symbol alphabet, returning symbol
/// indices as `bytes` (space is 26).
#[pyfunction(name = "preprocess")]
fn preprocess_py(text: &str) -> Vec<u8> {
    preprocess(text)
}

/// Write a seeded synthetic letter-sequence corpus and return the manifest
/// path. Omitted knobs keep the calibrated defaults.
#[pyfunction]
#[pyo3(signature = (out, seed = 42, classes = None, train_len = None, query_len = None, queries = None, mixing = None))]
fn write_synth_corpus(
    out: PathBuf,
    seed: u64,
    classes: Option<usize>,
    train_len: Option<usize>,
    query_len: Option<usize>,
    queries: Option<usize>,
    mixing: Option<f64>,
) -> PyResult<String> {
    let mut cfg = SynthConfig::calibrated(seed);
    if let Some(v) = classes {
        cfg.classes = v;
    }
    if let Some(v) = train_len {
        cfg.train_len = v;
    }
    if let Some(v) = query_len {
        cfg.query_len = v;
    }
    if let Some(v) = queries {
        cfg.queries_per_class = v;
    }
    if let Some(v) = mixing {
        cfg.mixing = v;
    }
    let corpus = synth::generate(&cfg).map_err(err)?;
    let manifest = synth::write_corpus(&corpus, &out).map_err(err)?;
    Ok(manifest.display().to_string())
}

/// A trained classifier: class prototypes plus the encoder state that
/// produced them.
#[pyclass(name = "TrainedModel", frozen)]
struct Model(hdcsim::TrainedModel);

impl Model {
    fn encode_query(&self, text: &str) -> PyResult<hdcsim::Hypervector> {
        let EncoderState::Text(im) = &self.0.state else {
            return Err(PyValueError::new_err(
                "text classification needs a sequence-task model".to_string(),
            ));
        };
        encode_symbol_sequence(&preprocess(text), im, &self.0.cfg).map_err(err)
    }
}

#[pymethods]
impl Model {
    /// Train on a corpus manifest. `task` is `"language"`, `"news"`,
    /// `"emg"`, or `"synth"`; unset knobs keep the task defaults.
    #[staticmethod]
    #[pyo3(signature = (task, data, dim = None, seed = None, n = None, kind = None, perm = None, metric = None))]
    #[allow(clippy::too_many_arguments)]
    fn train(
        task: &str,
        data: PathBuf,
        dim: Option<usize>,
        seed: Option<u64>,
        n: Option<usize>,
        kind: Option<&str>,
        perm: Option<&str>,
        metric: Option<&str>,
    ) -> PyResult<Self> {
        let mut cfg = RunConfig::for_task(parse_task(task)?);
        if let Some(v) = dim {
            cfg.dim = v;
        }
        if let Some(v) = seed {
            cfg.seed = v;
        }
        if let Some(v) = n {
            cfg.ngram = v;
        }
        if let Some(v) = kind {
            cfg.encoder = parse_kind(v)?;
        }
        if let Some(v) = perm {
            cfg.perm = parse_perm(v)?;
        }
        if let Some(v) = metric {
            cfg.metric = parse_metric(v)?;
        }
        cfg.finalize().map_err(err)?;
        let preproc = cfg.preproc().map_err(err)?;
        let loaded = load_data(&cfg, &data, None, &preproc).map_err(err)?;
        train_model(&cfg, &loaded).map(Model).map_err(err)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        hdcsim::TrainedModel::read_from(&path).map(Model).map_err(err)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.0.write_to(&path).map_err(err)
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.0.memory.labels().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn task(&self) -> String {
        self.0.task.as_str().to_string()
    }

    /// Digital nearest-prototype label for a text query.
    #[pyo3(signature = (text, metric = None))]
    fn classify(&self, text: &str, metric: Option<&str>) -> PyResult<String> {
        let metric = match metric {
            Some(s) => parse_metric(s)?,
            None => self.0.metric,
        };
        let q = self.encode_query(text)?;
        let idx = self.0.memory.classify(&q, metric).map_err(err)?;
        Ok(self.0.memory.labels()[idx].clone())
    }

    /// Winner-take-all search on the simulated conductance arrays. Returns
    /// `(label, per_class_scores)`; `nonce` individualizes read noise.
    #[pyo3(signature = (text, partitions = 10, noise = "pcm", metric = None, analog_seed = None, nonce = 0))]
    fn search_analog(
        &self,
        text: &str,
        partitions: usize,
        noise: &str,
        metric: Option<&str>,
        analog_seed: Option<u64>,
        nonce: u64,
    ) -> PyResult<(String, Vec<f64>)> {
        let metric = match metric {
            Some(s) => parse_metric(s)?,
            None => self.0.metric,
        };
        let noise = parse_noise(noise, analog_seed.unwrap_or(self.0.seed))?;
        let q = self.encode_query(text)?;
        let am = AmCrossbar::build(&self.0.memory, partitions, &noise, None).map_err(err)?;
        let res = am.search(&q, metric, nonce).map_err(err)?;
        Ok((self.0.memory.labels()[res.winner].clone(), res.scores))
    }

    /// Run the model over a corpus manifest and return accuracy counts.
    #[pyo3(signature = (data, backend = "digital", metric = None, partitions = 10, noise = "pcm", analog_seed = None))]
    fn evaluate<'py>(
        &self,
        py: Python<'py>,
        data: PathBuf,
        backend: &str,
        metric: Option<&str>,
        partitions: usize,
        noise: &str,
        analog_seed: Option<u64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let mut cfg = RunConfig::for_model(&self.0);
        cfg.backend = match backend {
            "digital" => Backend::Digital,
            "crossbar" => Backend::Crossbar,
            other => {
                return Err(PyValueError::new_err(format!("unknown backend {other:?}")))
            }
        };
        if let Some(s) = metric {
            cfg.metric = parse_metric(s)?;
        }
        cfg.partitions = partitions;
        cfg.finalize().map_err(err)?;
        cfg.noise = parse_noise(noise, analog_seed.unwrap_or(cfg.seed))?;
        cfg.adc_enabled = noise != "ideal";
        let preproc = cfg.preproc().map_err(err)?;
        let loaded: LoadedData = load_data(&cfg, Path::new(&data), None, &preproc).map_err(err)?;
        let outcome = evaluate(&self.0, &cfg, &loaded).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("accuracy", outcome.accuracy)?;
        d.set_item("evaluated", outcome.evaluated)?;
        d.set_item("correct", outcome.correct)?;
        d.set_item("skipped", outcome.skipped)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "TrainedModel(task={:?}, classes={}, dim={})",
            self.0.task.as_str(),
            self.0.memory.len(),
            self.0.dim()
        )
    }
}

#[pymodule]
fn hdcsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Hv>()?;
    m.add_class::<Im>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(ngram_py, m)?)?;
    m.add_function(wrap_pyfunction!(preprocess_py, m)?)?;
    m.add_function(wrap_pyfunction!(write_synth_corpus, m)?)?;
    Ok(())
}
