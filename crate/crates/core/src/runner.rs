//! End-to-end experiment driver.
//!
//! A [`RunConfig`] starts from per-task defaults, absorbs an optional JSON
//! config file, then command-line flags (later layers win), and is then
//! frozen with [`RunConfig::finalize`]. Training always runs digitally;
//! evaluation runs on either backend:
//!
//! * `digital` -- reference arithmetic end to end;
//! * `crossbar` -- associative-memory search on simulated arrays, and, when
//!   the model was trained with the two-minterm encoder under plain
//!   permutations (the shift-register datapath), item-memory encoding on
//!   simulated arrays as well. Other encoder settings keep encoding digital
//!   and make only the search analog. The spatial task always encodes
//!   digitally.
//!
//! Everything is deterministic: query `i` uses read-noise nonce `i`, and
//! sweep repeat `r` re-seeds the analog instance with `seed + r`. Reports
//! (`metrics.csv`, `confusion.csv`, `predictions.csv`, `report.json`,
//! `sweep.csv`, `sweep.json`) carry no timestamps, so a rerun reproduces
//! them byte for byte.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assocmem::Metric;
use crate::crossbar::{AdcConfig, AmCrossbar, ComplementShift, ImCrossbarPair, NoiseModel};
use crate::datasets::{
    load_emg, load_text_task, EmgLoadOptions, EmgTask, StopList, SynthCorpus, TextPreproc,
    TextTask,
};
use crate::encoder::{encode_symbol_sequence, EncoderConfig, EncoderKind, PermMode, SpatialEncoder};
use crate::error::{Error, Result};
use crate::itemmem::{text_symbols, ItemMemory};
use crate::model::{EncoderState, TaskKind, TrainedModel};

/// Where the arithmetic runs during evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Ideal reference implementation.
    Digital,
    /// Simulated in-memory arrays with device noise and quantization.
    Crossbar,
}

impl Backend {
    pub fn as_str(&self) -> &'static str {
        match self {
            Backend::Digital => "digital",
            Backend::Crossbar => "crossbar",
        }
    }
}

/// Named starting points for the device model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum NoisePresetKind {
    /// Zero-noise limit; also bypasses the ADC.
    Ideal,
    /// Phase-change-memory-like device statistics with an 8-bit ADC.
    Pcm,
}

/// A fully resolved run description. Construct with [`RunConfig::for_task`],
/// layer overrides on top, then call [`finalize`](RunConfig::finalize) once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub task: TaskKind,
    pub dim: usize,
    /// Master seed: item memories, synthetic draws, and (after `finalize`)
    /// the analog instance all derive from it.
    pub seed: u64,
    pub ngram: usize,
    pub encoder: EncoderKind,
    pub perm: PermMode,
    pub metric: Metric,
    pub backend: Backend,
    /// Partition count for the crossbar associative memory.
    pub partitions: usize,
    pub noise: NoiseModel,
    pub adc_bits: u32,
    pub adc_enabled: bool,
    pub comp_shift: ComplementShift,
    /// Stop-word list file for the news task; `None` uses the built-in list.
    pub stoplist: Option<PathBuf>,
    pub emg: EmgLoadOptions,
}

impl RunConfig {
    /// Task-shaped defaults: 10,000 components, seed 42, exact encoder under
    /// circular permutations, dot-product similarity, digital backend; letter
    /// 4-grams for language and synthetic text, 5-grams for news and the
    /// spatial task.
    pub fn for_task(task: TaskKind) -> Self {
        let ngram = match task {
            TaskKind::Language | TaskKind::Synth => 4,
            TaskKind::News | TaskKind::Emg => 5,
        };
        let seed = 42;
        Self {
            task,
            dim: 10_000,
            seed,
            ngram,
            encoder: EncoderKind::Exact,
            perm: PermMode::Circular,
            metric: Metric::Dotp,
            backend: Backend::Digital,
            partitions: 10,
            noise: NoiseModel::pcm(seed),
            adc_bits: 8,
            adc_enabled: true,
            comp_shift: ComplementShift::SameDirection,
            stoplist: None,
            emg: EmgLoadOptions { ngram, ..EmgLoadOptions::default() },
        }
    }

    /// Settings for evaluating an existing model: encoder-side knobs come
    /// from the model and must not be overridden.
    pub fn for_model(model: &TrainedModel) -> Self {
        let mut cfg = Self::for_task(model.task);
        cfg.dim = model.dim();
        cfg.seed = model.seed;
        cfg.ngram = model.cfg.n;
        cfg.encoder = model.cfg.kind;
        cfg.perm = model.cfg.perm;
        cfg.metric = model.metric;
        cfg.emg.ngram = model.cfg.n;
        if let EncoderState::Spatial(enc) = &model.state {
            cfg.emg.levels = enc.levels().levels() as u8;
        }
        cfg
    }

    pub fn encoder_cfg(&self) -> Result<EncoderConfig> {
        EncoderConfig::new(self.ngram, self.encoder, self.perm)
    }

    /// The text normalization this run's task calls for.
    pub fn preproc(&self) -> Result<TextPreproc> {
        match self.task {
            TaskKind::News => {
                let stop = match &self.stoplist {
                    Some(path) => StopList::from_file(path)?,
                    None => StopList::default(),
                };
                Ok(TextPreproc::News(stop))
            }
            _ => Ok(TextPreproc::Plain),
        }
    }

    /// Synchronize derived fields and validate the combination. Must be
    /// called after the last override and before use.
    pub fn finalize(&mut self) -> Result<()> {
        self.noise.seed = self.seed;
        self.emg.ngram = self.ngram;
        self.encoder_cfg()?;
        self.noise.validate()?;
        if self.dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        if !(1..=16).contains(&self.adc_bits) {
            return Err(Error::InvalidArgument(format!(
                "ADC resolution must be 1..=16 bits, got {}",
                self.adc_bits
            )));
        }
        if self.backend == Backend::Crossbar {
            if self.partitions == 0 || self.dim % self.partitions != 0 {
                return Err(Error::InvalidArgument(format!(
                    "partition count {} must divide the dimension {}",
                    self.partitions, self.dim
                )));
            }
        }
        if self.task == TaskKind::Emg {
            if self.emg.levels < 2 {
                return Err(Error::InvalidArgument("need at least 2 quantization levels".into()));
            }
            if self.emg.downsample == 0 {
                return Err(Error::InvalidArgument("downsample stride must be >= 1".into()));
            }
        }
        Ok(())
    }

    fn adc(&self, seg_len: usize) -> AdcConfig {
        AdcConfig {
            bits: self.adc_bits,
            full_scale_amps: self.noise.read_voltage * self.noise.g_set_mean * seg_len as f64,
            enabled: self.adc_enabled,
        }
    }
}

/// Partial configuration: a config file or a flag set. Unknown keys are
/// rejected so typos fail loudly. Later layers win; within one layer the
/// noise preset applies before the scalar noise fields it may be combined
/// with.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOverrides {
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub ngram: Option<usize>,
    pub encoder: Option<EncoderKind>,
    pub perm: Option<PermMode>,
    pub metric: Option<Metric>,
    pub backend: Option<Backend>,
    pub partitions: Option<usize>,
    pub noise: Option<NoisePresetKind>,
    pub g_set_sigma: Option<f64>,
    pub g_reset_sigma: Option<f64>,
    pub col_gradient: Option<f64>,
    pub row_gradient: Option<f64>,
    pub read_noise: Option<f64>,
    pub adc_bits: Option<u32>,
    pub adc_enabled: Option<bool>,
    pub comp_shift: Option<ComplementShift>,
    pub stoplist: Option<PathBuf>,
    pub downsample: Option<usize>,
    pub train_samples: Option<usize>,
    pub levels: Option<u8>,
}

impl RunOverrides {
    /// Read a JSON config file. Parse problems are format errors (exit 3),
    /// a missing file is an ingest error.
    pub fn from_file(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Error::ingest(path, format!("cannot read config: {e}")))?;
        serde_json::from_str(&raw)
            .map_err(|e| Error::Format(format!("config file {}: {e}", path.display())))
    }

    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(p) = self.noise {
            cfg.noise = match p {
                NoisePresetKind::Ideal => NoiseModel::ideal(cfg.seed),
                NoisePresetKind::Pcm => NoiseModel::pcm(cfg.seed),
            };
            cfg.adc_enabled = p != NoisePresetKind::Ideal;
        }
        if let Some(v) = self.g_set_sigma {
            cfg.noise.g_set_sigma = v;
        }
        if let Some(v) = self.g_reset_sigma {
            cfg.noise.g_reset_sigma = v;
        }
        if let Some(v) = self.col_gradient {
            cfg.noise.col_gradient = v;
        }
        if let Some(v) = self.row_gradient {
            cfg.noise.row_gradient = v;
        }
        if let Some(v) = self.read_noise {
            cfg.noise.read_noise_frac = v;
        }
        if let Some(v) = self.dim {
            cfg.dim = v;
        }
        if let Some(v) = self.ngram {
            cfg.ngram = v;
        }
        if let Some(v) = self.encoder {
            cfg.encoder = v;
        }
        if let Some(v) = self.perm {
            cfg.perm = v;
        }
        if let Some(v) = self.metric {
            cfg.metric = v;
        }
        if let Some(v) = self.backend {
            cfg.backend = v;
        }
        if let Some(v) = self.partitions {
            cfg.partitions = v;
        }
        if let Some(v) = self.adc_bits {
            cfg.adc_bits = v;
            cfg.adc_enabled = true;
        }
        if let Some(v) = self.adc_enabled {
            cfg.adc_enabled = v;
        }
        if let Some(v) = self.comp_shift {
            cfg.comp_shift = v;
        }
        if let Some(v) = &self.stoplist {
            cfg.stoplist = Some(v.clone());
        }
        if let Some(v) = self.downsample {
            cfg.emg.downsample = v;
        }
        if let Some(v) = self.train_samples {
            cfg.emg.train_samples = v;
        }
        if let Some(v) = self.levels {
            cfg.emg.levels = v;
        }
    }
}

/// Task data after ingestion, ready to train on and query against.
#[derive(Debug, Clone)]
pub enum LoadedData {
    Text(TextTask),
    Emg(EmgTask),
}

impl LoadedData {
    pub fn from_synth(corpus: SynthCorpus) -> Self {
        LoadedData::Text(TextTask { train: corpus.train, test: corpus.test, skipped_empty: 0 })
    }

    pub fn query_count(&self) -> usize {
        match self {
            LoadedData::Text(t) => t.test.len(),
            LoadedData::Emg(t) => t.queries.len(),
        }
    }
}

/// Ingest the task's data file: a corpus manifest for text tasks, a sample
/// table for the spatial task. `preproc` is the normalization to apply to
/// text (pass the model's own at inference time).
pub fn load_data(
    cfg: &RunConfig,
    path: &Path,
    data_root: Option<&Path>,
    preproc: &TextPreproc,
) -> Result<LoadedData> {
    match cfg.task {
        TaskKind::Emg => Ok(LoadedData::Emg(load_emg(path, &cfg.emg)?)),
        _ => Ok(LoadedData::Text(load_text_task(path, preproc, data_root)?)),
    }
}

/// Train a model for the run. Training is always digital; the analog model
/// only ever sees finished item memories and prototypes.
pub fn train_model(cfg: &RunConfig, data: &LoadedData) -> Result<TrainedModel> {
    let enc_cfg = cfg.encoder_cfg()?;
    let (state, memory) = match (cfg.task, data) {
        (TaskKind::Emg, LoadedData::Emg(task)) => {
            let enc =
                SpatialEncoder::new(4, cfg.emg.levels as usize, cfg.dim, cfg.seed, enc_cfg)?;
            let memory = crate::assocmem::AssociativeMemoryModel::train_spatial(
                &task.train_runs,
                &enc,
            )?;
            (EncoderState::Spatial(enc), memory)
        }
        (TaskKind::Emg, LoadedData::Text(_)) => {
            return Err(Error::Mismatch("the spatial task needs sample-table data".into()));
        }
        (_, LoadedData::Text(task)) => {
            let im = ItemMemory::generate(&text_symbols(), cfg.dim, cfg.seed)?;
            let memory =
                crate::assocmem::AssociativeMemoryModel::train_text(&task.train, &im, &enc_cfg)?;
            (EncoderState::Text(im), memory)
        }
        (_, LoadedData::Emg(_)) => {
            return Err(Error::Mismatch("text tasks need manifest-described corpora".into()));
        }
    };
    Ok(TrainedModel {
        task: cfg.task,
        seed: cfg.seed,
        cfg: enc_cfg,
        metric: cfg.metric,
        preproc: cfg.preproc()?,
        state,
        memory,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub truth: String,
    pub predicted: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassStats {
    pub label: String,
    pub total: usize,
    pub correct: usize,
}

/// Evaluation result: per-query decisions plus the aggregates derived from
/// them. `confusion[t][p]` counts queries of true class `t` decided as `p`,
/// both in model label order.
#[derive(Debug, Clone, Serialize)]
pub struct EvalOutcome {
    pub labels: Vec<String>,
    pub predictions: Vec<Prediction>,
    pub confusion: Vec<Vec<usize>>,
    pub per_class: Vec<ClassStats>,
    pub evaluated: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Queries dropped: normalized to nothing at load time or too short for
    /// one n-gram window.
    pub skipped: usize,
}

/// Run every query in `data` against the model on the configured backend.
pub fn evaluate(model: &TrainedModel, cfg: &RunConfig, data: &LoadedData) -> Result<EvalOutcome> {
    if model.task != cfg.task {
        return Err(Error::Mismatch(format!(
            "model was trained for task {} but the run asks for {}",
            model.task.as_str(),
            cfg.task.as_str()
        )));
    }
    if model.cfg.n != cfg.ngram || model.cfg.kind != cfg.encoder || model.cfg.perm != cfg.perm {
        return Err(Error::Mismatch(
            "encoder settings are fixed by the model; retrain to change them".into(),
        ));
    }
    if model.dim() != cfg.dim {
        return Err(Error::Mismatch(format!(
            "model dimension {} but the run asks for {}",
            model.dim(),
            cfg.dim
        )));
    }
    let enc_cfg = model.cfg;
    let metric = cfg.metric;
    let load_skipped = match data {
        LoadedData::Text(t) => t.skipped_empty,
        LoadedData::Emg(_) => 0,
    };

    let (truths, decisions): (Vec<String>, Vec<Option<usize>>) = match cfg.backend {
        Backend::Digital => match (data, &model.state) {
            (LoadedData::Text(task), EncoderState::Text(im)) => {
                let decisions = task
                    .test
                    .par_iter()
                    .map(|rec| match encode_symbol_sequence(&rec.symbols, im, &enc_cfg) {
                        Ok(q) => Ok(Some(model.memory.classify(&q, metric)?)),
                        Err(Error::Encode(_)) => Ok(None),
                        Err(e) => Err(e),
                    })
                    .collect::<Result<Vec<_>>>()?;
                (task.test.iter().map(|r| r.label.clone()).collect(), decisions)
            }
            (LoadedData::Emg(task), EncoderState::Spatial(enc)) => {
                let decisions = task
                    .queries
                    .par_iter()
                    .map(|rec| match enc.encode_record(&rec.samples) {
                        Ok(q) => Ok(Some(model.memory.classify(&q, metric)?)),
                        Err(Error::Encode(_)) => Ok(None),
                        Err(e) => Err(e),
                    })
                    .collect::<Result<Vec<_>>>()?;
                (task.queries.iter().map(|r| r.label.to_string()).collect(), decisions)
            }
            _ => return Err(Error::Mismatch("loaded data does not fit the model's task".into())),
        },
        Backend::Crossbar => {
            let noise = &cfg.noise;
            let am = AmCrossbar::build(
                &model.memory,
                cfg.partitions,
                noise,
                Some(cfg.adc(cfg.dim / cfg.partitions)),
            )?;
            match (data, &model.state) {
                (LoadedData::Text(task), EncoderState::Text(im)) => {
                    // The shift-register datapath computes two-minterm
                    // n-grams under plain shifts; that exact setting moves
                    // encoding onto the simulated arrays too.
                    let im_pair = if enc_cfg.kind == EncoderKind::TwoMinterm
                        && enc_cfg.perm == PermMode::Plain
                    {
                        Some(ImCrossbarPair::build(im, noise, cfg.comp_shift)?)
                    } else {
                        None
                    };
                    let decisions = task
                        .test
                        .par_iter()
                        .enumerate()
                        .map(|(i, rec)| {
                            let encoded = match &im_pair {
                                Some(pair) => {
                                    pair.encode_sequence(&rec.symbols, &enc_cfg, i as u64)
                                }
                                None => encode_symbol_sequence(&rec.symbols, im, &enc_cfg),
                            };
                            match encoded {
                                Ok(q) => Ok(Some(am.search(&q, metric, i as u64)?.winner)),
                                Err(Error::Encode(_)) => Ok(None),
                                Err(e) => Err(e),
                            }
                        })
                        .collect::<Result<Vec<_>>>()?;
                    (task.test.iter().map(|r| r.label.clone()).collect(), decisions)
                }
                (LoadedData::Emg(task), EncoderState::Spatial(enc)) => {
                    let decisions = task
                        .queries
                        .par_iter()
                        .enumerate()
                        .map(|(i, rec)| match enc.encode_record(&rec.samples) {
                            Ok(q) => Ok(Some(am.search(&q, metric, i as u64)?.winner)),
                            Err(Error::Encode(_)) => Ok(None),
                            Err(e) => Err(e),
                        })
                        .collect::<Result<Vec<_>>>()?;
                    (task.queries.iter().map(|r| r.label.to_string()).collect(), decisions)
                }
                _ => {
                    return Err(Error::Mismatch("loaded data does not fit the model's task".into()))
                }
            }
        }
    };

    let labels = model.memory.labels().to_vec();
    let classes = labels.len();
    let mut confusion = vec![vec![0usize; classes]; classes];
    let mut per_class: Vec<ClassStats> =
        labels.iter().map(|l| ClassStats { label: l.clone(), total: 0, correct: 0 }).collect();
    let mut predictions = Vec::new();
    let mut skipped = load_skipped;
    let mut correct = 0;
    for (truth, decision) in truths.iter().zip(&decisions) {
        let Some(pred) = decision else {
            skipped += 1;
            continue;
        };
        let t = model.memory.label_index(truth).ok_or_else(|| {
            Error::Mismatch(format!("query label {truth:?} is unknown to the model"))
        })?;
        confusion[t][*pred] += 1;
        per_class[t].total += 1;
        if t == *pred {
            per_class[t].correct += 1;
            correct += 1;
        }
        predictions.push(Prediction { truth: truth.clone(), predicted: labels[*pred].clone() });
    }
    let evaluated = predictions.len();
    if evaluated == 0 {
        return Err(Error::InvalidState("no query survived to evaluation".into()));
    }
    Ok(EvalOutcome {
        labels,
        predictions,
        confusion,
        per_class,
        evaluated,
        correct,
        accuracy: correct as f64 / evaluated as f64,
        skipped,
    })
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    schema: &'static str,
    config: &'a RunConfig,
    model_hash: &'a str,
    evaluated: usize,
    skipped: usize,
    correct: usize,
    accuracy: f64,
    per_class: &'a [ClassStats],
    labels: &'a [String],
    confusion: &'a [Vec<usize>],
}

/// Write `metrics.csv`, `confusion.csv`, `predictions.csv` and `report.json`
/// into `dir` (created if missing). Byte-deterministic.
pub fn write_reports(
    dir: &Path,
    cfg: &RunConfig,
    model_hash: &str,
    outcome: &EvalOutcome,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;

    let mut metrics = String::from("label,total,correct,accuracy\n");
    for c in &outcome.per_class {
        let acc = if c.total > 0 { c.correct as f64 / c.total as f64 } else { 0.0 };
        metrics.push_str(&format!("{},{},{},{:.6}\n", c.label, c.total, c.correct, acc));
    }
    metrics.push_str(&format!(
        "TOTAL,{},{},{:.6}\n",
        outcome.evaluated, outcome.correct, outcome.accuracy
    ));
    std::fs::write(dir.join("metrics.csv"), metrics)?;

    let mut confusion = String::from("truth");
    for l in &outcome.labels {
        confusion.push(',');
        confusion.push_str(l);
    }
    confusion.push('\n');
    for (l, row) in outcome.labels.iter().zip(&outcome.confusion) {
        confusion.push_str(l);
        for v in row {
            confusion.push_str(&format!(",{v}"));
        }
        confusion.push('\n');
    }
    std::fs::write(dir.join("confusion.csv"), confusion)?;

    let mut predictions = String::from("index,truth,predicted\n");
    for (i, p) in outcome.predictions.iter().enumerate() {
        predictions.push_str(&format!("{i},{},{}\n", p.truth, p.predicted));
    }
    std::fs::write(dir.join("predictions.csv"), predictions)?;

    let doc = ReportDoc {
        schema: "hdcsim-report-v1",
        config: cfg,
        model_hash,
        evaluated: outcome.evaluated,
        skipped: outcome.skipped,
        correct: outcome.correct,
        accuracy: outcome.accuracy,
        per_class: &outcome.per_class,
        labels: &outcome.labels,
        confusion: &outcome.confusion,
    };
    let mut raw = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Format(format!("cannot encode report: {e}")))?;
    raw.push('\n');
    std::fs::write(dir.join("report.json"), raw)?;
    Ok(())
}

/// The knob a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Crossbar partition count.
    Partitions,
    /// Instantaneous read-noise fraction.
    ReadNoise,
    /// End-to-end column gradient of the set state.
    ColGradient,
    /// Programming spread of the set state, siemens.
    SetSigma,
    /// ADC resolution in bits.
    AdcBits,
    /// n-gram order (retrains per value).
    Ngram,
    /// Hypervector dimension (retrains per value).
    Dim,
    /// Master seed (retrains per value).
    Seed,
}

impl SweepParam {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepParam::Partitions => "partitions",
            SweepParam::ReadNoise => "read_noise",
            SweepParam::ColGradient => "col_gradient",
            SweepParam::SetSigma => "set_sigma",
            SweepParam::AdcBits => "adc_bits",
            SweepParam::Ngram => "ngram",
            SweepParam::Dim => "dim",
            SweepParam::Seed => "seed",
        }
    }

    /// Whether each value needs its own trained model (and fresh data load).
    pub fn retrains(&self) -> bool {
        matches!(self, SweepParam::Ngram | SweepParam::Dim | SweepParam::Seed)
    }

    fn needs_crossbar(&self) -> bool {
        matches!(
            self,
            SweepParam::Partitions
                | SweepParam::ReadNoise
                | SweepParam::ColGradient
                | SweepParam::SetSigma
                | SweepParam::AdcBits
        )
    }

    fn integral(&self) -> bool {
        matches!(
            self,
            SweepParam::Partitions
                | SweepParam::AdcBits
                | SweepParam::Ngram
                | SweepParam::Dim
                | SweepParam::Seed
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub analog_seed: u64,
    pub evaluated: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepSummaryRow {
    pub value: f64,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub param: String,
    pub repeats: u64,
    pub points: Vec<SweepPoint>,
    pub summary: Vec<SweepSummaryRow>,
}

/// Evaluate the run at each value of one knob, `repeats` analog instances
/// per value (instance `r` uses analog seed `seed + r`; the trained model is
/// shared unless the knob retrains).
pub fn sweep(
    base: &RunConfig,
    data_path: &Path,
    data_root: Option<&Path>,
    param: SweepParam,
    values: &[f64],
    repeats: u64,
) -> Result<SweepReport> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one value".into()));
    }
    if repeats == 0 {
        return Err(Error::InvalidArgument("sweep needs at least one repeat".into()));
    }
    if param.needs_crossbar() && base.backend != Backend::Crossbar {
        return Err(Error::InvalidArgument(format!(
            "sweeping {} needs the crossbar backend",
            param.as_str()
        )));
    }
    if param.integral() {
        if let Some(v) = values.iter().find(|v| v.fract() != 0.0 || **v < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "{} takes whole-number values, got {v}",
                param.as_str()
            )));
        }
    }

    let shared: Option<(TrainedModel, LoadedData)> = if param.retrains() {
        None
    } else {
        let data = load_data(base, data_path, data_root, &base.preproc()?)?;
        let model = train_model(base, &data)?;
        Some((model, data))
    };

    let mut points = Vec::with_capacity(values.len() * repeats as usize);
    let mut summary = Vec::with_capacity(values.len());
    for &value in values {
        let mut cfg = base.clone();
        match param {
            SweepParam::Partitions => cfg.partitions = value as usize,
            SweepParam::ReadNoise => cfg.noise.read_noise_frac = value,
            SweepParam::ColGradient => cfg.noise.col_gradient = value,
            SweepParam::SetSigma => cfg.noise.g_set_sigma = value,
            SweepParam::AdcBits => {
                cfg.adc_bits = value as u32;
                cfg.adc_enabled = true;
            }
            SweepParam::Ngram => cfg.ngram = value as usize,
            SweepParam::Dim => cfg.dim = value as usize,
            SweepParam::Seed => cfg.seed = value as u64,
        }
        // finalize() re-stamps noise.seed; noise knobs set above survive it.
        let noise_frac = cfg.noise.read_noise_frac;
        let noise_grad = (cfg.noise.col_gradient, cfg.noise.row_gradient);
        let noise_sigma = cfg.noise.g_set_sigma;
        cfg.finalize()?;
        cfg.noise.read_noise_frac = noise_frac;
        cfg.noise.col_gradient = noise_grad.0;
        cfg.noise.row_gradient = noise_grad.1;
        cfg.noise.g_set_sigma = noise_sigma;

        let owned: Option<(TrainedModel, LoadedData)> = if param.retrains() {
            let data = load_data(&cfg, data_path, data_root, &cfg.preproc()?)?;
            let model = train_model(&cfg, &data)?;
            Some((model, data))
        } else {
            None
        };
        let (model, data) = owned
            .as_ref()
            .or(shared.as_ref())
            .map(|(m, d)| (m, d))
            .expect("one of owned/shared is set");

        let mut accs = Vec::with_capacity(repeats as usize);
        for r in 0..repeats {
            let mut run = cfg.clone();
            run.noise.seed = cfg.seed.wrapping_add(r);
            let outcome = evaluate(model, &run, data)?;
            accs.push(outcome.accuracy);
            points.push(SweepPoint {
                value,
                analog_seed: run.noise.seed,
                evaluated: outcome.evaluated,
                correct: outcome.correct,
                accuracy: outcome.accuracy,
            });
        }
        let mean = accs.iter().sum::<f64>() / accs.len() as f64;
        let var = accs.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / accs.len() as f64;
        let min = accs.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = accs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        summary.push(SweepSummaryRow { value, mean, std: var.sqrt(), min, max });
    }
    Ok(SweepReport { param: param.as_str().to_string(), repeats, points, summary })
}

/// Write `sweep.csv` and `sweep.json` into `dir`. Byte-deterministic.
pub fn write_sweep(dir: &Path, report: &SweepReport) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut csv = String::from("param,value,analog_seed,evaluated,correct,accuracy\n");
    for p in &report.points {
        csv.push_str(&format!(
            "{},{},{},{},{},{:.6}\n",
            report.param, p.value, p.analog_seed, p.evaluated, p.correct, p.accuracy
        ));
    }
    std::fs::write(dir.join("sweep.csv"), csv)?;
    let mut raw = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Format(format!("cannot encode sweep report: {e}")))?;
    raw.push('\n');
    std::fs::write(dir.join("sweep.json"), raw)?;
    Ok(())
}
