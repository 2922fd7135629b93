//! Seeded synthetic text corpora with a tunable class-separability knob.
//!
//! Each class is a first-order Markov source over the 27-symbol alphabet.
//! Every class owns a private subset of letters (round-robin, so the subsets
//! partition `a`..`z`); at each step the source emits either from a shared
//! transition table (probability `mixing`) or from its private table
//! (probability `1 - mixing`), whose support is the private letters. At
//! `mixing = 0` the classes use disjoint alphabets and are trivially
//! separable; raising `mixing` dilutes the private signal and lowers
//! attainable accuracy continuously, which is how corpora are calibrated to a
//! target difficulty.

use super::text::to_display;
use super::{TextRecord, TrainClass, WS};
use crate::error::{Error, Result};
use crate::rng;
use rand_chacha::rand_core::RngCore;
use std::path::{Path, PathBuf};

/// Probability of ending a word after a letter emission.
const P_SPACE: f64 = 0.18;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Number of classes, 2..=26 (each must own at least one letter).
    pub classes: usize,
    pub seed: u64,
    /// Symbols of training text per class.
    pub train_len: usize,
    /// Symbols per query.
    pub query_len: usize,
    pub queries_per_class: usize,
    /// Shared-table emission probability in [0, 1]; higher is harder.
    pub mixing: f64,
}

impl SynthConfig {
    /// Desk-scale 22-class corpus calibrated (via `mixing`) so that a clean
    /// d = 10,000 pipeline classifies roughly 96% of queries correctly.
    ///
    /// Query length matters as much as `mixing`: the class signal surviving
    /// majority bundling grows with the square root of the window count, so
    /// sentence-length queries are the knob that keeps the task solvable at
    /// all, and `mixing` then trims accuracy to the target.
    pub fn calibrated(seed: u64) -> Self {
        Self {
            classes: 22,
            seed,
            train_len: 16_000,
            query_len: 200,
            queries_per_class: 91,
            mixing: 0.65,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthCorpus {
    pub train: Vec<TrainClass>,
    pub test: Vec<TextRecord>,
}

/// Letters owned by a class: `{l : l % classes == c}`.
fn class_letters(c: usize, classes: usize) -> Vec<u8> {
    (0..26u8).filter(|l| *l as usize % classes == c).collect()
}

/// Per-state emission weights, drawn once per table row from a named stream.
fn draw_weights(seed: u64, tag: &str, indices: &[u64], n: usize) -> Vec<f64> {
    let mut stream = rng::stream(seed, tag, indices);
    // Floor keeps every letter reachable, so no table row is degenerate.
    (0..n).map(|_| 0.05 + rng::unit_open(&mut stream)).collect()
}

fn sample_weighted(weights: &[f64], stream: &mut impl RngCore) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng::unit_open(stream) * total;
    for (i, w) in weights.iter().enumerate() {
        u -= w;
        if u <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

struct ClassSource {
    /// Shared table: per state, weights over all 26 letters.
    common: Vec<Vec<f64>>,
    /// Private table: per state, weights over the class's own letters.
    private: Vec<Vec<f64>>,
    letters: Vec<u8>,
    mixing: f64,
}

impl ClassSource {
    fn new(cfg: &SynthConfig, c: usize, common: &[Vec<f64>]) -> Self {
        let letters = class_letters(c, cfg.classes);
        let private = (0..=26u64)
            .map(|s| draw_weights(cfg.seed, "synth/private", &[c as u64, s], letters.len()))
            .collect();
        Self { common: common.to_vec(), private, letters, mixing: cfg.mixing }
    }

    /// Emit `len` symbols starting from a word boundary.
    fn emit(&self, len: usize, stream: &mut impl RngCore) -> Vec<u8> {
        let mut out = Vec::with_capacity(len);
        let mut state = WS;
        for _ in 0..len {
            let sym = if state != WS && rng::unit_open(stream) <= P_SPACE {
                WS
            } else if rng::unit_open(stream) <= self.mixing {
                sample_weighted(&self.common[state as usize], stream) as u8
            } else {
                let pick = sample_weighted(&self.private[state as usize], stream);
                self.letters[pick]
            };
            out.push(sym);
            state = sym;
        }
        while out.last() == Some(&WS) {
            out.pop();
        }
        out
    }
}

pub fn generate(cfg: &SynthConfig) -> Result<SynthCorpus> {
    if !(2..=26).contains(&cfg.classes) {
        return Err(Error::InvalidArgument(format!(
            "synthetic corpus needs 2..=26 classes, got {}",
            cfg.classes
        )));
    }
    if cfg.train_len == 0 || cfg.query_len == 0 {
        return Err(Error::InvalidArgument(
            "synthetic text lengths must be positive".into(),
        ));
    }
    if cfg.queries_per_class == 0 {
        return Err(Error::InvalidArgument("need at least one query per class".into()));
    }
    if !(0.0..=1.0).contains(&cfg.mixing) {
        return Err(Error::InvalidArgument(format!(
            "mixing must lie in [0, 1], got {}",
            cfg.mixing
        )));
    }

    let common: Vec<Vec<f64>> =
        (0..=26u64).map(|s| draw_weights(cfg.seed, "synth/common", &[s], 26)).collect();

    let mut train = Vec::with_capacity(cfg.classes);
    let mut test = Vec::with_capacity(cfg.classes * cfg.queries_per_class);
    for c in 0..cfg.classes {
        let source = ClassSource::new(cfg, c, &common);
        let label = format!("class{c:02}");
        let mut stream = rng::stream(cfg.seed, "synth/train", &[c as u64]);
        train.push(TrainClass { label: label.clone(), symbols: source.emit(cfg.train_len, &mut stream) });
        for q in 0..cfg.queries_per_class {
            let mut stream = rng::stream(cfg.seed, "synth/query", &[c as u64, q as u64]);
            test.push(TextRecord {
                label: label.clone(),
                symbols: source.emit(cfg.query_len, &mut stream),
            });
        }
    }
    Ok(SynthCorpus { train, test })
}

/// Write a corpus as manifest-loadable files: one training file per class,
/// one per-line query file per class, and `manifest.json` tying them
/// together. Returns the manifest path.
pub fn write_corpus(corpus: &SynthCorpus, dir: &Path) -> Result<PathBuf> {
    use super::text::{Manifest, ManifestEntry};
    let train_dir = dir.join("train");
    let test_dir = dir.join("test");
    std::fs::create_dir_all(&train_dir)?;
    std::fs::create_dir_all(&test_dir)?;

    let mut manifest = Manifest { train: Vec::new(), test: Vec::new() };
    for class in &corpus.train {
        let rel = format!("train/{}.txt", class.label);
        let mut text = to_display(&class.symbols);
        text.push('\n');
        std::fs::write(dir.join(&rel), text)?;
        manifest.train.push(ManifestEntry {
            label: class.label.clone(),
            path: rel,
            per_line: false,
        });
    }
    let mut labels: Vec<String> = Vec::new();
    for rec in &corpus.test {
        if !labels.contains(&rec.label) {
            labels.push(rec.label.clone());
        }
    }
    for label in &labels {
        let rel = format!("test/{label}.txt");
        let mut text = String::new();
        for rec in corpus.test.iter().filter(|r| &r.label == label) {
            text.push_str(&to_display(&rec.symbols));
            text.push('\n');
        }
        std::fs::write(dir.join(&rel), text)?;
        manifest.test.push(ManifestEntry { label: label.clone(), path: rel, per_line: true });
    }
    let path = dir.join("manifest.json");
    manifest.write(&path)?;
    Ok(path)
}
