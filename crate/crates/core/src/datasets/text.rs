//! Text normalization and manifest-driven corpus loading.
//!
//! All text collapses onto a 27-symbol alphabet: lowercased `a`..`z` plus a
//! single whitespace symbol standing in for everything else (digits,
//! punctuation, accented letters, real whitespace). Runs of whitespace
//! collapse to one symbol and the ends are trimmed.

use super::{TextRecord, TrainClass, WS};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::{Path, PathBuf};

/// Map one character onto the alphabet. Anything that is not an ASCII letter
/// (after lowercasing) becomes whitespace.
pub fn char_to_index(ch: char) -> u8 {
    let ch = ch.to_ascii_lowercase();
    if ch.is_ascii_lowercase() {
        ch as u8 - b'a'
    } else {
        WS
    }
}

/// Normalize raw text: map to symbol indices, collapse whitespace runs, trim.
pub fn preprocess(raw: &str) -> Vec<u8> {
    let mut out = Vec::with_capacity(raw.len());
    for ch in raw.chars() {
        let idx = char_to_index(ch);
        if idx == WS && out.last() == Some(&WS) {
            continue;
        }
        out.push(idx);
    }
    if out.last() == Some(&WS) {
        out.pop();
    }
    if out.first() == Some(&WS) {
        out.remove(0);
    }
    out
}

/// Render a symbol sequence back to readable text.
pub fn to_display(symbols: &[u8]) -> String {
    symbols
        .iter()
        .map(|&s| if s == WS { ' ' } else { (b'a' + s) as char })
        .collect()
}

const DEFAULT_STOPWORDS: &[&str] = &[
    "the", "and", "for", "are", "but", "not", "you", "all", "any", "can", "had", "her", "was",
    "one", "our", "out", "day", "get", "has", "him", "his", "how", "man", "new", "now", "old",
    "see", "two", "way", "who", "did", "its", "let", "put", "say", "she", "too", "use", "that",
    "with", "have", "this", "will", "your", "from", "they", "been", "were", "said", "each",
    "which", "their", "would", "there", "what", "about", "when", "than", "them", "some", "then",
];

/// Filter list applied to news-style corpora: tokens shorter than three
/// letters and listed function words are dropped before n-gram encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopList {
    words: HashSet<Vec<u8>>,
    pub min_token_len: usize,
}

impl Default for StopList {
    fn default() -> Self {
        Self::from_words(DEFAULT_STOPWORDS.iter().copied())
    }
}

impl StopList {
    pub fn from_words<'a>(words: impl IntoIterator<Item = &'a str>) -> Self {
        let words = words
            .into_iter()
            .map(|w| preprocess(w))
            .filter(|w| !w.is_empty())
            .collect();
        Self { words, min_token_len: 3 }
    }

    /// One word per line; blank lines and `#` comments are skipped.
    pub fn from_file(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Error::ingest(path, format!("cannot read stop list: {e}")))?;
        Ok(Self::from_words(
            raw.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')),
        ))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn keeps(&self, token: &[u8]) -> bool {
        token.len() >= self.min_token_len && !self.words.contains(token)
    }

    /// Stored words as display strings, sorted for stable output.
    pub fn sorted_words(&self) -> Vec<String> {
        let mut words: Vec<String> = self.words.iter().map(|w| to_display(w)).collect();
        words.sort();
        words
    }

    /// Drop filtered tokens from a normalized sequence, re-joining survivors
    /// with single whitespace symbols.
    pub fn filter_sequence(&self, symbols: &[u8]) -> Vec<u8> {
        let mut out = Vec::with_capacity(symbols.len());
        for token in symbols.split(|&s| s == WS) {
            if token.is_empty() || !self.keeps(token) {
                continue;
            }
            if !out.is_empty() {
                out.push(WS);
            }
            out.extend_from_slice(token);
        }
        out
    }
}

/// Which normalization pipeline a text task uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TextPreproc {
    /// Lowercase/collapse/trim only.
    Plain,
    /// Plain, then stop-word and short-token filtering.
    News(StopList),
}

impl TextPreproc {
    pub fn apply(&self, raw: &str) -> Vec<u8> {
        match self {
            TextPreproc::Plain => preprocess(raw),
            TextPreproc::News(stop) => stop.filter_sequence(&preprocess(raw)),
        }
    }
}

/// One corpus file: its class label, its path (absolute, or relative to the
/// data root / manifest directory), and whether each line is its own record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub label: String,
    pub path: String,
    #[serde(default)]
    pub per_line: bool,
}

/// Corpus description: training files and test files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub train: Vec<ManifestEntry>,
    pub test: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| Error::ingest(path, format!("cannot read manifest: {e}")))?;
        serde_json::from_str(&raw)
            .map_err(|e| Error::ingest(path, format!("manifest is not valid JSON: {e}")))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut raw = serde_json::to_string_pretty(self).expect("manifest serializes");
        raw.push('\n');
        std::fs::write(path, raw)?;
        Ok(())
    }
}

/// A loaded text task: merged training classes (first-seen label order) and
/// individual test records. `skipped_empty` counts inputs that normalized to
/// nothing and were dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextTask {
    pub train: Vec<TrainClass>,
    pub test: Vec<TextRecord>,
    pub skipped_empty: usize,
}

fn resolve(entry_path: &str, manifest_dir: &Path, data_root: Option<&Path>) -> PathBuf {
    let p = Path::new(entry_path);
    if p.is_absolute() {
        p.to_path_buf()
    } else if let Some(root) = data_root {
        root.join(p)
    } else {
        manifest_dir.join(p)
    }
}

fn read_entry(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::ingest(path, format!("cannot read corpus file: {e}")))
}

/// Load a manifest-described corpus. Training documents of one label are
/// merged into a single sequence, whitespace-joined in manifest order, so
/// n-gram windows run across document seams the way they run across word
/// seams.
pub fn load_text_task(
    manifest_path: &Path,
    preproc: &TextPreproc,
    data_root: Option<&Path>,
) -> Result<TextTask> {
    let manifest = Manifest::read(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut skipped = 0usize;

    let mut train: Vec<TrainClass> = Vec::new();
    for entry in &manifest.train {
        let path = resolve(&entry.path, &dir, data_root);
        let raw = read_entry(&path)?;
        let docs: Vec<Vec<u8>> = if entry.per_line {
            raw.lines().map(|l| preproc.apply(l)).collect()
        } else {
            vec![preproc.apply(&raw)]
        };
        let class = match train.iter_mut().find(|c| c.label == entry.label) {
            Some(c) => c,
            None => {
                train.push(TrainClass { label: entry.label.clone(), symbols: Vec::new() });
                train.last_mut().unwrap()
            }
        };
        for doc in docs {
            if doc.is_empty() {
                skipped += 1;
                continue;
            }
            if !class.symbols.is_empty() {
                class.symbols.push(WS);
            }
            class.symbols.extend_from_slice(&doc);
        }
    }

    let mut test: Vec<TextRecord> = Vec::new();
    for entry in &manifest.test {
        let path = resolve(&entry.path, &dir, data_root);
        let raw = read_entry(&path)?;
        if entry.per_line {
            for line in raw.lines() {
                let symbols = preproc.apply(line);
                if symbols.is_empty() {
                    skipped += 1;
                    continue;
                }
                test.push(TextRecord { label: entry.label.clone(), symbols });
            }
        } else {
            let symbols = preproc.apply(&raw);
            if symbols.is_empty() {
                skipped += 1;
            } else {
                test.push(TextRecord { label: entry.label.clone(), symbols });
            }
        }
    }

    Ok(TextTask { train, test, skipped_empty: skipped })
}
