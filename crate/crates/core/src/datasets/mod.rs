//! Data ingestion: text corpora driven by a manifest, multi-channel quantized
//! sensor streams, and a seeded synthetic text generator for self-contained
//! experiments.

pub mod emg;
pub mod synth;
pub mod text;

pub use emg::{load_emg, EmgLoadOptions, EmgTask};
pub use synth::{write_corpus, SynthConfig, SynthCorpus};
pub use text::{
    char_to_index, load_text_task, preprocess, to_display, Manifest, ManifestEntry, StopList,
    TextPreproc, TextTask,
};

/// Symbols in the text alphabet: `a`..`z` plus whitespace.
pub const ALPHABET_LEN: usize = 27;
/// Index of the whitespace symbol (the last one).
pub const WS: u8 = 26;

/// One training class: a label and its merged symbol sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainClass {
    pub label: String,
    pub symbols: Vec<u8>,
}

/// One labeled test sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextRecord {
    pub label: String,
    pub symbols: Vec<u8>,
}

/// A labeled run or window of multi-channel quantized samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmgRecord {
    pub label: u8,
    pub samples: Vec<[u8; 4]>,
}
