//! On-disk container for a trained classifier.
//!
//! Layout: an 8-byte magic (`HDCMODEL`), a little-endian `u32` format
//! version, a length-prefixed JSON header (task, dimension, seeds, encoder
//! settings, metric, preprocessing, symbol and label lists), then the raw
//! vector sections in fixed order -- item memory, continuous levels, the
//! tie-break vector (spatial models only), class prototypes. Each section is
//! a `u32` count followed by length-prefixed packed vectors. The file is
//! self-contained: inference needs nothing but this file and the queries.

use std::io::{self, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assocmem::{AssociativeMemoryModel, Metric};
use crate::datasets::{StopList, TextPreproc};
use crate::encoder::{EncoderConfig, SpatialEncoder};
use crate::error::{Error, Result};
use crate::hdvec::Hypervector;
use crate::itemmem::{ContinuousItemMemory, ItemMemory};
use crate::rng::RNG_SCHEME;

pub const MODEL_MAGIC: [u8; 8] = *b"HDCMODEL";
pub const MODEL_VERSION: u32 = 1;
/// Upper bound on header/section sizes, against corrupt length fields.
const MAX_SANE_LEN: u32 = 1 << 28;

/// The four built-in classification tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    /// Which language is this text written in (letter n-grams).
    Language,
    /// Which topic is this article about (letter n-grams, stop words removed).
    News,
    /// Which hand gesture produced this electromyography signal.
    Emg,
    /// Generated text corpus with a tunable difficulty knob.
    Synth,
}

impl TaskKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TaskKind::Language => "language",
            TaskKind::News => "news",
            TaskKind::Emg => "emg",
            TaskKind::Synth => "synth",
        }
    }

    /// Text tasks stream symbol sequences; the spatial task streams
    /// multi-channel samples.
    pub fn is_text(&self) -> bool {
        !matches!(self, TaskKind::Emg)
    }
}

/// The encoding-side state a model carries next to its class prototypes.
#[derive(Debug, Clone, PartialEq)]
pub enum EncoderState {
    /// Symbol item memory for sequence tasks.
    Text(ItemMemory),
    /// Channel/level memories plus tie-break vector for the spatial task.
    Spatial(SpatialEncoder),
}

/// A trained classifier with everything inference needs.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub task: TaskKind,
    pub seed: u64,
    pub cfg: EncoderConfig,
    pub metric: Metric,
    pub preproc: TextPreproc,
    pub state: EncoderState,
    pub memory: AssociativeMemoryModel,
}

#[derive(Serialize, Deserialize)]
struct Header {
    rng_scheme: String,
    task: TaskKind,
    dim: usize,
    seed: u64,
    encoder: EncoderConfig,
    metric: Metric,
    preproc: String,
    #[serde(default)]
    stopwords: Option<Vec<String>>,
    #[serde(default)]
    min_token_len: Option<usize>,
    symbols: Vec<String>,
    labels: Vec<String>,
    #[serde(default)]
    cim_levels: Option<usize>,
    item_seed: u64,
    #[serde(default)]
    cim_seed: Option<u64>,
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn read_exact(r: &mut impl Read, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            format_err("unexpected end of model file")
        } else {
            Error::Io(e)
        }
    })
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn write_vectors(w: &mut impl Write, vectors: &[Hypervector]) -> Result<()> {
    w.write_all(&(vectors.len() as u32).to_le_bytes())?;
    for v in vectors {
        let bytes = v.to_bytes();
        w.write_all(&(bytes.len() as u32).to_le_bytes())?;
        w.write_all(&bytes)?;
    }
    Ok(())
}

fn read_vectors(r: &mut impl Read, what: &str) -> Result<Vec<Hypervector>> {
    let count = read_u32(r)?;
    if count > MAX_SANE_LEN {
        return Err(format_err(format!("implausible {what} section count {count}")));
    }
    let mut out = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let len = read_u32(r)?;
        if len > MAX_SANE_LEN {
            return Err(format_err(format!("implausible vector length {len} in {what} section")));
        }
        let mut bytes = vec![0u8; len as usize];
        read_exact(r, &mut bytes)?;
        let (v, consumed) = Hypervector::from_bytes(&bytes)
            .map_err(|e| format_err(format!("bad vector in {what} section: {e}")))?;
        if consumed != bytes.len() {
            return Err(format_err(format!("trailing bytes after a {what} vector")));
        }
        out.push(v);
    }
    Ok(out)
}

impl TrainedModel {
    pub fn dim(&self) -> usize {
        self.memory.dim()
    }

    pub fn write(&self, w: &mut impl Write) -> Result<()> {
        let (preproc, stopwords, min_token_len) = match &self.preproc {
            TextPreproc::Plain => ("plain".to_string(), None, None),
            TextPreproc::News(stop) => {
                ("news".to_string(), Some(stop.sorted_words()), Some(stop.min_token_len))
            }
        };
        let header = match &self.state {
            EncoderState::Text(im) => Header {
                rng_scheme: RNG_SCHEME.to_string(),
                task: self.task,
                dim: self.dim(),
                seed: self.seed,
                encoder: self.cfg,
                metric: self.metric,
                preproc,
                stopwords,
                min_token_len,
                symbols: im.symbols().to_vec(),
                labels: self.memory.labels().to_vec(),
                cim_levels: None,
                item_seed: im.seed(),
                cim_seed: None,
            },
            EncoderState::Spatial(enc) => Header {
                rng_scheme: RNG_SCHEME.to_string(),
                task: self.task,
                dim: self.dim(),
                seed: self.seed,
                encoder: self.cfg,
                metric: self.metric,
                preproc,
                stopwords,
                min_token_len,
                symbols: enc.channels().symbols().to_vec(),
                labels: self.memory.labels().to_vec(),
                cim_levels: Some(enc.levels().levels()),
                item_seed: enc.channels().seed(),
                cim_seed: Some(enc.levels().seed()),
            },
        };
        let header_bytes = serde_json::to_vec(&header)
            .map_err(|e| format_err(format!("cannot encode model header: {e}")))?;
        w.write_all(&MODEL_MAGIC)?;
        w.write_all(&MODEL_VERSION.to_le_bytes())?;
        w.write_all(&(header_bytes.len() as u32).to_le_bytes())?;
        w.write_all(&header_bytes)?;
        match &self.state {
            EncoderState::Text(im) => {
                write_vectors(w, im.vectors())?;
                write_vectors(w, &[])?; // no continuous levels
                write_vectors(w, &[])?; // no tie-break vector
            }
            EncoderState::Spatial(enc) => {
                write_vectors(w, enc.channels().vectors())?;
                write_vectors(w, enc.levels().level_vectors())?;
                write_vectors(w, std::slice::from_ref(enc.tie()))?;
            }
        }
        write_vectors(w, self.memory.prototypes())
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut file = io::BufWriter::new(std::fs::File::create(path)?);
        self.write(&mut file)?;
        file.flush()?;
        Ok(())
    }

    pub fn read(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        read_exact(r, &mut magic)?;
        if magic != MODEL_MAGIC {
            return Err(format_err("not a model file (bad magic)"));
        }
        let version = read_u32(r)?;
        if version != MODEL_VERSION {
            return Err(format_err(format!(
                "unsupported model format version {version} (this build reads {MODEL_VERSION})"
            )));
        }
        let header_len = read_u32(r)?;
        if header_len > MAX_SANE_LEN {
            return Err(format_err(format!("implausible header length {header_len}")));
        }
        let mut header_bytes = vec![0u8; header_len as usize];
        read_exact(r, &mut header_bytes)?;
        let header: Header = serde_json::from_slice(&header_bytes)
            .map_err(|e| format_err(format!("bad model header: {e}")))?;
        if header.rng_scheme != RNG_SCHEME {
            return Err(Error::Mismatch(format!(
                "model was built under generator scheme {:?}; this build uses {:?}",
                header.rng_scheme, RNG_SCHEME
            )));
        }
        let cfg = EncoderConfig::new(header.encoder.n, header.encoder.kind, header.encoder.perm)?;
        let preproc = match header.preproc.as_str() {
            "plain" => TextPreproc::Plain,
            "news" => {
                let words = header.stopwords.clone().unwrap_or_default();
                let mut stop = StopList::from_words(words.iter().map(String::as_str));
                if let Some(min) = header.min_token_len {
                    stop.min_token_len = min;
                }
                TextPreproc::News(stop)
            }
            other => return Err(format_err(format!("unknown preprocessing kind {other:?}"))),
        };

        let im_vectors = read_vectors(r, "item memory")?;
        let cim_vectors = read_vectors(r, "continuous levels")?;
        let tie_vectors = read_vectors(r, "tie-break")?;
        let prototypes = read_vectors(r, "prototype")?;

        if im_vectors.len() != header.symbols.len() {
            return Err(format_err(format!(
                "header lists {} symbols but file holds {} item vectors",
                header.symbols.len(),
                im_vectors.len()
            )));
        }
        if prototypes.len() != header.labels.len() {
            return Err(format_err(format!(
                "header lists {} labels but file holds {} prototypes",
                header.labels.len(),
                prototypes.len()
            )));
        }
        let rebuild = |e: Error| format_err(format!("inconsistent model contents: {e}"));
        let state = if header.task.is_text() {
            if !cim_vectors.is_empty() || !tie_vectors.is_empty() {
                return Err(format_err("text model carries spatial sections"));
            }
            EncoderState::Text(
                ItemMemory::from_parts(header.symbols.clone(), im_vectors, header.item_seed)
                    .map_err(rebuild)?,
            )
        } else {
            if header.cim_levels != Some(cim_vectors.len()) {
                return Err(format_err(format!(
                    "header lists {:?} levels but file holds {}",
                    header.cim_levels,
                    cim_vectors.len()
                )));
            }
            if tie_vectors.len() != 1 {
                return Err(format_err("spatial model must carry exactly one tie-break vector"));
            }
            let channels =
                ItemMemory::from_parts(header.symbols.clone(), im_vectors, header.item_seed)
                    .map_err(rebuild)?;
            let levels =
                ContinuousItemMemory::from_parts(cim_vectors, header.cim_seed.unwrap_or(0))
                    .map_err(rebuild)?;
            EncoderState::Spatial(
                SpatialEncoder::from_parts(
                    channels,
                    levels,
                    tie_vectors.into_iter().next().expect("length checked"),
                    cfg,
                )
                .map_err(rebuild)?,
            )
        };
        let memory = AssociativeMemoryModel::from_prototypes(header.labels, prototypes)
            .map_err(rebuild)?;
        if memory.dim() != header.dim {
            return Err(format_err(format!(
                "header dimension {} disagrees with stored vectors ({})",
                header.dim,
                memory.dim()
            )));
        }
        let state_dim = match &state {
            EncoderState::Text(im) => im.dim(),
            EncoderState::Spatial(enc) => enc.dim(),
        };
        if state_dim != header.dim {
            return Err(format_err("encoder and prototype sections differ in dimension"));
        }
        Ok(Self {
            task: header.task,
            seed: header.seed,
            cfg,
            metric: header.metric,
            preproc,
            state,
            memory,
        })
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::ingest(path, format!("cannot open model: {e}")))?;
        Self::read(&mut io::BufReader::new(file))
    }

    /// SHA-256 of the serialized file contents, as lowercase hex. Stable
    /// across runs for identical models; recorded in reports.
    pub fn content_hash(&self) -> Result<String> {
        let mut bytes = Vec::new();
        self.write(&mut bytes)?;
        let digest = Sha256::digest(&bytes);
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }
}
