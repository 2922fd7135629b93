//! Loader for multi-channel quantized sensor streams (surface EMG style).
//!
//! Input is a delimited table, one sample per line: four channel levels and a
//! gesture label. The stream is downsampled by striding, split into an early
//! training region and a late query region, and the training region is cut at
//! label changes into constant-label runs so temporal n-grams never straddle
//! a gesture transition.

use super::EmgRecord;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmgLoadOptions {
    /// Keep every k-th raw sample.
    pub downsample: usize,
    /// Samples (after downsampling) reserved for training when the stream is
    /// long enough; shorter streams split 3:2.
    pub train_samples: usize,
    /// Number of quantization levels; channel values must lie below this.
    pub levels: u8,
    /// Temporal window length; also the query window size.
    pub ngram: usize,
}

impl Default for EmgLoadOptions {
    fn default() -> Self {
        Self { downsample: 175, train_samples: 1280, levels: 22, ngram: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmgTask {
    /// Constant-label training runs, in stream order.
    pub train_runs: Vec<EmgRecord>,
    /// Fixed-size query windows labeled by majority vote.
    pub queries: Vec<EmgRecord>,
    /// Samples kept after downsampling.
    pub total_samples: usize,
}

struct Row {
    levels: [u8; 4],
    label: u8,
}

fn parse_row(path: &Path, line_no: usize, line: &str, levels: u8) -> Result<Row> {
    let fields: Vec<&str> =
        line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
    if fields.len() != 5 {
        return Err(Error::ingest(
            path,
            format!("line {line_no}: expected 5 fields (ch1..ch4,label), got {}", fields.len()),
        ));
    }
    let mut vals = [0u8; 5];
    for (i, f) in fields.iter().enumerate() {
        vals[i] = f.parse::<u8>().map_err(|_| {
            Error::ingest(path, format!("line {line_no}: field {:?} is not a small integer", f))
        })?;
    }
    for (c, &v) in vals[..4].iter().enumerate() {
        if v >= levels {
            return Err(Error::ingest(
                path,
                format!("line {line_no}: channel {} level {v} out of range 0..{levels}", c + 1),
            ));
        }
    }
    Ok(Row { levels: [vals[0], vals[1], vals[2], vals[3]], label: vals[4] })
}

/// Majority label of a window; ties go to the smallest label.
fn majority_label(rows: &[Row]) -> u8 {
    let mut counts = [0usize; 256];
    for r in rows {
        counts[r.label as usize] += 1;
    }
    let mut best = 0usize;
    for l in 1..256 {
        if counts[l] > counts[best] {
            best = l;
        }
    }
    best as u8
}

pub fn load_emg(path: &Path, opts: &EmgLoadOptions) -> Result<EmgTask> {
    if opts.downsample == 0 {
        return Err(Error::InvalidArgument("downsample stride must be >= 1".into()));
    }
    if opts.ngram == 0 {
        return Err(Error::InvalidArgument("n-gram order must be >= 1".into()));
    }
    let raw = std::fs::read_to_string(path)
        .map_err(|e| Error::ingest(path, format!("cannot read sensor file: {e}")))?;

    let mut rows: Vec<Row> = Vec::new();
    let mut raw_index = 0usize;
    for (i, line) in raw.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        // A single leading header line is tolerated.
        if raw_index == 0 && i == 0 && trimmed.chars().any(|c| c.is_ascii_alphabetic()) {
            continue;
        }
        if raw_index % opts.downsample == 0 {
            rows.push(parse_row(path, i + 1, trimmed, opts.levels)?);
        }
        raw_index += 1;
    }

    let total = rows.len();
    if total < opts.ngram {
        return Err(Error::ingest(
            path,
            format!(
                "only {total} samples after downsampling by {}, need at least {}",
                opts.downsample, opts.ngram
            ),
        ));
    }

    let train_take = if total >= opts.train_samples + opts.ngram {
        opts.train_samples
    } else {
        total * 3 / 5
    };

    let mut train_runs: Vec<EmgRecord> = Vec::new();
    for row in &rows[..train_take] {
        match train_runs.last_mut() {
            Some(run) if run.label == row.label => run.samples.push(row.levels),
            _ => train_runs
                .push(EmgRecord { label: row.label, samples: vec![row.levels] }),
        }
    }

    let mut queries: Vec<EmgRecord> = Vec::new();
    for chunk in rows[train_take..].chunks_exact(opts.ngram) {
        queries.push(EmgRecord {
            label: majority_label(chunk),
            samples: chunk.iter().map(|r| r.levels).collect(),
        });
    }

    Ok(EmgTask { train_runs, queries, total_samples: total })
}
