//! Associative memory: one bundled prototype hypervector per class, queried
//! by nearest-prototype search.

use crate::datasets::{EmgRecord, TrainClass};
use crate::encoder::{self, EncoderConfig, SpatialEncoder};
use crate::error::{Error, Result};
use crate::hdvec::{Accumulator, Hypervector};
use crate::itemmem::ItemMemory;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Similarity used to rank prototypes against a query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Count of components where query and prototype are both 1.
    Dotp,
    /// Count of agreeing components (`d - hamming`); weighs shared 0s too.
    InvHamm,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Dotp => "dotp",
            Metric::InvHamm => "invhamm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssociativeMemoryModel {
    labels: Vec<String>,
    prototypes: Vec<Hypervector>,
}

impl AssociativeMemoryModel {
    pub fn from_prototypes(labels: Vec<String>, prototypes: Vec<Hypervector>) -> Result<Self> {
        if labels.is_empty() || labels.len() != prototypes.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} prototypes",
                labels.len(),
                prototypes.len()
            )));
        }
        let dim = prototypes[0].dim();
        if prototypes.iter().any(|p| p.dim() != dim) {
            return Err(Error::InvalidArgument("prototypes differ in dimension".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidArgument(format!("duplicate class label {l:?}")));
            }
        }
        Ok(Self { labels, prototypes })
    }

    /// Train on merged text classes: each class's symbol sequence is encoded
    /// into one prototype. Class order follows the input order.
    pub fn train_text(
        classes: &[TrainClass],
        im: &ItemMemory,
        cfg: &EncoderConfig,
    ) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::Training("no training classes".into()));
        }
        let prototypes: Vec<Hypervector> = classes
            .par_iter()
            .map(|c| {
                encoder::encode_symbol_sequence(&c.symbols, im, cfg).map_err(|e| {
                    Error::Training(format!("class {:?}: {e}", c.label))
                })
            })
            .collect::<Result<_>>()?;
        Self::from_prototypes(classes.iter().map(|c| c.label.clone()).collect(), prototypes)
    }

    /// Train on labeled sensor runs: windows never straddle a run boundary;
    /// each class bundles the windows of all its runs into one prototype.
    /// Runs shorter than the n-gram order contribute nothing. Class order is
    /// first appearance in the input.
    pub fn train_spatial(records: &[EmgRecord], enc: &SpatialEncoder) -> Result<Self> {
        let mut labels: Vec<u8> = Vec::new();
        for r in records {
            if !labels.contains(&r.label) {
                labels.push(r.label);
            }
        }
        if labels.is_empty() {
            return Err(Error::Training("no training records".into()));
        }
        let prototypes: Vec<Hypervector> = labels
            .par_iter()
            .map(|&label| {
                let mut acc = Accumulator::new(enc.dim())?;
                let mut windows = 0u64;
                for r in records.iter().filter(|r| r.label == label) {
                    if r.samples.len() < enc.cfg.n {
                        continue;
                    }
                    windows += enc.accumulate_record(&r.samples, &mut acc)?;
                }
                if windows == 0 {
                    return Err(Error::Training(format!(
                        "class {label}: no run is as long as the n-gram order {}",
                        enc.cfg.n
                    )));
                }
                acc.binarize(enc.cfg.threshold(windows))
            })
            .collect::<Result<_>>()?;
        Self::from_prototypes(labels.iter().map(|l| l.to_string()).collect(), prototypes)
    }

    pub fn len(&self) -> usize {
        self.prototypes.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one class by construction
    }

    pub fn dim(&self) -> usize {
        self.prototypes[0].dim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn prototypes(&self) -> &[Hypervector] {
        &self.prototypes
    }

    pub fn prototype(&self, i: usize) -> Result<&Hypervector> {
        self.prototypes.get(i).ok_or_else(|| {
            Error::InvalidArgument(format!("class index {i} out of range for {}", self.len()))
        })
    }

    /// Integer similarity of the query to every prototype, in class order.
    pub fn similarities(&self, query: &Hypervector, metric: Metric) -> Result<Vec<usize>> {
        self.prototypes
            .iter()
            .map(|p| match metric {
                Metric::Dotp => query.dot(p),
                Metric::InvHamm => query.inv_hamming(p),
            })
            .collect()
    }

    /// Winner-take-all: the class with the highest similarity; ties go to the
    /// lowest class index.
    pub fn classify(&self, query: &Hypervector, metric: Metric) -> Result<usize> {
        let sims = self.similarities(query, metric)?;
        Ok(argmax_first(&sims))
    }
}

/// Index of the maximum; the first occurrence wins ties.
pub fn argmax_first<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{EncoderKind, PermMode};

    fn hv(s: &str) -> Hypervector {
        Hypervector::from_bitstring(s).unwrap()
    }

    #[test]
    fn from_prototypes_validates() {
        assert!(AssociativeMemoryModel::from_prototypes(vec![], vec![]).is_err());
        assert!(AssociativeMemoryModel::from_prototypes(
            vec!["a".into(), "a".into()],
            vec![hv("10"), hv("01")]
        )
        .is_err());
        assert!(AssociativeMemoryModel::from_prototypes(
            vec!["a".into(), "b".into()],
            vec![hv("10"), hv("010")]
        )
        .is_err());
    }

    #[test]
    fn classify_picks_nearest_and_breaks_ties_low() {
        let am = AssociativeMemoryModel::from_prototypes(
            vec!["x".into(), "y".into(), "z".into()],
            vec![hv("110000"), hv("001100"), hv("000011")],
        )
        .unwrap();
        assert_eq!(am.classify(&hv("110100"), Metric::Dotp).unwrap(), 0);
        assert_eq!(am.classify(&hv("001100"), Metric::InvHamm).unwrap(), 1);
        // Equal dot product with x and y: lowest index wins.
        assert_eq!(am.classify(&hv("101000"), Metric::Dotp).unwrap(), 0);
        assert_eq!(am.similarities(&hv("110100"), Metric::Dotp).unwrap(), vec![2, 1, 0]);
        assert_eq!(
            am.similarities(&hv("110000"), Metric::InvHamm).unwrap(),
            vec![6, 2, 2]
        );
    }

    #[test]
    fn metric_identity_links_dot_and_inv_hamming() {
        // invHamm = d - |Q| - |P| + 2 * dotp, exactly, for random pairs.
        for case in 0..200u64 {
            let q = Hypervector::random(777, 3, case * 2).unwrap();
            let p = Hypervector::random(777, 3, case * 2 + 1).unwrap();
            let lhs = q.inv_hamming(&p).unwrap() as i64;
            let rhs = 777 - q.popcount() as i64 - p.popcount() as i64
                + 2 * q.dot(&p).unwrap() as i64;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn text_training_separates_disjoint_alphabets() {
        let im = ItemMemory::generate(&crate::itemmem::text_symbols(), 2048, 5).unwrap();
        let cfg = EncoderConfig::new(3, EncoderKind::Exact, PermMode::Circular).unwrap();
        // Two classes over disjoint letters, whitespace-separated words.
        let seq = |letters: &[u8], len: usize| -> Vec<u8> {
            (0..len)
                .map(|i| if i % 5 == 4 { 26 } else { letters[i % letters.len()] })
                .collect()
        };
        let classes = vec![
            TrainClass { label: "ab".into(), symbols: seq(&[0, 1, 2], 400) },
            TrainClass { label: "xy".into(), symbols: seq(&[23, 24, 25], 400) },
        ];
        let am = AssociativeMemoryModel::train_text(&classes, &im, &cfg).unwrap();
        assert_eq!(am.labels(), &["ab".to_string(), "xy".to_string()]);
        let q0 = encoder::encode_symbol_sequence(&seq(&[0, 1, 2], 60), &im, &cfg).unwrap();
        let q1 = encoder::encode_symbol_sequence(&seq(&[23, 24, 25], 60), &im, &cfg).unwrap();
        for metric in [Metric::Dotp, Metric::InvHamm] {
            assert_eq!(am.classify(&q0, metric).unwrap(), 0);
            assert_eq!(am.classify(&q1, metric).unwrap(), 1);
        }
    }

    #[test]
    fn text_training_reports_offending_class() {
        let im = ItemMemory::generate(&crate::itemmem::text_symbols(), 256, 5).unwrap();
        let cfg = EncoderConfig::new(4, EncoderKind::Exact, PermMode::Circular).unwrap();
        let classes = vec![TrainClass { label: "shorty".into(), symbols: vec![0, 1] }];
        match AssociativeMemoryModel::train_text(&classes, &im, &cfg) {
            Err(Error::Training(msg)) => assert!(msg.contains("shorty"), "{msg}"),
            other => panic!("expected training error, got {other:?}"),
        }
    }

    #[test]
    fn spatial_training_groups_runs_by_label() {
        let cfg = EncoderConfig::new(2, EncoderKind::Exact, PermMode::Circular).unwrap();
        let enc = SpatialEncoder::new(4, 22, 1000, 23, cfg).unwrap();
        let mk = |label: u8, base: u8, len: usize| EmgRecord {
            label,
            samples: (0..len).map(|i| [base, base + 1, (i % 20) as u8, 3]).collect(),
        };
        // Two runs of class 1 (one too short to contribute), one of class 2.
        let records = vec![mk(1, 0, 8), mk(2, 18, 8), mk(1, 1, 1)];
        let am = AssociativeMemoryModel::train_spatial(&records, &enc).unwrap();
        assert_eq!(am.labels(), &["1".to_string(), "2".to_string()]);
        let q1 = enc.encode_record(&mk(1, 0, 3).samples).unwrap();
        let q2 = enc.encode_record(&mk(2, 18, 3).samples).unwrap();
        assert_eq!(am.classify(&q1, Metric::Dotp).unwrap(), 0);
        assert_eq!(am.classify(&q2, Metric::Dotp).unwrap(), 1);
    }

    #[test]
    fn argmax_first_prefers_lowest_index() {
        assert_eq!(argmax_first(&[1, 3, 3, 2]), 1);
        assert_eq!(argmax_first(&[5]), 0);
        assert_eq!(argmax_first(&[2.0, 2.0, 2.0]), 0);
    }
}
