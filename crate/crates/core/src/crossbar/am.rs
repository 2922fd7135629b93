//! Associative-memory search on a crossbar: prototypes in columns, query
//! bits driving rows, column current sums standing in for similarity scores.
//!
//! With coarse-grained randomized partitioning the stored vectors are cut
//! into `f` equal segments. Each segment group ("partition") is a block of
//! columns holding every class's segment under its own random class-to-column
//! permutation, and the query's segments drive the blocks one at a time.
//! Randomizing the layout per partition decorrelates a class's score from
//! any fixed spatial non-uniformity of the array; larger `f` averages the
//! same systematic error over more independent placements.

use super::{AdcConfig, CrossbarArray, NoiseModel, TAG_AM_COMP, TAG_AM_MAIN};
use crate::assocmem::{argmax_first, AssociativeMemoryModel, Metric};
use crate::error::{Error, Result};
use crate::hdvec::Hypervector;
use crate::rng;

/// Class-to-column placement for every partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionLayout {
    pub f: usize,
    pub seg_len: usize,
    pub classes: usize,
    /// `perms[p][class]` = column offset of `class` inside block `p`.
    perms: Vec<Vec<usize>>,
    /// `inv[p][offset]` = class stored at that offset; inverse of `perms`.
    inv: Vec<Vec<usize>>,
}

impl PartitionLayout {
    /// Draw the per-partition permutations from streams
    /// `(seed, "crossbar/partition-perm", p)`.
    pub fn build(classes: usize, dim: usize, f: usize, seed: u64) -> Result<Self> {
        if classes == 0 {
            return Err(Error::InvalidArgument("partition layout needs >= 1 class".into()));
        }
        if f == 0 || f > dim {
            return Err(Error::InvalidArgument(format!(
                "partition count {f} out of range 1..={dim}"
            )));
        }
        if dim % f != 0 {
            return Err(Error::InvalidArgument(format!(
                "partition count {f} does not divide dimension {dim}"
            )));
        }
        let mut perms = Vec::with_capacity(f);
        let mut inv = Vec::with_capacity(f);
        for p in 0..f {
            let mut order: Vec<usize> = (0..classes).collect();
            rng::shuffle(&mut rng::stream(seed, "crossbar/partition-perm", &[p as u64]), &mut order);
            let mut pos = vec![0usize; classes];
            for (offset, &class) in order.iter().enumerate() {
                pos[class] = offset;
            }
            inv.push(order);
            perms.push(pos);
        }
        Ok(Self { f, seg_len: dim / f, classes, perms, inv })
    }

    /// Absolute column of `class` in partition `p`.
    pub fn column(&self, p: usize, class: usize) -> usize {
        p * self.classes + self.perms[p][class]
    }

    /// Class stored at column offset `offset` of partition `p`.
    pub fn class_at(&self, p: usize, offset: usize) -> usize {
        self.inv[p][offset]
    }
}

/// Outcome of one query: winning class index (in model label order) and the
/// per-class analog scores that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub winner: usize,
    pub scores: Vec<f64>,
}

/// A class-prototype memory programmed onto a main/complement crossbar pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AmCrossbar {
    layout: PartitionLayout,
    main: CrossbarArray,
    complement: CrossbarArray,
    pub adc: AdcConfig,
    dim: usize,
}

impl AmCrossbar {
    /// Program a trained model at partition factor `f`. The layout
    /// permutations derive from `noise.seed`, so one seed pins the full
    /// analog state. `adc` defaults to 8 bits with a full scale of one
    /// segment's worth of set-state current.
    pub fn build(
        model: &AssociativeMemoryModel,
        f: usize,
        noise: &NoiseModel,
        adc: Option<AdcConfig>,
    ) -> Result<Self> {
        let dim = model.dim();
        let classes = model.len();
        let layout = PartitionLayout::build(classes, dim, f, noise.seed)?;
        let complements: Vec<Hypervector> =
            model.prototypes().iter().map(|p| p.not()).collect();

        let build_pattern = |vectors: &[Hypervector]| -> Result<Vec<Hypervector>> {
            let mut rows = Vec::with_capacity(layout.seg_len);
            for r in 0..layout.seg_len {
                let mut row = Hypervector::zeros(classes * f)?;
                for p in 0..layout.f {
                    for offset in 0..classes {
                        let class = layout.class_at(p, offset);
                        if vectors[class].get(p * layout.seg_len + r) {
                            row.set(p * classes + offset, true);
                        }
                    }
                }
                rows.push(row);
            }
            Ok(rows)
        };

        let main = CrossbarArray::program(&build_pattern(model.prototypes())?, noise, TAG_AM_MAIN)?;
        let complement = CrossbarArray::program(&build_pattern(&complements)?, noise, TAG_AM_COMP)?;
        let adc = adc.unwrap_or(AdcConfig {
            bits: 8,
            full_scale_amps: main.full_scale_for(layout.seg_len),
            enabled: true,
        });
        adc.validate()?;
        Ok(Self { layout, main, complement, adc, dim })
    }

    pub fn layout(&self) -> &PartitionLayout {
        &self.layout
    }

    pub fn main(&self) -> &CrossbarArray {
        &self.main
    }

    pub fn complement(&self) -> &CrossbarArray {
        &self.complement
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Summed (noisy, digitized) column currents of one partition block, in
    /// set-state units, indexed by column offset.
    fn block_sums(
        &self,
        array: &CrossbarArray,
        active_rows: &[usize],
        p: usize,
        nonce: u64,
    ) -> Vec<f64> {
        let classes = self.layout.classes;
        let noise = array.noise();
        let mut sums = vec![0.0; classes];
        for &r in active_rows {
            let row = &array.norm_row(r)[p * classes..(p + 1) * classes];
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        if noise.read_noise_frac > 0.0 {
            let mut stream =
                rng::stream(noise.seed, "crossbar/am-read", &[array.tag(), nonce, p as u64]);
            for s in sums.iter_mut() {
                *s *= 1.0 + noise.read_noise_frac * rng::standard_normal(&mut stream);
            }
        }
        let fs_norm =
            self.adc.full_scale_amps / (noise.read_voltage * noise.g_set_mean);
        for s in sums.iter_mut() {
            *s = self.adc.apply(*s, fs_norm);
        }
        sums
    }

    /// Winner-take-all search. The query's segments drive the partitions in
    /// order; per-class scores add dequantized column currents across
    /// partitions (main array for `dotp`, plus the complement array driven by
    /// the inverted query for `invhamm`). Ties go to the lowest class index.
    /// `nonce` must be unique per query for independent read noise.
    pub fn search(&self, query: &Hypervector, metric: Metric, nonce: u64) -> Result<SearchResult> {
        if query.dim() != self.dim {
            return Err(Error::InvalidArgument(format!(
                "query dimension {} does not match memory dimension {}",
                query.dim(),
                self.dim
            )));
        }
        let classes = self.layout.classes;
        let seg = self.layout.seg_len;
        let mut scores = vec![0.0; classes];
        let mut active = Vec::with_capacity(seg);
        let mut inactive = Vec::with_capacity(seg);
        for p in 0..self.layout.f {
            active.clear();
            inactive.clear();
            for r in 0..seg {
                if query.get(p * seg + r) {
                    active.push(r);
                } else {
                    inactive.push(r);
                }
            }
            let main_sums = self.block_sums(&self.main, &active, p, nonce);
            for (offset, s) in main_sums.iter().enumerate() {
                scores[self.layout.class_at(p, offset)] += s;
            }
            if metric == Metric::InvHamm {
                let comp_sums = self.block_sums(&self.complement, &inactive, p, nonce);
                for (offset, s) in comp_sums.iter().enumerate() {
                    scores[self.layout.class_at(p, offset)] += s;
                }
            }
        }
        Ok(SearchResult { winner: argmax_first(&scores), scores })
    }
}
