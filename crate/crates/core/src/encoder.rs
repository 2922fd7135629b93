//! Sequence encoders: n-gram binding, its disjunctive-normal-form expansion,
//! the sparse two-minterm approximation, and bundling of sliding windows.
//!
//! The exact n-gram of a window `B[1..=n]` binds permuted items with XNOR:
//!
//! ```text
//! G = B[1] xnor p(B[2]) xnor p^2(B[3]) xnor ... xnor p^(n-1)(B[n])
//! ```
//!
//! Expanding that XNOR chain into a sum of products gives `2^(n-1)` minterms
//! (exactly the item-complement patterns with an even number of complements).
//! Keeping only the first and last — no complements, all complements — yields
//! the two-minterm approximation, which is what an AND/OR crossbar pipeline
//! can compute in `n` cycles. Bundled windows are binarized against a
//! threshold scaled by how many minterms the encoder kept: a window count of
//! `l` thresholds at `l * k / 2^n` for an encoder keeping `k` minterms, so
//! sparser encoders get proportionally lower cutoffs.

use crate::error::{Error, Result};
use crate::hdvec::{Accumulator, Hypervector, PermuteMode};
use crate::itemmem::{channel_symbols, ContinuousItemMemory, ItemMemory};
use crate::rng;
use serde::{Deserialize, Serialize};

/// Cap on n-gram order; the all-minterm expansion enumerates `2^(n-1)` terms.
pub const MAX_NGRAM: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EncoderKind {
    /// XNOR chain of permuted items.
    Exact,
    /// Full disjunctive expansion of the chain; equals `Exact` by identity.
    AllMinterm,
    /// First and last minterm only; sparse approximation, needs `n >= 2`.
    TwoMinterm,
}

impl EncoderKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EncoderKind::Exact => "exact",
            EncoderKind::AllMinterm => "all_minterm",
            EncoderKind::TwoMinterm => "two_minterm",
        }
    }
}

/// Which permutation plays the role of `p` in the n-gram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PermMode {
    /// Circular rotation toward higher indices; information-preserving.
    Circular,
    /// Plain shift toward higher indices with zero fill, as a shift-register
    /// datapath implements it.
    Plain,
}

impl PermMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            PermMode::Circular => "circular",
            PermMode::Plain => "plain",
        }
    }

    fn mode(&self) -> PermuteMode {
        match self {
            PermMode::Circular => PermuteMode::Circular,
            PermMode::Plain => PermuteMode::PlainRight,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderConfig {
    pub n: usize,
    pub kind: EncoderKind,
    pub perm: PermMode,
}

impl EncoderConfig {
    pub fn new(n: usize, kind: EncoderKind, perm: PermMode) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n-gram order must be >= 1".into()));
        }
        if n > MAX_NGRAM {
            return Err(Error::InvalidArgument(format!(
                "n-gram order {n} exceeds supported maximum {MAX_NGRAM}"
            )));
        }
        if kind == EncoderKind::TwoMinterm && n < 2 {
            return Err(Error::InvalidArgument(
                "two-minterm encoding is undefined for n = 1 (it would OR an item with its own complement)".into(),
            ));
        }
        Ok(Self { n, kind, perm })
    }

    /// Number of minterms the encoder keeps out of the `2^n` possible.
    pub fn minterm_weight(&self) -> u64 {
        match self.kind {
            EncoderKind::Exact | EncoderKind::AllMinterm => 1u64 << (self.n - 1),
            EncoderKind::TwoMinterm => 2,
        }
    }

    /// Bundling cutoff for `l` accumulated windows: `l * k / 2^n`. All three
    /// factors are dyadic, so the value is exact in `f64` and the strict
    /// comparison in [`Accumulator::binarize`] carries no rounding hazard.
    pub fn threshold(&self, l: u64) -> f64 {
        l as f64 * (self.minterm_weight() as f64 / (1u64 << self.n) as f64)
    }
}

fn check_basis(basis: &[&Hypervector]) -> Result<usize> {
    let first = basis
        .first()
        .ok_or_else(|| Error::InvalidArgument("n-gram over an empty window".into()))?;
    let dim = first.dim();
    if basis.iter().any(|b| b.dim() != dim) {
        return Err(Error::InvalidArgument("window items differ in dimension".into()));
    }
    if basis.len() > MAX_NGRAM {
        return Err(Error::InvalidArgument(format!(
            "n-gram order {} exceeds supported maximum {MAX_NGRAM}",
            basis.len()
        )));
    }
    Ok(dim)
}

/// Exact n-gram: XNOR chain of the items, item `i` (0-based) permuted by `i`.
pub fn ngram_exact(basis: &[&Hypervector], perm: PermMode) -> Result<Hypervector> {
    check_basis(basis)?;
    let mut acc = basis[0].clone();
    for (i, b) in basis.iter().enumerate().skip(1) {
        acc = acc.xnor(&b.permute_power(i, perm.mode()))?;
    }
    Ok(acc)
}

/// Complement grade of item `k` (1-based) inside minterm `j` of the
/// expansion: the item enters plain when this is even, complemented when odd.
pub fn z_index(n: usize, k: usize, j: u64) -> Result<u64> {
    if k < 1 || k > n {
        return Err(Error::InvalidArgument(format!("item position {k} out of range 1..={n}")));
    }
    if n > MAX_NGRAM || j >= 1u64 << (n - 1) {
        return Err(Error::InvalidArgument(format!(
            "minterm index {j} out of range for n = {n}"
        )));
    }
    Ok((2 * j + (1u64 << (k - 1))) / (1u64 << k))
}

/// Item `k` of minterm `j` before permutation: `B[k]` or its complement as
/// [`z_index`] dictates.
pub fn minterm_literal(b: &Hypervector, n: usize, k: usize, j: u64) -> Result<Hypervector> {
    Ok(if z_index(n, k, j)? % 2 == 0 { b.clone() } else { b.not() })
}

/// Full expansion: OR over all `2^(n-1)` minterms of the AND of permuted
/// literals. Component-wise identical to [`ngram_exact`] under the circular
/// permutation (and to the same chain under any permutation, since the
/// identity is pointwise).
pub fn ngram_all_minterm(basis: &[&Hypervector], perm: PermMode) -> Result<Hypervector> {
    let dim = check_basis(basis)?;
    let n = basis.len();
    let mut out = Hypervector::zeros(dim)?;
    for j in 0..1u64 << (n - 1) {
        let mut term = minterm_literal(basis[0], n, 1, j)?;
        for (i, b) in basis.iter().enumerate().skip(1) {
            let lit = minterm_literal(b, n, i + 1, j)?;
            term = term.and(&lit.permute_power(i, perm.mode()))?;
        }
        out = out.or(&term)?;
    }
    Ok(out)
}

/// Sparse approximation: the all-plain minterm OR the all-complement minterm,
/// `(AND_k p^(k-1) B[k]) OR (AND_k p^(k-1) !B[k])`. Exactly equal to the
/// n-gram at `n = 2`; an approximation above that.
pub fn ngram_two_minterm(basis: &[&Hypervector], perm: PermMode) -> Result<Hypervector> {
    check_basis(basis)?;
    if basis.len() < 2 {
        return Err(Error::InvalidArgument(
            "two-minterm encoding is undefined for n = 1 (it would OR an item with its own complement)".into(),
        ));
    }
    let mut direct = basis[0].clone();
    let mut comp = basis[0].not();
    for (i, b) in basis.iter().enumerate().skip(1) {
        direct = direct.and(&b.permute_power(i, perm.mode()))?;
        comp = comp.and(&b.not().permute_power(i, perm.mode()))?;
    }
    direct.or(&comp)
}

/// Dispatch on the configured encoder kind. The window length must equal
/// `cfg.n`.
pub fn ngram(basis: &[&Hypervector], cfg: &EncoderConfig) -> Result<Hypervector> {
    if basis.len() != cfg.n {
        return Err(Error::InvalidArgument(format!(
            "window of {} items for an n = {} encoder",
            basis.len(),
            cfg.n
        )));
    }
    match cfg.kind {
        EncoderKind::Exact => ngram_exact(basis, cfg.perm),
        EncoderKind::AllMinterm => ngram_all_minterm(basis, cfg.perm),
        EncoderKind::TwoMinterm => ngram_two_minterm(basis, cfg.perm),
    }
}

/// Accumulate every length-`n` window (stride 1, no padding) of a resolved
/// item sequence. Returns the number of windows added.
fn accumulate_windows<'a>(
    acc: &mut Accumulator,
    len: usize,
    item: impl Fn(usize) -> &'a Hypervector,
    cfg: &EncoderConfig,
) -> Result<u64> {
    if len < cfg.n {
        return Err(Error::Encode(format!(
            "sequence of {len} items is shorter than the n-gram order {}",
            cfg.n
        )));
    }
    let l = len - cfg.n + 1;
    let mut window: Vec<&Hypervector> = Vec::with_capacity(cfg.n);
    for w in 0..l {
        window.clear();
        for i in 0..cfg.n {
            window.push(item(w + i));
        }
        let g = ngram(&window, cfg)?;
        acc.accumulate(&g)?;
    }
    Ok(l as u64)
}

/// Encode a symbol-index sequence against an item memory: bundle all
/// sliding-window n-grams and binarize at the encoder's threshold.
pub fn encode_symbol_sequence(
    indices: &[u8],
    im: &ItemMemory,
    cfg: &EncoderConfig,
) -> Result<Hypervector> {
    if let Some(&bad) = indices.iter().find(|&&i| i as usize >= im.len()) {
        return Err(Error::InvalidArgument(format!(
            "symbol index {bad} out of range for item memory of {}",
            im.len()
        )));
    }
    let mut acc = Accumulator::new(im.dim())?;
    let l = accumulate_windows(&mut acc, indices.len(), |i| {
        im.get(indices[i] as usize).expect("index validated above")
    }, cfg)?;
    acc.binarize(cfg.threshold(l))
}

/// Accumulate the windows of a pre-resolved vector sequence into an existing
/// accumulator (the multi-record training path). Returns windows added.
pub fn accumulate_vector_sequence(
    acc: &mut Accumulator,
    vectors: &[Hypervector],
    cfg: &EncoderConfig,
) -> Result<u64> {
    accumulate_windows(acc, vectors.len(), |i| &vectors[i], cfg)
}

/// Encode a pre-resolved vector sequence in one shot.
pub fn encode_vector_sequence(
    vectors: &[Hypervector],
    cfg: &EncoderConfig,
) -> Result<Hypervector> {
    if vectors.is_empty() {
        return Err(Error::Encode("empty vector sequence".into()));
    }
    let mut acc = Accumulator::new(vectors[0].dim())?;
    let l = accumulate_vector_sequence(&mut acc, vectors, cfg)?;
    acc.binarize(cfg.threshold(l))
}

/// Component-wise majority of a vector list, even-count ties resolved by a
/// fixed tie-break vector. Equivalent to accumulating the list plus the
/// tie-break vector and thresholding strictly at half the list length — but
/// the tie vector may only join for even lists, where it can never outvote a
/// real majority; odd lists have no ties to break.
pub fn majority_with_tiebreak(
    vectors: &[Hypervector],
    tie: &Hypervector,
) -> Result<Hypervector> {
    if vectors.is_empty() {
        return Err(Error::InvalidArgument("majority over an empty list".into()));
    }
    let mut acc = Accumulator::new(tie.dim())?;
    for v in vectors {
        acc.accumulate(v)?;
    }
    if vectors.len() % 2 == 0 {
        acc.accumulate(tie)?;
    }
    acc.binarize(vectors.len() as f64 / 2.0)
}

/// Encoder for multi-channel quantized sensor streams: each sample binds a
/// per-channel random vector with the vector for its quantization level, the
/// bound channels are merged by majority, and the per-sample vectors feed the
/// temporal n-gram encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialEncoder {
    channels: ItemMemory,
    levels: ContinuousItemMemory,
    tie: Hypervector,
    pub cfg: EncoderConfig,
}

impl SpatialEncoder {
    pub fn new(
        num_channels: usize,
        num_levels: usize,
        dim: usize,
        seed: u64,
        cfg: EncoderConfig,
    ) -> Result<Self> {
        if num_channels == 0 {
            return Err(Error::InvalidArgument("spatial encoder needs at least one channel".into()));
        }
        let channels = ItemMemory::generate(&channel_symbols(num_channels), dim, seed)?;
        let levels = ContinuousItemMemory::generate(num_levels, dim, seed)?;
        let tie =
            Hypervector::fill_random(dim, &mut rng::stream(seed, "encoder/spatial-tie", &[0]));
        Ok(Self { channels, levels, tie, cfg })
    }

    pub fn from_parts(
        channels: ItemMemory,
        levels: ContinuousItemMemory,
        tie: Hypervector,
        cfg: EncoderConfig,
    ) -> Result<Self> {
        if channels.dim() != levels.dim() || channels.dim() != tie.dim() {
            return Err(Error::InvalidArgument(
                "spatial encoder parts differ in dimension".into(),
            ));
        }
        Ok(Self { channels, levels, tie, cfg })
    }

    pub fn dim(&self) -> usize {
        self.channels.dim()
    }

    pub fn channels(&self) -> &ItemMemory {
        &self.channels
    }

    pub fn levels(&self) -> &ContinuousItemMemory {
        &self.levels
    }

    pub fn tie(&self) -> &Hypervector {
        &self.tie
    }

    /// One sample across all channels -> one hypervector.
    pub fn encode_sample(&self, levels: &[u8]) -> Result<Hypervector> {
        if levels.len() != self.channels.len() {
            return Err(Error::InvalidArgument(format!(
                "sample has {} channels, encoder has {}",
                levels.len(),
                self.channels.len()
            )));
        }
        let bound: Vec<Hypervector> = levels
            .iter()
            .enumerate()
            .map(|(c, &lv)| self.channels.get(c)?.xnor(self.levels.level(lv as usize)?))
            .collect::<Result<_>>()?;
        majority_with_tiebreak(&bound, &self.tie)
    }

    /// Spatially encode every sample of a record, then bundle its temporal
    /// windows into the given accumulator. Returns windows added.
    pub fn accumulate_record(
        &self,
        samples: &[[u8; 4]],
        acc: &mut Accumulator,
    ) -> Result<u64> {
        let encoded: Vec<Hypervector> =
            samples.iter().map(|s| self.encode_sample(s)).collect::<Result<_>>()?;
        accumulate_vector_sequence(acc, &encoded, &self.cfg)
    }

    /// Encode one record (e.g. a query window) into a single hypervector.
    pub fn encode_record(&self, samples: &[[u8; 4]]) -> Result<Hypervector> {
        let encoded: Vec<Hypervector> =
            samples.iter().map(|s| self.encode_sample(s)).collect::<Result<_>>()?;
        encode_vector_sequence(&encoded, &self.cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hv(s: &str) -> Hypervector {
        Hypervector::from_bitstring(s).unwrap()
    }

    fn cfg(n: usize, kind: EncoderKind, perm: PermMode) -> EncoderConfig {
        EncoderConfig::new(n, kind, perm).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(EncoderConfig::new(0, EncoderKind::Exact, PermMode::Circular).is_err());
        assert!(EncoderConfig::new(1, EncoderKind::TwoMinterm, PermMode::Circular).is_err());
        assert!(EncoderConfig::new(21, EncoderKind::AllMinterm, PermMode::Circular).is_err());
        assert!(EncoderConfig::new(1, EncoderKind::Exact, PermMode::Circular).is_ok());
        assert!(EncoderConfig::new(2, EncoderKind::TwoMinterm, PermMode::Plain).is_ok());
    }

    #[test]
    fn minterm_weight_and_threshold() {
        let exact4 = cfg(4, EncoderKind::Exact, PermMode::Circular);
        assert_eq!(exact4.minterm_weight(), 8);
        assert_eq!(exact4.threshold(10), 5.0); // l/2 for exact encoders
        let two4 = cfg(4, EncoderKind::TwoMinterm, PermMode::Circular);
        assert_eq!(two4.minterm_weight(), 2);
        assert_eq!(two4.threshold(8), 1.0); // l * 2 / 16
        let two2 = cfg(2, EncoderKind::TwoMinterm, PermMode::Circular);
        assert_eq!(two2.threshold(4), 2.0); // l * 2 / 4 = l/2
        let exact1 = cfg(1, EncoderKind::Exact, PermMode::Circular);
        assert_eq!(exact1.minterm_weight(), 1);
        assert_eq!(exact1.threshold(6), 3.0);
    }

    /// XNOR chains reduce to XOR parity plus a constant; check every input
    /// combination at d = 1, where the circular permutation is the identity.
    #[test]
    fn ngram_exact_matches_parity_identity_at_d1() {
        for n in 1..=5usize {
            for bits in 0..1u32 << n {
                let basis: Vec<Hypervector> = (0..n)
                    .map(|i| hv(if bits >> i & 1 == 1 { "1" } else { "0" }))
                    .collect();
                let refs: Vec<&Hypervector> = basis.iter().collect();
                let got = ngram_exact(&refs, PermMode::Circular).unwrap().get(0);
                let parity = (bits.count_ones() as usize + n - 1) % 2 == 1;
                assert_eq!(got, parity, "n={n} bits={bits:05b}");
            }
        }
    }

    /// Frozen complement-grade table for n = 3: minterm j complements item k
    /// when the grade is odd. The four minterms carry 0 or 2 complements.
    #[test]
    fn z_index_frozen_table_n3() {
        let expect = [
            [0, 0, 0], // j=0: B1 B2 B3
            [1, 1, 0], // j=1: !B1 !B2 B3
            [2, 1, 1], // j=2: B1 !B2 !B3
            [3, 2, 1], // j=3: !B1 B2 !B3
        ];
        for (j, row) in expect.iter().enumerate() {
            for (k, &z) in row.iter().enumerate() {
                assert_eq!(z_index(3, k + 1, j as u64).unwrap(), z, "k={} j={j}", k + 1);
            }
        }
        assert!(z_index(3, 0, 0).is_err());
        assert!(z_index(3, 4, 0).is_err());
        assert!(z_index(3, 1, 4).is_err());
    }

    /// Every minterm in the expansion complements an even number of items;
    /// the all-plain pattern is j = 0 and the all-complement pattern appears
    /// exactly once for every n >= 2.
    #[test]
    fn expansion_covers_even_complement_patterns() {
        for n in 2..=6usize {
            let mut seen_all_comp = 0;
            let mut patterns = std::collections::HashSet::new();
            for j in 0..1u64 << (n - 1) {
                let mut pattern = 0u64;
                for k in 1..=n {
                    if z_index(n, k, j).unwrap() % 2 == 1 {
                        pattern |= 1 << (k - 1);
                    }
                }
                assert_eq!(pattern.count_ones() % 2, 0, "n={n} j={j}");
                assert!(patterns.insert(pattern), "duplicate pattern at n={n} j={j}");
                if j == 0 {
                    assert_eq!(pattern, 0, "j=0 must be the all-plain minterm");
                }
                if pattern == (1 << n) - 1 {
                    seen_all_comp += 1;
                }
            }
            // n odd: all-complement has odd parity and cannot appear.
            assert_eq!(seen_all_comp, if n % 2 == 0 { 1 } else { 0 }, "n={n}");
        }
    }

    #[test]
    fn all_minterm_equals_exact_smoke() {
        for n in 1..=5usize {
            for case in 0..20u64 {
                let basis: Vec<Hypervector> = (0..n)
                    .map(|i| Hypervector::random(130, 77, case * 10 + i as u64).unwrap())
                    .collect();
                let refs: Vec<&Hypervector> = basis.iter().collect();
                assert_eq!(
                    ngram_all_minterm(&refs, PermMode::Circular).unwrap(),
                    ngram_exact(&refs, PermMode::Circular).unwrap(),
                    "n={n} case={case}"
                );
            }
        }
    }

    #[test]
    fn two_minterm_equals_exact_at_n2_circular() {
        for case in 0..50u64 {
            let a = Hypervector::random(1000, 5, case * 2).unwrap();
            let b = Hypervector::random(1000, 5, case * 2 + 1).unwrap();
            assert_eq!(
                ngram_two_minterm(&[&a, &b], PermMode::Circular).unwrap(),
                ngram_exact(&[&a, &b], PermMode::Circular).unwrap(),
                "case={case}"
            );
        }
    }

    /// Under a plain shift the identity only bends in the zero-fill zone:
    /// components >= n-1 still agree, and in the fill zone the complement
    /// minterm is forced to 0 while the chain sees a hard 0 input.
    #[test]
    fn two_minterm_plain_shift_agrees_outside_fill_zone() {
        for case in 0..20u64 {
            let a = Hypervector::random(300, 6, case * 2).unwrap();
            let b = Hypervector::random(300, 6, case * 2 + 1).unwrap();
            let two = ngram_two_minterm(&[&a, &b], PermMode::Plain).unwrap();
            let exact = ngram_exact(&[&a, &b], PermMode::Plain).unwrap();
            for j in 1..300 {
                assert_eq!(two.get(j), exact.get(j), "case={case} j={j}");
            }
            // Fill-zone component: both shifted literals are 0 there.
            assert!(!two.get(0));
        }
    }

    #[test]
    fn two_minterm_density_is_near_two_over_sixteen() {
        // Expected density for n = 4 is exactly 2/2^4 (the two minterms are
        // disjoint events on i.i.d. fair components).
        let n = 4;
        let mut ones = 0usize;
        let total = 200 * 10_000;
        for case in 0..200u64 {
            let basis: Vec<Hypervector> = (0..n)
                .map(|i| Hypervector::random(10_000, 13, case * 8 + i as u64).unwrap())
                .collect();
            let refs: Vec<&Hypervector> = basis.iter().collect();
            ones += ngram_two_minterm(&refs, PermMode::Circular).unwrap().popcount();
        }
        let density = ones as f64 / total as f64;
        let expect = 2.0 / 16.0;
        let sigma = (expect * (1.0 - expect) / total as f64).sqrt();
        assert!((density - expect).abs() < 7.0 * sigma, "density {density}");
    }

    #[test]
    fn ngram_rejects_bad_windows() {
        let a = hv("1010");
        let b = hv("10");
        assert!(ngram_exact(&[], PermMode::Circular).is_err());
        assert!(ngram_exact(&[&a, &b], PermMode::Circular).is_err());
        assert!(ngram_two_minterm(&[&a], PermMode::Circular).is_err());
        let c4 = cfg(3, EncoderKind::Exact, PermMode::Circular);
        assert!(ngram(&[&a, &a], &c4).is_err()); // wrong window length
    }

    #[test]
    fn single_window_sequence_equals_plain_ngram() {
        let im = ItemMemory::generate(&crate::itemmem::text_symbols(), 512, 21).unwrap();
        for kind in [EncoderKind::Exact, EncoderKind::AllMinterm, EncoderKind::TwoMinterm] {
            let c = cfg(4, kind, PermMode::Circular);
            let seq = [0u8, 4, 8, 12];
            let window: Vec<&Hypervector> =
                seq.iter().map(|&s| im.get(s as usize).unwrap()).collect();
            assert_eq!(
                encode_symbol_sequence(&seq, &im, &c).unwrap(),
                ngram(&window, &c).unwrap(),
                "{kind:?}"
            );
        }
    }

    #[test]
    fn sequence_encoding_errors() {
        let im = ItemMemory::generate(&crate::itemmem::text_symbols(), 128, 2).unwrap();
        let c = cfg(4, EncoderKind::Exact, PermMode::Circular);
        assert!(matches!(
            encode_symbol_sequence(&[0, 1, 2], &im, &c),
            Err(Error::Encode(_))
        ));
        assert!(encode_symbol_sequence(&[0, 1, 2, 99], &im, &c).is_err());
        assert!(encode_vector_sequence(&[], &c).is_err());
    }

    /// Majority of four with a tie-break vector, checked against explicit
    /// enumeration of all count/tie combinations.
    #[test]
    fn majority_tiebreak_matches_enumeration() {
        let vs: Vec<Hypervector> =
            (0..4).map(|i| Hypervector::random(400, 31, i).unwrap()).collect();
        let tie = Hypervector::random(400, 31, 99).unwrap();
        let maj = majority_with_tiebreak(&vs, &tie).unwrap();
        for j in 0..400 {
            let count = vs.iter().filter(|v| v.get(j)).count();
            let expect = match count {
                0 | 1 => false,
                2 => tie.get(j),
                _ => true,
            };
            assert_eq!(maj.get(j), expect, "component {j} count {count}");
        }
    }

    #[test]
    fn spatial_encoder_round_trip_properties() {
        let c = cfg(5, EncoderKind::Exact, PermMode::Circular);
        let enc = SpatialEncoder::new(4, 22, 1000, 17, c).unwrap();
        let s1 = enc.encode_sample(&[0, 5, 11, 21]).unwrap();
        let s2 = enc.encode_sample(&[0, 5, 11, 21]).unwrap();
        assert_eq!(s1, s2);
        // Close levels give closer sample vectors than far levels.
        let near = enc.encode_sample(&[1, 5, 11, 21]).unwrap();
        let far = enc.encode_sample(&[21, 5, 11, 0]).unwrap();
        assert!(s1.hamming(&near).unwrap() < s1.hamming(&far).unwrap());
        // Out-of-range level and wrong channel count are rejected.
        assert!(enc.encode_sample(&[0, 5, 11, 22]).is_err());
        assert!(enc.encode_sample(&[0, 5, 11]).is_err());
        // Record encoding: five samples, one window.
        let rec: Vec<[u8; 4]> = vec![[0, 5, 11, 21]; 5];
        let v = enc.encode_record(&rec).unwrap();
        assert_eq!(v.dim(), 1000);
        assert!(enc.encode_record(&rec[..4]).is_err()); // shorter than n
    }
}
