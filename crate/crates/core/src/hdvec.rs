//! Bit-packed binary hypervectors and the closed algebra over them.
//!
//! A `Hypervector` is a fixed dimension `d` of binary components packed into
//! `u64` words: component `j` lives in word `j / 64` at bit `j % 64`. Any
//! padding bits in the last word are kept at zero by every operation
//! ("canonical form"), so popcount-style reductions never need masking.

use crate::error::{Error, Result};
use crate::rng;
use rand_chacha::rand_core::RngCore;

const WORD_BITS: usize = 64;

/// How a permutation treats components pushed past the ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermuteMode {
    /// Rotate: component `j` moves to `(j + k) mod d`. Invertible.
    Circular,
    /// Shift toward higher indices: `j` moves to `j + k`; the top `k`
    /// components are discarded and the bottom `k` zero-filled. Lossy.
    PlainRight,
    /// Shift toward lower indices: `j` moves to `j - k`; the bottom `k`
    /// components are discarded and the top `k` zero-filled. Lossy.
    PlainLeft,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Hypervector {
    dim: usize,
    words: Vec<u64>,
}

fn words_for(dim: usize) -> usize {
    dim.div_ceil(WORD_BITS)
}

fn tail_mask(dim: usize) -> u64 {
    match dim % WORD_BITS {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

impl Hypervector {
    fn check_dim(dim: usize) -> Result<()> {
        if dim == 0 {
            return Err(Error::InvalidArgument("hypervector dimension must be >= 1".into()));
        }
        Ok(())
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::check_dim(dim)?;
        Ok(Self { dim, words: vec![0; words_for(dim)] })
    }

    pub fn ones(dim: usize) -> Result<Self> {
        let mut v = Self::zeros(dim)?;
        for w in &mut v.words {
            *w = u64::MAX;
        }
        v.canonicalize();
        Ok(v)
    }

    /// I.i.d. fair random components from the named stream
    /// `(seed, "hdvec/random", index)`.
    pub fn random(dim: usize, seed: u64, index: u64) -> Result<Self> {
        Self::check_dim(dim)?;
        let mut stream = rng::stream(seed, "hdvec/random", &[index]);
        Ok(Self::fill_random(dim, &mut stream))
    }

    /// Fill from an already-positioned stream; one `u64` per word, low bits
    /// first, surplus bits of the last draw discarded.
    pub(crate) fn fill_random(dim: usize, stream: &mut impl RngCore) -> Self {
        let mut words: Vec<u64> = (0..words_for(dim)).map(|_| stream.next_u64()).collect();
        if let Some(last) = words.last_mut() {
            *last &= tail_mask(dim);
        }
        Self { dim, words }
    }

    /// Parse from a string of `0`/`1`; the leftmost character is component 0.
    pub fn from_bitstring(s: &str) -> Result<Self> {
        let mut v = Self::zeros(s.len())?;
        for (j, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(j, true),
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "bitstring may contain only 0/1, got {ch:?}"
                    )))
                }
            }
        }
        Ok(v)
    }

    /// Inverse of [`from_bitstring`](Self::from_bitstring).
    pub fn to_bitstring(&self) -> String {
        (0..self.dim).map(|j| if self.get(j) { '1' } else { '0' }).collect()
    }

    pub fn from_bools(bits: &[bool]) -> Result<Self> {
        let mut v = Self::zeros(bits.len())?;
        for (j, &b) in bits.iter().enumerate() {
            v.set(j, b);
        }
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Component `j`. Panics if `j >= dim`.
    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.dim, "component index {j} out of range (dim {})", self.dim);
        (self.words[j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    /// Set component `j`. Panics if `j >= dim`.
    pub fn set(&mut self, j: usize, value: bool) {
        assert!(j < self.dim, "component index {j} out of range (dim {})", self.dim);
        let mask = 1u64 << (j % WORD_BITS);
        if value {
            self.words[j / WORD_BITS] |= mask;
        } else {
            self.words[j / WORD_BITS] &= !mask;
        }
    }

    fn canonicalize(&mut self) {
        if let Some(last) = self.words.last_mut() {
            *last &= tail_mask(self.dim);
        }
    }

    pub fn popcount(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    // ---- component-wise algebra ----

    /// XNOR: 1 where the two components agree. The binding operation.
    pub fn xnor(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w = !(*w ^ *o);
        }
        out.canonicalize();
        Ok(out)
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w ^= *o;
        }
        Ok(out)
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w &= *o;
        }
        Ok(out)
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut out = self.clone();
        for (w, o) in out.words.iter_mut().zip(&other.words) {
            *w |= *o;
        }
        Ok(out)
    }

    pub fn not(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.canonicalize();
        out
    }

    // ---- permutations ----

    /// Apply a permutation by `k` positions. Requires `k < dim`; use
    /// [`permute_power`](Self::permute_power) for unreduced multiples.
    pub fn permute(&self, k: usize, mode: PermuteMode) -> Result<Self> {
        if k >= self.dim {
            return Err(Error::InvalidArgument(format!(
                "permutation distance {k} out of range for dimension {}",
                self.dim
            )));
        }
        if k == 0 {
            return Ok(self.clone());
        }
        Ok(match mode {
            PermuteMode::Circular => {
                let mut up = self.shift_up(k);
                let down = self.shift_down(self.dim - k);
                for (w, o) in up.words.iter_mut().zip(&down.words) {
                    *w |= *o;
                }
                up
            }
            PermuteMode::PlainRight => self.shift_up(k),
            PermuteMode::PlainLeft => self.shift_down(k),
        })
    }

    /// Permutation by an arbitrary non-negative distance: circular distances
    /// reduce mod `dim`; plain shifts saturate to the zero vector at
    /// `k >= dim`. This is what iterated encoders use for `ρ^k`.
    pub fn permute_power(&self, k: usize, mode: PermuteMode) -> Self {
        match mode {
            PermuteMode::Circular => {
                self.permute(k % self.dim, mode).expect("reduced distance is in range")
            }
            PermuteMode::PlainRight | PermuteMode::PlainLeft => {
                if k >= self.dim {
                    Self::zeros(self.dim).expect("dim validated at construction")
                } else {
                    self.permute(k, mode).expect("distance checked above")
                }
            }
        }
    }

    /// Component `j` of the result is component `j - k` of the input.
    fn shift_up(&self, k: usize) -> Self {
        let nw = self.words.len();
        let ws = k / WORD_BITS;
        let bs = k % WORD_BITS;
        let mut words = vec![0u64; nw];
        if bs == 0 {
            for i in ws..nw {
                words[i] = self.words[i - ws];
            }
        } else {
            for i in ws..nw {
                let lo = self.words[i - ws] << bs;
                let hi = if i > ws { self.words[i - ws - 1] >> (WORD_BITS - bs) } else { 0 };
                words[i] = lo | hi;
            }
        }
        let mut out = Self { dim: self.dim, words };
        out.canonicalize();
        out
    }

    /// Component `j` of the result is component `j + k` of the input.
    fn shift_down(&self, k: usize) -> Self {
        let nw = self.words.len();
        let ws = k / WORD_BITS;
        let bs = k % WORD_BITS;
        let mut words = vec![0u64; nw];
        if bs == 0 {
            for i in 0..nw - ws {
                words[i] = self.words[i + ws];
            }
        } else {
            for i in 0..nw - ws {
                let lo = self.words[i + ws] >> bs;
                let hi =
                    if i + ws + 1 < nw { self.words[i + ws + 1] << (WORD_BITS - bs) } else { 0 };
                words[i] = lo | hi;
            }
        }
        // Input was canonical, so nothing can spill into the padding.
        Self { dim: self.dim, words }
    }

    // ---- similarity ----

    /// Number of components where the two vectors differ.
    pub fn hamming(&self, other: &Self) -> Result<usize> {
        self.check_same_dim(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Number of components where both vectors are 1.
    pub fn dot(&self, other: &Self) -> Result<usize> {
        self.check_same_dim(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum())
    }

    /// Inverse Hamming similarity: the number of agreeing components,
    /// `dim - hamming`.
    pub fn inv_hamming(&self, other: &Self) -> Result<usize> {
        Ok(self.dim - self.hamming(other)?)
    }

    // ---- serialization ----

    /// Canonical byte form: `dim` as `u32` little-endian, then `ceil(dim/8)`
    /// bytes with component `j` at byte `j/8`, bit `j%8`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let packed = self.dim.div_ceil(8);
        let mut out = Vec::with_capacity(4 + packed);
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        let mut raw = Vec::with_capacity(self.words.len() * 8);
        for w in &self.words {
            raw.extend_from_slice(&w.to_le_bytes());
        }
        raw.truncate(packed);
        out.extend_from_slice(&raw);
        out
    }

    /// Parse one canonical vector from the front of `buf`; returns the vector
    /// and the number of bytes consumed. Rejects nonzero padding bits.
    pub fn from_bytes(buf: &[u8]) -> Result<(Self, usize)> {
        if buf.len() < 4 {
            return Err(Error::Format("truncated hypervector header".into()));
        }
        let dim = u32::from_le_bytes(buf[..4].try_into().unwrap()) as usize;
        Self::check_dim(dim).map_err(|_| Error::Format("hypervector dimension 0".into()))?;
        let packed = dim.div_ceil(8);
        if buf.len() < 4 + packed {
            return Err(Error::Format(format!(
                "truncated hypervector payload: need {} bytes, have {}",
                packed,
                buf.len() - 4
            )));
        }
        let mut raw = buf[4..4 + packed].to_vec();
        raw.resize(words_for(dim) * 8, 0);
        let words: Vec<u64> = raw
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let v = Self { dim, words };
        let mut canon = v.clone();
        canon.canonicalize();
        if canon.words != v.words {
            return Err(Error::Format("nonzero padding bits in serialized hypervector".into()));
        }
        Ok((v, 4 + packed))
    }
}

impl std::fmt::Debug for Hypervector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Hypervector")
            .field("dim", &self.dim)
            .field("popcount", &self.popcount())
            .finish()
    }
}

/// Component-wise tally of bundled vectors, thresholded into a binary vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Accumulator {
    counts: Vec<u32>,
    total: u64,
}

impl Accumulator {
    pub fn new(dim: usize) -> Result<Self> {
        Hypervector::check_dim(dim)?;
        Ok(Self { counts: vec![0; dim], total: 0 })
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    /// Number of vectors accumulated so far.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn accumulate(&mut self, v: &Hypervector) -> Result<()> {
        if v.dim() != self.counts.len() {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: accumulator {} vs vector {}",
                self.counts.len(),
                v.dim()
            )));
        }
        if self.total == u32::MAX as u64 {
            return Err(Error::InvalidState("accumulator tally saturated".into()));
        }
        self.total += 1;
        for (wi, mut w) in v.words.iter().copied().enumerate() {
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                self.counts[wi * WORD_BITS + b] += 1;
                w &= w - 1;
            }
        }
        Ok(())
    }

    /// Merge another accumulator over the same dimension into this one.
    pub fn merge(&mut self, other: &Accumulator) -> Result<()> {
        if other.dim() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: accumulator {} vs accumulator {}",
                self.dim(),
                other.dim()
            )));
        }
        self.total += other.total;
        for (c, o) in self.counts.iter_mut().zip(&other.counts) {
            *c += *o;
        }
        Ok(())
    }

    /// Binarize with a strict threshold: component `j` of the result is 1 iff
    /// `counts[j] > threshold`. Counts and the thresholds used by the sequence
    /// encoders are exactly representable in `f64`, so the comparison is exact.
    pub fn binarize(&self, threshold: f64) -> Result<Hypervector> {
        if !(threshold >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "binarize threshold must be a non-negative number, got {threshold}"
            )));
        }
        if self.total == 0 {
            return Err(Error::InvalidState("binarize on an empty accumulator".into()));
        }
        let mut v = Hypervector::zeros(self.counts.len())?;
        for (j, &c) in self.counts.iter().enumerate() {
            if c as f64 > threshold {
                v.set(j, true);
            }
        }
        Ok(v)
    }
}
