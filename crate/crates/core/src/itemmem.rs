//! Item memories: the fixed random codebooks that ground symbols and scalar
//! levels in hypervector space.

use crate::error::{Error, Result};
use crate::hdvec::Hypervector;
use crate::rng;
use std::collections::HashMap;

/// Map from discrete symbols to independently drawn random hypervectors.
///
/// Independently drawn vectors at high dimension are quasiorthogonal: any two
/// sit at Hamming distance `d/2 ± O(sqrt(d))`. Generation re-checks that with
/// a wide (7 sigma) envelope so a broken RNG cannot silently produce a
/// degenerate codebook.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemMemory {
    symbols: Vec<String>,
    vectors: Vec<Hypervector>,
    index: HashMap<String, usize>,
    seed: u64,
}

impl ItemMemory {
    /// Draw one vector per symbol from streams `(seed, "itemmem/im", i)`.
    pub fn generate<S: AsRef<str>>(symbols: &[S], dim: usize, seed: u64) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidArgument("item memory needs at least one symbol".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("item memory dimension must be >= 1".into()));
        }
        let symbols: Vec<String> = symbols.iter().map(|s| s.as_ref().to_string()).collect();
        let vectors: Vec<Hypervector> = symbols
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let mut stream = rng::stream(seed, "itemmem/im", &[i as u64]);
                Hypervector::fill_random(dim, &mut stream)
            })
            .collect();
        let im = Self::from_parts(symbols, vectors, seed)?;
        im.check_quasiorthogonal()?;
        Ok(im)
    }

    /// Assemble from explicit vectors (deserialization path). Validates
    /// shape and uniqueness but not the statistical envelope.
    pub fn from_parts(
        symbols: Vec<String>,
        vectors: Vec<Hypervector>,
        seed: u64,
    ) -> Result<Self> {
        if symbols.len() != vectors.len() {
            return Err(Error::InvalidArgument(format!(
                "{} symbols but {} vectors",
                symbols.len(),
                vectors.len()
            )));
        }
        if symbols.is_empty() {
            return Err(Error::InvalidArgument("item memory needs at least one symbol".into()));
        }
        let dim = vectors[0].dim();
        if vectors.iter().any(|v| v.dim() != dim) {
            return Err(Error::InvalidArgument("item memory vectors differ in dimension".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Self { symbols, vectors, index, seed })
    }

    fn check_quasiorthogonal(&self) -> Result<()> {
        let d = self.dim() as f64;
        let envelope = 7.0 * (d / 4.0).sqrt();
        for i in 0..self.vectors.len() {
            for j in i + 1..self.vectors.len() {
                let h = self.vectors[i].hamming(&self.vectors[j])? as f64;
                if (h - d / 2.0).abs() > envelope {
                    return Err(Error::InvariantBreach(format!(
                        "item vectors {:?} and {:?} at distance {h}, outside {} +/- {envelope}",
                        self.symbols[i],
                        self.symbols[j],
                        d / 2.0
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one symbol by construction
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn vectors(&self) -> &[Hypervector] {
        &self.vectors
    }

    pub fn lookup(&self, symbol: &str) -> Result<&Hypervector> {
        self.index
            .get(symbol)
            .map(|&i| &self.vectors[i])
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))
    }

    pub fn get(&self, idx: usize) -> Result<&Hypervector> {
        self.vectors.get(idx).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "symbol index {idx} out of range for item memory of {}",
                self.vectors.len()
            ))
        })
    }
}

/// The 27-symbol text alphabet: `a`..`z` plus a whitespace symbol, in index
/// order. Whitespace is the last index.
pub fn text_symbols() -> Vec<String> {
    let mut syms: Vec<String> = (b'a'..=b'z').map(|c| (c as char).to_string()).collect();
    syms.push(" ".to_string());
    syms
}

/// Channel symbols `ch1`..`chN` for multi-sensor spatial encoding.
pub fn channel_symbols(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("ch{i}")).collect()
}

/// Map from quantization levels `0..m` to hypervectors whose pairwise
/// distance is proportional to level separation.
///
/// Two endpoint vectors are drawn at random; level `i` flips the first
/// `floor(i * D / (m-1))` positions of a seeded shuffle of the positions
/// where the endpoints differ (`D` of them). Distances from level 0 are then
/// exactly linear in the flip counts, and level `m-1` equals the second
/// endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContinuousItemMemory {
    levels: Vec<Hypervector>,
    seed: u64,
}

impl ContinuousItemMemory {
    pub fn generate(m: usize, dim: usize, seed: u64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!(
                "continuous item memory needs at least 2 levels, got {m}"
            )));
        }
        if dim < 2 || dim % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "continuous item memory dimension must be even and >= 2, got {dim}"
            )));
        }
        let a = Hypervector::fill_random(dim, &mut rng::stream(seed, "itemmem/cim-endpoint", &[0]));
        let b = Hypervector::fill_random(dim, &mut rng::stream(seed, "itemmem/cim-endpoint", &[1]));
        let diff = a.xor(&b)?;
        let mut positions: Vec<usize> = (0..dim).filter(|&j| diff.get(j)).collect();
        rng::shuffle(&mut rng::stream(seed, "itemmem/cim-order", &[0]), &mut positions);
        let total = positions.len();

        let mut levels = Vec::with_capacity(m);
        for i in 0..m {
            let flips = (i as u128 * total as u128 / (m as u128 - 1)) as usize;
            let mut v = a.clone();
            for &p in &positions[..flips] {
                v.set(p, !v.get(p));
            }
            levels.push(v);
        }
        Self::from_parts(levels, seed)
    }

    pub fn from_parts(levels: Vec<Hypervector>, seed: u64) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InvalidArgument("continuous item memory needs >= 2 levels".into()));
        }
        let dim = levels[0].dim();
        if levels.iter().any(|v| v.dim() != dim) {
            return Err(Error::InvalidArgument("level vectors differ in dimension".into()));
        }
        Ok(Self { levels, seed })
    }

    pub fn dim(&self) -> usize {
        self.levels[0].dim()
    }

    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn level_vectors(&self) -> &[Hypervector] {
        &self.levels
    }

    pub fn level(&self, i: usize) -> Result<&Hypervector> {
        self.levels.get(i).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "level {i} out of range for {}-level continuous item memory",
                self.levels.len()
            ))
        })
    }
}
