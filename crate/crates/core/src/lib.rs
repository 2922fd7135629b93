//! Hyperdimensional computing with binary hypervectors, twice over: an ideal
//! digital reference implementation (bit-packed XNOR/majority algebra, n-gram
//! sequence encoders, associative-memory search) and a behavioral simulator of
//! the same pipeline mapped onto memristive crossbar arrays (programming and
//! read noise, sense-amplifier thresholds, ADC quantization, coarse-grained
//! randomized partitioning).
//!
//! The two backends share every data structure up to the point where bits turn
//! into conductances, so any divergence between them is attributable to the
//! modeled analog effects — that is the property most of the test suite leans
//! on, and the property the partition/noise sweeps are built to expose.

pub mod assocmem;
pub mod crossbar;
pub mod datasets;
pub mod encoder;
pub mod error;
pub mod hdvec;
pub mod itemmem;
pub mod model;
pub mod rng;
pub mod runner;

pub use assocmem::{AssociativeMemoryModel, Metric};
pub use encoder::{EncoderConfig, EncoderKind, PermMode};
pub use error::{Error, Result};
pub use hdvec::{Accumulator, Hypervector, PermuteMode};
pub use itemmem::{ContinuousItemMemory, ItemMemory};
pub use model::{TaskKind, TrainedModel};
pub use runner::{Backend, RunConfig};
