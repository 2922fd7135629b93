//! Behavioral model of binary hypervector operations mapped onto memristive
//! crossbar arrays.
//!
//! A bit pattern is programmed as conductances: 1 -> a high ("set") state, 0
//! -> a low ("reset") state, each drawn once per cell with programming
//! variability plus a deterministic spatial gradient of the set state. Reads
//! put a fixed voltage on selected lines and observe currents, with a
//! multiplicative instantaneous read-noise term. Two read styles exist:
//!
//! * **in-memory AND** ([`CrossbarArray::read_and`]): gate lines select
//!   columns, one row is read, and a per-column sense amplifier compares the
//!   cell current against a threshold halfway between the two states;
//! * **column sums** (associative-memory search, see [`am`]): many rows drive
//!   one column simultaneously and an ADC digitizes the summed current.
//!
//! All currents are handled in units of one set-state cell current
//! (`read_voltage * g_set_mean`), so in the zero-noise limit column sums are
//! exact small integers in `f64` and the analog path reproduces the digital
//! one bit for bit.

pub mod am;
pub mod encode;

pub use am::{AmCrossbar, PartitionLayout, SearchResult};
pub use encode::{ComplementShift, ImCrossbarPair};

use crate::error::{Error, Result};
use crate::hdvec::Hypervector;
use crate::rng;
use serde::{Deserialize, Serialize};

/// Stream tags for the arrays a model can hold, keeping their programming
/// draws independent.
pub const TAG_IM_DIRECT: u64 = 1;
pub const TAG_IM_COMP: u64 = 2;
pub const TAG_AM_MAIN: u64 = 3;
pub const TAG_AM_COMP: u64 = 4;

/// Device and periphery parameters. Conductances in siemens, voltage in
/// volts; `seed` drives every stochastic draw the model makes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Mean set-state conductance.
    pub g_set_mean: f64,
    /// Programming spread of the set state.
    pub g_set_sigma: f64,
    /// Mean reset-state conductance.
    pub g_reset_mean: f64,
    /// Programming spread of the reset state.
    pub g_reset_sigma: f64,
    /// Deterministic end-to-end fractional tilt of the set state along the
    /// column axis (the axis class prototypes are laid out on).
    pub col_gradient: f64,
    /// Same, along the row axis.
    pub row_gradient: f64,
    /// Instantaneous read noise as a fraction of the read current.
    pub read_noise_frac: f64,
    /// Read voltage applied to driven lines.
    pub read_voltage: f64,
    pub seed: u64,
}

impl NoiseModel {
    /// Phase-change-memory-like defaults: 20 uS / 0.1 uS states with 2 uS /
    /// 0.05 uS programming spread, a 10% end-to-end column gradient, 2% read
    /// noise, 300 mV reads.
    pub fn pcm(seed: u64) -> Self {
        Self {
            g_set_mean: 20e-6,
            g_set_sigma: 2e-6,
            g_reset_mean: 0.1e-6,
            g_reset_sigma: 0.05e-6,
            col_gradient: 0.10,
            row_gradient: 0.0,
            read_noise_frac: 0.02,
            read_voltage: 0.3,
            seed,
        }
    }

    /// Zero-noise limit: ideal set/reset states (reset exactly
    /// non-conducting), no gradient, no read noise.
    pub fn ideal(seed: u64) -> Self {
        Self {
            g_set_mean: 20e-6,
            g_set_sigma: 0.0,
            g_reset_mean: 0.0,
            g_reset_sigma: 0.0,
            col_gradient: 0.0,
            row_gradient: 0.0,
            read_noise_frac: 0.0,
            read_voltage: 0.3,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.g_set_mean,
            self.g_set_sigma,
            self.g_reset_mean,
            self.g_reset_sigma,
            self.col_gradient,
            self.row_gradient,
            self.read_noise_frac,
            self.read_voltage,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("noise parameters must be finite".into()));
        }
        if self.g_set_mean <= 0.0 || self.read_voltage <= 0.0 {
            return Err(Error::InvalidArgument(
                "set conductance and read voltage must be positive".into(),
            ));
        }
        if self.g_reset_mean < 0.0 || self.g_set_sigma < 0.0 || self.g_reset_sigma < 0.0 {
            return Err(Error::InvalidArgument(
                "conductance means and spreads must be non-negative".into(),
            ));
        }
        if self.g_reset_mean >= self.g_set_mean {
            return Err(Error::InvalidArgument(
                "reset conductance must lie below set conductance".into(),
            ));
        }
        if self.read_noise_frac < 0.0 {
            return Err(Error::InvalidArgument("read noise fraction must be non-negative".into()));
        }
        if self.col_gradient.abs() >= 2.0 || self.row_gradient.abs() >= 2.0 {
            return Err(Error::InvalidArgument(
                "gradients beyond +/-200% would drive set conductances negative".into(),
            ));
        }
        Ok(())
    }

    /// Fractional set-state deviation at cell `(r, c)`: linear tilt centered
    /// on the array middle, spanning the configured end-to-end fraction.
    fn gradient(&self, r: usize, rows: usize, c: usize, cols: usize) -> f64 {
        let mut g = 0.0;
        if cols > 1 {
            g += self.col_gradient * (c as f64 / (cols - 1) as f64 - 0.5);
        }
        if rows > 1 {
            g += self.row_gradient * (r as f64 / (rows - 1) as f64 - 0.5);
        }
        g
    }
}

/// Column ADC: digitizes a summed current against a full scale with
/// `2^bits - 1` steps. Disabled means pass-through (ideal periphery).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdcConfig {
    pub bits: u32,
    /// Full-scale input in amperes.
    pub full_scale_amps: f64,
    pub enabled: bool,
}

impl AdcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=16).contains(&self.bits) {
            return Err(Error::InvalidArgument(format!(
                "ADC resolution must be 1..=16 bits, got {}",
                self.bits
            )));
        }
        if !(self.full_scale_amps > 0.0) {
            return Err(Error::InvalidArgument("ADC full scale must be positive".into()));
        }
        Ok(())
    }

    /// Quantize a normalized current (`fs_norm` = full scale in the same
    /// units). Monotone; clips at zero and full scale.
    pub fn apply(&self, i_norm: f64, fs_norm: f64) -> f64 {
        if !self.enabled {
            return i_norm;
        }
        let levels = ((1u32 << self.bits) - 1) as f64;
        let code = (i_norm / fs_norm * levels).round().clamp(0.0, levels);
        code * fs_norm / levels
    }
}

/// One programmed array: a bit pattern frozen into per-cell conductances.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossbarArray {
    rows: usize,
    cols: usize,
    /// Conductances in siemens, row-major.
    g: Vec<f64>,
    /// The same cells in set-state units (`g / g_set_mean`); reads work here.
    norm: Vec<f64>,
    noise: NoiseModel,
    tag: u64,
    /// Sense-amplifier threshold for [`read_and`](Self::read_and), amperes.
    /// Defaults to half a set-state cell current.
    pub sense_threshold_amps: f64,
}

impl CrossbarArray {
    /// Program a bit matrix (one hypervector per row; columns = components).
    /// Conductance draws come from the stream `(noise.seed,
    /// "crossbar/program", tag)`, so arrays with different tags age
    /// independently and reprogramming is reproducible.
    pub fn program(pattern: &[Hypervector], noise: &NoiseModel, tag: u64) -> Result<Self> {
        noise.validate()?;
        let rows = pattern.len();
        if rows == 0 {
            return Err(Error::InvalidArgument("cannot program an empty pattern".into()));
        }
        let cols = pattern[0].dim();
        if pattern.iter().any(|r| r.dim() != cols) {
            return Err(Error::InvalidArgument("pattern rows differ in dimension".into()));
        }
        let mut stream = rng::stream(noise.seed, "crossbar/program", &[tag]);
        let mut g = Vec::with_capacity(rows * cols);
        let mut norm = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let value = if pattern[r].get(c) {
                    let mean = noise.g_set_mean * (1.0 + noise.gradient(r, rows, c, cols));
                    let dev = if noise.g_set_sigma > 0.0 {
                        noise.g_set_sigma * rng::standard_normal(&mut stream)
                    } else {
                        0.0
                    };
                    (mean + dev).max(0.0)
                } else {
                    let dev = if noise.g_reset_sigma > 0.0 {
                        noise.g_reset_sigma * rng::standard_normal(&mut stream)
                    } else {
                        0.0
                    };
                    (noise.g_reset_mean + dev).max(0.0)
                };
                g.push(value);
                // x / x == 1.0 exactly, so ideal set cells read as exact 1s.
                norm.push(value / noise.g_set_mean);
            }
        }
        Ok(Self {
            rows,
            cols,
            g,
            norm,
            sense_threshold_amps: 0.5 * noise.read_voltage * noise.g_set_mean,
            noise: noise.clone(),
            tag,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    /// Stream tag this array was programmed under.
    pub fn tag(&self) -> u64 {
        self.tag
    }

    pub fn conductance(&self, r: usize, c: usize) -> f64 {
        assert!(r < self.rows && c < self.cols, "cell ({r},{c}) out of range");
        self.g[r * self.cols + c]
    }

    pub(crate) fn norm_row(&self, r: usize) -> &[f64] {
        &self.norm[r * self.cols..(r + 1) * self.cols]
    }

    /// Full-scale equal to `active_rows` set-state cell currents, in amperes.
    pub fn full_scale_for(&self, active_rows: usize) -> f64 {
        active_rows as f64 * self.noise.read_voltage * self.noise.g_set_mean
    }

    /// In-memory AND: read one stored row against a gate vector. Output bit
    /// `j` is 1 iff gate `j` is driven and the (noisy) cell current clears
    /// the sense threshold. `nonce` must be unique per read event for
    /// independent noise; reads are pure functions of `(array, gates, nonce)`.
    pub fn read_and(&self, row: usize, gates: &Hypervector, nonce: &[u64]) -> Result<Hypervector> {
        if row >= self.rows {
            return Err(Error::InvalidArgument(format!(
                "row {row} out of range for {}-row array",
                self.rows
            )));
        }
        if gates.dim() != self.cols {
            return Err(Error::InvalidArgument(format!(
                "gate vector dimension {} does not match {} columns",
                gates.dim(),
                self.cols
            )));
        }
        let th_norm =
            self.sense_threshold_amps / (self.noise.read_voltage * self.noise.g_set_mean);
        let cells = self.norm_row(row);
        let mut stream = if self.noise.read_noise_frac > 0.0 {
            let mut ix = Vec::with_capacity(1 + nonce.len());
            ix.push(self.tag);
            ix.extend_from_slice(nonce);
            Some(rng::stream(self.noise.seed, "crossbar/read-and", &ix))
        } else {
            None
        };
        let mut out = Hypervector::zeros(self.cols)?;
        for j in 0..self.cols {
            if !gates.get(j) {
                continue;
            }
            let mut i_norm = cells[j];
            if let Some(stream) = stream.as_mut() {
                i_norm *= 1.0 + self.noise.read_noise_frac * rng::standard_normal(stream);
            }
            if i_norm > th_norm {
                out.set(j, true);
            }
        }
        Ok(out)
    }

    /// Dump conductances as CSV (siemens, one row per line).
    pub fn write_csv(&self, w: &mut impl std::io::Write) -> Result<()> {
        for r in 0..self.rows {
            let row = &self.g[r * self.cols..(r + 1) * self.cols];
            let line: Vec<String> = row.iter().map(|v| format!("{v:.9e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(rows: &[&str]) -> Vec<Hypervector> {
        rows.iter().map(|r| Hypervector::from_bitstring(r).unwrap()).collect()
    }

    #[test]
    fn ideal_programming_is_exactly_binary() {
        let arr =
            CrossbarArray::program(&pattern(&["1010", "0110"]), &NoiseModel::ideal(1), 0).unwrap();
        assert_eq!(arr.rows(), 2);
        assert_eq!(arr.cols(), 4);
        for r in 0..2 {
            for c in 0..4 {
                let bit = [[true, false, true, false], [false, true, true, false]][r][c];
                let expect = if bit { 20e-6 } else { 0.0 };
                assert_eq!(arr.conductance(r, c), expect);
                assert_eq!(arr.norm_row(r)[c], if bit { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn programming_is_deterministic_per_seed_and_tag() {
        let rows = pattern(&["110101", "011011", "111000"]);
        let a = CrossbarArray::program(&rows, &NoiseModel::pcm(5), 3).unwrap();
        let b = CrossbarArray::program(&rows, &NoiseModel::pcm(5), 3).unwrap();
        assert_eq!(a, b);
        let c = CrossbarArray::program(&rows, &NoiseModel::pcm(5), 4).unwrap();
        let d = CrossbarArray::program(&rows, &NoiseModel::pcm(6), 3).unwrap();
        assert_ne!(a.conductance(0, 0), c.conductance(0, 0));
        assert_ne!(a.conductance(0, 0), d.conductance(0, 0));
    }

    #[test]
    fn programming_spread_has_the_configured_scale() {
        let dim = 2000;
        let ones = vec![Hypervector::ones(dim).unwrap()];
        let arr = CrossbarArray::program(&ones, &NoiseModel { col_gradient: 0.0, ..NoiseModel::pcm(9) }, 0).unwrap();
        let mean: f64 = (0..dim).map(|c| arr.conductance(0, c)).sum::<f64>() / dim as f64;
        let var: f64 =
            (0..dim).map(|c| (arr.conductance(0, c) - mean).powi(2)).sum::<f64>() / dim as f64;
        assert!((mean - 20e-6).abs() < 0.2e-6, "mean {mean:e}");
        assert!((var.sqrt() - 2e-6).abs() < 0.2e-6, "sigma {:e}", var.sqrt());
    }

    #[test]
    fn column_gradient_tilts_set_cells_only() {
        let noise = NoiseModel {
            g_set_sigma: 0.0,
            g_reset_sigma: 0.0,
            read_noise_frac: 0.0,
            ..NoiseModel::pcm(1)
        };
        let dim = 101;
        let rows = vec![Hypervector::ones(dim).unwrap(), Hypervector::zeros(dim).unwrap()];
        let arr = CrossbarArray::program(&rows, &noise, 0).unwrap();
        // End-to-end span of 10% centered on the middle column.
        assert!((arr.conductance(0, 0) - 20e-6 * 0.95).abs() < 1e-12);
        assert!((arr.conductance(0, 50) - 20e-6).abs() < 1e-12);
        assert!((arr.conductance(0, 100) - 20e-6 * 1.05).abs() < 1e-12);
        // Reset cells are untouched by the gradient.
        assert_eq!(arr.conductance(1, 0), arr.conductance(1, 100));
    }

    #[test]
    fn read_and_is_an_and_in_the_ideal_limit() {
        let arr = CrossbarArray::program(
            &pattern(&["110101110", "011011001"]),
            &NoiseModel::ideal(2),
            0,
        )
        .unwrap();
        let gates = Hypervector::from_bitstring("101010101").unwrap();
        let out = arr.read_and(0, &gates, &[0]).unwrap();
        let expect = gates.and(&Hypervector::from_bitstring("110101110").unwrap()).unwrap();
        assert_eq!(out, expect);
        // All-ones gates reproduce the stored row exactly.
        let ones = Hypervector::ones(9).unwrap();
        assert_eq!(
            arr.read_and(1, &ones, &[1]).unwrap(),
            Hypervector::from_bitstring("011011001").unwrap()
        );
    }

    #[test]
    fn read_and_nonce_controls_noise_reproducibility() {
        let dim = 4000;
        let rows = vec![Hypervector::random(dim, 3, 0).unwrap()];
        // Device-realistic noise practically never crosses the halfway sense
        // threshold; exaggerate the read fraction so nonce changes show up.
        let noise = NoiseModel { read_noise_frac: 0.6, ..NoiseModel::pcm(3) };
        let arr = CrossbarArray::program(&rows, &noise, 0).unwrap();
        let gates = Hypervector::ones(dim).unwrap();
        let a = arr.read_and(0, &gates, &[7]).unwrap();
        let b = arr.read_and(0, &gates, &[7]).unwrap();
        assert_eq!(a, b);
        let c = arr.read_and(0, &gates, &[8]).unwrap();
        assert_ne!(a, c);
        // And the result still only sets bits where the stored bit was 1
        // or the noisy reset cell cleared the threshold -- with ideal reset
        // (0 S) even noise cannot conjure current from a dead cell.
        let ideal = CrossbarArray::program(
            &rows,
            &NoiseModel { g_reset_sigma: 0.0, g_reset_mean: 0.0, ..NoiseModel::pcm(3) },
            0,
        )
        .unwrap();
        let d = ideal.read_and(0, &gates, &[9]).unwrap();
        assert_eq!(d.and(&rows[0].not()).unwrap().popcount(), 0);
    }

    #[test]
    fn read_and_validates_shapes() {
        let arr =
            CrossbarArray::program(&pattern(&["1010"]), &NoiseModel::ideal(1), 0).unwrap();
        assert!(arr.read_and(1, &Hypervector::ones(4).unwrap(), &[0]).is_err());
        assert!(arr.read_and(0, &Hypervector::ones(5).unwrap(), &[0]).is_err());
    }

    #[test]
    fn adc_is_monotone_and_clips() {
        let adc = AdcConfig { bits: 8, full_scale_amps: 1.0, enabled: true };
        adc.validate().unwrap();
        let fs = 1000.0;
        let mut last = -1.0;
        for i in 0..=1100 {
            let q = adc.apply(i as f64, fs);
            assert!(q >= last, "non-monotone at {i}");
            last = q;
        }
        assert_eq!(adc.apply(0.0, fs), 0.0);
        assert_eq!(adc.apply(-5.0, fs), 0.0);
        assert_eq!(adc.apply(1000.0, fs), 1000.0);
        assert_eq!(adc.apply(2000.0, fs), 1000.0); // clipped
        // Step size is fs / 255.
        let step = fs / 255.0;
        assert!((adc.apply(step * 3.4, fs) - step * 3.0).abs() < 1e-9);
        // Disabled = identity.
        let off = AdcConfig { enabled: false, ..adc };
        assert_eq!(off.apply(123.456, fs), 123.456);
        assert!(AdcConfig { bits: 0, ..adc }.validate().is_err());
        assert!(AdcConfig { bits: 17, ..adc }.validate().is_err());
    }

    #[test]
    fn noise_model_validation() {
        assert!(NoiseModel::pcm(1).validate().is_ok());
        assert!(NoiseModel::ideal(1).validate().is_ok());
        assert!(NoiseModel { g_set_mean: 0.0, ..NoiseModel::pcm(1) }.validate().is_err());
        assert!(NoiseModel { g_reset_mean: 30e-6, ..NoiseModel::pcm(1) }.validate().is_err());
        assert!(NoiseModel { g_set_sigma: -1e-6, ..NoiseModel::pcm(1) }.validate().is_err());
        assert!(NoiseModel { read_noise_frac: f64::NAN, ..NoiseModel::pcm(1) }
            .validate()
            .is_err());
        assert!(NoiseModel { col_gradient: 2.5, ..NoiseModel::pcm(1) }.validate().is_err());
    }

    #[test]
    fn csv_dump_round_trips_through_parsing() {
        let rows = pattern(&["101", "010"]);
        let arr = CrossbarArray::program(&rows, &NoiseModel::pcm(4), 1).unwrap();
        let mut buf = Vec::new();
        arr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let parsed: Vec<Vec<f64>> = text
            .lines()
            .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
            .collect();
        assert_eq!(parsed.len(), 2);
        for r in 0..2 {
            for c in 0..3 {
                assert!((parsed[r][c] - arr.conductance(r, c)).abs() < 1e-14);
            }
        }
    }
}
