//! Physical-layer models: transmit power normalization, additive white
//! Gaussian noise, and the transport-block outage model used for digital
//! baselines.

use alloc::vec::Vec;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::rng::rng_from;

/// Full level-3 sequence length; reference for length-scaled noise.
pub const REFERENCE_LENGTH: usize = 2880;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    /// `sigma^2 = 10^(-snr/10)` per real symbol.
    #[default]
    PerSymbol,
    /// Per-symbol variance scaled by `REFERENCE_LENGTH / L`, so shorter
    /// transmissions see proportionally more noise per symbol.
    LengthScaled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    /// `f64::INFINITY` disables noise.
    pub snr_db: f64,
    pub noise_mode: NoiseMode,
    pub seed: u64,
}

/// Scales `x` in place to unit mean power and returns the applied gain. An
/// all-zero sequence is left untouched with gain 1.
pub fn normalize_power_in_place(x: &mut [f64]) -> f64 {
    let energy: f64 = x.iter().map(|v| v * v).sum();
    if x.is_empty() || energy == 0.0 {
        return 1.0;
    }
    let gain = libm::sqrt(x.len() as f64 / energy);
    for v in x.iter_mut() {
        *v *= gain;
    }
    gain
}

pub fn normalize_power(x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    normalize_power_in_place(&mut y);
    y
}

/// Noise variance per real symbol for a transmission of `len` symbols.
pub fn noise_variance(snr_db: f64, mode: NoiseMode, len: usize) -> f64 {
    if snr_db == f64::INFINITY {
        return 0.0;
    }
    let base = libm::pow(10.0, -snr_db / 10.0);
    match mode {
        NoiseMode::PerSymbol => base,
        NoiseMode::LengthScaled => base * REFERENCE_LENGTH as f64 / len.max(1) as f64,
    }
}

pub fn awgn_in_place(x: &mut [f64], cfg: &ChannelConfig) {
    let var = noise_variance(cfg.snr_db, cfg.noise_mode, x.len());
    if var == 0.0 {
        return;
    }
    let normal = Normal::new(0.0, libm::sqrt(var)).expect("finite noise deviation");
    let mut rng = rng_from(cfg.seed);
    for v in x.iter_mut() {
        *v += normal.sample(&mut rng);
    }
}

pub fn awgn(x: &[f64], cfg: &ChannelConfig) -> Vec<f64> {
    let mut y = x.to_vec();
    awgn_in_place(&mut y, cfg);
    y
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DigitalLinkConfig {
    /// Spectral efficiency of the modulation and coding scheme; 2.0 is
    /// 16-QAM with a rate-1/2 code.
    pub bits_per_symbol: f64,
    pub capacity_penalty_db: f64,
    pub block_size_bits: u64,
    pub per_block_snr_jitter_db: f64,
}

impl Default for DigitalLinkConfig {
    fn default() -> Self {
        Self {
            bits_per_symbol: 2.0,
            capacity_penalty_db: 1.5,
            block_size_bits: 8192,
            per_block_snr_jitter_db: 0.0,
        }
    }
}

impl DigitalLinkConfig {
    pub fn is_valid(&self) -> bool {
        self.bits_per_symbol > 0.0 && self.block_size_bits > 0 && self.per_block_snr_jitter_db >= 0.0
    }

    /// SNR at which the penalized capacity equals `bits_per_symbol`.
    pub fn threshold_snr_db(&self) -> f64 {
        self.capacity_penalty_db + 10.0 * libm::log10(libm::exp2(self.bits_per_symbol) - 1.0)
    }
}

/// `log2(1 + 10^((snr - penalty)/10))` in bits per symbol.
pub fn penalized_capacity(snr_db: f64, penalty_db: f64) -> f64 {
    libm::log2(1.0 + libm::pow(10.0, (snr_db - penalty_db) / 10.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutageReport {
    pub outage: bool,
    pub blocks_failed: u64,
    pub blocks_total: u64,
}

/// Splits the payload into transport blocks; a block fails when the rate
/// strictly exceeds the penalized capacity at its (optionally jittered) SNR.
/// One failed block fails the whole payload.
pub fn digital_outage(payload_bits: u64, snr_db: f64, cfg: &DigitalLinkConfig, seed: u64) -> OutageReport {
    let blocks_total = payload_bits.div_ceil(cfg.block_size_bits);
    let jitter = (cfg.per_block_snr_jitter_db > 0.0)
        .then(|| Normal::new(0.0, cfg.per_block_snr_jitter_db).expect("finite jitter"));
    let mut rng = rng_from(seed);
    let mut blocks_failed = 0;
    for _ in 0..blocks_total {
        let j = jitter.as_ref().map_or(0.0, |n| n.sample(&mut rng));
        if cfg.bits_per_symbol > penalized_capacity(snr_db + j, cfg.capacity_penalty_db) {
            blocks_failed += 1;
        }
    }
    OutageReport { outage: blocks_failed > 0, blocks_failed, blocks_total }
}

/// Side-stream rates that ride along with the image payload of a digital
/// baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModalityRates {
    pub audio_kbps: f64,
    pub text_bits: u64,
}

impl Default for ModalityRates {
    fn default() -> Self {
        Self { audio_kbps: 6.0, text_bits: 512 }
    }
}

/// Nominal duration of one sample; converts kbps to bits per sample.
pub const SAMPLE_SECONDS: f64 = 1.0;

/// Bits per sample of a separated digital scheme: image bitrate plus audio
/// bitrate over one nominal sample, plus the text payload. Rates are rounded
/// to whole bits.
pub fn baseline_payload_model(rate_kbps: f64, rates: &ModalityRates) -> u64 {
    let bits = |kbps: f64| libm::round(kbps.max(0.0) * 1000.0 * SAMPLE_SECONDS) as u64;
    bits(rate_kbps) + bits(rates.audio_kbps) + rates.text_bits
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_power(&[1.0; 4]), vec![1.0; 4]);
        assert_eq!(normalize_power(&[2.0; 4]), vec![1.0; 4]);
        assert_eq!(normalize_power(&[0.0; 4]), vec![0.0; 4]);
        let y = normalize_power(&[3.0, -1.0, 0.5, 7.0, 0.0]);
        let p: f64 = y.iter().map(|v| v * v).sum::<f64>() / y.len() as f64;
        assert!((p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infinite_snr_is_noiseless() {
        let x = [0.5, -1.0, 2.0];
        let cfg = ChannelConfig { snr_db: f64::INFINITY, noise_mode: NoiseMode::PerSymbol, seed: 1 };
        assert_eq!(awgn(&x, &cfg), x.to_vec());
    }

    #[test]
    fn length_scaling() {
        assert!((noise_variance(10.0, NoiseMode::PerSymbol, 960) - 0.1).abs() < 1e-15);
        assert!((noise_variance(10.0, NoiseMode::LengthScaled, 960) - 0.3).abs() < 1e-12);
        assert!((noise_variance(10.0, NoiseMode::LengthScaled, 2880) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn awgn_is_seeded() {
        let cfg = ChannelConfig { snr_db: 3.0, noise_mode: NoiseMode::PerSymbol, seed: 42 };
        let x = [0.0; 16];
        assert_eq!(awgn(&x, &cfg), awgn(&x, &cfg));
        assert_ne!(awgn(&x, &cfg), awgn(&x, &ChannelConfig { seed: 43, ..cfg }));
    }

    #[test]
    fn outage_examples() {
        let cfg = DigitalLinkConfig::default();
        let r = digital_outage(19182, 4.0, &cfg, 0);
        assert!(r.outage);
        assert_eq!((r.blocks_failed, r.blocks_total), (3, 3));
        assert!(!digital_outage(19182, 10.0, &cfg, 0).outage);
        assert_eq!(
            digital_outage(0, -10.0, &cfg, 0),
            OutageReport { outage: false, blocks_failed: 0, blocks_total: 0 }
        );
    }

    #[test]
    fn capacity_values() {
        assert!((penalized_capacity(4.0, 1.5) - 1.474_191_697_7).abs() < 1e-9);
        assert!((penalized_capacity(10.0, 1.5) - 3.014_258_487_0).abs() < 1e-9);
        // root of log2(1 + 10^((s - 1.5)/10)) = 2, found by bisection offline
        assert!((DigitalLinkConfig::default().threshold_snr_db() - 6.271_212_547).abs() < 1e-8);
    }

    #[test]
    fn payload_model() {
        let r = ModalityRates::default();
        assert_eq!(baseline_payload_model(12.67, &r), 19182);
        assert_eq!(baseline_payload_model(0.0, &r), 6512);
        assert_eq!(baseline_payload_model(0.0, &ModalityRates { audio_kbps: 0.0, text_bits: 0 }), 0);
    }
}
