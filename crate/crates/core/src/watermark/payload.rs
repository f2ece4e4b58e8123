use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::ImageBuffer;

/// Bits to hide plus the key of keyed schemes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WatermarkPayload {
    bits: Vec<bool>,
    pub key: u64,
}

impl WatermarkPayload {
    pub fn new(bits: Vec<bool>, key: u64) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidParameter(
                "payload must carry at least one bit".into(),
            ));
        }
        Ok(WatermarkPayload { bits, key })
    }

    /// Bits of `bytes`, most significant first.
    pub fn from_bytes(bytes: &[u8], key: u64) -> Result<Self> {
        let bits = bytes
            .iter()
            .flat_map(|b| (0..8).rev().map(move |i| b >> i & 1 == 1))
            .collect();
        Self::new(bits, key)
    }

    /// `len` pseudo-random bits drawn from `seed`; the key is `seed` as well.
    pub fn random(len: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xB175_0000_0000_0000);
        Self::new((0..len).map(|_| rng.random_bool(0.5)).collect(), seed)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Packs bits into bytes, most significant first, zero-filling the tail.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| {
            c.iter()
                .enumerate()
                .fold(0u8, |acc, (i, &b)| acc | (b as u8) << (7 - i))
        })
        .collect()
}

/// Fraction of positions where the two sequences disagree. Missing tail
/// positions count as errors.
pub fn bit_error_rate(sent: &[bool], received: &[bool]) -> f64 {
    if sent.is_empty() {
        return 0.0;
    }
    let errors = sent
        .iter()
        .enumerate()
        .filter(|&(i, b)| received.get(i) != Some(b))
        .count();
    errors as f64 / sent.len() as f64
}

/// Peak signal-to-noise ratio in dB over all samples, peak 255. Identical
/// images give infinity.
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64> {
    if a.dimensions() != b.dimensions() || a.layout() != b.layout() {
        return Err(Error::DimensionMismatch {
            expected: a.dimensions(),
            actual: b.dimensions(),
        });
    }
    let sse: f64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(&x, &y)| (x as f64 - y as f64).powi(2))
        .sum();
    if sse == 0.0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse / a.pixels().len() as f64;
    Ok(10.0 * (255.0f64 * 255.0 / mse).log10())
}
