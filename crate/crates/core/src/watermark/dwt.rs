use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dsp::dwt::{crop, forward_2d, inverse_2d, is_detail, pad_symmetric, Wavelet};
use crate::error::{Error, Result};
use crate::image::{apply_luma_delta, y_channel, ImageBuffer, LumaPlane};

pub const DWT_MIN_SIDE: usize = 64;

/// Additive wavelet-domain mark in the style of Dugad, Ratakonda and Ahuja:
/// every detail band of a three-level decomposition is marked, the
/// approximation band is left alone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DwtParams {
    pub alpha: f64,
    /// Embedding threshold on detail magnitude.
    pub t1: f64,
    /// Detection threshold on detail magnitude.
    pub t2: f64,
    pub levels: usize,
    pub wavelet: Wavelet,
    /// Floor on the decision threshold in standard deviations of the
    /// unmarked correlation; 0 gives the plain adaptive threshold.
    #[serde(default = "default_min_z")]
    pub min_z: f64,
}

fn default_min_z() -> f64 {
    3.0
}

impl Default for DwtParams {
    fn default() -> Self {
        DwtParams {
            alpha: 0.2,
            t1: 40.0,
            t2: 50.0,
            levels: 3,
            wavelet: Wavelet::Db4,
            min_z: default_min_z(),
        }
    }
}

impl DwtParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0
            && self.t1 >= 0.0
            && self.t2 >= 0.0
            && self.levels >= 1
            && self.min_z >= 0.0)
        {
            return Err(Error::InvalidParameter(format!(
                "bad wavelet mark parameters {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DwtDetection {
    pub detected: bool,
    /// Mean product of the selected coefficients with the key sequence.
    pub correlation: f64,
    /// Decision threshold: `alpha / 2` times the mean selected magnitude,
    /// or `min_z` null standard deviations if that is higher.
    pub threshold: f64,
    /// Number of coefficients above `t2`.
    pub selected: usize,
}

struct Transformed {
    coeffs: Vec<f64>,
    width: usize,
    height: usize,
}

fn transform(plane: &LumaPlane, params: &DwtParams) -> Result<Transformed> {
    let (w, h) = plane.dimensions();
    if w < DWT_MIN_SIDE || h < DWT_MIN_SIDE {
        return Err(Error::ImageTooSmall {
            width: w,
            height: h,
            min: DWT_MIN_SIDE,
        });
    }
    params.validate()?;
    let (mut coeffs, width, height) = pad_symmetric(plane.values(), w, h, 1 << params.levels);
    forward_2d(&mut coeffs, width, height, params.levels, params.wavelet);
    Ok(Transformed {
        coeffs,
        width,
        height,
    })
}

fn key_sequence(len: usize, key: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(key ^ 0xD3A7_0000_0000_0000);
    (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Detail positions whose magnitude exceeds `threshold`.
fn selected(t: &Transformed, levels: usize, threshold: f64) -> impl Iterator<Item = usize> + '_ {
    (0..t.coeffs.len()).filter(move |&i| {
        is_detail(i % t.width, i / t.width, t.width, t.height, levels)
            && t.coeffs[i].abs() > threshold
    })
}

/// Adds `alpha * |c| * x` to every luminance detail coefficient `c` above
/// `t1`, where `x` is a standard normal sequence seeded by `key`.
pub fn dwt_embed(img: &ImageBuffer, key: u64, params: &DwtParams) -> Result<ImageBuffer> {
    let original = y_channel(img);
    let mut t = transform(&original, params)?;
    let x = key_sequence(t.coeffs.len(), key);
    let picks: Vec<usize> = selected(&t, params.levels, params.t1).collect();
    for i in picks {
        t.coeffs[i] += params.alpha * t.coeffs[i].abs() * x[i];
    }
    inverse_2d(
        &mut t.coeffs,
        t.width,
        t.height,
        params.levels,
        params.wavelet,
    );
    let (w, h) = original.dimensions();
    let marked = crop(&t.coeffs, t.width, w, h);
    let delta = marked
        .iter()
        .zip(original.values())
        .map(|(m, o)| m - o)
        .collect();
    apply_luma_delta(img, &LumaPlane::new(w, h, delta)?)
}

/// Correlates the detail coefficients above `t2` with the key sequence.
pub fn dwt_detect(img: &ImageBuffer, key: u64, params: &DwtParams) -> Result<DwtDetection> {
    let t = transform(&y_channel(img), params)?;
    let x = key_sequence(t.coeffs.len(), key);
    let (mut dot, mut mag, mut energy, mut m) = (0.0, 0.0, 0.0, 0usize);
    for i in selected(&t, params.levels, params.t2) {
        let c = t.coeffs[i];
        dot += c * x[i];
        mag += c.abs();
        energy += c * c;
        m += 1;
    }
    if m == 0 {
        return Ok(DwtDetection {
            detected: false,
            correlation: 0.0,
            threshold: 0.0,
            selected: 0,
        });
    }
    let correlation = dot / m as f64;
    // with an unrelated key the correlation has mean 0 and this deviation
    let null_std = energy.sqrt() / m as f64;
    let threshold = (params.alpha / 2.0 * mag / m as f64).max(params.min_z * null_std);
    Ok(DwtDetection {
        detected: correlation > threshold,
        correlation,
        threshold,
        selected: m,
    })
}
