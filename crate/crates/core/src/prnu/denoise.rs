use serde::{Deserialize, Serialize};

use crate::dsp::dwt::{self, Wavelet};
use crate::error::{Error, Result};
use crate::image::LumaPlane;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DenoiserKind {
    WaveletHard,
    WaveletSoft,
    GaussianBaseline,
}

impl std::str::FromStr for DenoiserKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "wavelet_hard" | "hard" => Ok(DenoiserKind::WaveletHard),
            "wavelet_soft" | "soft" => Ok(DenoiserKind::WaveletSoft),
            "gaussian_baseline" | "gaussian" => Ok(DenoiserKind::GaussianBaseline),
            other => Err(Error::InvalidParameter(format!(
                "unknown denoiser {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenoiserSpec {
    pub kind: DenoiserKind,
    pub levels: usize,
    /// Assumed standard deviation of the noise to remove, in 8-bit units.
    pub sigma: f64,
}

impl Default for DenoiserSpec {
    fn default() -> Self {
        DenoiserSpec {
            kind: DenoiserKind::WaveletHard,
            levels: 4,
            sigma: 5.0,
        }
    }
}

/// Hard thresholds sit at `3 sigma`, soft ones at `2 sigma`.
const HARD_FACTOR: f64 = 3.0;
const SOFT_FACTOR: f64 = 2.0;
const GAUSSIAN_STD: f64 = 1.0;

impl DenoiserSpec {
    pub fn with_kind(kind: DenoiserKind) -> Self {
        DenoiserSpec {
            kind,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 || self.levels > 10 {
            return Err(Error::InvalidParameter(format!(
                "levels must be in 1..=10, got {}",
                self.levels
            )));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }

    /// Smallest side length this denoiser can process.
    pub fn min_side(&self) -> usize {
        match self.kind {
            DenoiserKind::GaussianBaseline => 1,
            _ => 1 << self.levels,
        }
    }

    pub fn denoise(&self, plane: &LumaPlane) -> Result<LumaPlane> {
        self.validate()?;
        let (w, h) = plane.dimensions();
        let min = self.min_side();
        if w < min || h < min {
            return Err(Error::ImageTooSmall {
                width: w,
                height: h,
                min,
            });
        }
        match self.kind {
            DenoiserKind::GaussianBaseline => Ok(gaussian_blur(plane, GAUSSIAN_STD)),
            DenoiserKind::WaveletHard => wavelet_shrink(plane, self.levels, |c| {
                if c.abs() > HARD_FACTOR * self.sigma {
                    c
                } else {
                    0.0
                }
            }),
            DenoiserKind::WaveletSoft => wavelet_shrink(plane, self.levels, |c| {
                c.signum() * (c.abs() - SOFT_FACTOR * self.sigma).max(0.0)
            }),
        }
    }
}

fn wavelet_shrink(
    plane: &LumaPlane,
    levels: usize,
    shrink: impl Fn(f64) -> f64,
) -> Result<LumaPlane> {
    let (w, h) = plane.dimensions();
    let (mut data, pw, ph) = dwt::pad_symmetric(plane.values(), w, h, 1 << levels);
    dwt::forward_2d(&mut data, pw, ph, levels, Wavelet::Db4);
    let (aw, ah) = (pw >> levels, ph >> levels);
    for y in 0..ph {
        let row = &mut data[y * pw..(y + 1) * pw];
        let start = if y < ah { aw } else { 0 };
        row[start..].iter_mut().for_each(|c| *c = shrink(*c));
    }
    dwt::inverse_2d(&mut data, pw, ph, levels, Wavelet::Db4);
    LumaPlane::new(w, h, dwt::crop(&data, pw, w, h))
}

/// Separable Gaussian blur with mirrored borders.
pub fn gaussian_blur(plane: &LumaPlane, std: f64) -> LumaPlane {
    let radius = (3.0 * std).ceil() as isize;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * std * std)).exp())
        .collect();
    let norm: f64 = kernel.iter().sum();
    let kernel: Vec<f64> = kernel.iter().map(|k| k / norm).collect();
    let (w, h) = plane.dimensions();
    let mirror = |i: isize, n: usize| -> usize {
        let n = n as isize;
        let period = 2 * n;
        let m = i.rem_euclid(period);
        (if m < n { m } else { period - 1 - m }) as usize
    };
    let src = plane.values();
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            tmp[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, &kv)| kv * src[y * w + mirror(x as isize + k as isize - radius, w)])
                .sum();
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            out[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, &kv)| kv * tmp[mirror(y as isize + k as isize - radius, h) * w + x])
                .sum();
        }
    }
    LumaPlane::new(w, h, out).expect("same dimensions")
}
