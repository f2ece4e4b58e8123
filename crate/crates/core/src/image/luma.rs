use super::buffer::{ChannelLayout, ImageBuffer};
use crate::error::{Error, Result};

/// Full-range BT.601 luma weights.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

/// Real-valued single-channel plane, row-major.
///
/// Used both for the luminance of an image and, via [`crate::prnu`], for
/// noise residuals and fingerprints.
#[derive(Debug, Clone, PartialEq)]
pub struct LumaPlane {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl LumaPlane {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "plane dimensions must be positive, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: (width, height),
                actual: (values.len(), 1),
            });
        }
        Ok(LumaPlane {
            width,
            height,
            values,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        LumaPlane {
            width,
            height,
            values: vec![0.0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Y of YCbCr; a grayscale image is copied through.
pub fn y_channel(img: &ImageBuffer) -> LumaPlane {
    let values = match img.layout() {
        ChannelLayout::Gray8 => img.pixels().iter().map(|&v| v as f64).collect(),
        ChannelLayout::Rgb8 => img
            .pixels()
            .chunks_exact(3)
            .map(|p| {
                LUMA_WEIGHTS[0] * p[0] as f64
                    + LUMA_WEIGHTS[1] * p[1] as f64
                    + LUMA_WEIGHTS[2] * p[2] as f64
            })
            .collect(),
    };
    LumaPlane {
        width: img.width(),
        height: img.height(),
        values,
    }
}

/// Adds a luminance offset plane to every channel, rounding and clamping.
///
/// Because the luma weights sum to one, the Y channel of the result moves by
/// `delta` wherever no clamping occurs.
pub fn apply_luma_delta(img: &ImageBuffer, delta: &LumaPlane) -> Result<ImageBuffer> {
    if img.dimensions() != delta.dimensions() {
        return Err(Error::DimensionMismatch {
            expected: img.dimensions(),
            actual: delta.dimensions(),
        });
    }
    let ch = img.channels();
    let pixels = img
        .pixels()
        .iter()
        .enumerate()
        .map(|(i, &v)| (v as f64 + delta.values[i / ch]).round().clamp(0.0, 255.0) as u8)
        .collect();
    ImageBuffer::new(img.width(), img.height(), img.layout(), pixels)
}
