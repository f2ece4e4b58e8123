//! Synthetic sensors and scenes.
//!
//! A [`SyntheticCamera`] carries a known multiplicative pattern, so every
//! estimate made downstream can be scored against ground truth. The sensor
//! model is `out = clamp(scene * (1 + K) + theta)` with `theta` Gaussian shot
//! noise drawn per sample.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::buffer::{ChannelLayout, ImageBuffer};
use crate::error::{Error, Result};

pub const MAX_PATTERN_STRENGTH: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCamera {
    pub camera_id: String,
    pub width: usize,
    pub height: usize,
    /// Per-pixel gain offsets, zero mean.
    pub prnu_pattern: Vec<f64>,
    pub pattern_strength: f64,
    pub rng_seed: u64,
}

/// Draws an i.i.d. Gaussian pattern with standard deviation `strength`, then
/// removes its mean.
pub fn generate_camera(
    seed: u64,
    width: usize,
    height: usize,
    strength: f64,
) -> Result<SyntheticCamera> {
    if !(0.0..=MAX_PATTERN_STRENGTH).contains(&strength) {
        return Err(Error::InvalidParameter(format!(
            "pattern strength {strength} outside [0, {MAX_PATTERN_STRENGTH}]"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(
            "camera dimensions must be positive".into(),
        ));
    }
    let n = width * height;
    let mut pattern = if strength > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, strength).expect("finite std");
        (0..n)
            .map(|_| normal.sample(&mut rng))
            .collect::<Vec<f64>>()
    } else {
        vec![0.0; n]
    };
    let mean = pattern.iter().sum::<f64>() / n as f64;
    pattern.iter_mut().for_each(|v| *v -= mean);
    Ok(SyntheticCamera {
        camera_id: format!("cam{seed:03}"),
        width,
        height,
        prnu_pattern: pattern,
        pattern_strength: strength,
        rng_seed: seed,
    })
}

impl SyntheticCamera {
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.camera_id = id.into();
        self
    }
}

/// Images `scene` through `cam`.
pub fn capture(
    scene: &ImageBuffer,
    cam: &SyntheticCamera,
    shot_noise_std: f64,
    rng_seed: u64,
) -> Result<ImageBuffer> {
    if scene.dimensions() != (cam.width, cam.height) {
        return Err(Error::DimensionMismatch {
            expected: (cam.width, cam.height),
            actual: scene.dimensions(),
        });
    }
    if !(shot_noise_std >= 0.0 && shot_noise_std.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "shot noise std {shot_noise_std} must be >= 0"
        )));
    }
    let ch = scene.channels();
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let noise = Normal::new(0.0, shot_noise_std.max(f64::MIN_POSITIVE)).expect("finite std");
    let pixels = scene
        .pixels()
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let gain = 1.0 + cam.prnu_pattern[i / ch];
            let theta = if shot_noise_std > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            };
            (s as f64 * gain + theta).round().clamp(0.0, 255.0) as u8
        })
        .collect();
    ImageBuffer::new(scene.width(), scene.height(), scene.layout(), pixels)
}

/// Scene families for the corpus generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SceneKind {
    /// Uniform gray.
    Flat,
    /// Linear colour ramp.
    Gradient,
    /// Smooth colour field with hard-edged shapes.
    Textured,
}

/// Deterministic RGB scene.
pub fn generate_scene(
    kind: SceneKind,
    width: usize,
    height: usize,
    seed: u64,
) -> Result<ImageBuffer> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidParameter(
            "scene dimensions must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5CE7_E000_0000_0000);
    let pixels = match kind {
        SceneKind::Flat => {
            let level: u8 = rng.random_range(70..=190);
            vec![level; width * height * 3]
        }
        SceneKind::Gradient => gradient_scene(width, height, &mut rng),
        SceneKind::Textured => textured_scene(width, height, &mut rng),
    };
    ImageBuffer::new(width, height, ChannelLayout::Rgb8, pixels)
}

fn gradient_scene(width: usize, height: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let (dx, dy) = (angle.cos(), angle.sin());
    let start: [f64; 3] = std::array::from_fn(|_| rng.random_range(40.0..120.0));
    let end: [f64; 3] = std::array::from_fn(|_| rng.random_range(140.0..215.0));
    let span = (width as f64 * dx.abs() + height as f64 * dy.abs()).max(1.0);
    let origin = (
        if dx < 0.0 { width as f64 } else { 0.0 },
        if dy < 0.0 { height as f64 } else { 0.0 },
    );
    let mut px = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        for x in 0..width {
            let t =
                (((x as f64 - origin.0) * dx + (y as f64 - origin.1) * dy) / span).clamp(0.0, 1.0);
            for c in 0..3 {
                px.push((start[c] + (end[c] - start[c]) * t).round() as u8);
            }
        }
    }
    px
}

enum Shape {
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
    Disk { cx: f64, cy: f64, r2: f64 },
}

impl Shape {
    fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Shape::Rect { x0, y0, x1, y1 } => x >= x0 && x < x1 && y >= y0 && y < y1,
            Shape::Disk { cx, cy, r2 } => (x - cx).powi(2) + (y - cy).powi(2) <= r2,
        }
    }
}

fn textured_scene(width: usize, height: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    // coarse random lattice, bilinearly interpolated, per channel
    const GRID: usize = 6;
    let lattice: Vec<[f64; 3]> = (0..(GRID + 1) * (GRID + 1))
        .map(|_| std::array::from_fn(|_| rng.random_range(60.0..180.0)))
        .collect();
    let n_shapes = rng.random_range(8..16);
    let scale = width.min(height) as f64;
    let shapes: Vec<(Shape, [f64; 3])> = (0..n_shapes)
        .map(|_| {
            let shape = if rng.random_bool(0.5) {
                let x0 = rng.random_range(0.0..width as f64);
                let y0 = rng.random_range(0.0..height as f64);
                Shape::Rect {
                    x0,
                    y0,
                    x1: x0 + rng.random_range(0.05..0.4) * scale,
                    y1: y0 + rng.random_range(0.05..0.4) * scale,
                }
            } else {
                let r = rng.random_range(0.03..0.2) * scale;
                Shape::Disk {
                    cx: rng.random_range(0.0..width as f64),
                    cy: rng.random_range(0.0..height as f64),
                    r2: r * r,
                }
            };
            let colour = std::array::from_fn(|_| rng.random_range(30.0..220.0));
            (shape, colour)
        })
        .collect();
    let freq = rng.random_range(0.02..0.08);
    let phase = rng.random_range(0.0..std::f64::consts::TAU);

    let mut px = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        let gy = y as f64 / height as f64 * GRID as f64;
        let (iy, fy) = (gy as usize, gy.fract());
        for x in 0..width {
            let gx = x as f64 / width as f64 * GRID as f64;
            let (ix, fx) = (gx as usize, gx.fract());
            let at = |i: usize, j: usize| lattice[j * (GRID + 1) + i];
            let ripple = 6.0 * ((x as f64 + 0.5 * y as f64) * freq + phase).sin();
            let mut colour: [f64; 3] = std::array::from_fn(|c| {
                let top = at(ix, iy)[c] * (1.0 - fx) + at(ix + 1, iy)[c] * fx;
                let bottom = at(ix, iy + 1)[c] * (1.0 - fx) + at(ix + 1, iy + 1)[c] * fx;
                top * (1.0 - fy) + bottom * fy + ripple
            });
            for (shape, c) in shapes.iter().rev() {
                if shape.contains(x as f64, y as f64) {
                    colour = std::array::from_fn(|k| c[k] + 0.5 * ripple);
                    break;
                }
            }
            px.extend(colour.iter().map(|v| v.round().clamp(0.0, 255.0) as u8));
        }
    }
    px
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corr(a: &[f64], b: &[f64]) -> f64 {
        let ma = a.iter().sum::<f64>() / a.len() as f64;
        let mb = b.iter().sum::<f64>() / b.len() as f64;
        let (mut num, mut da, mut db) = (0.0, 0.0, 0.0);
        for (x, y) in a.iter().zip(b) {
            num += (x - ma) * (y - mb);
            da += (x - ma).powi(2);
            db += (y - mb).powi(2);
        }
        num / (da.sqrt() * db.sqrt())
    }

    #[test]
    fn camera_is_reproducible_and_centred() {
        let a = generate_camera(11, 64, 48, 0.03).unwrap();
        let b = generate_camera(11, 64, 48, 0.03).unwrap();
        assert_eq!(a, b);
        let mean = a.prnu_pattern.iter().sum::<f64>() / a.prnu_pattern.len() as f64;
        assert!(mean.abs() < 1e-6);
    }

    #[test]
    fn different_seeds_are_uncorrelated() {
        let a = generate_camera(1, 512, 512, 0.03).unwrap();
        let b = generate_camera(2, 512, 512, 0.03).unwrap();
        assert!(corr(&a.prnu_pattern, &b.prnu_pattern).abs() < 0.05);
    }

    #[test]
    fn strength_out_of_range() {
        assert!(generate_camera(1, 8, 8, 0.25).is_err());
        assert!(generate_camera(1, 8, 8, -0.01).is_err());
    }

    #[test]
    fn degenerate_camera_is_identity() {
        let scene = generate_scene(SceneKind::Textured, 40, 30, 3).unwrap();
        let cam = generate_camera(5, 40, 30, 0.0).unwrap();
        assert_eq!(
            capture(&scene, &cam, 0.0, 9).unwrap().pixels(),
            scene.pixels()
        );
    }

    #[test]
    fn black_scene_stays_black() {
        let scene = ImageBuffer::filled(32, 32, ChannelLayout::Rgb8, 0).unwrap();
        let cam = generate_camera(5, 32, 32, 0.2).unwrap();
        assert!(capture(&scene, &cam, 0.0, 1)
            .unwrap()
            .pixels()
            .iter()
            .all(|&v| v == 0));
    }

    #[test]
    fn capture_checks_dimensions() {
        let scene = ImageBuffer::filled(32, 16, ChannelLayout::Rgb8, 10).unwrap();
        let cam = generate_camera(5, 32, 32, 0.02).unwrap();
        assert!(matches!(
            capture(&scene, &cam, 0.0, 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn capture_is_reproducible() {
        let scene = generate_scene(SceneKind::Gradient, 48, 32, 1).unwrap();
        let cam = generate_camera(2, 48, 32, 0.03).unwrap();
        assert_eq!(
            capture(&scene, &cam, 2.0, 4).unwrap(),
            capture(&scene, &cam, 2.0, 4).unwrap()
        );
        assert_ne!(
            capture(&scene, &cam, 2.0, 4).unwrap(),
            capture(&scene, &cam, 2.0, 5).unwrap()
        );
    }

    #[test]
    fn scenes_are_deterministic() {
        for kind in [SceneKind::Flat, SceneKind::Gradient, SceneKind::Textured] {
            assert_eq!(
                generate_scene(kind, 33, 21, 8).unwrap(),
                generate_scene(kind, 33, 21, 8).unwrap()
            );
        }
    }
}
