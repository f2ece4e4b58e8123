use rayon::prelude::*;

use super::denoise::DenoiserSpec;
use crate::error::{Error, Result};
use crate::image::{resize_plane, y_channel, ImageBuffer, LumaPlane};

/// Single-image sensor-noise estimate, zero mean.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseResidual {
    plane: LumaPlane,
}

impl NoiseResidual {
    /// Wraps an arbitrary plane, e.g. one loaded from elsewhere. No centring
    /// is applied.
    pub fn from_plane(plane: LumaPlane) -> Self {
        NoiseResidual { plane }
    }

    pub fn plane(&self) -> &LumaPlane {
        &self.plane
    }

    pub fn into_plane(self) -> LumaPlane {
        self.plane
    }

    pub fn width(&self) -> usize {
        self.plane.width()
    }

    pub fn height(&self) -> usize {
        self.plane.height()
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.plane.dimensions()
    }

    pub fn values(&self) -> &[f64] {
        self.plane.values()
    }
}

fn center(values: &mut [f64]) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter_mut().for_each(|v| *v -= mean);
}

/// `Y - denoise(Y)`, mean-centred.
pub fn extract_residual_plane(luma: &LumaPlane, spec: &DenoiserSpec) -> Result<NoiseResidual> {
    let smooth = spec.denoise(luma)?;
    let mut values: Vec<f64> = luma
        .values()
        .iter()
        .zip(smooth.values())
        .map(|(y, d)| y - d)
        .collect();
    center(&mut values);
    Ok(NoiseResidual {
        plane: LumaPlane::new(luma.width(), luma.height(), values)?,
    })
}

pub fn extract_residual(img: &ImageBuffer, spec: &DenoiserSpec) -> Result<NoiseResidual> {
    extract_residual_plane(&y_channel(img), spec)
}

/// Extracts residuals in parallel; output order follows input order.
pub fn extract_residuals(imgs: &[ImageBuffer], spec: &DenoiserSpec) -> Result<Vec<NoiseResidual>> {
    imgs.par_iter()
        .map(|img| extract_residual(img, spec))
        .collect()
}

/// Averaged residual of one device.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraFingerprint {
    pub device_id: String,
    pub n_images: usize,
    plane: LumaPlane,
}

impl CameraFingerprint {
    pub fn new(device_id: impl Into<String>, plane: LumaPlane, n_images: usize) -> Result<Self> {
        if n_images == 0 {
            return Err(Error::InvalidParameter(
                "fingerprint needs n_images >= 1".into(),
            ));
        }
        Ok(CameraFingerprint {
            device_id: device_id.into(),
            n_images,
            plane,
        })
    }

    pub fn plane(&self) -> &LumaPlane {
        &self.plane
    }

    pub fn width(&self) -> usize {
        self.plane.width()
    }

    pub fn height(&self) -> usize {
        self.plane.height()
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.plane.dimensions()
    }

    pub fn values(&self) -> &[f64] {
        self.plane.values()
    }

    /// Copy resampled to `width x height`.
    pub fn resized(&self, width: usize, height: usize) -> Result<CameraFingerprint> {
        Ok(CameraFingerprint {
            device_id: self.device_id.clone(),
            n_images: self.n_images,
            plane: resize_plane(&self.plane, width, height)?,
        })
    }
}

/// Running sum for building a fingerprint without holding every residual.
#[derive(Debug, Clone)]
pub struct FingerprintAccumulator {
    sum: Vec<f64>,
    dims: Option<(usize, usize)>,
    n: usize,
}

impl Default for FingerprintAccumulator {
    fn default() -> Self {
        Self::new()
    }
}

impl FingerprintAccumulator {
    pub fn new() -> Self {
        FingerprintAccumulator {
            sum: Vec::new(),
            dims: None,
            n: 0,
        }
    }

    pub fn add(&mut self, r: &NoiseResidual) -> Result<()> {
        match self.dims {
            None => {
                self.dims = Some(r.dimensions());
                self.sum = r.values().to_vec();
            }
            Some(d) if d != r.dimensions() => {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: r.dimensions(),
                })
            }
            Some(_) => self
                .sum
                .iter_mut()
                .zip(r.values())
                .for_each(|(s, v)| *s += v),
        }
        self.n += 1;
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn finish(self, device_id: impl Into<String>) -> Result<CameraFingerprint> {
        let (w, h) = self.dims.ok_or(Error::EmptyList)?;
        let n = self.n as f64;
        let values = self.sum.into_iter().map(|s| s / n).collect();
        CameraFingerprint::new(device_id, LumaPlane::new(w, h, values)?, self.n)
    }
}

/// Elementwise mean of the residuals, summed in index order.
pub fn estimate_fingerprint(
    residuals: &[NoiseResidual],
    device_id: impl Into<String>,
) -> Result<CameraFingerprint> {
    let mut acc = FingerprintAccumulator::new();
    for r in residuals {
        acc.add(r)?;
    }
    acc.finish(device_id)
}

/// Normalized correlation of two equally sized value slices.
pub fn normalized_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    assert_eq!(a.len(), b.len());
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut num, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        num += dx * dy;
        na += dx * dx;
        nb += dy * dy;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::DegenerateInput);
    }
    Ok((num / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

/// Correlates two planes, first shrinking the one with more pixels onto
/// the other's grid.
pub fn correlate_planes(a: &LumaPlane, b: &LumaPlane) -> Result<f64> {
    if a.dimensions() == b.dimensions() {
        return normalized_correlation(a.values(), b.values());
    }
    let (big, small) = if a.values().len() >= b.values().len() {
        (a, b)
    } else {
        (b, a)
    };
    let shrunk = resize_plane(big, small.width(), small.height())?;
    normalized_correlation(shrunk.values(), small.values())
}

pub fn correlate(n: &NoiseResidual, fp: &CameraFingerprint) -> Result<f64> {
    correlate_planes(n.plane(), fp.plane())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{capture, generate_camera, ChannelLayout};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_plane(rng: &mut ChaCha8Rng, w: usize, h: usize) -> LumaPlane {
        LumaPlane::new(
            w,
            h,
            (0..w * h).map(|_| rng.random_range(-5.0..5.0)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn flat_image_has_zero_residual() {
        let img = ImageBuffer::filled(48, 32, ChannelLayout::Rgb8, 120).unwrap();
        for spec in [
            DenoiserSpec::default(),
            DenoiserSpec::with_kind(super::super::DenoiserKind::GaussianBaseline),
        ] {
            let r = extract_residual(&img, &spec).unwrap();
            assert!(r.values().iter().all(|v| v.abs() < 1e-6));
        }
    }

    #[test]
    fn residual_recovers_pattern_on_flat_scene() {
        let (w, h) = (256, 256);
        let cam = generate_camera(5, w, h, 0.03).unwrap();
        let scene = ImageBuffer::filled(w, h, ChannelLayout::Rgb8, 128).unwrap();
        let shot = capture(&scene, &cam, 0.0, 1).unwrap();
        let r = extract_residual(&shot, &DenoiserSpec::default()).unwrap();
        let mean = r.values().iter().sum::<f64>() / r.values().len() as f64;
        assert!(mean.abs() < 1e-6);
        let expected: Vec<f64> = cam.prnu_pattern.iter().map(|k| k * 128.0).collect();
        let c = normalized_correlation(r.values(), &expected).unwrap();
        assert!(c > 0.9, "corr {c}");
    }

    #[test]
    fn residual_is_deterministic() {
        let cam = generate_camera(2, 64, 64, 0.02).unwrap();
        let scene = ImageBuffer::filled(64, 64, ChannelLayout::Rgb8, 90).unwrap();
        let shot = capture(&scene, &cam, 1.0, 9).unwrap();
        let spec = DenoiserSpec::default();
        assert_eq!(
            extract_residual(&shot, &spec).unwrap(),
            extract_residual(&shot, &spec).unwrap()
        );
    }

    #[test]
    fn fingerprint_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = NoiseResidual::from_plane(random_plane(&mut rng, 8, 6));
        let fp = estimate_fingerprint(&[r.clone(), r.clone(), r.clone()], "c").unwrap();
        // (3r)/3 may differ from r in the last ulp
        assert!(fp
            .values()
            .iter()
            .zip(r.values())
            .all(|(a, b)| (a - b).abs() < 1e-12));
        assert_eq!(fp.n_images, 3);
        let neg = NoiseResidual::from_plane(
            LumaPlane::new(8, 6, r.values().iter().map(|v| -v).collect()).unwrap(),
        );
        let zero = estimate_fingerprint(&[r, neg], "c").unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fingerprint_errors() {
        assert!(matches!(
            estimate_fingerprint(&[], "c"),
            Err(Error::EmptyList)
        ));
        let a = NoiseResidual::from_plane(LumaPlane::zeros(4, 4));
        let b = NoiseResidual::from_plane(LumaPlane::zeros(4, 5));
        assert!(matches!(
            estimate_fingerprint(&[a, b], "c"),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn correlation_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_plane(&mut rng, 16, 16);
        let neg = LumaPlane::new(16, 16, x.values().iter().map(|v| -v).collect()).unwrap();
        let aff =
            LumaPlane::new(16, 16, x.values().iter().map(|v| 2.5 * v + 7.0).collect()).unwrap();
        assert!((correlate_planes(&x, &x).unwrap() - 1.0).abs() < 1e-9);
        assert!((correlate_planes(&x, &neg).unwrap() + 1.0).abs() < 1e-9);
        assert!((correlate_planes(&aff, &x).unwrap() - 1.0).abs() < 1e-9);
        let flat = LumaPlane::new(16, 16, vec![3.0; 256]).unwrap();
        assert!(matches!(
            correlate_planes(&x, &flat),
            Err(Error::DegenerateInput)
        ));
    }

    #[test]
    fn larger_plane_is_shrunk() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let small = random_plane(&mut rng, 8, 8);
        // nearest-block upsampling survives the bilinear shrink exactly
        let big = LumaPlane::new(
            16,
            16,
            (0..256)
                .map(|i| small.get((i % 16) / 2, (i / 16) / 2))
                .collect(),
        )
        .unwrap();
        let c1 = correlate_planes(&big, &small).unwrap();
        let c2 = correlate_planes(&small, &big).unwrap();
        assert_eq!(c1, c2);
        assert!(c1 > 0.99);
    }
}
