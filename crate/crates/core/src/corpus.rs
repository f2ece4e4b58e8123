//! Camera-original JPEG files from synthetic cameras, with the kind of Exif
//! block a phone writes.

use chrono::DateTime;
use serde::{Deserialize, Serialize};

use crate::channel::ORIGINAL_QUALITY;
use crate::diff::MetadataMap;
use crate::error::Result;
use crate::image::{
    capture, decode_image, encode_jpeg, encode_jpeg_with_segments, fit_within, generate_camera,
    generate_scene, resize, ImageBuffer, SceneKind, SyntheticCamera,
};

/// 2016-10-28 08:54:47 UTC, the first shot of every camera.
pub const BASE_TIMESTAMP: i64 = 1_477_644_887;
pub const DEFAULT_SHOT_NOISE: f64 = 2.0;
const THUMBNAIL_BOX: (usize, usize) = (160, 160);

/// Shooting parameters shared by every camera in a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootSpec {
    pub scene: SceneKind,
    pub shot_noise: f64,
}

impl Default for ShootSpec {
    fn default() -> Self {
        ShootSpec {
            scene: SceneKind::Textured,
            shot_noise: DEFAULT_SHOT_NOISE,
        }
    }
}

/// A file as it leaves the camera.
#[derive(Debug, Clone, PartialEq)]
pub struct Original {
    pub camera_id: String,
    pub index: usize,
    pub name: String,
    /// Decoded pixels; the file is in `image.source_bytes()`.
    pub image: ImageBuffer,
    pub metadata: MetadataMap,
}

impl Original {
    pub fn bytes(&self) -> &[u8] {
        self.image.source_bytes().unwrap_or_default()
    }
}

fn shot_seed(cam: &SyntheticCamera, index: usize, salt: u64) -> u64 {
    cam.rng_seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index as u64)
        .wrapping_mul(0xBF58_476D_1CE4_E5B9)
        ^ salt
}

pub fn shot_timestamp(index: usize) -> i64 {
    BASE_TIMESTAMP + 37 * index as i64
}

/// Exif block for shot `index`, including a thumbnail of `img`.
pub fn camera_metadata(
    cam: &SyntheticCamera,
    index: usize,
    img: &ImageBuffer,
) -> Result<MetadataMap> {
    let when = DateTime::from_timestamp(shot_timestamp(index), 0).unwrap_or_default();
    let stamp = when.format("%Y:%m:%d %H:%M:%S").to_string();
    let mut m = MetadataMap::new();
    m.set_exif_ascii("IFD0.Make", "SynthCam");
    m.set_exif_ascii("IFD0.Model", &cam.camera_id);
    m.set_exif_short("IFD0.Orientation", &[1]);
    m.set_exif_rational("IFD0.XResolution", &[(72, 1)]);
    m.set_exif_rational("IFD0.YResolution", &[(72, 1)]);
    m.set_exif_short("IFD0.ResolutionUnit", &[2]);
    m.set_exif_ascii("IFD0.Software", "snmark");
    m.set_exif_ascii("IFD0.DateTime", &stamp);
    m.set_exif_ascii("IFD0.ImageDescription", &format!("shot {index}"));
    m.set_exif_ascii("IFD0.Copyright", "snmark synthetic corpus");
    m.set_exif_rational("Exif.ExposureTime", &[(1, 60 + 10 * (index as u32 % 5))]);
    m.set_exif_rational("Exif.FNumber", &[(18, 10)]);
    m.set_exif_short("Exif.ISOSpeedRatings", &[100 * (1 + index as u16 % 4)]);
    m.set_exif_undefined("Exif.ExifVersion", b"0230");
    m.set_exif_ascii("Exif.DateTimeOriginal", &stamp);
    m.set_exif_ascii("Exif.DateTimeDigitized", &stamp);
    m.set_exif_rational("Exif.FocalLength", &[(43, 10)]);
    m.set_exif_short("Exif.Flash", &[0]);
    m.set_exif_short("Exif.ColorSpace", &[1]);
    m.set_exif_ascii("GPS.GPSLatitudeRef", "N");
    m.set_exif_rational(
        "GPS.GPSLatitude",
        &[(40, 1), (51, 1), (index as u32 % 60, 1)],
    );
    m.set_exif_ascii("GPS.GPSLongitudeRef", "E");
    m.set_exif_rational("GPS.GPSLongitude", &[(14, 1), (15, 1), (0, 1)]);
    let (tw, th) = fit_within(img.dimensions(), THUMBNAIL_BOX);
    m.set_exif_short("IFD1.Compression", &[6]);
    m.set_thumbnail(encode_jpeg(&resize(img, tw, th)?, 75)?);
    Ok(m)
}

/// Captures, tags and encodes shot `index` of `cam`.
pub fn shoot(cam: &SyntheticCamera, index: usize, spec: &ShootSpec) -> Result<Original> {
    let scene = generate_scene(
        spec.scene,
        cam.width,
        cam.height,
        shot_seed(cam, index, 0x5C),
    )?;
    let raw = capture(&scene, cam, spec.shot_noise, shot_seed(cam, index, 0x7E))?;
    let metadata = camera_metadata(cam, index, &raw)?;
    let bytes = encode_jpeg_with_segments(&raw, ORIGINAL_QUALITY, &metadata.to_jpeg_segments())?;
    let when = DateTime::from_timestamp(shot_timestamp(index), 0).unwrap_or_default();
    Ok(Original {
        camera_id: cam.camera_id.clone(),
        index,
        name: format!("{}.jpg", when.format("%Y%m%d_%H%M%S")),
        image: decode_image(&bytes)?,
        metadata,
    })
}

/// `count` originals of one camera, shot indices `first..first + count`.
pub fn shoot_many(
    cam: &SyntheticCamera,
    first: usize,
    count: usize,
    spec: &ShootSpec,
) -> Result<Vec<Original>> {
    use rayon::prelude::*;
    (first..first + count)
        .into_par_iter()
        .map(|i| shoot(cam, i, spec))
        .collect()
}

/// Camera number `index` of a corpus seeded by `seed`, named `camNN`.
pub fn corpus_camera(
    index: usize,
    dims: (usize, usize),
    strength: f64,
    seed: u64,
) -> Result<SyntheticCamera> {
    Ok(generate_camera(
        seed.wrapping_mul(1000).wrapping_add(index as u64),
        dims.0,
        dims.1,
        strength,
    )?
    .with_id(format!("cam{index:02}")))
}

/// Originals of a given size for channel calibration, from a weak-pattern
/// camera seeded by `seed`.
pub fn calibration_corpus(
    dims: (usize, usize),
    count: usize,
    seed: u64,
) -> Result<Vec<ImageBuffer>> {
    let cam = generate_camera(seed, dims.0, dims.1, 0.01)?.with_id(format!("calib{seed}"));
    Ok(shoot_many(&cam, 0, count, &ShootSpec::default())?
        .into_iter()
        .map(|o| o.image)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff::{name_classify, Namespace, UNCHANGED_LABEL};

    #[test]
    fn originals_carry_exif_and_camera_names() {
        let cam = generate_camera(3, 96, 64, 0.02).unwrap();
        let o = shoot(&cam, 2, &ShootSpec::default()).unwrap();
        assert_eq!(name_classify(&o.name), UNCHANGED_LABEL);
        let parsed = MetadataMap::from_image(&o.image);
        assert_eq!(parsed.exif_ascii("IFD0.Model").as_deref(), Some("cam003"));
        assert!(parsed.contains(Namespace::Exif, "IFD1.ThumbnailData"));
        assert!(parsed.contains(Namespace::Exif, "GPS.GPSLatitude"));
        assert_eq!(parsed.len(), o.metadata.len());
    }

    #[test]
    fn shooting_is_deterministic() {
        let cam = generate_camera(4, 64, 64, 0.02).unwrap();
        let a = shoot_many(&cam, 0, 3, &ShootSpec::default()).unwrap();
        let b = shoot_many(&cam, 0, 3, &ShootSpec::default()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a[0].image.pixels(), a[1].image.pixels());
    }
}
