use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::payload::WatermarkPayload;
use crate::error::{Error, Result};
use crate::image::ImageBuffer;

/// One bit per sample.
pub fn lsb_capacity(img: &ImageBuffer) -> usize {
    img.pixels().len()
}

fn check_capacity(img: &ImageBuffer, needed: usize) -> Result<()> {
    let capacity = lsb_capacity(img);
    if needed > capacity {
        return Err(Error::CapacityExceeded { needed, capacity });
    }
    Ok(())
}

fn write_bits(
    img: &ImageBuffer,
    positions: impl Iterator<Item = usize>,
    bits: &[bool],
) -> Result<ImageBuffer> {
    let mut pixels = img.pixels().to_vec();
    for (pos, &bit) in positions.zip(bits) {
        pixels[pos] = pixels[pos] & !1 | bit as u8;
    }
    ImageBuffer::new(img.width(), img.height(), img.layout(), pixels)
}

fn read_bits(img: &ImageBuffer, positions: impl Iterator<Item = usize>) -> Vec<bool> {
    positions.map(|pos| img.pixels()[pos] & 1 == 1).collect()
}

/// Writes the payload into the low bits of the samples in raster order.
pub fn lsb_embed(img: &ImageBuffer, payload: &WatermarkPayload) -> Result<ImageBuffer> {
    check_capacity(img, payload.len())?;
    write_bits(img, 0..payload.len(), payload.bits())
}

pub fn lsb_extract(img: &ImageBuffer, length: usize) -> Result<Vec<bool>> {
    check_capacity(img, length)?;
    Ok(read_bits(img, 0..length))
}

/// Distinct sample positions in key order.
fn keyed_positions(img: &ImageBuffer, length: usize, key: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rand::seq::index::sample(&mut rng, lsb_capacity(img), length).into_vec()
}

/// Like [`lsb_embed`] but scatters the bits over a key-seeded selection of
/// samples.
pub fn keyed_lsb_embed(img: &ImageBuffer, payload: &WatermarkPayload) -> Result<ImageBuffer> {
    check_capacity(img, payload.len())?;
    let positions = keyed_positions(img, payload.len(), payload.key);
    write_bits(img, positions.into_iter(), payload.bits())
}

pub fn keyed_lsb_extract(img: &ImageBuffer, length: usize, key: u64) -> Result<Vec<bool>> {
    check_capacity(img, length)?;
    Ok(read_bits(
        img,
        keyed_positions(img, length, key).into_iter(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{decode_image, encode_jpeg, generate_scene, ChannelLayout, SceneKind};
    use crate::watermark::{bit_error_rate, psnr};
    use proptest::prelude::*;

    fn scene() -> ImageBuffer {
        generate_scene(SceneKind::Textured, 96, 64, 11).unwrap()
    }

    #[test]
    fn round_trips() {
        let img = scene();
        let p = WatermarkPayload::random(500, 4).unwrap();
        let marked = lsb_embed(&img, &p).unwrap();
        assert_eq!(lsb_extract(&marked, 500).unwrap(), p.bits());
        let marked = keyed_lsb_embed(&img, &p).unwrap();
        assert_eq!(keyed_lsb_extract(&marked, 500, 4).unwrap(), p.bits());
        assert!(psnr(&img, &marked).unwrap() > 50.0);
    }

    #[test]
    fn capacity_exceeded() {
        let img = ImageBuffer::filled(2, 2, ChannelLayout::Gray8, 0).unwrap();
        let p = WatermarkPayload::random(5, 1).unwrap();
        assert!(matches!(
            lsb_embed(&img, &p),
            Err(Error::CapacityExceeded {
                needed: 5,
                capacity: 4
            })
        ));
        assert!(matches!(
            keyed_lsb_embed(&img, &p),
            Err(Error::CapacityExceeded { .. })
        ));
        assert!(lsb_extract(&img, 5).is_err());
    }

    #[test]
    fn jpeg_destroys_both() {
        let img = scene();
        let p = WatermarkPayload::random(1000, 9).unwrap();
        let through = |m: ImageBuffer| decode_image(&encode_jpeg(&m, 80).unwrap()).unwrap();
        let plain = through(lsb_embed(&img, &p).unwrap());
        assert!(bit_error_rate(p.bits(), &lsb_extract(&plain, 1000).unwrap()) > 0.25);
        let keyed = through(keyed_lsb_embed(&img, &p).unwrap());
        assert!(bit_error_rate(p.bits(), &keyed_lsb_extract(&keyed, 1000, 9).unwrap()) > 0.25);
    }

    #[test]
    fn wrong_key_is_chance() {
        let img = scene();
        let p = WatermarkPayload::random(2000, 21).unwrap();
        let marked = keyed_lsb_embed(&img, &p).unwrap();
        let bers: Vec<f64> = (100..150)
            .map(|k| bit_error_rate(p.bits(), &keyed_lsb_extract(&marked, 2000, k).unwrap()))
            .collect();
        let mean = bers.iter().sum::<f64>() / bers.len() as f64;
        assert!((mean - 0.5).abs() < 0.1, "mean BER {mean}");
        assert!(bers.iter().all(|b| (b - 0.5).abs() < 0.1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn only_low_bits_change(bits in prop::collection::vec(any::<bool>(), 1..300), key in any::<u64>()) {
            let img = scene();
            let p = WatermarkPayload::new(bits, key).unwrap();
            for marked in [lsb_embed(&img, &p).unwrap(), keyed_lsb_embed(&img, &p).unwrap()] {
                prop_assert!(img.pixels().iter().zip(marked.pixels()).all(|(a, b)| a >> 1 == b >> 1));
            }
        }
    }
}
