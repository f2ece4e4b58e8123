use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::payload::WatermarkPayload;
use crate::dsp::dct::{forward_8x8, inverse_8x8, BLOCK};
use crate::error::{Error, Result};
use crate::image::{apply_luma_delta, y_channel, ImageBuffer, LumaPlane};

/// Mid-frequency pair `[v][u]` carrying the bit; JPEG quantizes both with
/// nearly the same step.
const PAIR: [(usize, usize); 2] = [(1, 2), (2, 1)];
const MAX_ROUNDS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DctParams {
    /// Minimum gap between the pair, in coefficient units.
    pub margin: f64,
}

impl Default for DctParams {
    fn default() -> Self {
        DctParams { margin: 8.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DctDetection {
    pub bits: Vec<bool>,
    /// Fraction of blocks agreeing with the majority of their bit.
    pub confidence: f64,
}

/// One bit per whole 8x8 block.
pub fn dct_capacity(img: &ImageBuffer) -> usize {
    (img.width() / BLOCK) * (img.height() / BLOCK)
}

fn check(img: &ImageBuffer, needed: usize) -> Result<usize> {
    if img.width() < BLOCK || img.height() < BLOCK {
        return Err(Error::ImageTooSmall {
            width: img.width(),
            height: img.height(),
            min: BLOCK,
        });
    }
    let capacity = dct_capacity(img);
    if needed > capacity {
        return Err(Error::CapacityExceeded { needed, capacity });
    }
    Ok(capacity)
}

/// Block indices in key order; position `j` carries bit `j % len`.
fn block_order(n: usize, key: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(key ^ 0xDC7B_0000_0000_0000);
    rand::seq::index::sample(&mut rng, n, n).into_vec()
}

fn read_block(plane: &LumaPlane, bx: usize, by: usize) -> [[f64; BLOCK]; BLOCK] {
    std::array::from_fn(|y| std::array::from_fn(|x| plane.get(bx * BLOCK + x, by * BLOCK + y)))
}

fn write_block(plane: &mut LumaPlane, bx: usize, by: usize, block: &[[f64; BLOCK]; BLOCK]) {
    let w = plane.width();
    let values = plane.values_mut();
    for (y, row) in block.iter().enumerate() {
        let start = (by * BLOCK + y) * w + bx * BLOCK;
        values[start..start + BLOCK].copy_from_slice(row);
    }
}

/// Signed gap between the pair, positive when the block reads as `true`.
fn gap(coeffs: &[[f64; BLOCK]; BLOCK]) -> f64 {
    let [(v1, u1), (v2, u2)] = PAIR;
    coeffs[v1][u1] - coeffs[v2][u2]
}

fn enforce(coeffs: &mut [[f64; BLOCK]; BLOCK], bit: bool, margin: f64) {
    let [(v1, u1), (v2, u2)] = PAIR;
    let mean = (coeffs[v1][u1] + coeffs[v2][u2]) / 2.0;
    let half = if bit { margin / 2.0 } else { -margin / 2.0 };
    coeffs[v1][u1] = mean + half;
    coeffs[v2][u2] = mean - half;
}

/// Encodes each bit in the order of a coefficient pair of every block of
/// the luminance, repeating the payload over all blocks.
///
/// Blocks that lose their margin to pixel rounding or clipping are pushed
/// again with a wider margin, for a few rounds.
pub fn dct_embed(
    img: &ImageBuffer,
    payload: &WatermarkPayload,
    params: &DctParams,
) -> Result<ImageBuffer> {
    let n = check(img, payload.len())?;
    let bw = img.width() / BLOCK;
    let original = y_channel(img);
    let mut target = original.clone();
    let order = block_order(n, payload.key);
    let bit_of = |j: usize| payload.bits()[j % payload.len()];
    let delta = |target: &LumaPlane| {
        let values = target
            .values()
            .iter()
            .zip(original.values())
            .map(|(t, o)| t - o)
            .collect();
        LumaPlane::new(original.width(), original.height(), values)
    };

    let mut pending: Vec<usize> = (0..n).collect();
    let mut marked = img.clone();
    for round in 0..MAX_ROUNDS {
        let margin = params.margin * (1.0 + 0.5 * round as f64);
        for &j in &pending {
            let (bx, by) = (order[j] % bw, order[j] / bw);
            let mut c = forward_8x8(&read_block(&target, bx, by));
            let want = bit_of(j);
            let g = gap(&c);
            if round > 0 || (want && g < margin) || (!want && g > -margin) {
                enforce(&mut c, want, margin);
                write_block(&mut target, bx, by, &inverse_8x8(&c));
            }
        }
        marked = apply_luma_delta(img, &delta(&target)?)?;
        let measured = y_channel(&marked);
        pending.retain(|&j| {
            let (bx, by) = (order[j] % bw, order[j] / bw);
            let g = gap(&forward_8x8(&read_block(&measured, bx, by)));
            let g = if bit_of(j) { g } else { -g };
            g < params.margin / 2.0
        });
        if pending.is_empty() {
            break;
        }
    }
    Ok(marked)
}

/// Reads `length` bits by majority over the blocks carrying each bit.
pub fn dct_detect(img: &ImageBuffer, length: usize, key: u64) -> Result<DctDetection> {
    if length == 0 {
        return Err(Error::InvalidParameter("length must be positive".into()));
    }
    let n = check(img, length)?;
    let bw = img.width() / BLOCK;
    let plane = y_channel(img);
    let order = block_order(n, key);
    let reads: Vec<bool> = order
        .iter()
        .map(|&b| gap(&forward_8x8(&read_block(&plane, b % bw, b / bw))) > 0.0)
        .collect();
    let mut votes = vec![(0usize, 0usize); length];
    for (j, &r) in reads.iter().enumerate() {
        let v = &mut votes[j % length];
        v.0 += r as usize;
        v.1 += 1;
    }
    let bits: Vec<bool> = votes.iter().map(|&(t, total)| 2 * t > total).collect();
    let agree = reads
        .iter()
        .enumerate()
        .filter(|&(j, &r)| r == bits[j % length])
        .count();
    Ok(DctDetection {
        bits,
        confidence: agree as f64 / n as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{
        decode_image, encode_jpeg, generate_scene, resize, ChannelLayout, SceneKind,
    };
    use crate::watermark::{bit_error_rate, psnr};

    fn scene(seed: u64) -> ImageBuffer {
        generate_scene(SceneKind::Textured, 256, 192, seed).unwrap()
    }

    #[test]
    fn lossless_round_trip() {
        for seed in 0..3 {
            let img = scene(seed);
            let p = WatermarkPayload::random(64, seed + 10).unwrap();
            let marked = dct_embed(&img, &p, &DctParams::default()).unwrap();
            let d = dct_detect(&marked, 64, seed + 10).unwrap();
            assert_eq!(d.bits, p.bits());
            assert_eq!(d.confidence, 1.0);
            assert!(psnr(&img, &marked).unwrap() >= 35.0);
        }
    }

    #[test]
    fn saturated_image_still_round_trips() {
        let img = ImageBuffer::filled(64, 64, ChannelLayout::Rgb8, 252).unwrap();
        let p = WatermarkPayload::random(16, 3).unwrap();
        let marked = dct_embed(&img, &p, &DctParams::default()).unwrap();
        assert_eq!(dct_detect(&marked, 16, 3).unwrap().bits, p.bits());
    }

    #[test]
    fn survives_moderate_jpeg() {
        let img = scene(5);
        let p = WatermarkPayload::random(64, 77).unwrap();
        let marked = dct_embed(&img, &p, &DctParams::default()).unwrap();
        let jpeg = decode_image(&encode_jpeg(&marked, 75).unwrap()).unwrap();
        let d = dct_detect(&jpeg, 64, 77).unwrap();
        assert!(bit_error_rate(p.bits(), &d.bits) < 0.1);
    }

    #[test]
    fn downscale_boundary_is_measurable() {
        let img = scene(6);
        let p = WatermarkPayload::random(32, 8).unwrap();
        let marked = dct_embed(&img, &p, &DctParams::default()).unwrap();
        let half = resize(&marked, 128, 96).unwrap();
        let back = resize(
            &decode_image(&encode_jpeg(&half, 75).unwrap()).unwrap(),
            256,
            192,
        )
        .unwrap();
        let ber = bit_error_rate(p.bits(), &dct_detect(&back, 32, 8).unwrap().bits);
        assert!((0.0..=1.0).contains(&ber));
    }

    #[test]
    fn errors() {
        let tiny = ImageBuffer::filled(7, 20, ChannelLayout::Gray8, 9).unwrap();
        let p = WatermarkPayload::random(1, 1).unwrap();
        assert!(matches!(
            dct_embed(&tiny, &p, &DctParams::default()),
            Err(Error::ImageTooSmall { .. })
        ));
        let small = ImageBuffer::filled(16, 16, ChannelLayout::Gray8, 9).unwrap();
        let p = WatermarkPayload::random(5, 1).unwrap();
        assert!(matches!(
            dct_embed(&small, &p, &DctParams::default()),
            Err(Error::CapacityExceeded {
                needed: 5,
                capacity: 4
            })
        ));
    }
}
