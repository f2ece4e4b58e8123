use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::apply::{content_digest, transform_metadata, UploadContext};
use super::profile::{ResolutionClass, SNChannelProfile, ORIGINAL_QUALITY};
use crate::corpus::calibration_corpus;
use crate::diff::{compression_ratio, MetadataMap};
use crate::error::{Error, Result};
use crate::image::{encode_jpeg, encode_jpeg_with_segments, resize, ImageBuffer, RawSegment};

pub const MIN_QUALITY: u8 = 30;
pub const MAX_QUALITY: u8 = 100;
/// Corpus the built-in qualities were calibrated on.
pub const CALIBRATION_PER_CLASS: usize = 3;
pub const CALIBRATION_SEED: u64 = 7;

/// Outcome of calibrating one resolution class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCalibration {
    pub sn_id: String,
    pub class: ResolutionClass,
    /// `None` for pass-through profiles.
    pub quality: Option<u8>,
    pub target: f64,
    /// Mean compression achieved on the corpus.
    pub achieved: f64,
    pub pinned: bool,
}

/// One corpus image prepared for repeated encoding.
struct Prepared {
    original_size: u64,
    resized: ImageBuffer,
    segments: Vec<RawSegment>,
}

fn prepare(profile: &SNChannelProfile, img: &ImageBuffer) -> Result<Prepared> {
    let original_size = match img.source_bytes() {
        Some(b) => b.len() as u64,
        None => encode_jpeg(img, ORIGINAL_QUALITY)?.len() as u64,
    };
    let (w, h) = profile.output_dimensions(img.dimensions());
    let content = content_digest(img);
    let ctx = UploadContext::new("calibration", 0);
    let meta = transform_metadata(&MetadataMap::from_image(img), profile, &content, &ctx);
    Ok(Prepared {
        original_size,
        resized: resize(img, w, h)?,
        segments: meta.to_jpeg_segments(),
    })
}

fn mean_ratio(prepared: &[Prepared], quality: u8) -> Result<f64> {
    let ratios = prepared
        .par_iter()
        .map(|p| {
            let size = encode_jpeg_with_segments(&p.resized, quality, &p.segments)?.len() as u64;
            compression_ratio(p.original_size, size)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}

/// Mean compression a profile achieves at `quality` on `corpus`.
pub fn measure_compression(
    profile: &SNChannelProfile,
    quality: u8,
    corpus: &[ImageBuffer],
) -> Result<f64> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let prepared = corpus
        .iter()
        .map(|img| prepare(profile, img))
        .collect::<Result<Vec<_>>>()?;
    mean_ratio(&prepared, quality)
}

/// Picks the quality whose mean compression on `corpus` is closest to the
/// profile's target for `class`.
///
/// File size grows with quality, so the search bisects for the lowest
/// quality that does not exceed the target and then compares it with its
/// lower neighbour. Pinned and pass-through classes are measured, not
/// searched.
pub fn calibrate_class(
    profile: &SNChannelProfile,
    class: ResolutionClass,
    corpus: &[ImageBuffer],
) -> Result<ClassCalibration> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let target = profile.target_compression.get(class);
    let result = |quality, achieved, pinned| ClassCalibration {
        sn_id: profile.sn_id.clone(),
        class,
        quality,
        target,
        achieved,
        pinned,
    };
    if profile.passthrough {
        return Ok(result(None, 0.0, false));
    }
    let prepared = corpus
        .iter()
        .map(|img| prepare(profile, img))
        .collect::<Result<Vec<_>>>()?;
    if let Some(q) = profile.pinned_quality.get(class) {
        return Ok(result(Some(q), mean_ratio(&prepared, q)?, true));
    }
    let mut memo: BTreeMap<u8, f64> = BTreeMap::new();
    let mut ratio = |q: u8| -> Result<f64> {
        if let Some(&r) = memo.get(&q) {
            return Ok(r);
        }
        let r = mean_ratio(&prepared, q)?;
        memo.insert(q, r);
        Ok(r)
    };
    // smallest q in [lo, hi] with ratio(q) <= target, or MAX_QUALITY
    let (mut lo, mut hi) = (MIN_QUALITY, MAX_QUALITY);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if ratio(mid)? <= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let mut best = (lo, ratio(lo)?);
    if lo > MIN_QUALITY {
        let below = ratio(lo - 1)?;
        if (below - target).abs() < (best.1 - target).abs() {
            best = (lo - 1, below);
        }
    }
    Ok(result(Some(best.0), best.1, false))
}

/// Calibrates the class of `corpus` (taken from its first image) and
/// returns the updated profile.
pub fn calibrate_quality(
    profile: &SNChannelProfile,
    corpus: &[ImageBuffer],
) -> Result<SNChannelProfile> {
    let first = corpus.first().ok_or(Error::EmptyCorpus)?;
    let class = profile.resolution_class(first.dimensions());
    if let Some(odd) = corpus
        .iter()
        .find(|i| profile.resolution_class(i.dimensions()) != class)
    {
        return Err(Error::InvalidParameter(format!(
            "corpus mixes resolution classes: {:?} is not {}",
            odd.dimensions(),
            class.as_str()
        )));
    }
    let cal = calibrate_class(profile, class, corpus)?;
    let mut out = profile.clone();
    if !cal.pinned {
        out.jpeg_quality.set(class, cal.quality);
    }
    Ok(out)
}

/// Input size representative of each class for a profile.
pub fn class_dimensions(profile: &SNChannelProfile, class: ResolutionClass) -> (usize, usize) {
    match class {
        ResolutionClass::Standard => profile.default_resolution,
        ResolutionClass::Large => (4128, 2322),
        ResolutionClass::Small => (640, 480),
    }
}

/// Calibrates every class of every profile on synthetic originals
/// (`per_class` images per class and size). Returns updated profiles and
/// the per-class report.
pub fn calibrate_all(
    profiles: &[SNChannelProfile],
    per_class: usize,
    seed: u64,
) -> Result<(Vec<SNChannelProfile>, Vec<ClassCalibration>)> {
    let mut corpora: BTreeMap<(usize, usize), Vec<ImageBuffer>> = BTreeMap::new();
    let mut updated = Vec::with_capacity(profiles.len());
    let mut report = Vec::new();
    for profile in profiles {
        let mut p = profile.clone();
        for class in ResolutionClass::ALL {
            let dims = class_dimensions(profile, class);
            if let std::collections::btree_map::Entry::Vacant(e) = corpora.entry(dims) {
                e.insert(calibration_corpus(dims, per_class, seed)?);
            }
            let cal = calibrate_class(profile, class, &corpora[&dims])?;
            if !cal.pinned && !profile.passthrough {
                p.jpeg_quality.set(class, cal.quality);
            }
            report.push(cal);
        }
        updated.push(p);
    }
    Ok((updated, report))
}
