use serde::{Serialize, Serializer};
use sha1::{Digest, Sha1};

use super::metadata::{MetadataMap, Namespace};
use super::names::NameClassifier;
use crate::error::{Error, Result};
use crate::image::{decode_image, ImageBuffer};

pub fn sha1_hex(bytes: &[u8]) -> String {
    hex::encode(Sha1::digest(bytes))
}

pub fn full_compare(a: &[u8], b: &[u8]) -> bool {
    Sha1::digest(a) == Sha1::digest(b)
}

/// Outcome of a sample-wise comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContentDiff {
    Count(u64),
    DimensionsDiffer,
}

impl ContentDiff {
    pub fn is_identical(self) -> bool {
        self == ContentDiff::Count(0)
    }
}

impl Serialize for ContentDiff {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ContentDiff::Count(n) => s.serialize_u64(*n),
            ContentDiff::DimensionsDiffer => s.serialize_str("dimensions_differ"),
        }
    }
}

/// Counts decoded samples that differ. Gray and RGB images are compared in
/// RGB.
pub fn content_compare(a: &ImageBuffer, b: &ImageBuffer) -> ContentDiff {
    if a.dimensions() != b.dimensions() {
        return ContentDiff::DimensionsDiffer;
    }
    let count = |x: &[u8], y: &[u8]| x.iter().zip(y).filter(|(p, q)| p != q).count() as u64;
    if a.layout() == b.layout() {
        ContentDiff::Count(count(a.pixels(), b.pixels()))
    } else {
        ContentDiff::Count(count(a.to_rgb().pixels(), b.to_rgb().pixels()))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MetadataDiff {
    pub added: Vec<(Namespace, String)>,
    pub removed: Vec<(Namespace, String)>,
    pub changed: Vec<(Namespace, String)>,
}

impl MetadataDiff {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty() && self.changed.is_empty()
    }
}

/// Key-set difference from `a` to `b`. `added` follows the order of `b`,
/// the other two the order of `a`.
pub fn metadata_compare(a: &MetadataMap, b: &MetadataMap) -> MetadataDiff {
    let mut diff = MetadataDiff::default();
    for e in a {
        match b.get(e.namespace, &e.key) {
            None => diff.removed.push((e.namespace, e.key.clone())),
            Some(v) if v != e.value.as_slice() => diff.changed.push((e.namespace, e.key.clone())),
            Some(_) => {}
        }
    }
    for e in b {
        if !a.contains(e.namespace, &e.key) {
            diff.added.push((e.namespace, e.key.clone()));
        }
    }
    diff
}

/// Size reduction in percent; negative when the processed file is larger.
pub fn compression_ratio(original_size: u64, processed_size: u64) -> Result<f64> {
    if original_size == 0 {
        return Err(Error::ZeroOriginal);
    }
    Ok((1.0 - processed_size as f64 / original_size as f64) * 100.0)
}

/// All four comparisons between an original and a processed file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffReport {
    pub name_a: String,
    pub name_b: String,
    pub name_equal: bool,
    pub name_label_b: String,
    pub sha1_a: String,
    pub sha1_b: String,
    pub digest_equal: bool,
    pub content_diff_count: ContentDiff,
    pub size_a: u64,
    pub size_b: u64,
    pub compression_ratio: f64,
    pub metadata_added: Vec<(Namespace, String)>,
    pub metadata_removed: Vec<(Namespace, String)>,
    pub metadata_changed: Vec<(Namespace, String)>,
}

/// Compares two encoded files. Names are compared as given.
pub fn diff_files(
    name_a: &str,
    a: &[u8],
    name_b: &str,
    b: &[u8],
    classifier: &NameClassifier,
) -> Result<DiffReport> {
    let digest_equal = full_compare(a, b);
    let img_a = decode_image(a)?;
    let img_b = decode_image(b)?;
    let meta = metadata_compare(
        &MetadataMap::from_image(&img_a),
        &MetadataMap::from_image(&img_b),
    );
    Ok(DiffReport {
        name_a: name_a.to_string(),
        name_b: name_b.to_string(),
        name_equal: name_a == name_b,
        name_label_b: classifier.classify(name_b).to_string(),
        sha1_a: sha1_hex(a),
        sha1_b: sha1_hex(b),
        digest_equal,
        content_diff_count: content_compare(&img_a, &img_b),
        size_a: a.len() as u64,
        size_b: b.len() as u64,
        compression_ratio: compression_ratio(a.len() as u64, b.len() as u64)?,
        metadata_added: meta.added,
        metadata_removed: meta.removed,
        metadata_changed: meta.changed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{encode_jpeg, generate_scene, SceneKind};
    use proptest::prelude::*;

    #[test]
    fn sha1_reference_vectors() {
        assert_eq!(sha1_hex(b""), "da39a3ee5e6b4b0d3255bfef95601890afd80709");
        assert_eq!(sha1_hex(b"abc"), "a9993e364706816aba3e25717850c26c9cd0d89d");
    }

    #[test]
    fn one_bit_flip_changes_digest() {
        let a = vec![0u8; 100];
        let mut b = a.clone();
        b[50] ^= 1;
        assert!(full_compare(&a, &a));
        assert!(!full_compare(&a, &b));
    }

    #[test]
    fn content_compare_cases() {
        let img = generate_scene(SceneKind::Textured, 64, 48, 3).unwrap();
        assert_eq!(content_compare(&img, &img), ContentDiff::Count(0));
        let lossy = decode_image(&encode_jpeg(&img, 50).unwrap()).unwrap();
        assert!(matches!(content_compare(&img, &lossy), ContentDiff::Count(n) if n > 0));
        let other = generate_scene(SceneKind::Flat, 128, 72, 3).unwrap();
        assert_eq!(content_compare(&img, &other), ContentDiff::DimensionsDiffer);
    }

    #[test]
    fn metadata_diff_cases() {
        let mut a = MetadataMap::new();
        a.set_exif_ascii("IFD0.Make", "SynthCam");
        a.set_thumbnail(vec![1, 2, 3]);
        a.set_exif_rational("IFD1.XResolution", &[(72, 1)]);
        assert!(metadata_compare(&a, &a).is_empty());

        let mut tumblr = a.clone();
        tumblr.retain(|e| !e.key.starts_with("IFD1."));
        let d = metadata_compare(&a, &tumblr);
        assert_eq!(
            d.removed,
            vec![
                (Namespace::Exif, "IFD1.ThumbnailData".to_string()),
                (Namespace::Exif, "IFD1.XResolution".to_string())
            ]
        );
        assert!(d.added.is_empty() && d.changed.is_empty());

        let mut fb = a.clone();
        fb.insert(Namespace::Iptc, "SpecialInstructions", b"FBMD".to_vec());
        fb.set_exif_ascii("IFD0.Make", "Other");
        let d = metadata_compare(&a, &fb);
        assert_eq!(
            d.added,
            vec![(Namespace::Iptc, "SpecialInstructions".to_string())]
        );
        assert_eq!(d.changed, vec![(Namespace::Exif, "IFD0.Make".to_string())]);
    }

    #[test]
    fn compression_examples() {
        assert_eq!(compression_ratio(1000, 1000).unwrap(), 0.0);
        assert!((compression_ratio(1000, 1465).unwrap() + 46.5).abs() < 1e-9);
        assert!(matches!(compression_ratio(0, 10), Err(Error::ZeroOriginal)));
    }

    #[test]
    fn identical_files_report() {
        let img = generate_scene(SceneKind::Gradient, 32, 32, 1).unwrap();
        let bytes = encode_jpeg(&img, 90).unwrap();
        let r = diff_files("a.jpg", &bytes, "a.jpg", &bytes, &NameClassifier::default()).unwrap();
        assert!(r.name_equal && r.digest_equal);
        assert_eq!(r.content_diff_count, ContentDiff::Count(0));
        assert!(
            r.metadata_added.is_empty()
                && r.metadata_removed.is_empty()
                && r.metadata_changed.is_empty()
        );
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["content_diff_count"], 0);
        assert_eq!(json["compression_ratio"], 0.0);
    }

    proptest! {
        #[test]
        fn ratio_sign_flips_on_swap(orig in 1u64..1_000_000, r in -90.0f64..90.0) {
            let processed = ((orig as f64) * (1.0 - r / 100.0)).round().max(1.0) as u64;
            let fwd = compression_ratio(orig, processed).unwrap();
            let back = compression_ratio(processed, orig).unwrap();
            prop_assert!(fwd == 0.0 && back == 0.0 || fwd.signum() == -back.signum());
            // (1 - p/o) and (1 - o/p) recombine exactly
            let lhs = (1.0 - fwd / 100.0) * (1.0 - back / 100.0);
            prop_assert!((lhs - 1.0).abs() < 1e-9);
        }

        #[test]
        fn full_compare_reflexive(bytes in prop::collection::vec(any::<u8>(), 0..256)) {
            prop_assert!(full_compare(&bytes, &bytes));
        }
    }
}
