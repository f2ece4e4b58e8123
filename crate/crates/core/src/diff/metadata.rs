use serde::{Deserialize, Serialize};

use super::exif::{self, EXIF_HEADER, THUMBNAIL_KEY};
use super::iptc::{self, PHOTOSHOP_HEADER};
use crate::image::{ImageBuffer, RawSegment, SegmentKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Namespace {
    Exif,
    #[serde(rename = "IPTC")]
    Iptc,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetadataEntry {
    pub namespace: Namespace,
    pub key: String,
    pub value: Vec<u8>,
}

/// Coarse grouping of Exif keys, used by channel metadata policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExifCategory {
    DateTime,
    CameraSettings,
    Description,
    Copyright,
    Thumbnail,
    Gps,
    /// Layout fields such as orientation, resolution and colour space.
    Structure,
    Other,
}

pub fn exif_category(key: &str) -> ExifCategory {
    let (ifd, name) = key.split_once('.').unwrap_or(("", key));
    match (ifd, name) {
        ("GPS", _) => ExifCategory::Gps,
        ("IFD1", _) => ExifCategory::Thumbnail,
        ("Interop", _) => ExifCategory::Structure,
        (
            _,
            "DateTime"
            | "DateTimeOriginal"
            | "DateTimeDigitized"
            | "SubSecTime"
            | "SubSecTimeOriginal"
            | "SubSecTimeDigitized",
        ) => ExifCategory::DateTime,
        (
            _,
            "Make"
            | "Model"
            | "ExposureTime"
            | "FNumber"
            | "ExposureProgram"
            | "ISOSpeedRatings"
            | "ShutterSpeedValue"
            | "ApertureValue"
            | "BrightnessValue"
            | "ExposureBiasValue"
            | "MeteringMode"
            | "Flash"
            | "FocalLength"
            | "MakerNote"
            | "SensingMethod"
            | "ExposureMode"
            | "WhiteBalance"
            | "FocalLengthIn35mmFilm"
            | "SceneCaptureType"
            | "LensMake"
            | "LensModel",
        ) => ExifCategory::CameraSettings,
        (_, "ImageDescription" | "UserComment" | "Software" | "ImageUniqueID") => {
            ExifCategory::Description
        }
        (_, "Copyright" | "Artist") => ExifCategory::Copyright,
        (
            _,
            "Orientation"
            | "XResolution"
            | "YResolution"
            | "ResolutionUnit"
            | "YCbCrPositioning"
            | "ExifVersion"
            | "FlashpixVersion"
            | "ColorSpace"
            | "ComponentsConfiguration"
            | "PixelXDimension"
            | "PixelYDimension",
        ) => ExifCategory::Structure,
        _ => ExifCategory::Other,
    }
}

/// Ordered metadata entries, unique by `(namespace, key)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetadataMap {
    entries: Vec<MetadataEntry>,
}

impl MetadataMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces in place, keeping the original position.
    pub fn insert(&mut self, namespace: Namespace, key: impl Into<String>, value: Vec<u8>) {
        let key = key.into();
        match self
            .entries
            .iter_mut()
            .find(|e| e.namespace == namespace && e.key == key)
        {
            Some(e) => e.value = value,
            None => self.entries.push(MetadataEntry {
                namespace,
                key,
                value,
            }),
        }
    }

    pub fn get(&self, namespace: Namespace, key: &str) -> Option<&[u8]> {
        self.entries
            .iter()
            .find(|e| e.namespace == namespace && e.key == key)
            .map(|e| e.value.as_slice())
    }

    pub fn contains(&self, namespace: Namespace, key: &str) -> bool {
        self.get(namespace, key).is_some()
    }

    pub fn remove(&mut self, namespace: Namespace, key: &str) -> Option<Vec<u8>> {
        let i = self
            .entries
            .iter()
            .position(|e| e.namespace == namespace && e.key == key)?;
        Some(self.entries.remove(i).value)
    }

    pub fn retain(&mut self, f: impl FnMut(&MetadataEntry) -> bool) {
        self.entries.retain(f);
    }

    pub fn iter(&self) -> impl Iterator<Item = &MetadataEntry> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// NUL-terminated ASCII Exif entry.
    pub fn set_exif_ascii(&mut self, key: &str, text: &str) {
        let mut p = text.as_bytes().to_vec();
        p.push(0);
        self.insert(
            Namespace::Exif,
            key,
            exif::encode_value(exif::TYPE_ASCII, p.len() as u32, &p),
        );
    }

    pub fn set_exif_short(&mut self, key: &str, values: &[u16]) {
        let p: Vec<u8> = values.iter().flat_map(|v| v.to_be_bytes()).collect();
        self.insert(
            Namespace::Exif,
            key,
            exif::encode_value(exif::TYPE_SHORT, values.len() as u32, &p),
        );
    }

    pub fn set_exif_rational(&mut self, key: &str, values: &[(u32, u32)]) {
        let p: Vec<u8> = values
            .iter()
            .flat_map(|(n, d)| [n.to_be_bytes(), d.to_be_bytes()].concat())
            .collect();
        self.insert(
            Namespace::Exif,
            key,
            exif::encode_value(exif::TYPE_RATIONAL, values.len() as u32, &p),
        );
    }

    pub fn set_exif_undefined(&mut self, key: &str, bytes: &[u8]) {
        self.insert(
            Namespace::Exif,
            key,
            exif::encode_value(exif::TYPE_UNDEFINED, bytes.len() as u32, bytes),
        );
    }

    pub fn set_thumbnail(&mut self, jpeg: Vec<u8>) {
        self.insert(Namespace::Exif, THUMBNAIL_KEY, jpeg);
    }

    /// Text of an ASCII Exif entry, without the terminator.
    pub fn exif_ascii(&self, key: &str) -> Option<String> {
        let (typ, _, payload) = exif::decode_value(self.get(Namespace::Exif, key)?)?;
        (typ == exif::TYPE_ASCII).then(|| {
            String::from_utf8_lossy(payload.strip_suffix(&[0]).unwrap_or(payload)).into_owned()
        })
    }

    /// Builds a map from the metadata segments of a decoded image.
    ///
    /// Exif and IPTC structures that fail to parse are kept verbatim under
    /// `Other`, so nothing is silently dropped.
    pub fn from_segments(segments: &[RawSegment]) -> Self {
        let mut map = MetadataMap::new();
        let mut counters: Vec<(String, usize)> = Vec::new();
        let mut other_key = |label: String| -> String {
            let n = match counters.iter_mut().find(|(l, _)| *l == label) {
                Some((_, n)) => {
                    *n += 1;
                    *n
                }
                None => {
                    counters.push((label.clone(), 0));
                    0
                }
            };
            format!("{label}#{n}")
        };
        for seg in segments {
            match seg.kind {
                SegmentKind::JpegMarker(0xE0) if seg.data.starts_with(b"JFIF\0") => {}
                SegmentKind::JpegMarker(0xE1) if seg.data.starts_with(EXIF_HEADER) => {
                    match exif::parse_tiff(&seg.data[EXIF_HEADER.len()..]) {
                        Ok(fields) => {
                            for (key, value) in fields {
                                let ns = if key.contains(".Tag0x") {
                                    Namespace::Other
                                } else {
                                    Namespace::Exif
                                };
                                map.insert(ns, key, value);
                            }
                        }
                        Err(_) => {
                            map.insert(Namespace::Other, other_key("APP1".into()), seg.data.clone())
                        }
                    }
                }
                SegmentKind::JpegMarker(0xED) if seg.data.starts_with(PHOTOSHOP_HEADER) => {
                    match iptc::parse_app13(&seg.data) {
                        Ok(parsed) => {
                            for (key, value) in parsed.iptc {
                                map.insert(Namespace::Iptc, key, value);
                            }
                            for (key, value) in parsed.other {
                                map.insert(Namespace::Other, key, value);
                            }
                        }
                        Err(_) => map.insert(
                            Namespace::Other,
                            other_key("APP13".into()),
                            seg.data.clone(),
                        ),
                    }
                }
                SegmentKind::JpegMarker(0xFE) => {
                    map.insert(Namespace::Other, other_key("COM".into()), seg.data.clone())
                }
                SegmentKind::JpegMarker(m) => map.insert(
                    Namespace::Other,
                    other_key(format!("APP{}", m.wrapping_sub(0xE0))),
                    seg.data.clone(),
                ),
                SegmentKind::PngChunk(t) => map.insert(
                    Namespace::Other,
                    other_key(String::from_utf8_lossy(&t).into_owned()),
                    seg.data.clone(),
                ),
            }
        }
        map
    }

    pub fn from_image(img: &ImageBuffer) -> Self {
        Self::from_segments(img.segments())
    }

    /// Serialises the map as JPEG segments: Exif APP1, verbatim APPn,
    /// Photoshop APP13, then comments. PNG chunk entries are not representable
    /// in JPEG and are skipped.
    pub fn to_jpeg_segments(&self) -> Vec<RawSegment> {
        let mut out = Vec::new();
        let tiff_entries = self
            .entries
            .iter()
            .filter(|e| {
                e.namespace != Namespace::Iptc
                    && (e.key == THUMBNAIL_KEY || exif::parse_key(&e.key).is_some())
            })
            .map(|e| (e.key.as_str(), e.value.as_slice()));
        if let Some(tiff) = exif::write_tiff(tiff_entries) {
            let mut data = EXIF_HEADER.to_vec();
            data.extend_from_slice(&tiff);
            out.push(RawSegment {
                kind: SegmentKind::JpegMarker(0xE1),
                data,
            });
        }
        let mut comments = Vec::new();
        for e in self
            .entries
            .iter()
            .filter(|e| e.namespace == Namespace::Other)
        {
            let Some((label, _)) = e.key.split_once('#') else {
                continue;
            };
            if label == "COM" {
                comments.push(RawSegment {
                    kind: SegmentKind::JpegMarker(0xFE),
                    data: e.value.clone(),
                });
            } else if let Some(n) = label
                .strip_prefix("APP")
                .and_then(|n| n.parse::<u8>().ok())
                .filter(|&n| n < 16)
            {
                out.push(RawSegment {
                    kind: SegmentKind::JpegMarker(0xE0 + n),
                    data: e.value.clone(),
                });
            }
        }
        let app13_entries = self
            .entries
            .iter()
            .filter(|e| {
                e.namespace == Namespace::Iptc
                    || (e.namespace == Namespace::Other && e.key.starts_with("8BIM."))
            })
            .filter(|e| iptc::is_app13_key(&e.key))
            .map(|e| (e.key.as_str(), e.value.as_slice()));
        if let Some(data) = iptc::write_app13(app13_entries) {
            out.push(RawSegment {
                kind: SegmentKind::JpegMarker(0xED),
                data,
            });
        }
        out.extend(comments);
        out
    }
}

impl<'a> IntoIterator for &'a MetadataMap {
    type Item = &'a MetadataEntry;
    type IntoIter = std::slice::Iter<'a, MetadataEntry>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{decode_image, encode_jpeg_with_segments, ChannelLayout};

    fn sample() -> MetadataMap {
        let mut m = MetadataMap::new();
        m.set_exif_ascii("IFD0.Make", "SynthCam");
        m.set_exif_ascii("IFD0.Model", "S1");
        m.set_exif_short("IFD0.Orientation", &[1]);
        m.set_exif_ascii("Exif.DateTimeOriginal", "2016:10:28 08:54:47");
        m.set_exif_rational("Exif.FNumber", &[(18, 10)]);
        m.set_exif_rational("GPS.GPSLatitude", &[(44, 1), (30, 1), (0, 1)]);
        m.set_thumbnail(vec![0xFF, 0xD8, 0xFF, 0xD9]);
        m.insert(Namespace::Iptc, "Caption-Abstract", b"beach".to_vec());
        m.insert(Namespace::Other, "COM#0", b"hello".to_vec());
        m.insert(Namespace::Other, "APP2#0", b"ICC_PROFILE\0stub".to_vec());
        m
    }

    #[test]
    fn insert_replaces_in_place() {
        let mut m = MetadataMap::new();
        m.insert(Namespace::Exif, "a", vec![1]);
        m.insert(Namespace::Iptc, "a", vec![2]);
        m.insert(Namespace::Exif, "a", vec![3]);
        assert_eq!(m.len(), 2);
        assert_eq!(m.get(Namespace::Exif, "a"), Some(&[3u8][..]));
        assert_eq!(m.remove(Namespace::Iptc, "a"), Some(vec![2]));
    }

    #[test]
    fn jpeg_round_trip_preserves_every_entry() {
        let m = sample();
        let img = ImageBuffer::filled(16, 16, ChannelLayout::Rgb8, 90).unwrap();
        let bytes = encode_jpeg_with_segments(&img, 90, &m.to_jpeg_segments()).unwrap();
        let back = MetadataMap::from_image(&decode_image(&bytes).unwrap());
        let mut a: Vec<_> = m
            .iter()
            .map(|e| (e.namespace, e.key.clone(), e.value.clone()))
            .collect();
        let mut b: Vec<_> = back
            .iter()
            .map(|e| (e.namespace, e.key.clone(), e.value.clone()))
            .collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert_eq!(back.exif_ascii("IFD0.Make").as_deref(), Some("SynthCam"));
    }

    #[test]
    fn unparseable_exif_is_kept_verbatim() {
        let seg = RawSegment {
            kind: SegmentKind::JpegMarker(0xE1),
            data: b"Exif\0\0garbage".to_vec(),
        };
        let m = MetadataMap::from_segments(&[seg]);
        assert_eq!(
            m.get(Namespace::Other, "APP1#0"),
            Some(&b"Exif\0\0garbage"[..])
        );
    }

    #[test]
    fn categories() {
        assert_eq!(exif_category("GPS.GPSLatitude"), ExifCategory::Gps);
        assert_eq!(exif_category(THUMBNAIL_KEY), ExifCategory::Thumbnail);
        assert_eq!(exif_category("IFD0.Make"), ExifCategory::CameraSettings);
        assert_eq!(
            exif_category("Exif.DateTimeOriginal"),
            ExifCategory::DateTime
        );
        assert_eq!(exif_category("IFD0.Copyright"), ExifCategory::Copyright);
        assert_eq!(
            exif_category("IFD0.ImageDescription"),
            ExifCategory::Description
        );
    }
}
