//! Minimal TIFF/Exif reader and writer.
//!
//! Every IFD entry becomes one metadata key `"<ifd>.<TagName>"` whose value
//! is `type (u16 BE) | count (u32 BE) | payload`, with multi-byte payload
//! components normalised to big-endian. Equal values therefore compare equal
//! regardless of the byte order of the file they came from. The IFD1
//! thumbnail is surfaced as raw JPEG bytes under `IFD1.ThumbnailData`.

use std::collections::HashSet;

pub const EXIF_HEADER: &[u8; 6] = b"Exif\0\0";
pub const THUMBNAIL_KEY: &str = "IFD1.ThumbnailData";

const TAG_EXIF_IFD: u16 = 0x8769;
const TAG_GPS_IFD: u16 = 0x8825;
const TAG_INTEROP_IFD: u16 = 0xA005;
const TAG_THUMB_OFFSET: u16 = 0x0201;
const TAG_THUMB_LENGTH: u16 = 0x0202;

pub const TYPE_BYTE: u16 = 1;
pub const TYPE_ASCII: u16 = 2;
pub const TYPE_SHORT: u16 = 3;
pub const TYPE_LONG: u16 = 4;
pub const TYPE_RATIONAL: u16 = 5;
pub const TYPE_UNDEFINED: u16 = 7;
pub const TYPE_SRATIONAL: u16 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ifd {
    Ifd0,
    Exif,
    Gps,
    Interop,
    Ifd1,
}

impl Ifd {
    pub fn prefix(self) -> &'static str {
        match self {
            Ifd::Ifd0 => "IFD0",
            Ifd::Exif => "Exif",
            Ifd::Gps => "GPS",
            Ifd::Interop => "Interop",
            Ifd::Ifd1 => "IFD1",
        }
    }

    fn from_prefix(p: &str) -> Option<Ifd> {
        [Ifd::Ifd0, Ifd::Exif, Ifd::Gps, Ifd::Interop, Ifd::Ifd1]
            .into_iter()
            .find(|i| i.prefix() == p)
    }
}

const TAG_NAMES: &[(Ifd, u16, &str)] = &[
    (Ifd::Ifd0, 0x010E, "ImageDescription"),
    (Ifd::Ifd0, 0x010F, "Make"),
    (Ifd::Ifd0, 0x0110, "Model"),
    (Ifd::Ifd0, 0x0112, "Orientation"),
    (Ifd::Ifd0, 0x011A, "XResolution"),
    (Ifd::Ifd0, 0x011B, "YResolution"),
    (Ifd::Ifd0, 0x0128, "ResolutionUnit"),
    (Ifd::Ifd0, 0x0131, "Software"),
    (Ifd::Ifd0, 0x0132, "DateTime"),
    (Ifd::Ifd0, 0x013B, "Artist"),
    (Ifd::Ifd0, 0x0213, "YCbCrPositioning"),
    (Ifd::Ifd0, 0x8298, "Copyright"),
    (Ifd::Exif, 0x829A, "ExposureTime"),
    (Ifd::Exif, 0x829D, "FNumber"),
    (Ifd::Exif, 0x8822, "ExposureProgram"),
    (Ifd::Exif, 0x8827, "ISOSpeedRatings"),
    (Ifd::Exif, 0x9000, "ExifVersion"),
    (Ifd::Exif, 0x9003, "DateTimeOriginal"),
    (Ifd::Exif, 0x9004, "DateTimeDigitized"),
    (Ifd::Exif, 0x9101, "ComponentsConfiguration"),
    (Ifd::Exif, 0x9201, "ShutterSpeedValue"),
    (Ifd::Exif, 0x9202, "ApertureValue"),
    (Ifd::Exif, 0x9203, "BrightnessValue"),
    (Ifd::Exif, 0x9204, "ExposureBiasValue"),
    (Ifd::Exif, 0x9207, "MeteringMode"),
    (Ifd::Exif, 0x9209, "Flash"),
    (Ifd::Exif, 0x920A, "FocalLength"),
    (Ifd::Exif, 0x927C, "MakerNote"),
    (Ifd::Exif, 0x9286, "UserComment"),
    (Ifd::Exif, 0x9290, "SubSecTime"),
    (Ifd::Exif, 0x9291, "SubSecTimeOriginal"),
    (Ifd::Exif, 0x9292, "SubSecTimeDigitized"),
    (Ifd::Exif, 0xA000, "FlashpixVersion"),
    (Ifd::Exif, 0xA001, "ColorSpace"),
    (Ifd::Exif, 0xA002, "PixelXDimension"),
    (Ifd::Exif, 0xA003, "PixelYDimension"),
    (Ifd::Exif, 0xA217, "SensingMethod"),
    (Ifd::Exif, 0xA402, "ExposureMode"),
    (Ifd::Exif, 0xA403, "WhiteBalance"),
    (Ifd::Exif, 0xA405, "FocalLengthIn35mmFilm"),
    (Ifd::Exif, 0xA406, "SceneCaptureType"),
    (Ifd::Exif, 0xA420, "ImageUniqueID"),
    (Ifd::Exif, 0xA433, "LensMake"),
    (Ifd::Exif, 0xA434, "LensModel"),
    (Ifd::Gps, 0x0000, "GPSVersionID"),
    (Ifd::Gps, 0x0001, "GPSLatitudeRef"),
    (Ifd::Gps, 0x0002, "GPSLatitude"),
    (Ifd::Gps, 0x0003, "GPSLongitudeRef"),
    (Ifd::Gps, 0x0004, "GPSLongitude"),
    (Ifd::Gps, 0x0005, "GPSAltitudeRef"),
    (Ifd::Gps, 0x0006, "GPSAltitude"),
    (Ifd::Gps, 0x0007, "GPSTimeStamp"),
    (Ifd::Gps, 0x001D, "GPSDateStamp"),
    (Ifd::Interop, 0x0001, "InteroperabilityIndex"),
    (Ifd::Interop, 0x0002, "InteroperabilityVersion"),
    (Ifd::Ifd1, 0x0103, "Compression"),
    (Ifd::Ifd1, 0x011A, "XResolution"),
    (Ifd::Ifd1, 0x011B, "YResolution"),
    (Ifd::Ifd1, 0x0128, "ResolutionUnit"),
];

pub fn tag_key(ifd: Ifd, tag: u16) -> String {
    match TAG_NAMES.iter().find(|(i, t, _)| *i == ifd && *t == tag) {
        Some((_, _, name)) => format!("{}.{name}", ifd.prefix()),
        None => format!("{}.Tag0x{tag:04X}", ifd.prefix()),
    }
}

/// Inverse of [`tag_key`]. `None` for keys that are not IFD entries.
pub fn parse_key(key: &str) -> Option<(Ifd, u16)> {
    let (prefix, name) = key.split_once('.')?;
    let ifd = Ifd::from_prefix(prefix)?;
    if let Some(hex) = name.strip_prefix("Tag0x") {
        return u16::from_str_radix(hex, 16).ok().map(|t| (ifd, t));
    }
    TAG_NAMES
        .iter()
        .find(|(i, _, n)| *i == ifd && *n == name)
        .map(|(_, t, _)| (ifd, *t))
}

fn type_size(typ: u16) -> Option<usize> {
    match typ {
        1 | 2 | 6 | 7 => Some(1),
        3 | 8 => Some(2),
        4 | 9 | 11 => Some(4),
        5 | 10 | 12 => Some(8),
        _ => None,
    }
}

/// Width of the byte-swapped unit within one component.
fn swap_unit(typ: u16) -> usize {
    match typ {
        5 | 10 => 4,
        t => type_size(t).unwrap_or(1),
    }
}

fn swap_units(data: &mut [u8], unit: usize) {
    if unit > 1 {
        data.chunks_exact_mut(unit).for_each(|c| c.reverse());
    }
}

/// Encodes an entry value in the canonical form described in the module docs.
pub fn encode_value(typ: u16, count: u32, big_endian_payload: &[u8]) -> Vec<u8> {
    let mut v = Vec::with_capacity(6 + big_endian_payload.len());
    v.extend_from_slice(&typ.to_be_bytes());
    v.extend_from_slice(&count.to_be_bytes());
    v.extend_from_slice(big_endian_payload);
    v
}

/// Splits a canonical value into `(type, count, big-endian payload)`.
pub fn decode_value(value: &[u8]) -> Option<(u16, u32, &[u8])> {
    if value.len() < 6 {
        return None;
    }
    let typ = u16::from_be_bytes([value[0], value[1]]);
    let count = u32::from_be_bytes(value[2..6].try_into().ok()?);
    let payload = &value[6..];
    if type_size(typ)? * count as usize != payload.len() {
        return None;
    }
    Some((typ, count, payload))
}

struct Reader<'a> {
    data: &'a [u8],
    big_endian: bool,
}

impl Reader<'_> {
    fn u16(&self, at: usize) -> Result<u16, String> {
        let b: [u8; 2] = self
            .data
            .get(at..at + 2)
            .ok_or_else(|| format!("u16 at {at} out of bounds"))?
            .try_into()
            .unwrap();
        Ok(if self.big_endian {
            u16::from_be_bytes(b)
        } else {
            u16::from_le_bytes(b)
        })
    }

    fn u32(&self, at: usize) -> Result<u32, String> {
        let b: [u8; 4] = self
            .data
            .get(at..at + 4)
            .ok_or_else(|| format!("u32 at {at} out of bounds"))?
            .try_into()
            .unwrap();
        Ok(if self.big_endian {
            u32::from_be_bytes(b)
        } else {
            u32::from_le_bytes(b)
        })
    }
}

/// Parses a TIFF structure (the part of an Exif APP1 after `Exif\0\0`).
pub fn parse_tiff(data: &[u8]) -> Result<Vec<(String, Vec<u8>)>, String> {
    let big_endian = match data.get(..2) {
        Some(b"MM") => true,
        Some(b"II") => false,
        _ => return Err("bad TIFF byte-order mark".into()),
    };
    let r = Reader { data, big_endian };
    if r.u16(2)? != 42 {
        return Err("bad TIFF magic".into());
    }
    let mut out = Vec::new();
    let mut visited = HashSet::new();
    let ifd0 = r.u32(4)? as usize;
    let next = parse_ifd(&r, ifd0, Ifd::Ifd0, &mut out, &mut visited)?;
    if next != 0 {
        parse_ifd(&r, next, Ifd::Ifd1, &mut out, &mut visited)?;
    }
    Ok(out)
}

fn parse_ifd(
    r: &Reader,
    offset: usize,
    ifd: Ifd,
    out: &mut Vec<(String, Vec<u8>)>,
    visited: &mut HashSet<usize>,
) -> Result<usize, String> {
    if !visited.insert(offset) {
        return Err(format!("IFD loop at offset {offset}"));
    }
    let n = r.u16(offset)? as usize;
    let mut thumb = (None, None);
    for i in 0..n {
        let at = offset + 2 + 12 * i;
        let tag = r.u16(at)?;
        let typ = r.u16(at + 2)?;
        let count = r.u32(at + 4)?;
        let Some(size) = type_size(typ) else { continue };
        let len = size
            .checked_mul(count as usize)
            .ok_or_else(|| "entry size overflow".to_string())?;
        let start = if len <= 4 {
            at + 8
        } else {
            r.u32(at + 8)? as usize
        };
        let raw = r
            .data
            .get(start..start + len)
            .ok_or_else(|| format!("entry 0x{tag:04X} data out of bounds"))?;
        match (ifd, tag) {
            (Ifd::Ifd0, TAG_EXIF_IFD) => {
                parse_ifd(r, r.u32(at + 8)? as usize, Ifd::Exif, out, visited)?;
                continue;
            }
            (Ifd::Ifd0, TAG_GPS_IFD) => {
                parse_ifd(r, r.u32(at + 8)? as usize, Ifd::Gps, out, visited)?;
                continue;
            }
            (Ifd::Exif, TAG_INTEROP_IFD) => {
                parse_ifd(r, r.u32(at + 8)? as usize, Ifd::Interop, out, visited)?;
                continue;
            }
            (Ifd::Ifd1, TAG_THUMB_OFFSET) => {
                thumb.0 = Some(r.u32(at + 8)? as usize);
                continue;
            }
            (Ifd::Ifd1, TAG_THUMB_LENGTH) => {
                thumb.1 = Some(if typ == TYPE_SHORT {
                    r.u16(at + 8)? as usize
                } else {
                    r.u32(at + 8)? as usize
                });
                continue;
            }
            _ => {}
        }
        let mut payload = raw.to_vec();
        if !r.big_endian {
            swap_units(&mut payload, swap_unit(typ));
        }
        out.push((tag_key(ifd, tag), encode_value(typ, count, &payload)));
    }
    if let (Some(off), Some(len)) = thumb {
        let bytes = r
            .data
            .get(off..off + len)
            .ok_or("thumbnail out of bounds")?;
        out.push((THUMBNAIL_KEY.to_string(), bytes.to_vec()));
    }
    r.u32(offset + 2 + 12 * n).map(|v| v as usize).or(Ok(0))
}

struct Entry {
    tag: u16,
    typ: u16,
    count: u32,
    /// Little-endian payload.
    data: Vec<u8>,
}

fn block_size(entries: &[Entry]) -> usize {
    2 + 12 * entries.len()
        + 4
        + entries
            .iter()
            .filter(|e| e.data.len() > 4)
            .map(|e| e.data.len().next_multiple_of(2))
            .sum::<usize>()
}

fn long(tag: u16, v: u32) -> Entry {
    Entry {
        tag,
        typ: TYPE_LONG,
        count: 1,
        data: v.to_le_bytes().to_vec(),
    }
}

/// Serialises keyed entries back into a little-endian TIFF structure.
///
/// Keys that do not name an IFD entry, and values not in canonical form,
/// are skipped. Returns `None` when nothing is left to write.
pub fn write_tiff<'a>(entries: impl IntoIterator<Item = (&'a str, &'a [u8])>) -> Option<Vec<u8>> {
    let mut ifds: [Vec<Entry>; 5] = Default::default();
    let mut thumbnail: Option<&[u8]> = None;
    for (key, value) in entries {
        if key == THUMBNAIL_KEY {
            thumbnail = Some(value);
            continue;
        }
        let Some((ifd, tag)) = parse_key(key) else {
            continue;
        };
        let Some((typ, count, payload)) = decode_value(value) else {
            continue;
        };
        let mut data = payload.to_vec();
        swap_units(&mut data, swap_unit(typ));
        ifds[ifd as usize].push(Entry {
            tag,
            typ,
            count,
            data,
        });
    }
    let [ref mut ifd0, ref mut exif, ref mut gps, ref mut interop, ref mut ifd1] = ifds;
    if thumbnail.is_some() {
        ifd1.push(long(TAG_THUMB_OFFSET, 0));
        ifd1.push(long(
            TAG_THUMB_LENGTH,
            thumbnail.map_or(0, |t| t.len() as u32),
        ));
    }
    if !interop.is_empty() {
        exif.push(long(TAG_INTEROP_IFD, 0));
    }
    if !exif.is_empty() {
        ifd0.push(long(TAG_EXIF_IFD, 0));
    }
    if !gps.is_empty() {
        ifd0.push(long(TAG_GPS_IFD, 0));
    }
    if ifd0.is_empty() && ifd1.is_empty() {
        return None;
    }
    for list in [&mut *ifd0, &mut *exif, &mut *gps, &mut *interop, &mut *ifd1] {
        list.sort_by_key(|e| e.tag);
    }

    // lay out: header, IFD0, Exif, GPS, Interop, IFD1, thumbnail
    let order = [&*ifd0, &*exif, &*gps, &*interop, &*ifd1];
    let mut offsets = [0usize; 5];
    let mut cursor = 8;
    for (i, list) in order.iter().enumerate() {
        if i == 0 || !list.is_empty() {
            offsets[i] = cursor;
            cursor += block_size(list);
        }
    }
    let thumb_offset = cursor;
    let patch = |list: &mut Vec<Entry>, tag: u16, v: usize| {
        if let Some(e) = list.iter_mut().find(|e| e.tag == tag) {
            e.data = (v as u32).to_le_bytes().to_vec();
        }
    };
    patch(ifd0, TAG_EXIF_IFD, offsets[1]);
    patch(ifd0, TAG_GPS_IFD, offsets[2]);
    patch(exif, TAG_INTEROP_IFD, offsets[3]);
    patch(ifd1, TAG_THUMB_OFFSET, thumb_offset);

    let mut out = Vec::with_capacity(thumb_offset + thumbnail.map_or(0, |t| t.len()));
    out.extend_from_slice(b"II");
    out.extend_from_slice(&42u16.to_le_bytes());
    out.extend_from_slice(&8u32.to_le_bytes());
    let lists = [&*ifd0, &*exif, &*gps, &*interop, &*ifd1];
    for (i, list) in lists.iter().enumerate() {
        if i != 0 && list.is_empty() {
            continue;
        }
        let next = if i == 0 && !ifd1.is_empty() {
            offsets[4]
        } else {
            0
        };
        write_block(&mut out, list, offsets[i], next);
    }
    if let Some(t) = thumbnail {
        out.extend_from_slice(t);
    }
    Some(out)
}

fn write_block(out: &mut Vec<u8>, entries: &[Entry], offset: usize, next: usize) {
    debug_assert_eq!(out.len(), offset);
    let mut overflow_at = offset + 2 + 12 * entries.len() + 4;
    let mut overflow = Vec::new();
    out.extend_from_slice(&(entries.len() as u16).to_le_bytes());
    for e in entries {
        out.extend_from_slice(&e.tag.to_le_bytes());
        out.extend_from_slice(&e.typ.to_le_bytes());
        out.extend_from_slice(&e.count.to_le_bytes());
        if e.data.len() <= 4 {
            let mut inline = [0u8; 4];
            inline[..e.data.len()].copy_from_slice(&e.data);
            out.extend_from_slice(&inline);
        } else {
            out.extend_from_slice(&(overflow_at as u32).to_le_bytes());
            overflow.extend_from_slice(&e.data);
            if e.data.len() % 2 == 1 {
                overflow.push(0);
            }
            overflow_at += e.data.len().next_multiple_of(2);
        }
    }
    out.extend_from_slice(&(next as u32).to_le_bytes());
    out.extend_from_slice(&overflow);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ascii(s: &str) -> Vec<u8> {
        let mut p = s.as_bytes().to_vec();
        p.push(0);
        encode_value(TYPE_ASCII, p.len() as u32, &p)
    }

    #[test]
    fn key_names_round_trip() {
        assert_eq!(tag_key(Ifd::Ifd0, 0x010F), "IFD0.Make");
        assert_eq!(parse_key("IFD0.Make"), Some((Ifd::Ifd0, 0x010F)));
        assert_eq!(tag_key(Ifd::Gps, 0x0042), "GPS.Tag0x0042");
        assert_eq!(parse_key("GPS.Tag0x0042"), Some((Ifd::Gps, 0x0042)));
        assert_eq!(parse_key("Special"), None);
    }

    #[test]
    fn write_then_parse() {
        let rational = encode_value(TYPE_RATIONAL, 1, &[0, 0, 0, 72, 0, 0, 0, 1]);
        let short = encode_value(TYPE_SHORT, 1, &[0, 1]);
        let entries: Vec<(String, Vec<u8>)> = vec![
            ("IFD0.Make".into(), ascii("SynthCam")),
            ("IFD0.XResolution".into(), rational.clone()),
            ("IFD0.Orientation".into(), short),
            ("Exif.DateTimeOriginal".into(), ascii("2016:10:28 08:54:47")),
            (
                "GPS.GPSLatitude".into(),
                encode_value(TYPE_RATIONAL, 1, &[0, 0, 0, 44, 0, 0, 0, 1]),
            ),
            ("Interop.InteroperabilityIndex".into(), ascii("R98")),
            ("IFD1.XResolution".into(), rational),
            (THUMBNAIL_KEY.into(), vec![0xFF, 0xD8, 1, 2, 3, 0xFF, 0xD9]),
        ];
        let tiff = write_tiff(entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))).unwrap();
        let mut parsed = parse_tiff(&tiff).unwrap();
        let mut expected = entries.clone();
        parsed.sort();
        expected.sort();
        assert_eq!(parsed, expected);
    }

    #[test]
    fn big_endian_input_normalises() {
        // hand-built MM TIFF with one SHORT entry (Orientation = 6)
        let mut t = b"MM\0\x2a\0\0\0\x08".to_vec();
        t.extend_from_slice(&[
            0, 1, 0x01, 0x12, 0, 3, 0, 0, 0, 1, 0, 6, 0, 0, 0, 0, 0, 0, 0, 0,
        ]);
        let parsed = parse_tiff(&t).unwrap();
        assert_eq!(
            parsed,
            vec![(
                "IFD0.Orientation".to_string(),
                encode_value(TYPE_SHORT, 1, &[0, 6])
            )]
        );
        // and the LE rewrite reads back equal
        let rewritten = write_tiff(parsed.iter().map(|(k, v)| (k.as_str(), v.as_slice()))).unwrap();
        assert_eq!(parse_tiff(&rewritten).unwrap(), parsed);
    }

    #[test]
    fn garbage_is_an_error() {
        assert!(parse_tiff(b"XX\0\0").is_err());
        assert!(parse_tiff(b"II\x2a\0\xff\xff\0\0").is_err());
    }
}
