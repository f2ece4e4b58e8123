//! Photoshop image-resource block (JPEG APP13) carrying IPTC-IIM datasets.

pub const PHOTOSHOP_HEADER: &[u8; 14] = b"Photoshop 3.0\0";

const RESOURCE_IIM: u16 = 0x0404;
const RESOURCE_IPTC_DIGEST: u16 = 0x0425;

pub const DIGEST_KEY: &str = "CurrentIPTCDigest";

const DATASETS: &[(u8, u8, &str)] = &[
    (1, 90, "CodedCharacterSet"),
    (2, 0, "RecordVersion"),
    (2, 5, "ObjectName"),
    (2, 25, "Keywords"),
    (2, 40, "SpecialInstructions"),
    (2, 55, "DateCreated"),
    (2, 60, "TimeCreated"),
    (2, 80, "By-line"),
    (2, 90, "City"),
    (2, 101, "Country-PrimaryLocationName"),
    (2, 103, "OriginalTransmissionReference"),
    (2, 105, "Headline"),
    (2, 110, "Credit"),
    (2, 115, "Source"),
    (2, 116, "CopyrightNotice"),
    (2, 120, "Caption-Abstract"),
];

pub fn dataset_key(record: u8, dataset: u8) -> String {
    match DATASETS
        .iter()
        .find(|(r, d, _)| *r == record && *d == dataset)
    {
        Some((_, _, name)) => name.to_string(),
        None => format!("IIM{record}:{dataset}"),
    }
}

fn parse_dataset_key(key: &str) -> Option<(u8, u8)> {
    let base = key.split_once('#').map_or(key, |(b, _)| b);
    if let Some(rest) = base.strip_prefix("IIM") {
        let (r, d) = rest.split_once(':')?;
        return Some((r.parse().ok()?, d.parse().ok()?));
    }
    DATASETS
        .iter()
        .find(|(_, _, n)| *n == base)
        .map(|(r, d, _)| (*r, *d))
}

/// Keys of non-IIM resources kept verbatim (`8BIM.0x040C` and so on).
pub fn resource_key(id: u16) -> String {
    format!("8BIM.0x{id:04X}")
}

fn parse_resource_key(key: &str) -> Option<u16> {
    u16::from_str_radix(key.strip_prefix("8BIM.0x")?, 16).ok()
}

/// True if `key` is something [`write_app13`] knows how to place.
pub fn is_app13_key(key: &str) -> bool {
    key == DIGEST_KEY || parse_dataset_key(key).is_some() || parse_resource_key(key).is_some()
}

/// Parsed APP13 content: IPTC datasets and the digest go to the IPTC
/// namespace, any other image resource is returned separately.
#[derive(Debug, Default, PartialEq)]
pub struct App13 {
    pub iptc: Vec<(String, Vec<u8>)>,
    pub other: Vec<(String, Vec<u8>)>,
}

/// Parses an APP13 payload. Repeated datasets get `#2`, `#3`... suffixes.
pub fn parse_app13(payload: &[u8]) -> Result<App13, String> {
    let body = payload
        .strip_prefix(PHOTOSHOP_HEADER.as_slice())
        .ok_or("APP13 without Photoshop header")?;
    let mut out = App13::default();
    let mut i = 0;
    while i + 4 <= body.len() {
        if &body[i..i + 4] != b"8BIM" {
            return Err(format!("bad resource signature at {i}"));
        }
        let id = u16::from_be_bytes(
            body.get(i + 4..i + 6)
                .ok_or("truncated resource id")?
                .try_into()
                .unwrap(),
        );
        let name_len = *body.get(i + 6).ok_or("truncated resource name")? as usize;
        // pascal string padded to an even total length
        let mut j = i + 6 + (1 + name_len).next_multiple_of(2);
        let size = u32::from_be_bytes(
            body.get(j..j + 4)
                .ok_or("truncated resource size")?
                .try_into()
                .unwrap(),
        ) as usize;
        j += 4;
        let data = body.get(j..j + size).ok_or("resource data out of bounds")?;
        match id {
            RESOURCE_IIM => out.iptc.extend(parse_iim(data)?),
            RESOURCE_IPTC_DIGEST => out.iptc.push((DIGEST_KEY.to_string(), data.to_vec())),
            _ => out.other.push((resource_key(id), data.to_vec())),
        }
        i = j + size.next_multiple_of(2);
    }
    Ok(out)
}

fn parse_iim(data: &[u8]) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut out: Vec<(String, Vec<u8>)> = Vec::new();
    let mut i = 0;
    while i < data.len() {
        if data[i] != 0x1C {
            // trailing padding
            if data[i..].iter().all(|&b| b == 0) {
                break;
            }
            return Err(format!("bad IIM tag marker at {i}"));
        }
        let head = data.get(i..i + 5).ok_or("truncated IIM header")?;
        let size = u16::from_be_bytes([head[3], head[4]]) as usize;
        if size & 0x8000 != 0 {
            return Err("extended IIM datasets are not supported".into());
        }
        let value = data
            .get(i + 5..i + 5 + size)
            .ok_or("IIM data out of bounds")?;
        let base = dataset_key(head[1], head[2]);
        let n = out
            .iter()
            .filter(|(k, _)| k.split_once('#').map_or(k.as_str(), |(b, _)| b) == base)
            .count();
        let key = if n == 0 {
            base
        } else {
            format!("{base}#{}", n + 1)
        };
        out.push((key, value.to_vec()));
        i += 5 + size;
    }
    Ok(out)
}

fn push_resource(out: &mut Vec<u8>, id: u16, data: &[u8]) {
    out.extend_from_slice(b"8BIM");
    out.extend_from_slice(&id.to_be_bytes());
    out.extend_from_slice(&[0, 0]);
    out.extend_from_slice(&(data.len() as u32).to_be_bytes());
    out.extend_from_slice(data);
    if data.len() % 2 == 1 {
        out.push(0);
    }
}

/// Builds an APP13 payload. Returns `None` if no key applies.
pub fn write_app13<'a>(entries: impl IntoIterator<Item = (&'a str, &'a [u8])>) -> Option<Vec<u8>> {
    let mut iim = Vec::new();
    let mut digest = None;
    let mut resources = Vec::new();
    for (key, value) in entries {
        if key == DIGEST_KEY {
            digest = Some(value);
        } else if let Some((r, d)) = parse_dataset_key(key) {
            if value.len() >= 0x8000 {
                continue;
            }
            iim.extend_from_slice(&[0x1C, r, d]);
            iim.extend_from_slice(&(value.len() as u16).to_be_bytes());
            iim.extend_from_slice(value);
        } else if let Some(id) = parse_resource_key(key) {
            resources.push((id, value));
        }
    }
    if iim.is_empty() && digest.is_none() && resources.is_empty() {
        return None;
    }
    let mut out = PHOTOSHOP_HEADER.to_vec();
    if !iim.is_empty() {
        push_resource(&mut out, RESOURCE_IIM, &iim);
    }
    if let Some(d) = digest {
        push_resource(&mut out, RESOURCE_IPTC_DIGEST, d);
    }
    for (id, data) in resources {
        push_resource(&mut out, id, data);
    }
    Some(out)
}
