//! Binary fingerprint files.
//!
//! Layout, all integers little-endian: magic `PRNUFP01`, width (u32),
//! height (u32), n_images (u32), device-id length (u16), device id (UTF-8),
//! then `width * height` f64 values row-major.

use std::path::Path;

use super::fingerprint::CameraFingerprint;
use crate::error::{Error, Result};
use crate::image::LumaPlane;

pub const MAGIC: &[u8; 8] = b"PRNUFP01";
const FAMILY: &[u8; 6] = b"PRNUFP";

pub fn fingerprint_to_bytes(fp: &CameraFingerprint) -> Result<Vec<u8>> {
    let id = fp.device_id.as_bytes();
    let id_len = u16::try_from(id.len()).map_err(|_| {
        Error::InvalidParameter(format!("device id of {} bytes is too long", id.len()))
    })?;
    let mut out = Vec::with_capacity(22 + id.len() + 8 * fp.values().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(fp.width() as u32).to_le_bytes());
    out.extend_from_slice(&(fp.height() as u32).to_le_bytes());
    out.extend_from_slice(&(fp.n_images as u32).to_le_bytes());
    out.extend_from_slice(&id_len.to_le_bytes());
    out.extend_from_slice(id);
    for v in fp.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn fingerprint_from_bytes(bytes: &[u8]) -> Result<CameraFingerprint> {
    let corrupt = |what: &str| Error::CorruptFile(what.to_string());
    let magic = bytes
        .get(..8)
        .ok_or_else(|| corrupt("file shorter than header"))?;
    if magic != MAGIC {
        if magic.starts_with(FAMILY) {
            return Err(Error::VersionMismatch(
                String::from_utf8_lossy(&magic[6..]).into_owned(),
            ));
        }
        return Err(corrupt("bad magic"));
    }
    let u32_at = |at: usize| -> Result<usize> {
        Ok(u32::from_le_bytes(
            bytes
                .get(at..at + 4)
                .ok_or_else(|| corrupt("truncated header"))?
                .try_into()
                .unwrap(),
        ) as usize)
    };
    let (w, h, n) = (u32_at(8)?, u32_at(12)?, u32_at(16)?);
    let id_len = u16::from_le_bytes(
        bytes
            .get(20..22)
            .ok_or_else(|| corrupt("truncated header"))?
            .try_into()
            .unwrap(),
    ) as usize;
    let id = bytes
        .get(22..22 + id_len)
        .ok_or_else(|| corrupt("truncated device id"))?;
    let id = std::str::from_utf8(id).map_err(|_| corrupt("device id is not UTF-8"))?;
    let body = &bytes[22 + id_len..];
    let expected = w
        .checked_mul(h)
        .and_then(|p| p.checked_mul(8))
        .ok_or_else(|| corrupt("dimensions overflow"))?;
    if body.len() != expected {
        return Err(Error::CorruptFile(format!(
            "expected {expected} value bytes, found {}",
            body.len()
        )));
    }
    if w == 0 || h == 0 || n == 0 {
        return Err(corrupt("zero dimension or image count"));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    CameraFingerprint::new(id, LumaPlane::new(w, h, values)?, n)
}

pub fn save_fingerprint(fp: &CameraFingerprint, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, fingerprint_to_bytes(fp)?).map_err(|e| Error::io(path, e))
}

pub fn load_fingerprint(path: impl AsRef<Path>) -> Result<CameraFingerprint> {
    let path = path.as_ref();
    fingerprint_from_bytes(&std::fs::read(path).map_err(|e| Error::io(path, e))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CameraFingerprint {
        let values = (0..12)
            .map(|i| (i as f64 - 5.5) * 0.1 + f64::EPSILON)
            .collect();
        CameraFingerprint::new("cam-ü", LumaPlane::new(4, 3, values).unwrap(), 33).unwrap()
    }

    #[test]
    fn round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fp.bin");
        let fp = sample();
        save_fingerprint(&fp, &path).unwrap();
        assert_eq!(load_fingerprint(&path).unwrap(), fp);
    }

    #[test]
    fn malformed_inputs() {
        let bytes = fingerprint_to_bytes(&sample()).unwrap();
        assert!(matches!(
            fingerprint_from_bytes(&bytes[..bytes.len() - 3]),
            Err(Error::CorruptFile(_))
        ));
        assert!(matches!(
            fingerprint_from_bytes(&bytes[..5]),
            Err(Error::CorruptFile(_))
        ));
        let mut wrong = bytes.clone();
        wrong[0] = b'X';
        assert!(matches!(
            fingerprint_from_bytes(&wrong),
            Err(Error::CorruptFile(_))
        ));
        let mut v2 = bytes;
        v2[7] = b'2';
        assert!(matches!(
            fingerprint_from_bytes(&v2),
            Err(Error::VersionMismatch(_))
        ));
    }
}
