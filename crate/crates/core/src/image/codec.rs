//! JPEG/PNG byte streams in and out of [`ImageBuffer`].
//!
//! Pixel coding is delegated to the `image` crate. Metadata segments are
//! walked here so they survive as an opaque side record and can be spliced
//! into re-encoded output.

use std::io::Cursor;

use image::codecs::jpeg::JpegEncoder;
use image::codecs::png::PngEncoder;
use image::{DynamicImage, ExtendedColorType, ImageEncoder};

use super::buffer::{
    ChannelLayout, EncodedSource, ImageBuffer, ImageFormat, RawSegment, SegmentKind,
};
use crate::error::{Error, Result};

const JPEG_SOI: [u8; 2] = [0xFF, 0xD8];
const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0D, 0x0A, 0x1A, 0x0A];

/// Identifies the container from its leading bytes.
pub fn sniff_format(bytes: &[u8]) -> Option<ImageFormat> {
    if bytes.starts_with(&JPEG_SOI) {
        Some(ImageFormat::Jpeg)
    } else if bytes.starts_with(&PNG_SIGNATURE) {
        Some(ImageFormat::Png)
    } else {
        None
    }
}

/// Decodes a JPEG or PNG stream, keeping the source bytes and metadata segments.
pub fn decode_image(bytes: &[u8]) -> Result<ImageBuffer> {
    let format = match sniff_format(bytes) {
        Some(f) => f,
        None if bytes.len() < 8 => {
            return Err(Error::MalformedStream(format!(
                "stream of {} bytes is too short",
                bytes.len()
            )))
        }
        None => return Err(Error::UnsupportedFormat),
    };
    let segments = match format {
        ImageFormat::Jpeg => jpeg_segments(bytes)?,
        ImageFormat::Png => png_segments(bytes)?,
    };
    let decoded = image::load_from_memory_with_format(
        bytes,
        match format {
            ImageFormat::Jpeg => image::ImageFormat::Jpeg,
            ImageFormat::Png => image::ImageFormat::Png,
        },
    )
    .map_err(|e| Error::MalformedStream(e.to_string()))?;

    let buffer = from_dynamic(decoded)?;
    Ok(buffer.with_source(EncodedSource {
        bytes: bytes.to_vec(),
        format,
        segments,
    }))
}

fn from_dynamic(img: DynamicImage) -> Result<ImageBuffer> {
    let (w, h) = (img.width() as usize, img.height() as usize);
    match img {
        DynamicImage::ImageLuma8(g) => ImageBuffer::new(w, h, ChannelLayout::Gray8, g.into_raw()),
        DynamicImage::ImageLumaA8(_)
        | DynamicImage::ImageLuma16(_)
        | DynamicImage::ImageLumaA16(_) => {
            ImageBuffer::new(w, h, ChannelLayout::Gray8, img.to_luma8().into_raw())
        }
        DynamicImage::ImageRgb8(rgb) => ImageBuffer::new(w, h, ChannelLayout::Rgb8, rgb.into_raw()),
        other => ImageBuffer::new(w, h, ChannelLayout::Rgb8, other.to_rgb8().into_raw()),
    }
}

fn color_type(img: &ImageBuffer) -> ExtendedColorType {
    match img.layout() {
        ChannelLayout::Gray8 => ExtendedColorType::L8,
        ChannelLayout::Rgb8 => ExtendedColorType::Rgb8,
    }
}

fn check_quality(quality: u8) -> Result<()> {
    if (1..=100).contains(&quality) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "JPEG quality {quality} outside 1..=100"
        )))
    }
}

/// Baseline JPEG at a fixed quality. Output depends only on (pixels, quality).
pub fn encode_jpeg(img: &ImageBuffer, quality: u8) -> Result<Vec<u8>> {
    check_quality(quality)?;
    let mut out = Vec::with_capacity(img.pixels().len() / 4);
    JpegEncoder::new_with_quality(&mut out, quality)
        .encode(
            img.pixels(),
            img.width() as u32,
            img.height() as u32,
            color_type(img),
        )
        .map_err(|e| Error::MalformedStream(e.to_string()))?;
    Ok(out)
}

/// As [`encode_jpeg`], then splices `segments` in after the JFIF header.
pub fn encode_jpeg_with_segments(
    img: &ImageBuffer,
    quality: u8,
    segments: &[RawSegment],
) -> Result<Vec<u8>> {
    let plain = encode_jpeg(img, quality)?;
    splice_jpeg_segments(&plain, segments)
}

/// Inserts APPn/COM segments into an existing JPEG stream, after SOI and any APP0.
pub fn splice_jpeg_segments(jpeg: &[u8], segments: &[RawSegment]) -> Result<Vec<u8>> {
    if !jpeg.starts_with(&JPEG_SOI) {
        return Err(Error::MalformedStream("missing SOI marker".into()));
    }
    let mut insert_at = 2;
    if jpeg.len() >= 6 && jpeg[2] == 0xFF && jpeg[3] == 0xE0 {
        let len = u16::from_be_bytes([jpeg[4], jpeg[5]]) as usize;
        insert_at = 4 + len;
    }
    let mut out =
        Vec::with_capacity(jpeg.len() + segments.iter().map(|s| s.data.len() + 4).sum::<usize>());
    out.extend_from_slice(&jpeg[..insert_at]);
    for seg in segments {
        let marker = match seg.kind {
            SegmentKind::JpegMarker(m) => m,
            SegmentKind::PngChunk(_) => continue,
        };
        let len = seg.data.len() + 2;
        if len > u16::MAX as usize {
            return Err(Error::InvalidParameter(format!(
                "segment 0x{marker:02X} of {} bytes exceeds the JPEG segment limit",
                seg.data.len()
            )));
        }
        out.extend_from_slice(&[0xFF, marker]);
        out.extend_from_slice(&(len as u16).to_be_bytes());
        out.extend_from_slice(&seg.data);
    }
    out.extend_from_slice(&jpeg[insert_at..]);
    Ok(out)
}

/// Lossless PNG without ancillary chunks.
pub fn encode_png(img: &ImageBuffer) -> Result<Vec<u8>> {
    let mut out = Cursor::new(Vec::new());
    PngEncoder::new(&mut out)
        .write_image(
            img.pixels(),
            img.width() as u32,
            img.height() as u32,
            color_type(img),
        )
        .map_err(|e| Error::MalformedStream(e.to_string()))?;
    Ok(out.into_inner())
}

/// Encodes in the buffer's own format; JPEG uses `quality`.
pub fn encode_as(img: &ImageBuffer, format: ImageFormat, quality: u8) -> Result<Vec<u8>> {
    match format {
        ImageFormat::Jpeg => encode_jpeg(img, quality),
        ImageFormat::Png => encode_png(img),
    }
}

fn truncated(what: &str) -> Error {
    Error::MalformedStream(format!("truncated {what}"))
}

/// APPn and COM segments up to the first SOS.
fn jpeg_segments(bytes: &[u8]) -> Result<Vec<RawSegment>> {
    let mut segments = Vec::new();
    let mut pos = 2;
    loop {
        if pos >= bytes.len() {
            return Err(truncated("JPEG header"));
        }
        if bytes[pos] != 0xFF {
            return Err(Error::MalformedStream(format!(
                "expected marker at offset {pos}"
            )));
        }
        while pos < bytes.len() && bytes[pos] == 0xFF {
            pos += 1;
        }
        let marker = *bytes.get(pos).ok_or_else(|| truncated("JPEG marker"))?;
        pos += 1;
        match marker {
            0xD9 | 0xDA => break,
            0x01 | 0xD0..=0xD7 => continue,
            _ => {}
        }
        if pos + 2 > bytes.len() {
            return Err(truncated("JPEG segment length"));
        }
        let len = u16::from_be_bytes([bytes[pos], bytes[pos + 1]]) as usize;
        if len < 2 || pos + len > bytes.len() {
            return Err(truncated("JPEG segment"));
        }
        if (0xE0..=0xEF).contains(&marker) || marker == 0xFE {
            segments.push(RawSegment {
                kind: SegmentKind::JpegMarker(marker),
                data: bytes[pos + 2..pos + len].to_vec(),
            });
        }
        pos += len;
    }
    Ok(segments)
}

const PNG_METADATA_CHUNKS: [&[u8; 4]; 5] = [b"eXIf", b"tEXt", b"zTXt", b"iTXt", b"tIME"];

fn png_segments(bytes: &[u8]) -> Result<Vec<RawSegment>> {
    let mut segments = Vec::new();
    let mut pos = PNG_SIGNATURE.len();
    while pos + 8 <= bytes.len() {
        let len = u32::from_be_bytes(bytes[pos..pos + 4].try_into().unwrap()) as usize;
        let kind: [u8; 4] = bytes[pos + 4..pos + 8].try_into().unwrap();
        let end = pos + 8 + len + 4;
        if end > bytes.len() {
            return Err(truncated("PNG chunk"));
        }
        if PNG_METADATA_CHUNKS.iter().any(|c| **c == kind) {
            segments.push(RawSegment {
                kind: SegmentKind::PngChunk(kind),
                data: bytes[pos + 8..pos + 8 + len].to_vec(),
            });
        }
        if &kind == b"IEND" {
            break;
        }
        pos = end;
    }
    Ok(segments)
}
