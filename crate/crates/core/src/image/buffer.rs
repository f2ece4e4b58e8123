use crate::error::{Error, Result};

/// Sample layout of an [`ImageBuffer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ChannelLayout {
    Gray8,
    Rgb8,
}

impl ChannelLayout {
    pub fn channels(self) -> usize {
        match self {
            ChannelLayout::Gray8 => 1,
            ChannelLayout::Rgb8 => 3,
        }
    }
}

/// Container format of an encoded stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ImageFormat {
    Jpeg,
    Png,
}

/// Where a metadata segment lives inside its container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SegmentKind {
    /// JPEG marker byte (`0xE0..=0xEF` for APPn, `0xFE` for COM).
    JpegMarker(u8),
    /// Four-character PNG chunk type.
    PngChunk([u8; 4]),
}

/// A metadata segment copied verbatim out of an encoded stream.
///
/// The image core does not interpret these; the diff kit parses them into a
/// metadata map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawSegment {
    pub kind: SegmentKind,
    pub data: Vec<u8>,
}

/// The encoded stream an [`ImageBuffer`] was decoded from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedSource {
    pub bytes: Vec<u8>,
    pub format: ImageFormat,
    pub segments: Vec<RawSegment>,
}

/// Decoded 8-bit raster, row-major, channels interleaved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    layout: ChannelLayout,
    pixels: Vec<u8>,
    source: Option<EncodedSource>,
}

impl ImageBuffer {
    pub fn new(
        width: usize,
        height: usize,
        layout: ChannelLayout,
        pixels: Vec<u8>,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParameter(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width * height * layout.channels();
        if pixels.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "pixel buffer holds {} samples, {width}x{height} {layout:?} needs {expected}",
                pixels.len()
            )));
        }
        Ok(ImageBuffer {
            width,
            height,
            layout,
            pixels,
            source: None,
        })
    }

    /// Solid-colour image. `value` is repeated into every channel.
    pub fn filled(width: usize, height: usize, layout: ChannelLayout, value: u8) -> Result<Self> {
        Self::new(
            width,
            height,
            layout,
            vec![value; width * height * layout.channels()],
        )
    }

    pub(crate) fn with_source(mut self, source: EncodedSource) -> Self {
        self.source = Some(source);
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn layout(&self) -> ChannelLayout {
        self.layout
    }

    pub fn channels(&self) -> usize {
        self.layout.channels()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Original encoded bytes, if this buffer came from `decode_image`.
    pub fn source_bytes(&self) -> Option<&[u8]> {
        self.source.as_ref().map(|s| s.bytes.as_slice())
    }

    pub fn source(&self) -> Option<&EncodedSource> {
        self.source.as_ref()
    }

    pub fn format(&self) -> Option<ImageFormat> {
        self.source.as_ref().map(|s| s.format)
    }

    /// Metadata segments of the source stream; empty for synthesized buffers.
    pub fn segments(&self) -> &[RawSegment] {
        self.source
            .as_ref()
            .map(|s| s.segments.as_slice())
            .unwrap_or(&[])
    }

    /// Drops the encoded source, e.g. after the pixels were edited.
    pub fn into_raw(self) -> ImageBuffer {
        ImageBuffer {
            source: None,
            ..self
        }
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    /// Same image with three channels; RGB input is returned unchanged.
    pub fn to_rgb(&self) -> ImageBuffer {
        match self.layout {
            ChannelLayout::Rgb8 => self.clone(),
            ChannelLayout::Gray8 => {
                let pixels = self.pixels.iter().flat_map(|&v| [v, v, v]).collect();
                ImageBuffer {
                    width: self.width,
                    height: self.height,
                    layout: ChannelLayout::Rgb8,
                    pixels,
                    source: None,
                }
            }
        }
    }
}
