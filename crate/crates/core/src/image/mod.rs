//! Pixel model, codecs, luminance, resampling and the synthetic-camera
//! corpus generator.

mod buffer;
mod codec;
mod luma;
mod resize;
mod synth;

pub use buffer::{ChannelLayout, EncodedSource, ImageBuffer, ImageFormat, RawSegment, SegmentKind};
pub use codec::{
    decode_image, encode_as, encode_jpeg, encode_jpeg_with_segments, encode_png, sniff_format,
    splice_jpeg_segments,
};
pub use luma::{apply_luma_delta, y_channel, LumaPlane, LUMA_WEIGHTS};
pub use resize::{fit_within, orient_like, resize, resize_plane};
pub use synth::{
    capture, generate_camera, generate_scene, SceneKind, SyntheticCamera, MAX_PATTERN_STRENGTH,
};
