//! Deterministic simulator of social-network upload pipelines: resizing,
//! recompression, metadata rewriting and renaming.

mod apply;
mod calibrate;
mod profile;

pub use apply::{
    apply_channel, content_digest, facebook_iptc, rename, render_name, share, transform_metadata,
    ChannelOutput, UploadContext, CURRENT_IPTC_DIGEST, ORIGINAL_TRANSMISSION_REFERENCE,
    SPECIAL_INSTRUCTIONS,
};
pub use calibrate::{
    calibrate_all, calibrate_class, calibrate_quality, class_dimensions, measure_compression,
    ClassCalibration, CALIBRATION_PER_CLASS, CALIBRATION_SEED, MAX_QUALITY, MIN_QUALITY,
};
pub use profile::{
    default_profiles, find_profile, load_profiles, save_profiles, MetadataPolicy, PerClass,
    RenamePolicy, ResolutionClass, SNChannelProfile, FALLBACK_QUALITY, ORIGINAL_QUALITY,
    SMALL_CLASS_PIXELS,
};
