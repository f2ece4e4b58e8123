//! Name, digest, content and metadata comparison of image files.

mod compare;
pub mod exif;
pub mod iptc;
mod metadata;
mod names;

pub use compare::{
    compression_ratio, content_compare, diff_files, full_compare, metadata_compare, sha1_hex,
    ContentDiff, DiffReport, MetadataDiff,
};
pub use metadata::{exif_category, ExifCategory, MetadataEntry, MetadataMap, Namespace};
pub use names::{name_classify, NameClassifier, NamePattern, UNCHANGED_LABEL, UNKNOWN_LABEL};
