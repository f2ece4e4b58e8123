//! Sensor-fingerprint forensics toolkit.
//!
//! * [`image`]: decoding, encoding, luminance, resampling, synthetic cameras.
//! * [`diff`]: name, digest, content and metadata comparison of two files.
//! * [`channel`]: deterministic simulator of social-network upload pipelines.
//! * [`watermark`]: conventional watermark schemes and the survival grid.
//! * [`prnu`]: noise residuals, fingerprints, normalized correlation, classifiers.
//! * [`linkage`]: attribution and profile-linking experiments.

pub mod channel;
pub mod corpus;
pub mod diff;
pub mod dsp;
pub mod error;
pub mod image;
pub mod linkage;
pub mod prnu;
pub mod watermark;

pub use error::{Error, Result};
