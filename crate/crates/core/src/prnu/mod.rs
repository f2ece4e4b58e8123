//! Sensor-noise residuals, camera fingerprints, normalized correlation and
//! the two same-source classifiers.

mod classify;
mod denoise;
mod fingerprint;
mod io;

pub use classify::{
    classify, train_glm, youden_threshold, ClassifierConfig, ClassifierMode, Decision, GlmWeights,
    DEFAULT_THRESHOLD,
};
pub use denoise::{gaussian_blur, DenoiserKind, DenoiserSpec};
pub use fingerprint::{
    correlate, correlate_planes, estimate_fingerprint, extract_residual, extract_residual_plane,
    extract_residuals, normalized_correlation, CameraFingerprint, FingerprintAccumulator,
    NoiseResidual,
};
pub use io::{
    fingerprint_from_bytes, fingerprint_to_bytes, load_fingerprint, save_fingerprint, MAGIC,
};
