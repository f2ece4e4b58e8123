//! Transform kernels shared by the denoiser and the watermark schemes.

pub mod dct;
pub mod dwt;
