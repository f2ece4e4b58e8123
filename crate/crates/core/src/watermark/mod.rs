//! Conventional watermark schemes, two in the pixel domain and two in a
//! transform domain, and a harness that pushes marked images through the
//! simulated networks.

mod dct;
mod dwt;
mod grid;
mod lsb;
mod payload;

pub use dct::{dct_capacity, dct_detect, dct_embed, DctDetection, DctParams};
pub use dwt::{dwt_detect, dwt_embed, DwtDetection, DwtParams, DWT_MIN_SIDE};
pub use grid::{
    embed, run_survival_grid, survives, Cell, GridConfig, GridCorpus, Scheme, SchemeParams,
    SurvivalGrid,
};
pub use lsb::{keyed_lsb_embed, keyed_lsb_extract, lsb_capacity, lsb_embed, lsb_extract};
pub use payload::{bit_error_rate, bits_to_bytes, psnr, WatermarkPayload};
