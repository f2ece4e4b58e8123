//! Attribution and profile-linking experiments over simulated networks,
//! with their count grids, metrics and heatmaps.

mod eval;
mod report;

pub use eval::{
    attribute, attribute_with, decide, default_inter_pairs, link_profiles, link_profiles_with,
    ordered_pairs, run_attribution, run_inter_layer, run_intra_layer, synthetic_corpus,
    Attribution, DeviceImages, EvalConfig, EvalSplit, GlmScope, LinkDecision, INTER_LAYER_DEFAULT,
};
pub use report::{EvaluationReport, ReportRow, Task, UNKNOWN_SOURCE};
