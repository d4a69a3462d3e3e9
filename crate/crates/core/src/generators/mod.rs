//! Attributed random-graph families.

mod enn;
mod features;
mod hsbm;
mod params;
mod sbm;
mod triadic;

pub use enn::{sample_enn_sbm, EnnSample};
pub use features::{class_mean_directions, sample_features};
pub use hsbm::{sample_hsbm, sample_hsbm_with_probs, HsbmSample, HsbmSpec};
pub use params::{diametric_direction, lambda_to_probs, CsbmParams, DegreeWeightSpec, MeanMode};
pub use sbm::{degree_weights, sample_block_graph, sample_csbm, sample_dcsbm, sample_sbm, sample_topology};
pub use triadic::{apply_triadic_closure, open_wedge_pairs};
