//! Closed-form accuracy of one- and two-layer linear GCNs on the cSBM.

mod one_layer;
mod special;
mod two_layer;

pub use one_layer::{
    conditional_accuracy, embedding_moments, expected_accuracy_one_layer, optimal_theta, OneLayerQuery,
    ThetaOptimum,
};
pub use special::{erf, erfc, ln_factorial, normal_cdf, poisson_pmf};
pub use two_layer::{
    psi, structure_prob, two_layer_accuracy, two_layer_accuracy_scaled, Sign, TheoryResult, TruncationLimits,
    TwoLayerQuery,
};
