//! Classifiers: fixed-weight linear GCNs, the two-layer linearization
//! machinery, trainable GCN and MLP, and spectral clustering.

mod linear;
mod linearize;
mod metrics;
mod spectral;
mod train;

pub use linear::{
    one_layer_predict, one_layer_scores, sign_accuracy, two_layer_linear_predict, two_layer_linear_scores,
};
pub use linearize::{
    cost_inequality_trial, gcn_forward, linearize, logistic_cost, project_features, project_linear,
    reflect_features, CostTrial, TwoLayerGcn,
};
pub use metrics::{aligned_accuracy, MAX_PERMUTATION_CLASSES};
pub use spectral::{kmeans, spectral_cluster};
pub use train::{gradient_check, train_gcn, train_mlp, TrainConfig, TrainOutcome};
