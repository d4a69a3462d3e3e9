use rand_distr::{Distribution, StandardNormal};

use super::params::{diametric_direction, CsbmParams, MeanMode};
use crate::error::{domain, Result};
use crate::graph::{Features, Labels};
use crate::rng::RngStream;

/// Class mean vectors (before scaling by μ).
pub fn class_mean_directions(params: &CsbmParams) -> Result<Vec<Vec<f64>>> {
    match params.mean_mode {
        MeanMode::Orthogonal => {
            if params.m_feat < params.k {
                return Err(domain(format!(
                    "orthogonal means need m_feat >= k ({} < {})",
                    params.m_feat, params.k
                )));
            }
            Ok((0..params.k)
                .map(|v| {
                    let mut e = vec![0.0; params.m_feat];
                    e[v] = 1.0;
                    e
                })
                .collect())
        }
        MeanMode::Diametric => {
            if params.k != 2 {
                return Err(domain(format!("diametric means need k = 2, got {}", params.k)));
            }
            let m = diametric_direction(params.m_feat);
            let neg = m.iter().map(|x| -x).collect();
            Ok(vec![m, neg])
        }
    }
}

/// Gaussian point clouds: `X(i) = μ·m_{v_i} + σ·z_i`.
pub fn sample_features(labels: &Labels, params: &CsbmParams, rng: &mut RngStream) -> Result<Features> {
    if labels.k() != params.k {
        return Err(domain(format!("labels have k = {}, params k = {}", labels.k(), params.k)));
    }
    if !(params.sigma > 0.0) {
        return Err(domain(format!("sigma must be positive, got {}", params.sigma)));
    }
    let means = class_mean_directions(params)?;
    let dim = params.m_feat;
    let mut data = Vec::with_capacity(labels.len() * dim);
    for i in 0..labels.len() {
        let mean = &means[labels.class(i)];
        for &mj in mean.iter() {
            let z: f64 = StandardNormal.sample(rng);
            data.push(params.mu * mj + params.sigma * z);
        }
    }
    Features::new(labels.len(), dim, data)
}
