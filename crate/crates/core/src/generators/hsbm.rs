use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::features::class_mean_directions;
use super::params::CsbmParams;
use super::sbm::{bernoulli_successes, triangular_pair};
use crate::error::{domain, Result};
use crate::graph::{Features, Graph, LabeledGraph, Labels};
use crate::rng::RngStream;

/// Sub-cluster structure for the hierarchical SBM. Unset probabilities and
/// offsets default to `p_sub = 2·p_in` and `mu_sub = μ/4`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HsbmSpec {
    pub subclusters_per_class: usize,
    pub p_sub: Option<f64>,
    pub mu_sub: Option<f64>,
}

impl Default for HsbmSpec {
    fn default() -> Self {
        Self {
            subclusters_per_class: 5,
            p_sub: None,
            mu_sub: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct HsbmSample {
    pub data: LabeledGraph,
    /// Global sub-cluster index per node, `class · subclusters_per_class + s`.
    pub subclusters: Vec<usize>,
}

/// Three-level SBM: nodes in the same sub-cluster link with `p_sub`, same
/// class with `p_in`, different classes with `p_out`. Each sub-cluster's
/// feature cloud is shifted by a random offset of norm `mu_sub` orthogonal
/// to all class means.
pub fn sample_hsbm(params: &CsbmParams, spec: &HsbmSpec, rng: &RngStream) -> Result<HsbmSample> {
    params.validate()?;
    let (p_in, p_out) = params.probs()?;
    sample_hsbm_with_probs(params, spec, p_in, p_out, rng)
}

/// As [`sample_hsbm`] with the class-level probabilities given directly
/// instead of through `(d, λ)`.
pub fn sample_hsbm_with_probs(
    params: &CsbmParams,
    spec: &HsbmSpec,
    p_in: f64,
    p_out: f64,
    rng: &RngStream,
) -> Result<HsbmSample> {
    for p in [p_in, p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!("edge probability {p} outside [0, 1]")));
        }
    }
    let subs = spec.subclusters_per_class;
    let groups = params.k * subs;
    if subs == 0 || !params.n.is_multiple_of(groups) {
        return Err(domain(format!(
            "n = {} is not divisible by k · subclusters = {groups}",
            params.n
        )));
    }
    let p_sub = spec.p_sub.unwrap_or((2.0 * p_in).min(1.0));
    if !(p_sub >= p_in && p_sub <= 1.0) {
        return Err(domain(format!("p_sub = {p_sub} must lie in [p_in = {p_in}, 1]")));
    }
    let mu_sub = spec.mu_sub.unwrap_or(params.mu / 4.0);
    if !(mu_sub >= 0.0 && mu_sub.is_finite()) {
        return Err(domain(format!("mu_sub must be non-negative, got {mu_sub}")));
    }

    let n = params.n;
    let size = (n / groups) as u64;
    let labels = Labels::blocks(n, params.k)?;
    let subclusters: Vec<usize> = (0..n).map(|i| i / size as usize).collect();

    let mut edge_rng = rng.child(0);
    let mut edges = Vec::new();
    for g in 0..groups as u64 {
        let base_g = g * size;
        bernoulli_successes(size * size.saturating_sub(1) / 2, p_sub, &mut edge_rng, |t| {
            let (i, j) = triangular_pair(t);
            edges.push(((base_g + i) as usize, (base_g + j) as usize));
        });
        for h in g + 1..groups as u64 {
            let same_class = g / subs as u64 == h / subs as u64;
            let p = if same_class { p_in } else { p_out };
            let base_h = h * size;
            bernoulli_successes(size * size, p, &mut edge_rng, |t| {
                edges.push(((base_g + t / size) as usize, (base_h + t % size) as usize));
            });
        }
    }
    let graph = Graph::from_edges(n, edges)?;

    let means = class_mean_directions(params)?;
    let offsets = subcluster_offsets(&means, params.m_feat, groups, mu_sub, &mut rng.child(1))?;
    let mut noise_rng = rng.child(2);
    let mut data = Vec::with_capacity(n * params.m_feat);
    for i in 0..n {
        let (mean, offset) = (&means[labels.class(i)], &offsets[subclusters[i]]);
        for j in 0..params.m_feat {
            let z: f64 = StandardNormal.sample(&mut noise_rng);
            data.push(params.mu * mean[j] + offset[j] + params.sigma * z);
        }
    }
    let features = Features::new(n, params.m_feat, data)?;
    Ok(HsbmSample {
        data: LabeledGraph::new(graph, labels, Some(features))?,
        subclusters,
    })
}

fn subcluster_offsets(
    means: &[Vec<f64>],
    dim: usize,
    groups: usize,
    norm: f64,
    rng: &mut impl Rng,
) -> Result<Vec<Vec<f64>>> {
    if norm == 0.0 {
        return Ok(vec![vec![0.0; dim]; groups]);
    }
    // orthonormal basis of the span of the class means
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for m in means {
        let mut v = m.clone();
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-12 {
            basis.push(v.into_iter().map(|x| x / len).collect());
        }
    }
    if basis.len() >= dim {
        return Err(domain("no feature dimensions left orthogonal to the class means"));
    }
    let mut offsets = Vec::with_capacity(groups);
    while offsets.len() < groups {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        for b in &basis {
            let c: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-9 {
            offsets.push(v.into_iter().map(|x| norm * x / len).collect());
        }
    }
    Ok(offsets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::dot;

    #[test]
    fn deterministic_cliques() {
        let params = CsbmParams { n: 100, ..Default::default() };
        let spec = HsbmSpec { p_sub: Some(1.0), mu_sub: Some(0.0), ..Default::default() };
        let s = sample_hsbm_with_probs(&params, &spec, 0.0, 0.0, &RngStream::new(4)).unwrap();
        assert_eq!(s.data.graph.edge_count(), 10 * (10 * 9 / 2));
        for &(u, v) in s.data.graph.edges() {
            assert_eq!(s.subclusters[u], s.subclusters[v]);
        }
        assert_eq!(s.data.labels.k(), 2);
    }

    #[test]
    fn sub_clusters_are_denser() {
        let params = CsbmParams { n: 1000, ..Default::default() };
        let (p_in, _) = params.probs().unwrap();
        let spec = HsbmSpec { p_sub: Some(3.0 * p_in), ..Default::default() };
        let (mut within, mut across) = (0u64, 0u64);
        for seed in 0..20 {
            let s = sample_hsbm(&params, &spec, &RngStream::new(seed)).unwrap();
            for &(u, v) in s.data.graph.edges() {
                if s.subclusters[u] == s.subclusters[v] {
                    within += 1;
                } else if s.data.labels.class(u) == s.data.labels.class(v) {
                    across += 1;
                }
            }
        }
        // 10 sub-clusters of 100: 49 500 same-sub-cluster pairs, 200 000 same-class others
        let dens_within = within as f64 / (20.0 * 49_500.0);
        let dens_across = across as f64 / (20.0 * 200_000.0);
        assert!(dens_within > dens_across, "{dens_within} vs {dens_across}");
        assert!((dens_within - 3.0 * p_in).abs() < 0.1 * p_in);
    }

    #[test]
    fn offsets_orthogonal_to_means() {
        let params = CsbmParams { n: 100, mu: 1.0, ..Default::default() };
        let means = class_mean_directions(&params).unwrap();
        let offs = subcluster_offsets(&means, 10, 10, 0.25, &mut RngStream::new(1)).unwrap();
        for o in &offs {
            assert!((dot(o, o).sqrt() - 0.25).abs() < 1e-12);
            for m in &means {
                assert!(dot(o, m).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn divisibility_and_probability_checks() {
        let params = CsbmParams { n: 1000, ..Default::default() };
        let bad = HsbmSpec { subclusters_per_class: 3, ..Default::default() };
        assert!(sample_hsbm(&params, &bad, &RngStream::new(0)).is_err());
        let (p_in, _) = params.probs().unwrap();
        let low = HsbmSpec { p_sub: Some(p_in / 2.0), ..Default::default() };
        assert!(sample_hsbm(&params, &low, &RngStream::new(0)).is_err());
    }
}
