use rand::Rng;

use super::params::{CsbmParams, DegreeWeightSpec};
use crate::error::{domain, Result};
use crate::graph::{Graph, LabeledGraph, Labels};
use crate::rng::RngStream;

/// Visit the indices of successes in `total` independent Bernoulli(p) trials,
/// jumping between successes with geometric gaps.
pub(crate) fn bernoulli_successes(total: u64, p: f64, rng: &mut impl Rng, mut visit: impl FnMut(u64)) {
    if total == 0 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(visit);
        return;
    }
    let log_q = (-p).ln_1p();
    let mut next: u64 = 0;
    loop {
        let u: f64 = rng.random();
        let skip = ((1.0 - u).ln() / log_q).floor();
        if !(skip < (total - next) as f64) {
            return;
        }
        next += skip as u64;
        visit(next);
        next += 1;
        if next >= total {
            return;
        }
    }
}

/// Map a linear index over pairs `i < j < size` (row-major by `j`) to the pair.
pub(crate) fn triangular_pair(t: u64) -> (u64, u64) {
    // j is the largest integer with j(j-1)/2 <= t
    let mut j = ((1.0 + (1.0 + 8.0 * t as f64).sqrt()) / 2.0).floor() as u64;
    while j * (j - 1) / 2 > t {
        j -= 1;
    }
    while (j + 1) * j / 2 <= t {
        j += 1;
    }
    (t - j * (j - 1) / 2, j)
}

/// Planted-partition graph with `k` equal consecutive blocks.
pub fn sample_block_graph(
    n: usize,
    k: usize,
    p_in: f64,
    p_out: f64,
    rng: &mut RngStream,
) -> Result<(Graph, Labels)> {
    for p in [p_in, p_out] {
        if !(0.0..=1.0).contains(&p) {
            return Err(domain(format!("edge probability {p} outside [0, 1]")));
        }
    }
    let labels = Labels::blocks(n, k)?;
    let size = (n / k) as u64;
    let mut edges = Vec::new();
    for a in 0..k as u64 {
        let base_a = a * size;
        bernoulli_successes(size * (size.saturating_sub(1)) / 2, p_in, rng, |t| {
            let (i, j) = triangular_pair(t);
            edges.push(((base_a + i) as usize, (base_a + j) as usize));
        });
        for b in a + 1..k as u64 {
            let base_b = b * size;
            bernoulli_successes(size * size, p_out, rng, |t| {
                edges.push(((base_a + t / size) as usize, (base_b + t % size) as usize));
            });
        }
    }
    Ok((Graph::from_edges(n, edges)?, labels))
}

/// Bernoulli SBM with probabilities from `(d, λ)`. No features.
pub fn sample_sbm(params: &CsbmParams, rng: &mut RngStream) -> Result<(Graph, Labels)> {
    params.validate()?;
    let (p_in, p_out) = params.probs()?;
    sample_block_graph(params.n, params.k, p_in, p_out, rng)
}

/// Degree weights scaled so each class has mean weight 1.
pub fn degree_weights(spec: &DegreeWeightSpec, labels: &Labels, rng: &mut RngStream) -> Result<Vec<f64>> {
    let raw: Vec<f64> = match spec {
        DegreeWeightSpec::PowerLaw { exponent, w_min } => {
            if !(*exponent > 1.0) || !(*w_min >= 1.0) {
                return Err(domain(format!("invalid power law ({exponent}, {w_min})")));
            }
            // continuous-approximation inverse transform of the discrete law
            (0..labels.len())
                .map(|_| {
                    let u: f64 = rng.random();
                    ((w_min - 0.5) * (1.0 - u).powf(-1.0 / (exponent - 1.0)) + 0.5).floor()
                })
                .collect()
        }
        DegreeWeightSpec::Explicit { weights } => {
            if weights.len() != labels.len() {
                return Err(domain(format!(
                    "{} weights for {} nodes",
                    weights.len(),
                    labels.len()
                )));
            }
            if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
                return Err(domain("degree weights must be positive and finite"));
            }
            weights.clone()
        }
    };
    let k = labels.k();
    let mut sums = vec![0.0; k];
    for (i, w) in raw.iter().enumerate() {
        sums[labels.class(i)] += w;
    }
    let sizes = labels.class_sizes();
    Ok(raw
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let c = labels.class(i);
            w * sizes[c] as f64 / sums[c]
        })
        .collect())
}

/// Degree-corrected SBM: pair `(i, j)` is linked with probability
/// `min(1, w_i·w_j·p_block)`.
pub fn sample_dcsbm(params: &CsbmParams, rng: &mut RngStream) -> Result<(Graph, Labels)> {
    params.validate()?;
    let spec = params
        .degree_correction
        .as_ref()
        .ok_or_else(|| domain("degree-corrected sampling needs a degree weight spec"))?;
    let (p_in, p_out) = params.probs()?;
    let labels = Labels::blocks(params.n, params.k)?;
    let mut weight_rng = rng.child(0);
    let weights = degree_weights(spec, &labels, &mut weight_rng)?;
    let mut edge_rng = rng.child(1);
    let n = params.n;
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p_block = if labels.class(i) == labels.class(j) { p_in } else { p_out };
            let p = (weights[i] * weights[j] * p_block).min(1.0);
            if p > 0.0 && edge_rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Ok((Graph::from_canonical(n, edges), labels))
}

/// SBM or DC-SBM topology, depending on whether degree correction is set.
pub fn sample_topology(params: &CsbmParams, rng: &mut RngStream) -> Result<(Graph, Labels)> {
    if params.degree_correction.is_some() {
        sample_dcsbm(params, rng)
    } else {
        sample_sbm(params, rng)
    }
}

/// Full cSBM draw: topology from the child stream 0, features from child 1.
pub fn sample_csbm(params: &CsbmParams, rng: &RngStream) -> Result<LabeledGraph> {
    let (graph, labels) = sample_topology(params, &mut rng.child(0))?;
    let features = super::features::sample_features(&labels, params, &mut rng.child(1))?;
    LabeledGraph::new(graph, labels, Some(features))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{block_edge_counts, graph_stats};

    #[test]
    fn triangular_index_round_trip() {
        let mut t = 0;
        for j in 1..60u64 {
            for i in 0..j {
                assert_eq!(triangular_pair(t), (i, j));
                t += 1;
            }
        }
    }

    #[test]
    fn geometric_skips_match_bernoulli_rate() {
        let mut rng = RngStream::new(3);
        let mut hits = 0u64;
        bernoulli_successes(1_000_000, 0.01, &mut rng, |_| hits += 1);
        // sd = sqrt(1e6 * 0.01 * 0.99) ≈ 99.5
        assert!((hits as f64 - 10_000.0).abs() < 500.0, "{hits}");
        let mut all = Vec::new();
        bernoulli_successes(5, 1.0, &mut rng, |t| all.push(t));
        assert_eq!(all, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn deterministic_blocks() {
        let (g, l) = sample_block_graph(4, 2, 1.0, 0.0, &mut RngStream::new(0)).unwrap();
        assert_eq!(block_edge_counts(&g, &l).unwrap(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(g.edges(), &[(0, 1), (2, 3)]);
    }

    #[test]
    fn average_degree_near_d() {
        let params = CsbmParams::default();
        let mut total = 0.0;
        for seed in 0..20 {
            let (g, l) = sample_sbm(&params, &mut RngStream::new(seed)).unwrap();
            let s = graph_stats(&g, &l).unwrap();
            assert!((9.0..=11.0).contains(&s.avg_degree), "{}", s.avg_degree);
            total += s.avg_degree;
        }
        // E = d(n-1)/n ≈ 9.99; per-seed sd ≈ 0.14
        assert!((total / 20.0 - 9.99).abs() < 0.1);
    }

    #[test]
    fn homophily_fraction_tracks_lambda() {
        let params = CsbmParams { lambda: 2.0, ..Default::default() };
        let expected = (10.0 + 2.0 * 10f64.sqrt()) / 20.0;
        for seed in 0..5 {
            let (g, l) = sample_sbm(&params, &mut RngStream::new(seed)).unwrap();
            let h = graph_stats(&g, &l).unwrap().edge_homophily;
            assert!((h - expected).abs() < 0.03, "{h} vs {expected}");
        }
    }

    #[test]
    fn block_densities_within_three_standard_errors() {
        let params = CsbmParams { lambda: 1.5, ..Default::default() };
        let (p_in, p_out) = params.probs().unwrap();
        let seeds = 50;
        let (mut intra, mut inter) = (Vec::new(), Vec::new());
        for seed in 0..seeds {
            let (g, l) = sample_sbm(&params, &mut RngStream::new(1000 + seed)).unwrap();
            let c = block_edge_counts(&g, &l).unwrap();
            intra.push((c[0][0] + c[1][1]) as f64 / (2.0 * 500.0 * 499.0 / 2.0));
            inter.push(c[0][1] as f64 / (500.0 * 500.0));
        }
        for (xs, p) in [(intra, p_in), (inter, p_out)] {
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
            let se = (var / xs.len() as f64).sqrt();
            assert!((mean - p).abs() <= 3.0 * se, "{mean} vs {p} (se {se})");
        }
    }

    #[test]
    fn weights_normalised_per_class() {
        let labels = Labels::blocks(1000, 2).unwrap();
        let w = degree_weights(&DegreeWeightSpec::default(), &labels, &mut RngStream::new(9)).unwrap();
        for c in 0..2 {
            let mean = w[c * 500..(c + 1) * 500].iter().sum::<f64>() / 500.0;
            assert!((mean - 1.0).abs() < 1e-12);
        }
        assert!(w.iter().all(|&x| x > 0.0));

        let twos = DegreeWeightSpec::Explicit { weights: vec![2.0; 1000] };
        let ones = DegreeWeightSpec::Explicit { weights: vec![1.0; 1000] };
        let a = degree_weights(&twos, &labels, &mut RngStream::new(1)).unwrap();
        let b = degree_weights(&ones, &labels, &mut RngStream::new(1)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn normalisation_invariance_gives_identical_graphs() {
        let base = CsbmParams { lambda: 1.0, ..Default::default() };
        let twos = CsbmParams {
            degree_correction: Some(DegreeWeightSpec::Explicit { weights: vec![2.0; 1000] }),
            ..base.clone()
        };
        let ones = CsbmParams {
            degree_correction: Some(DegreeWeightSpec::Explicit { weights: vec![1.0; 1000] }),
            ..base
        };
        let a = sample_dcsbm(&twos, &mut RngStream::new(5)).unwrap();
        let b = sample_dcsbm(&ones, &mut RngStream::new(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn power_law_gives_heavy_tail() {
        let params = CsbmParams {
            degree_correction: Some(DegreeWeightSpec::PowerLaw { exponent: 2.5, w_min: 1.0 }),
            ..Default::default()
        };
        let mut heavy = 0;
        for seed in 0..20 {
            let (g, l) = sample_dcsbm(&params, &mut RngStream::new(seed)).unwrap();
            let s = graph_stats(&g, &l).unwrap();
            if s.max_degree as f64 >= 5.0 * s.avg_degree {
                heavy += 1;
            }
        }
        assert!(heavy >= 18, "{heavy}/20");
    }

    #[test]
    fn dcsbm_requires_spec() {
        assert!(sample_dcsbm(&CsbmParams::default(), &mut RngStream::new(0)).is_err());
    }
}
