use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{domain, Result};
use crate::graph::{Graph, Labels};
use crate::rng::RngStream;

#[derive(Clone, Debug)]
pub struct EnnSample {
    pub graph: Graph,
    pub labels: Labels,
    pub positions: Vec<[f64; 2]>,
}

/// Epsilon-neighbourhood graph on points uniform in the unit square. Half
/// the nodes, chosen at random, are class 0. Same-class pairs within
/// `eps_intra` and cross-class pairs within `eps_inter` are linked.
pub fn sample_enn_sbm(n: usize, eps_intra: f64, eps_inter: f64, rng: &mut RngStream) -> Result<EnnSample> {
    if !n.is_multiple_of(2) {
        return Err(domain(format!("n must be even, got {n}")));
    }
    if !(eps_intra >= 0.0 && eps_inter >= 0.0) {
        return Err(domain(format!("radii must be non-negative, got {eps_intra}, {eps_inter}")));
    }
    let positions: Vec<[f64; 2]> = (0..n).map(|_| [rng.random(), rng.random()]).collect();
    let mut classes: Vec<usize> = (0..n).map(|i| usize::from(i >= n / 2)).collect();
    classes.shuffle(rng);
    let labels = Labels::new(classes, 2)?;

    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let eps = if labels.class(i) == labels.class(j) { eps_intra } else { eps_inter };
            let (dx, dy) = (positions[i][0] - positions[j][0], positions[i][1] - positions[j][1]);
            if dx * dx + dy * dy <= eps * eps {
                edges.push((i, j));
            }
        }
    }
    Ok(EnnSample {
        graph: Graph::from_canonical(n, edges),
        labels,
        positions,
    })
}
