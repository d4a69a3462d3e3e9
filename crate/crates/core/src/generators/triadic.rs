use rand::seq::index::sample;

use crate::error::{domain, Result};
use crate::graph::Graph;
use crate::rng::RngStream;

/// Distinct endpoint pairs `(u, w)`, `u < w`, of open wedges `u – v – w`.
pub fn open_wedge_pairs(g: &Graph) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for v in 0..g.node_count() {
        let nb = g.neighbors(v);
        for (a, &u) in nb.iter().enumerate() {
            for &w in &nb[a + 1..] {
                if !g.has_edge(u, w) {
                    pairs.push((u, w));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

/// Close `⌊fraction · P⌋` of the `P` open-wedge pairs of `g`, chosen
/// uniformly without replacement. Wedges created by the new edges are not
/// considered.
pub fn apply_triadic_closure(g: &Graph, fraction: f64, rng: &mut RngStream) -> Result<Graph> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(domain(format!("closure fraction must lie in [0, 1], got {fraction}")));
    }
    let candidates = open_wedge_pairs(g);
    let amount = (fraction * candidates.len() as f64).floor() as usize;
    if amount == 0 {
        return Ok(g.clone());
    }
    let chosen = sample(rng, candidates.len(), amount);
    let added = chosen.iter().map(|i| candidates[i]);
    Graph::from_edges(g.node_count(), g.edges().iter().copied().chain(added))
}
