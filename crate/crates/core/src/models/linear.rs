use crate::error::{Error, Result};
use crate::graph::{check_len, Features, Graph, Labels};

fn check_graph_features(g: &Graph, x: &Features) -> Result<()> {
    check_len("feature rows", g.node_count(), x.rows())
}

fn sign(score: f64) -> i8 {
    if score < 0.0 {
        -1
    } else {
        1
    }
}

/// `sign(A X W)` without self-loops; zero scores (including isolated
/// nodes) map to +1.
pub fn one_layer_predict(g: &Graph, x: &Features, w: &[f64]) -> Result<Vec<i8>> {
    Ok(one_layer_scores(g, x, w)?.into_iter().map(sign).collect())
}

pub fn one_layer_scores(g: &Graph, x: &Features, w: &[f64]) -> Result<Vec<f64>> {
    check_graph_features(g, x)?;
    if w.iter().all(|&v| v == 0.0) {
        return Err(crate::error::domain("one-layer weight vector must be non-zero"));
    }
    let proj = x.project(w)?;
    Ok((0..g.node_count())
        .map(|i| g.neighbors(i).iter().map(|&j| proj[j]).sum())
        .collect())
}

/// Aggregate `values` over `N(i) ∪ {i}`.
pub(crate) fn aggregate_with_self(g: &Graph, values: &[f64]) -> Vec<f64> {
    (0..g.node_count())
        .map(|i| values[i] + g.neighbors(i).iter().map(|&j| values[j]).sum::<f64>())
        .collect()
}

/// `sign(sgn(K) · Σ_{j ∈ N(i)∪{i}} Σ_{k ∈ N(j)∪{j}} X(k)·m)`, ties to +1.
pub fn two_layer_linear_predict(g: &Graph, x: &Features, m: &[f64], sign_k: f64) -> Result<Vec<i8>> {
    Ok(two_layer_linear_scores(g, x, m, sign_k)?.into_iter().map(sign).collect())
}

pub fn two_layer_linear_scores(g: &Graph, x: &Features, m: &[f64], sign_k: f64) -> Result<Vec<f64>> {
    check_graph_features(g, x)?;
    let proj = x.project(m)?;
    let once = aggregate_with_self(g, &proj);
    Ok(aggregate_with_self(g, &once).into_iter().map(|s| sign_k * s).collect())
}

/// Fraction of nodes whose ±1 prediction matches the label sign (class 0
/// is +1).
pub fn sign_accuracy(pred: &[i8], labels: &Labels) -> Result<f64> {
    let signs = labels.signs()?;
    if pred.len() != signs.len() {
        return Err(Error::Dimension {
            what: "predictions",
            expected: signs.len(),
            found: pred.len(),
        });
    }
    if pred.is_empty() {
        return Ok(0.0);
    }
    let hits = pred.iter().zip(&signs).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / pred.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    #[test]
    fn aligned_features_all_positive() {
        let x = Features::new(4, 2, [0.0, 1.0].repeat(4)).unwrap();
        assert_eq!(one_layer_predict(&path(), &x, &[0.0, 1.0]).unwrap(), vec![1; 4]);
        let neg = x.map(|v| -v);
        assert_eq!(one_layer_predict(&path(), &neg, &[0.0, 1.0]).unwrap(), vec![-1; 4]);
        assert!(one_layer_predict(&path(), &x, &[0.0, 0.0]).is_err());
        assert!(one_layer_predict(&Graph::empty(3), &x, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn isolated_scores() {
        let x = Features::new(2, 1, vec![-3.0, 2.0]).unwrap();
        let g = Graph::empty(2);
        assert_eq!(one_layer_scores(&g, &x, &[1.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(one_layer_predict(&g, &x, &[1.0]).unwrap(), vec![1, 1]);
        // a lone node sees itself once through both hops
        let lone = Features::new(1, 1, vec![0.7]).unwrap();
        assert_eq!(two_layer_linear_scores(&Graph::empty(1), &lone, &[1.0], 1.0).unwrap(), vec![0.7]);
    }

    #[test]
    fn two_walk_counts() {
        // path 0-1-2-3 with a unit feature at node 3 only
        let x = Features::new(4, 1, vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        let s = two_layer_linear_scores(&path(), &x, &[1.0], 1.0).unwrap();
        // (A + I)^2 column 3: [0, 1, 2, 2]
        assert_eq!(s, vec![0.0, 1.0, 2.0, 2.0]);
        let flipped = two_layer_linear_predict(&path(), &x.map(|v| v - 0.1), &[1.0], -1.0).unwrap();
        let plain = two_layer_linear_predict(&path(), &x.map(|v| v - 0.1), &[1.0], 1.0).unwrap();
        for (a, b) in flipped.iter().zip(&plain) {
            assert_eq!(*a, -*b);
        }
    }
}
