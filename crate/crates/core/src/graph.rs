//! Simple undirected graphs in compressed adjacency form, with class labels
//! and node features.
//!
//! Every edge is stored once as `(u, v)` with `u < v`, sorted
//! lexicographically; each node additionally has a sorted neighbor slice.

use crate::error::{domain, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    adjacency: Vec<usize>,
}

impl Graph {
    /// Graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            offsets: vec![0; n + 1],
            adjacency: Vec::new(),
        }
    }

    /// Build from an edge list in any order and orientation. Duplicate edges
    /// collapse; self-loops and out-of-range endpoints are errors.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(domain(format!("edge ({u}, {v}) out of range for {n} nodes")));
            }
            if u == v {
                return Err(domain(format!("self-loop at node {u}")));
            }
            canon.push(if u < v { (u, v) } else { (v, u) });
        }
        canon.sort_unstable();
        canon.dedup();
        Ok(Self::from_canonical(n, canon))
    }

    /// `edges` must already be sorted, deduplicated and oriented `u < v < n`.
    pub(crate) fn from_canonical(n: usize, edges: Vec<(usize, usize)>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(edges.iter().all(|&(u, v)| u < v && v < n));
        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut cursor = offsets[..n].to_vec();
        let mut adjacency = vec![0usize; 2 * edges.len()];
        // With edges sorted by (u, v), filling lower neighbours first and
        // upper neighbours second leaves every list ascending.
        for &(u, v) in &edges {
            adjacency[cursor[v]] = u;
            cursor[v] += 1;
        }
        for &(u, v) in &edges {
            adjacency[cursor[u]] = v;
            cursor[u] += 1;
        }
        Self {
            n,
            edges,
            offsets,
            adjacency,
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list, `u < v`, lexicographically sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    /// Number of triangles, counted once each.
    pub fn triangle_count(&self) -> u64 {
        let mut count = 0u64;
        for &(u, v) in &self.edges {
            // common neighbours w > v close a triangle u < v < w exactly once
            let (a, b) = (self.neighbors(u), self.neighbors(v));
            let (mut i, mut j) = (a.partition_point(|&x| x <= v), b.partition_point(|&x| x <= v));
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        count += 1;
                        i += 1;
                        j += 1;
                    }
                }
            }
        }
        count
    }
}

/// Per-node class indices in `[0, k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labels {
    classes: Vec<usize>,
    k: usize,
}

impl Labels {
    pub fn new(classes: Vec<usize>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(domain("class count must be positive"));
        }
        if let Some((i, &c)) = classes.iter().enumerate().find(|(_, &c)| c >= k) {
            return Err(domain(format!("node {i} has class {c} outside [0, {k})")));
        }
        Ok(Self { classes, k })
    }

    /// `n / k` consecutive nodes per class: first block class 0, and so on.
    pub fn blocks(n: usize, k: usize) -> Result<Self> {
        if k == 0 || !n.is_multiple_of(k) {
            return Err(domain(format!("{n} nodes cannot be split into {k} equal classes")));
        }
        let size = n / k;
        Self::new((0..n).map(|i| i / size).collect(), k)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn class(&self, i: usize) -> usize {
        self.classes[i]
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &c in &self.classes {
            sizes[c] += 1;
        }
        sizes
    }

    /// Binary labels as ±1: class 0 maps to +1, class 1 to −1.
    pub fn signs(&self) -> Result<Vec<i8>> {
        if self.k != 2 {
            return Err(domain(format!("sign labels need k = 2, got {}", self.k)));
        }
        Ok(self.classes.iter().map(|&c| if c == 0 { 1 } else { -1 }).collect())
    }
}

/// Dense row-major `n × dim` feature matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Features {
    n: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Features {
    pub fn new(n: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * dim {
            return Err(Error::Dimension {
                what: "feature matrix",
                expected: n * dim,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(domain(format!(
                "non-finite feature at node {}, column {}",
                pos / dim.max(1),
                pos % dim.max(1)
            )));
        }
        Ok(Self { n, dim, data })
    }

    pub fn zeros(n: usize, dim: usize) -> Self {
        Self {
            n,
            dim,
            data: vec![0.0; n * dim],
        }
    }

    pub fn rows(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Row-wise dot product with `w`.
    pub fn project(&self, w: &[f64]) -> Result<Vec<f64>> {
        if w.len() != self.dim {
            return Err(Error::Dimension {
                what: "projection vector",
                expected: self.dim,
                found: w.len(),
            });
        }
        Ok((0..self.n).map(|i| dot(self.row(i), w)).collect())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            n: self.n,
            dim: self.dim,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A graph with its ground-truth classes and, optionally, node features.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Labels,
    pub features: Option<Features>,
}

impl LabeledGraph {
    pub fn new(graph: Graph, labels: Labels, features: Option<Features>) -> Result<Self> {
        check_len("labels", graph.node_count(), labels.len())?;
        if let Some(x) = &features {
            check_len("feature rows", graph.node_count(), x.rows())?;
        }
        Ok(Self {
            graph,
            labels,
            features,
        })
    }

    pub fn features(&self) -> Result<&Features> {
        self.features
            .as_ref()
            .ok_or_else(|| domain("dataset has no node features"))
    }
}

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension {
            what,
            expected,
            found,
        })
    }
}

pub fn degree_sequence(g: &Graph) -> Vec<usize> {
    g.degree_sequence()
}

/// Symmetric `k × k` tally of edges by endpoint classes. Diagonal entries
/// count intra-class edges; off-diagonal `(a, b)` and `(b, a)` both hold the
/// number of edges between classes `a` and `b`.
pub fn block_edge_counts(g: &Graph, labels: &Labels) -> Result<Vec<Vec<u64>>> {
    check_len("labels", g.node_count(), labels.len())?;
    let k = labels.k();
    let mut counts = vec![vec![0u64; k]; k];
    for &(u, v) in g.edges() {
        let (a, b) = (labels.class(u), labels.class(v));
        counts[a][b] += 1;
        if a != b {
            counts[b][a] += 1;
        }
    }
    Ok(counts)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphStats {
    pub avg_degree: f64,
    pub max_degree: usize,
    pub edge_homophily: f64,
}

pub fn graph_stats(g: &Graph, labels: &Labels) -> Result<GraphStats> {
    check_len("labels", g.node_count(), labels.len())?;
    let m = g.edge_count();
    let intra = g
        .edges()
        .iter()
        .filter(|&&(u, v)| labels.class(u) == labels.class(v))
        .count();
    Ok(GraphStats {
        avg_degree: if g.node_count() == 0 {
            0.0
        } else {
            2.0 * m as f64 / g.node_count() as f64
        },
        max_degree: (0..g.node_count()).map(|i| g.degree(i)).max().unwrap_or(0),
        edge_homophily: if m == 0 { 0.0 } else { intra as f64 / m as f64 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap()
    }

    #[test]
    fn degree_sequences() {
        assert_eq!(degree_sequence(&triangle()), vec![2, 2, 2]);
        assert_eq!(degree_sequence(&Graph::empty(4)), vec![0, 0, 0, 0]);
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(degree_sequence(&path), vec![1, 2, 1]);
    }

    #[test]
    fn block_counts() {
        let one = Labels::new(vec![0; 3], 1).unwrap();
        assert_eq!(block_edge_counts(&triangle(), &one).unwrap(), vec![vec![3]]);

        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let l = Labels::new(vec![0, 1], 2).unwrap();
        assert_eq!(block_edge_counts(&g, &l).unwrap(), vec![vec![0, 1], vec![1, 0]]);

        let g = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let l = Labels::new(vec![0, 0, 1, 1], 2).unwrap();
        assert_eq!(block_edge_counts(&g, &l).unwrap(), vec![vec![1, 0], vec![0, 1]]);

        let short = Labels::new(vec![0, 0], 2).unwrap();
        assert!(matches!(
            block_edge_counts(&g, &short),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn stats() {
        let one = Labels::new(vec![0; 3], 1).unwrap();
        let s = graph_stats(&triangle(), &one).unwrap();
        assert_eq!((s.avg_degree, s.max_degree, s.edge_homophily), (2.0, 2, 1.0));

        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let l = Labels::new(vec![0, 1], 2).unwrap();
        let s = graph_stats(&g, &l).unwrap();
        assert_eq!((s.avg_degree, s.max_degree, s.edge_homophily), (1.0, 1, 0.0));

        let s = graph_stats(&Graph::empty(3), &one).unwrap();
        assert_eq!(s.edge_homophily, 0.0);
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(Graph::from_edges(3, [(1, 1)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
    }

    #[test]
    fn triangles() {
        assert_eq!(triangle().triangle_count(), 1);
        let k4 = Graph::from_edges(4, (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v)))).unwrap();
        assert_eq!(k4.triangle_count(), 4);
        assert_eq!(Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap().triangle_count(), 0);
    }

    #[test]
    fn sign_labels() {
        let l = Labels::blocks(4, 2).unwrap();
        assert_eq!(l.signs().unwrap(), vec![1, 1, -1, -1]);
        assert!(Labels::blocks(5, 2).is_err());
        assert!(Labels::blocks(6, 3).unwrap().signs().is_err());
    }

    #[test]
    fn features_reject_non_finite() {
        assert!(Features::new(1, 2, vec![0.0, f64::NAN]).is_err());
        assert!(Features::new(1, 2, vec![0.0]).is_err());
    }

    proptest! {
        #[test]
        fn canonical_storage_ignores_order(
            raw in proptest::collection::vec((0usize..12, 0usize..12), 0..40),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let edges: Vec<_> = raw.into_iter().filter(|(u, v)| u != v).collect();
            let g = Graph::from_edges(12, edges.clone()).unwrap();
            let mut shuffled: Vec<_> = edges.iter().map(|&(u, v)| if seed % 2 == 0 { (v, u) } else { (u, v) }).collect();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let h = Graph::from_edges(12, shuffled).unwrap();
            prop_assert_eq!(&g, &h);

            let degrees = degree_sequence(&g);
            prop_assert_eq!(degrees.iter().sum::<usize>(), 2 * g.edge_count());
            for (i, &deg) in degrees.iter().enumerate() {
                let nb = g.neighbors(i);
                prop_assert!(nb.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(!nb.contains(&i));
                prop_assert_eq!(nb.len(), deg);
            }
        }
    }
}
