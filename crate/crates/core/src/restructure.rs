//! Erasing higher-order structure: block-preserving edge rewiring and
//! per-class Gaussian feature resampling.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dataset::{read_dataset, write_edges, write_features, write_meta, EDGES_FILE, FEATURES_FILE, LABELS_FILE, META_FILE};
use crate::error::{domain, Error, Result};
use crate::graph::{check_len, Features, Graph, Labels};
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewireConfig {
    pub swaps_per_edge: f64,
    pub seed: u64,
}

impl Default for RewireConfig {
    fn default() -> Self {
        Self {
            swaps_per_edge: 10.0,
            seed: 0,
        }
    }
}

/// Randomize `g` by double-edge swaps that keep every node's degree and
/// every block edge count.
///
/// Edges are grouped by the classes of their endpoints. A swap takes two
/// edges `(a, b)`, `(c, d)` of the same group, oriented so that `a` and `c`
/// share a class (and so `b` and `d`), and replaces them with `(a, d)`,
/// `(c, b)`. Swaps that would create a self-loop or a duplicate edge are
/// skipped.
pub fn rewire_preserving_blocks(g: &Graph, labels: &Labels, cfg: &RewireConfig, rng: &mut RngStream) -> Result<Graph> {
    check_len("labels", g.node_count(), labels.len())?;
    if !(cfg.swaps_per_edge > 0.0 && cfg.swaps_per_edge.is_finite()) {
        return Err(domain(format!("swaps_per_edge must be positive, got {}", cfg.swaps_per_edge)));
    }
    let k = labels.k();
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k * k];
    for &(u, v) in g.edges() {
        let (a, b) = if labels.class(u) <= labels.class(v) { (u, v) } else { (v, u) };
        groups[labels.class(a) * k + labels.class(b)].push((a, b));
    }
    let groups: Vec<Vec<(usize, usize)>> = groups.into_iter().filter(|e| !e.is_empty()).collect();
    let total = g.edge_count();
    if total < 2 {
        return Ok(g.clone());
    }
    // cumulative sizes so that the first edge is uniform over all edges
    let mut offsets = Vec::with_capacity(groups.len());
    let mut acc = 0;
    for e in &groups {
        acc += e.len();
        offsets.push(acc);
    }
    let mut groups = groups;
    let mut present: HashSet<(usize, usize)> = g.edges().iter().copied().collect();
    let key = |u: usize, v: usize| if u < v { (u, v) } else { (v, u) };

    let attempts = (cfg.swaps_per_edge * total as f64).ceil() as u64;
    for _ in 0..attempts {
        let flat = rng.random_range(0..total);
        let gi = offsets.partition_point(|&o| o <= flat);
        let group = &mut groups[gi];
        if group.len() < 2 {
            continue;
        }
        let i = flat - (offsets[gi] - group.len());
        let mut j = rng.random_range(0..group.len() - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = group[i];
        let (mut c, mut d) = group[j];
        if labels.class(a) == labels.class(b) && rng.random_bool(0.5) {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d || c == b {
            continue;
        }
        let (new1, new2) = (key(a, d), key(c, b));
        if new1 == new2 || present.contains(&new1) || present.contains(&new2) {
            continue;
        }
        present.remove(&key(a, b));
        present.remove(&key(c, d));
        present.insert(new1);
        present.insert(new2);
        group[i] = (a, d);
        group[j] = (c, b);
    }
    Graph::from_edges(g.node_count(), groups.into_iter().flatten())
}

/// Replace every feature with an independent draw from a normal law whose
/// mean and standard deviation match that coordinate within the node's class.
pub fn resample_features_per_class(x: &Features, labels: &Labels, rng: &mut RngStream) -> Result<Features> {
    check_len("labels", x.rows(), labels.len())?;
    let (k, dim) = (labels.k(), x.dim());
    for (class, &size) in labels.class_sizes().iter().enumerate() {
        if size < 2 {
            return Err(Error::DegenerateClass { class, size, required: 2 });
        }
    }
    let members: Vec<Vec<usize>> = (0..k)
        .map(|c| (0..x.rows()).filter(|&i| labels.class(i) == c).collect())
        .collect();
    // per class and coordinate: (mean, std)
    let moments: Vec<Vec<(f64, f64)>> = members
        .iter()
        .map(|nodes| (0..dim).map(|j| column_moments(nodes.iter().map(|&i| x.row(i)[j]))).collect())
        .collect();
    let mut out = Features::zeros(x.rows(), dim);
    for i in 0..x.rows() {
        let class_moments = &moments[labels.class(i)];
        for (v, &(mean, std)) in out.row_mut(i).iter_mut().zip(class_moments) {
            let z: f64 = StandardNormal.sample(&mut *rng);
            *v = if std == 0.0 { mean } else { mean + std * z };
        }
    }
    Ok(out)
}

/// Sample mean and (n − 1)-normalized standard deviation. A constant column
/// returns its value exactly with zero spread.
fn column_moments(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (lo, hi) = values.clone().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
    if lo == hi {
        return (lo, 0.0);
    }
    let (mut n, mut mean, mut m2) = (0.0, 0.0, 0.0);
    for v in values {
        n += 1.0;
        let delta = v - mean;
        mean += delta / n;
        m2 += delta * (v - mean);
    }
    (mean, (m2 / (n - 1.0)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullMode {
    Edges,
    Features,
    Both,
}

impl NullMode {
    fn as_str(self) -> &'static str {
        match self {
            NullMode::Edges => "edges",
            NullMode::Features => "features",
            NullMode::Both => "both",
        }
    }
}

/// Read a dataset, rewire its edges and/or resample its features, and
/// write the result. Files that are not transformed are copied verbatim.
/// Edges use child stream 0 of `cfg.seed`, features child stream 1.
pub fn nullify_dataset(dir_in: &Path, dir_out: &Path, mode: NullMode, cfg: &RewireConfig) -> Result<()> {
    let loaded = read_dataset(dir_in)?;
    let data = &loaded.data;
    let rng = RngStream::new(cfg.seed);
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(dir_out).map_err(io(dir_out))?;

    let copy = |name: &str| -> Result<()> {
        let (src, dst) = (dir_in.join(name), dir_out.join(name));
        fs::copy(&src, &dst).map(|_| ()).map_err(io(&src))
    };
    copy(LABELS_FILE)?;

    if matches!(mode, NullMode::Edges | NullMode::Both) {
        let rewired = rewire_preserving_blocks(&data.graph, &data.labels, cfg, &mut rng.child(0))?;
        write_edges(&dir_out.join(EDGES_FILE), &rewired)?;
    } else {
        copy(EDGES_FILE)?;
    }

    match (&data.features, mode) {
        (Some(x), NullMode::Features | NullMode::Both) => {
            let resampled = resample_features_per_class(x, &data.labels, &mut rng.child(1))?;
            write_features(&dir_out.join(FEATURES_FILE), &resampled)?;
        }
        (None, NullMode::Features | NullMode::Both) => {
            return Err(domain(format!("{} has no {FEATURES_FILE} to resample", dir_in.display())));
        }
        (Some(_), NullMode::Edges) => copy(FEATURES_FILE)?,
        (None, NullMode::Edges) => {}
    }

    let mut meta = loaded.meta.clone();
    let mut record = json!({
        "mode": mode.as_str(),
        "seed": cfg.seed,
        "source": dir_in.display().to_string(),
    });
    if mode != NullMode::Features {
        record["swaps_per_edge"] = Value::from(cfg.swaps_per_edge);
    }
    meta.extra.insert("nullified".into(), record);
    write_meta(&dir_out.join(META_FILE), &meta)
}
