use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use super::linear::aggregate_with_self;
use crate::error::{domain, Error, Result};
use crate::generators::{sample_csbm, CsbmParams, MeanMode};
use crate::graph::{check_len, dot, Features, Graph};
use crate::rng::RngStream;

/// `y(x) = Σ_{j∈N(x)} ReLU(Σ_{k∈N(j)} X(k) W) · c`, with `N` including the
/// node itself when `with_self_loops` is set. `w` is row-major `m × p`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoLayerGcn {
    m_feat: usize,
    p: usize,
    w: Vec<f64>,
    c: Vec<f64>,
    pub with_self_loops: bool,
}

impl TwoLayerGcn {
    pub fn new(m_feat: usize, p: usize, w: Vec<f64>, c: Vec<f64>, with_self_loops: bool) -> Result<Self> {
        if p == 0 {
            return Err(domain("hidden width p must be at least 1"));
        }
        check_len("W entries", m_feat * p, w.len())?;
        check_len("c entries", p, c.len())?;
        if w.iter().chain(&c).any(|v| !v.is_finite()) {
            return Err(domain("model weights must be finite"));
        }
        Ok(Self { m_feat, p, w, c, with_self_loops })
    }

    /// Entries of `W` and `c` drawn i.i.d. standard normal.
    pub fn random(m_feat: usize, p: usize, with_self_loops: bool, rng: &mut RngStream) -> Self {
        let mut draw = |len: usize| -> Vec<f64> { (0..len).map(|_| StandardNormal.sample(&mut *rng)).collect() };
        let w = draw(m_feat * p);
        let c = draw(p);
        Self { m_feat, p, w, c, with_self_loops }
    }

    pub fn zeros(m_feat: usize, p: usize, with_self_loops: bool) -> Self {
        Self {
            m_feat,
            p,
            w: vec![0.0; m_feat * p],
            c: vec![0.0; p],
            with_self_loops,
        }
    }

    pub fn scale_c(&self, alpha: f64) -> Self {
        Self {
            c: self.c.iter().map(|v| alpha * v).collect(),
            ..self.clone()
        }
    }

    fn check(&self, g: &Graph, x: &Features) -> Result<()> {
        check_len("feature rows", g.node_count(), x.rows())?;
        check_len("feature dimension", self.m_feat, x.dim())
    }

    /// First-hop hidden vectors `Σ_{k∈N(j)} X(k) W`, row-major `n × p`.
    fn hidden(&self, g: &Graph, x: &Features) -> Vec<f64> {
        let n = g.node_count();
        let mut xw = vec![0.0; n * self.p];
        for i in 0..n {
            let row = x.row(i);
            let out = &mut xw[i * self.p..(i + 1) * self.p];
            for (a, &xa) in row.iter().enumerate() {
                if xa != 0.0 {
                    for (o, &wv) in out.iter_mut().zip(&self.w[a * self.p..(a + 1) * self.p]) {
                        *o += xa * wv;
                    }
                }
            }
        }
        let mut h = vec![0.0; n * self.p];
        for j in 0..n {
            let out = &mut h[j * self.p..(j + 1) * self.p];
            if self.with_self_loops {
                out.copy_from_slice(&xw[j * self.p..(j + 1) * self.p]);
            }
            for &k in g.neighbors(j) {
                for (o, v) in out.iter_mut().zip(&xw[k * self.p..(k + 1) * self.p]) {
                    *o += v;
                }
            }
        }
        h
    }

    fn second_hop(&self, g: &Graph, per_node: &[f64]) -> Vec<f64> {
        if self.with_self_loops {
            aggregate_with_self(g, per_node)
        } else {
            (0..g.node_count())
                .map(|i| g.neighbors(i).iter().map(|&j| per_node[j]).sum())
                .collect()
        }
    }
}

pub fn gcn_forward(g: &Graph, x: &Features, model: &TwoLayerGcn) -> Result<Vec<f64>> {
    model.check(g, x)?;
    let h = model.hidden(g, x);
    let per_node: Vec<f64> = h
        .chunks(model.p)
        .map(|hj| hj.iter().zip(&model.c).map(|(v, c)| v.max(0.0) * c).sum())
        .collect();
    Ok(model.second_hop(g, &per_node))
}

/// `L[y]`: the forward pass with the ReLU removed, halved.
pub fn linearize(g: &Graph, x: &Features, model: &TwoLayerGcn) -> Result<Vec<f64>> {
    model.check(g, x)?;
    let h = model.hidden(g, x);
    let per_node: Vec<f64> = h.chunks(model.p).map(|hj| 0.5 * dot(hj, &model.c)).collect();
    Ok(model.second_hop(g, &per_node))
}

/// `P_S[L[y]]` for `S = span(m)`: `L[y]` evaluated on `(X(k)·m) m`.
pub fn project_linear(g: &Graph, x: &Features, model: &TwoLayerGcn, m: &[f64]) -> Result<Vec<f64>> {
    linearize(g, &project_features(x, m)?, model)
}

/// Replace each row by its projection onto the unit vector `m`.
pub fn project_features(x: &Features, m: &[f64]) -> Result<Features> {
    let proj = x.project(m)?;
    let data = proj.iter().flat_map(|&s| m.iter().map(move |v| s * v)).collect();
    Features::new(x.rows(), x.dim(), data)
}

/// Reflect each row across `span(m)`: `2(X·m)m − X`.
pub fn reflect_features(x: &Features, m: &[f64]) -> Result<Features> {
    let proj = x.project(m)?;
    let mut out = x.clone();
    for (i, s) in proj.iter().enumerate() {
        for (v, mj) in out.row_mut(i).iter_mut().zip(m) {
            *v = 2.0 * s * mj - *v;
        }
    }
    Ok(out)
}

fn softplus_neg(z: f64) -> f64 {
    // log(1 + e^{-z}) without overflow
    if z > 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// Mean logistic loss `log(1 + e^{-v·y})` with labels `v ∈ {±1}`.
pub fn logistic_cost(scores: &[f64], labels: &[i8]) -> Result<f64> {
    check_len("labels", scores.len(), labels.len())?;
    if scores.is_empty() {
        return Err(domain("cost of an empty score set"));
    }
    let per_node: Vec<f64> = scores.iter().zip(labels).map(|(&s, &v)| softplus_neg(v as f64 * s)).collect();
    Ok(mean_se(&per_node).0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CostTrial {
    pub c_y: f64,
    pub c_ly: f64,
    pub c_psly: f64,
    pub se_y: f64,
    pub se_ly: f64,
    pub se_psly: f64,
    /// Standard error of the per-node difference `C(L[y]) − C(y)`.
    pub se_ly_minus_y: f64,
    /// Standard error of the per-node difference `C(P_S L[y]) − C(L[y])`.
    pub se_psly_minus_ly: f64,
    pub nodes: usize,
}

/// Monte Carlo estimates of `C(y)`, `C(L[y])` and `C(P_S L[y])` over
/// `n_nodes_sampled` nodes drawn from fresh cSBM graphs.
pub fn cost_inequality_trial(
    params: &CsbmParams,
    model: &TwoLayerGcn,
    n_nodes_sampled: usize,
    rng: &RngStream,
) -> Result<CostTrial> {
    params.validate()?;
    if params.k != 2 || params.mean_mode != MeanMode::Diametric {
        return Err(domain("the cost comparison needs k = 2 with diametric means"));
    }
    if params.m_feat != model.m_feat {
        return Err(Error::Dimension {
            what: "feature dimension",
            expected: model.m_feat,
            found: params.m_feat,
        });
    }
    if n_nodes_sampled == 0 {
        return Err(domain("need at least one sampled node"));
    }
    let (m, _) = params.separating_direction()?;
    let mut per_node: [Vec<f64>; 3] = Default::default();
    let mut graph_index = 0;
    while per_node[0].len() < n_nodes_sampled {
        let data = sample_csbm(params, &rng.child(graph_index))?;
        graph_index += 1;
        let x = data.features()?;
        let v = data.labels.signs()?;
        let scores = [
            gcn_forward(&data.graph, x, model)?,
            linearize(&data.graph, x, model)?,
            project_linear(&data.graph, x, model, &m)?,
        ];
        let take = (n_nodes_sampled - per_node[0].len()).min(v.len());
        for (acc, s) in per_node.iter_mut().zip(&scores) {
            acc.extend(s.iter().zip(&v).take(take).map(|(&s, &vi)| softplus_neg(vi as f64 * s)));
        }
    }
    let (c_y, se_y) = mean_se(&per_node[0]);
    let (c_ly, se_ly) = mean_se(&per_node[1]);
    let (c_psly, se_psly) = mean_se(&per_node[2]);
    let diff = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
    let se_ly_minus_y = mean_se(&diff(&per_node[1], &per_node[0])).1;
    let se_psly_minus_ly = mean_se(&diff(&per_node[2], &per_node[1])).1;
    Ok(CostTrial {
        c_y,
        c_ly,
        c_psly,
        se_y,
        se_ly,
        se_psly,
        se_ly_minus_y,
        se_psly_minus_ly,
        nodes: n_nodes_sampled,
    })
}

/// Running (Welford) mean and standard error; a constant sample gives its
/// value back exactly.
fn mean_se(v: &[f64]) -> (f64, f64) {
    let (mut mean, mut m2) = (0.0, 0.0);
    for (i, &x) in v.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let n = v.len() as f64;
    (mean, (m2 / (n - 1.0) / n).sqrt())
}
