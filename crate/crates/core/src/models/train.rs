use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::graph::{check_len, Features, Graph, LabeledGraph, Labels};
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: 16,
            epochs: 400,
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.hidden == 0 || self.epochs == 0 || !(self.learning_rate > 0.0) {
            return Err(domain(format!(
                "need hidden >= 1, epochs >= 1 and learning_rate > 0, got {}, {}, {}",
                self.hidden, self.epochs, self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainOutcome {
    pub test_accuracy: f64,
    pub loss_curve: Vec<f64>,
}

/// Sparse symmetric propagation `D̃^{-1/2}(A + I)D̃^{-1/2}`, or the identity.
enum Propagation {
    Gcn { graph: Graph, scale: Vec<f64> },
    Identity,
}

impl Propagation {
    fn gcn(g: &Graph) -> Self {
        let scale = (0..g.node_count()).map(|i| 1.0 / ((g.degree(i) + 1) as f64).sqrt()).collect();
        Propagation::Gcn { graph: g.clone(), scale }
    }

    fn apply(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        match self {
            Propagation::Identity => m.clone(),
            Propagation::Gcn { graph, scale } => {
                let mut out = DMatrix::zeros(m.nrows(), m.ncols());
                for c in 0..m.ncols() {
                    let col = m.column(c);
                    for i in 0..m.nrows() {
                        let mut s = scale[i] * col[i];
                        for &j in graph.neighbors(i) {
                            s += scale[j] * col[j];
                        }
                        out[(i, c)] = scale[i] * s;
                    }
                }
                out
            }
        }
    }
}

/// Two-layer network `softmax(P · ReLU(P X W1 + b1) W2 + b2)`.
#[derive(Clone, Debug)]
struct Params {
    w1: DMatrix<f64>,
    b1: DMatrix<f64>,
    w2: DMatrix<f64>,
    b2: DMatrix<f64>,
}

impl Params {
    fn init(m_feat: usize, hidden: usize, k: usize, rng: &mut RngStream) -> Self {
        let mut gauss = |rows: usize, cols: usize| {
            let normal = Normal::new(0.0, 1.0 / (rows as f64).sqrt()).expect("positive std");
            DMatrix::from_fn(rows, cols, |_, _| normal.sample(&mut *rng))
        };
        let w1 = gauss(m_feat, hidden);
        let w2 = gauss(hidden, k);
        Self {
            w1,
            b1: DMatrix::zeros(1, hidden),
            w2,
            b2: DMatrix::zeros(1, k),
        }
    }

    fn tensors_mut(&mut self) -> [&mut DMatrix<f64>; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }
}

fn add_row(m: &mut DMatrix<f64>, row: &DMatrix<f64>) {
    for mut r in m.row_iter_mut() {
        r += row;
    }
}

fn col_sums(m: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(1, m.ncols(), |_, c| m.column(c).sum())
}

/// Logits for every node.
fn forward(prop: &Propagation, px: &DMatrix<f64>, p: &Params) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let mut z1 = px * &p.w1;
    add_row(&mut z1, &p.b1);
    let h = z1.map(|v| v.max(0.0));
    let mut z2 = prop.apply(&(&h * &p.w2));
    add_row(&mut z2, &p.b2);
    (z1, h, z2)
}

/// Row-wise softmax and mean cross-entropy.
fn softmax_loss(z2: &DMatrix<f64>, labels: &[usize]) -> (DMatrix<f64>, f64) {
    let mut probs = z2.clone();
    let mut loss = 0.0;
    for (i, mut row) in probs.row_iter_mut().enumerate() {
        let max = row.max();
        row.apply(|v| *v = (*v - max).exp());
        let sum = row.sum();
        row /= sum;
        loss -= (z2[(i, labels[i])] - max - sum.ln()) / labels.len() as f64;
    }
    (probs, loss)
}

fn loss_and_grads(prop: &Propagation, px: &DMatrix<f64>, labels: &[usize], p: &Params) -> (f64, Params) {
    let n = labels.len() as f64;
    let (z1, h, z2) = forward(prop, px, p);
    let (mut dz2, loss) = softmax_loss(&z2, labels);
    for (i, &c) in labels.iter().enumerate() {
        dz2[(i, c)] -= 1.0;
    }
    dz2 /= n;
    let db2 = col_sums(&dz2);
    // the propagation matrix is symmetric
    let dhw2 = prop.apply(&dz2);
    let dw2 = h.transpose() * &dhw2;
    let mut dz1 = &dhw2 * p.w2.transpose();
    dz1.zip_apply(&z1, |g, z| {
        if z <= 0.0 {
            *g = 0.0
        }
    });
    let db1 = col_sums(&dz1);
    let dw1 = px.transpose() * &dz1;
    (loss, Params { w1: dw1, b1: db1, w2: dw2, b2: db2 })
}

struct Adam {
    m: Params,
    v: Params,
    t: i32,
}

impl Adam {
    fn new(p: &Params) -> Self {
        let zero = |m: &DMatrix<f64>| DMatrix::zeros(m.nrows(), m.ncols());
        let z = Params { w1: zero(&p.w1), b1: zero(&p.b1), w2: zero(&p.w2), b2: zero(&p.b2) };
        Self { m: z.clone(), v: z, t: 0 }
    }

    fn step(&mut self, params: &mut Params, mut grads: Params, cfg: &TrainConfig) {
        self.t += 1;
        let c1 = 1.0 - cfg.beta1.powi(self.t);
        let c2 = 1.0 - cfg.beta2.powi(self.t);
        let slots = params
            .tensors_mut()
            .into_iter()
            .zip(grads.tensors_mut())
            .zip(self.m.tensors_mut())
            .zip(self.v.tensors_mut());
        for (((p, g), m), v) in slots {
            for i in 0..p.len() {
                m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
                v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
                p[i] -= cfg.learning_rate * (m[i] / c1) / ((v[i] / c2).sqrt() + cfg.epsilon);
            }
        }
    }
}

fn feature_matrix(x: &Features) -> DMatrix<f64> {
    DMatrix::from_row_slice(x.rows(), x.dim(), x.as_slice())
}

fn check_pair(train: &LabeledGraph, test: &LabeledGraph) -> Result<(usize, usize)> {
    let (xtr, xte) = (train.features()?, test.features()?);
    check_len("test feature dimension", xtr.dim(), xte.dim())?;
    check_len("test class count", train.labels.k(), test.labels.k())?;
    Ok((xtr.dim(), train.labels.k()))
}

fn fit_and_score(train: &LabeledGraph, test: &LabeledGraph, cfg: &TrainConfig, graph_aware: bool) -> Result<TrainOutcome> {
    cfg.validate()?;
    let (m_feat, k) = check_pair(train, test)?;
    let prop_for = |g: &Graph| if graph_aware { Propagation::gcn(g) } else { Propagation::Identity };

    let prop = prop_for(&train.graph);
    let px = prop.apply(&feature_matrix(train.features()?));
    let mut rng = RngStream::new(cfg.seed);
    let mut params = Params::init(m_feat, cfg.hidden, k, &mut rng);
    let mut adam = Adam::new(&params);
    let mut loss_curve = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let (loss, grads) = loss_and_grads(&prop, &px, train.labels.classes(), &params);
        if !loss.is_finite() {
            return Err(Error::Divergence { epoch, loss });
        }
        loss_curve.push(loss);
        adam.step(&mut params, grads, cfg);
    }

    let test_prop = prop_for(&test.graph);
    let test_px = test_prop.apply(&feature_matrix(test.features()?));
    let (_, _, logits) = forward(&test_prop, &test_px, &params);
    let pred = argmax_rows(&logits);
    Ok(TrainOutcome {
        test_accuracy: plain_accuracy(&pred, &test.labels),
        loss_curve,
    })
}

fn argmax_rows(m: &DMatrix<f64>) -> Vec<usize> {
    m.row_iter().map(|r| r.transpose().argmax().0).collect()
}

fn plain_accuracy(pred: &[usize], labels: &Labels) -> f64 {
    let hits = pred.iter().zip(labels.classes()).filter(|(a, b)| a == b).count();
    hits as f64 / pred.len().max(1) as f64
}

/// Train a two-layer GCN on one graph and report accuracy on another.
pub fn train_gcn(train: &LabeledGraph, test: &LabeledGraph, cfg: &TrainConfig) -> Result<TrainOutcome> {
    fit_and_score(train, test, cfg, true)
}

/// As [`train_gcn`] with the graph ignored: a one-hidden-layer perceptron
/// on the features.
pub fn train_mlp(train: &LabeledGraph, test: &LabeledGraph, cfg: &TrainConfig) -> Result<TrainOutcome> {
    fit_and_score(train, test, cfg, false)
}

/// Largest relative gap between the analytic loss gradient and a central
/// finite difference with step `h`, over every parameter entry. Weights are
/// initialised as for training and biases drawn from `N(0, 0.1²)` so that
/// no bias gradient is trivially compared at zero.
pub fn gradient_check(data: &LabeledGraph, hidden: usize, graph_aware: bool, h: f64, rng: &mut RngStream) -> Result<f64> {
    let x = data.features()?;
    check_len("labels", x.rows(), data.labels.len())?;
    if hidden == 0 || !(h > 0.0) {
        return Err(domain(format!("need hidden >= 1 and h > 0, got {hidden} and {h}")));
    }
    let prop = if graph_aware { Propagation::gcn(&data.graph) } else { Propagation::Identity };
    let px = prop.apply(&feature_matrix(x));
    let labels = data.labels.classes();
    let mut params = Params::init(x.dim(), hidden, data.labels.k(), rng);
    let bias = Normal::new(0.0, 0.1).expect("positive std");
    params.b1 = DMatrix::from_fn(1, hidden, |_, _| bias.sample(&mut *rng));
    params.b2 = DMatrix::from_fn(1, data.labels.k(), |_, _| bias.sample(&mut *rng));

    let (_, mut grads) = loss_and_grads(&prop, &px, labels, &params);
    let mut worst = 0.0f64;
    for t in 0..4 {
        let len = grads.tensors_mut()[t].len();
        for i in 0..len {
            let mut plus = params.clone();
            plus.tensors_mut()[t][i] += h;
            let mut minus = params.clone();
            minus.tensors_mut()[t][i] -= h;
            let numeric = (loss_and_grads(&prop, &px, labels, &plus).0 - loss_and_grads(&prop, &px, labels, &minus).0) / (2.0 * h);
            let analytic = grads.tensors_mut()[t][i];
            worst = worst.max((numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-6));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{sample_block_graph, sample_csbm, CsbmParams};
    use rand_distr::StandardNormal;

    fn small_instance(seed: u64) -> LabeledGraph {
        let mut rng = RngStream::new(seed);
        let (g, labels) = sample_block_graph(20, 2, 0.4, 0.1, &mut rng).unwrap();
        let x: Vec<f64> = (0..80).map(|_| StandardNormal.sample(&mut rng)).collect();
        LabeledGraph::new(g, labels, Some(Features::new(20, 4, x).unwrap())).unwrap()
    }

    #[test]
    fn gcn_gradients_match_finite_differences() {
        for seed in 0..3 {
            let err = gradient_check(&small_instance(seed), 5, true, 1e-5, &mut RngStream::new(seed + 50)).unwrap();
            assert!(err < 1e-4, "seed {seed}: {err}");
        }
    }

    #[test]
    fn mlp_gradients_match_finite_differences() {
        for seed in 0..3 {
            let err = gradient_check(&small_instance(seed), 5, false, 1e-5, &mut RngStream::new(seed + 50)).unwrap();
            assert!(err < 1e-4, "seed {seed}: {err}");
        }
    }

    #[test]
    fn propagation_rows() {
        // path 0-1-2: degrees with self-loops 2, 3, 2
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let out = Propagation::gcn(&g).apply(&DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]));
        let expect = [0.5, 1.0 / 6f64.sqrt(), 0.0];
        for i in 0..3 {
            assert!((out[(i, 0)] - expect[i]).abs() < 1e-15);
        }
    }

    fn pair(params: &CsbmParams, seed: u64) -> (LabeledGraph, LabeledGraph) {
        let rng = RngStream::new(seed);
        (sample_csbm(params, &rng.child(0)).unwrap(), sample_csbm(params, &rng.child(1)).unwrap())
    }

    #[test]
    fn gcn_learns_strong_signal() {
        let params = CsbmParams { lambda: 3.0, mu: 2.0, ..Default::default() };
        let (train, test) = pair(&params, 11);
        let out = train_gcn(&train, &test, &TrainConfig::default()).unwrap();
        assert!(out.test_accuracy >= 0.95, "{}", out.test_accuracy);
        assert_eq!(out.loss_curve.len(), 400);
        assert!(out.loss_curve[399] < out.loss_curve[0]);
    }

    #[test]
    fn no_signal_is_chance() {
        let params = CsbmParams::default();
        let (train, test) = pair(&params, 12);
        for out in [train_gcn(&train, &test, &TrainConfig::default()), train_mlp(&train, &test, &TrainConfig::default())] {
            assert!(out.unwrap().test_accuracy <= 0.6);
        }
    }

    #[test]
    fn mlp_separates_features_and_ignores_edges() {
        let params = CsbmParams { lambda: -1.0, mu: 2.0, ..Default::default() };
        let (train, test) = pair(&params, 13);
        let cfg = TrainConfig { seed: 4, ..Default::default() };
        let a = train_mlp(&train, &test, &cfg).unwrap();
        assert!(a.test_accuracy >= 0.95);
        let rewired = LabeledGraph::new(Graph::empty(test.graph.node_count()), test.labels.clone(), test.features.clone()).unwrap();
        assert_eq!(train_mlp(&train, &rewired, &cfg).unwrap(), a);
    }

    #[test]
    fn config_and_shape_checks() {
        let params = CsbmParams { n: 20, ..Default::default() };
        let (train, test) = pair(&params, 0);
        assert!(train_gcn(&train, &test, &TrainConfig { hidden: 0, ..Default::default() }).is_err());
        let narrow = CsbmParams { n: 20, m_feat: 3, ..Default::default() };
        let (_, other) = pair(&narrow, 0);
        assert!(train_gcn(&train, &other, &TrainConfig::default()).is_err());
        let huge = TrainConfig { learning_rate: 1e300, epochs: 50, ..Default::default() };
        let _ = train_gcn(&train, &test, &huge); // must not panic
    }
}
