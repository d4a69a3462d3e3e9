use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{Method, SweepConfig};
use crate::error::{domain, Result};
use crate::generators::{sample_csbm, CsbmParams};
use crate::graph::LabeledGraph;
use crate::models::{
    aligned_accuracy, one_layer_predict, sign_accuracy, spectral_cluster, train_gcn, train_mlp,
    two_layer_linear_predict, TrainConfig,
};
use crate::rng::RngStream;
use crate::theory::{expected_accuracy_one_layer, two_layer_accuracy, TwoLayerQuery};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub lambda: f64,
    pub mu: f64,
    pub trial: usize,
    pub method: Method,
    /// NaN when the method failed; see [`PhaseMap::errors`].
    pub accuracy: f64,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseMap {
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub methods: Vec<Method>,
    pub trials: usize,
    /// Sorted by (λ index, μ index, trial, method).
    pub records: Vec<Record>,
    pub errors: Vec<String>,
}

impl PhaseMap {
    pub fn cell_count(&self) -> usize {
        self.lambdas.len() * self.mus.len()
    }
}

struct Task {
    li: usize,
    mi: usize,
    trial: usize,
    methods: Vec<Method>,
}

/// Run every method on every (λ, μ, trial). Each (cell, trial) gets its own
/// stream `derive([cell, trial])`, so results do not depend on scheduling.
pub fn run_sweep(cfg: &SweepConfig) -> Result<PhaseMap> {
    cfg.validate()?;
    let lambdas = cfg.lambda_grid.values();
    let mus = cfg.mu_grid.values();
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();
    let (oracles, simulated): (Vec<Method>, Vec<Method>) = methods.iter().partition(|m| m.is_theory());

    let mut tasks = Vec::new();
    for li in 0..lambdas.len() {
        for mi in 0..mus.len() {
            for trial in 0..cfg.trials {
                let mut todo = simulated.clone();
                if trial == 0 {
                    todo.extend(&oracles);
                }
                if !todo.is_empty() {
                    tasks.push(Task { li, mi, trial, methods: todo });
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| domain(format!("cannot start worker pool: {e}")))?;
    let root = RngStream::new(cfg.master_seed);
    let outputs: Vec<(Vec<Record>, Vec<String>)> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| run_task(cfg, &root, t, lambdas[t.li], mus[t.mi], mus.len()))
            .collect()
    });

    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (r, e) in outputs {
        records.extend(r);
        errors.extend(e);
    }
    let index = |v: &[f64], x: f64| v.iter().position(|&y| y == x).unwrap_or(usize::MAX);
    records.sort_by_key(|r| (index(&lambdas, r.lambda), index(&mus, r.mu), r.trial, r.method));
    Ok(PhaseMap {
        lambdas,
        mus,
        methods,
        trials: cfg.trials,
        records,
        errors,
    })
}

fn run_task(cfg: &SweepConfig, root: &RngStream, t: &Task, lambda: f64, mu: f64, mu_steps: usize) -> (Vec<Record>, Vec<String>) {
    let cell = (t.li * mu_steps + t.mi) as u64;
    let stream = root.derive(&[cell, t.trial as u64]);
    let params = CsbmParams { lambda, mu, ..cfg.base.clone() };
    let mut ctx = TrialContext { params, stream, train: None, test: None };
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for &method in &t.methods {
        let start = Instant::now();
        let outcome = ctx.evaluate(method, &cfg.train);
        let elapsed = if cfg.record_wall_time { start.elapsed().as_secs_f64() } else { 0.0 };
        let accuracy = match outcome {
            Ok(a) => a,
            Err(e) => {
                errors.push(format!("lambda={lambda} mu={mu} trial={} method={method}: {e}", t.trial));
                f64::NAN
            }
        };
        records.push(Record { lambda, mu, trial: t.trial, method, accuracy, wall_time_s: elapsed });
    }
    (records, errors)
}

/// Lazily sampled train/test graphs shared by the methods of one trial.
struct TrialContext {
    params: CsbmParams,
    stream: RngStream,
    train: Option<LabeledGraph>,
    test: Option<LabeledGraph>,
}

impl TrialContext {
    fn train_graph(&mut self) -> Result<&LabeledGraph> {
        if self.train.is_none() {
            self.train = Some(sample_csbm(&self.params, &self.stream.child(0))?);
        }
        Ok(self.train.as_ref().expect("just set"))
    }

    fn test_graph(&mut self) -> Result<&LabeledGraph> {
        if self.test.is_none() {
            self.test = Some(sample_csbm(&self.params, &self.stream.child(1))?);
        }
        Ok(self.test.as_ref().expect("just set"))
    }

    fn evaluate(&mut self, method: Method, train_cfg: &TrainConfig) -> Result<f64> {
        let cfg = TrainConfig { seed: self.stream.child(2).seed(), ..train_cfg.clone() };
        match method {
            Method::Gcn | Method::Mlp => {
                self.train_graph()?;
                self.test_graph()?;
                let (train, test) = (self.train.as_ref().expect("sampled"), self.test.as_ref().expect("sampled"));
                let out = if method == Method::Gcn { train_gcn(train, test, &cfg) } else { train_mlp(train, test, &cfg) }?;
                Ok(out.test_accuracy)
            }
            Method::Spectral => {
                let k = self.params.k;
                let mut rng = self.stream.child(3);
                let test = self.test_graph()?;
                let pred = spectral_cluster(&test.graph, k, &mut rng)?;
                aligned_accuracy(&pred, test.labels.classes(), true)
            }
            Method::OneLayer => {
                let (m, _) = self.params.separating_direction()?;
                let w = oriented(&m, self.params.lambda);
                let test = self.test_graph()?;
                let pred = one_layer_predict(&test.graph, test.features()?, &w)?;
                sign_accuracy(&pred, &test.labels)
            }
            Method::TwoLayerLinear => {
                let (m, _) = self.params.separating_direction()?;
                let test = self.test_graph()?;
                let pred = two_layer_linear_predict(&test.graph, test.features()?, &m, 1.0)?;
                sign_accuracy(&pred, &test.labels)
            }
            Method::TheoryOneLayer => {
                let (_, shift) = self.params.separating_direction()?;
                let (p_in, p_out) = self.params.probs()?;
                let theta = if self.params.lambda < 0.0 { std::f64::consts::PI } else { 0.0 };
                expected_accuracy_one_layer(shift / self.params.sigma, theta, self.params.n as u64, p_in, p_out)
            }
            Method::TheoryTwoLayer => {
                let (_, shift) = self.params.separating_direction()?;
                let q = TwoLayerQuery::new(shift, self.params.sigma, self.params.d, self.params.lambda);
                Ok(two_layer_accuracy(&q)?.accuracy)
            }
        }
    }
}

/// `m` for homophilous or neutral graphs, `−m` for heterophilous ones: the
/// better of the two critical one-layer weight directions.
fn oriented(m: &[f64], lambda: f64) -> Vec<f64> {
    let s = if lambda < 0.0 { -1.0 } else { 1.0 };
    m.iter().map(|v| s * v).collect()
}

