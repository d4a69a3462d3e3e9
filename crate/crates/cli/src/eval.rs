use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, ensure, Result};
use clap::{Args, ValueEnum};
use csbm_lab::dataset::read_dataset;
use csbm_lab::generators::sample_csbm;
use csbm_lab::graph::graph_stats;
use csbm_lab::models::{
    aligned_accuracy, one_layer_predict, sign_accuracy, spectral_cluster, train_gcn, train_mlp,
    two_layer_linear_predict, TrainConfig,
};
use csbm_lab::{LabeledGraph, RngStream};

use crate::ModelArgs;

#[derive(Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    method: EvalMethod,
    /// Evaluate on a stored dataset instead of generated graphs
    /// (one-layer, two-layer-linear and spectral only).
    #[arg(long, conflicts_with_all = ["train_dataset", "test_dataset"])]
    dataset: Option<PathBuf>,
    #[arg(long, requires = "test_dataset")]
    train_dataset: Option<PathBuf>,
    #[arg(long, requires = "train_dataset")]
    test_dataset: Option<PathBuf>,
    #[command(flatten)]
    model: ModelArgs,
    /// Independent generated trials, seeds seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 16)]
    hidden: usize,
    #[arg(long, default_value_t = 400)]
    epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    learning_rate: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EvalMethod {
    OneLayer,
    TwoLayerLinear,
    Gcn,
    Mlp,
    Spectral,
}

/// Direction used by the linear classifiers, plus the one-layer orientation.
struct Direction {
    m: Vec<f64>,
    homophilous: bool,
}

pub fn run(a: &EvalArgs) -> Result<()> {
    let name = a.method.to_possible_value().expect("no skipped variants").get_name().to_string();
    println!("method,seed,accuracy,wall_time_s");
    if let Some(dir) = &a.dataset {
        ensure!(
            !matches!(a.method, EvalMethod::Gcn | EvalMethod::Mlp),
            "{name} needs --train-dataset and --test-dataset"
        );
        let data = read_dataset(dir)?.data;
        let dir = estimated_direction(&data)?;
        let start = Instant::now();
        let acc = evaluate(a, &data, &data, &dir, a.model.seed)?;
        println!("{name},{},{acc},{}", a.model.seed, start.elapsed().as_secs_f64());
    } else if let (Some(tr), Some(te)) = (&a.train_dataset, &a.test_dataset) {
        let train = read_dataset(tr)?.data;
        let test = read_dataset(te)?.data;
        let dir = estimated_direction(&train)?;
        let start = Instant::now();
        let acc = evaluate(a, &train, &test, &dir, a.model.seed)?;
        println!("{name},{},{acc},{}", a.model.seed, start.elapsed().as_secs_f64());
    } else {
        let params = a.model.params();
        for seed in a.model.seed..a.model.seed + a.trials {
            let root = RngStream::new(seed);
            let train = sample_csbm(&params, &root.child(0))?;
            let test = sample_csbm(&params, &root.child(1))?;
            let dir = if params.k == 2 {
                Direction { m: params.separating_direction()?.0, homophilous: params.lambda >= 0.0 }
            } else {
                Direction { m: Vec::new(), homophilous: true }
            };
            let start = Instant::now();
            let acc = evaluate(a, &train, &test, &dir, root.child(2).seed())?;
            println!("{name},{seed},{acc},{}", start.elapsed().as_secs_f64());
        }
    }
    Ok(())
}

fn evaluate(a: &EvalArgs, train: &LabeledGraph, test: &LabeledGraph, dir: &Direction, seed: u64) -> Result<f64> {
    Ok(match a.method {
        EvalMethod::OneLayer => {
            let s = if dir.homophilous { 1.0 } else { -1.0 };
            let w: Vec<f64> = dir.m.iter().map(|v| s * v).collect();
            sign_accuracy(&one_layer_predict(&test.graph, test.features()?, &w)?, &test.labels)?
        }
        EvalMethod::TwoLayerLinear => {
            sign_accuracy(&two_layer_linear_predict(&test.graph, test.features()?, &dir.m, 1.0)?, &test.labels)?
        }
        EvalMethod::Gcn | EvalMethod::Mlp => {
            let cfg = TrainConfig {
                hidden: a.hidden,
                epochs: a.epochs,
                learning_rate: a.learning_rate,
                seed,
                ..TrainConfig::default()
            };
            let out = if a.method == EvalMethod::Gcn { train_gcn(train, test, &cfg)? } else { train_mlp(train, test, &cfg)? };
            out.test_accuracy
        }
        EvalMethod::Spectral => {
            let pred = spectral_cluster(&test.graph, test.labels.k(), &mut RngStream::new(seed).child(3))?;
            aligned_accuracy(&pred, test.labels.classes(), true)?
        }
    })
}

/// Unit vector from the class-1 feature mean to the class-0 mean, and
/// whether edges mostly join same-class nodes.
fn estimated_direction(data: &LabeledGraph) -> Result<Direction> {
    let homophilous = graph_stats(&data.graph, &data.labels)?.edge_homophily >= 0.5;
    let Some(x) = &data.features else {
        return Ok(Direction { m: Vec::new(), homophilous });
    };
    if data.labels.k() != 2 {
        return Ok(Direction { m: Vec::new(), homophilous });
    }
    let mut diff = vec![0.0; x.dim()];
    let sizes = data.labels.class_sizes();
    for i in 0..x.rows() {
        let c = data.labels.class(i);
        let s = (if c == 0 { 1.0 } else { -1.0 }) / sizes[c] as f64;
        for (d, v) in diff.iter_mut().zip(x.row(i)) {
            *d += s * v;
        }
    }
    let norm = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        bail!("class feature means coincide; no separating direction");
    }
    Ok(Direction { m: diff.iter().map(|v| v / norm).collect(), homophilous })
}
