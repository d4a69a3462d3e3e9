use csbm_lab::generators::{sample_csbm, CsbmParams, MeanMode};
use csbm_lab::models::{
    aligned_accuracy, one_layer_predict, sign_accuracy, spectral_cluster, train_gcn, train_mlp, TrainConfig,
};
use csbm_lab::restructure::{rewire_preserving_blocks, RewireConfig};
use csbm_lab::{LabeledGraph, RngStream};
use proptest::prelude::*;

fn params(lambda: f64, mu: f64) -> CsbmParams {
    CsbmParams { n: 1000, d: 10.0, lambda, mu, sigma: 0.2, ..CsbmParams::default() }
}

fn pair(p: &CsbmParams, seed: u64) -> (LabeledGraph, LabeledGraph) {
    let root = RngStream::new(seed);
    (sample_csbm(p, &root.child(0)).unwrap(), sample_csbm(p, &root.child(1)).unwrap())
}

fn gcn_mean(lambda: f64, mu: f64, seeds: u64) -> f64 {
    let p = params(lambda, mu);
    let total: f64 = (0..seeds)
        .map(|s| {
            let (train, test) = pair(&p, s);
            train_gcn(&train, &test, &TrainConfig { seed: s, ..TrainConfig::default() }).unwrap().test_accuracy
        })
        .sum();
    total / seeds as f64
}

#[test]
fn gcn_gains_from_feature_signal() {
    let (with, without) = (gcn_mean(0.0, 2.0, 10), gcn_mean(0.0, 0.0, 10));
    assert!(with - without >= 0.3, "mu=2: {with}, mu=0: {without}");
}

#[test]
fn edges_lift_gcn_above_mlp_when_features_are_weak() {
    let p = params(3.0, 0.2);
    let (mut gcn, mut mlp) = (0.0, 0.0);
    for s in 0..3 {
        let (train, test) = pair(&p, s);
        let cfg = TrainConfig { seed: s, ..TrainConfig::default() };
        gcn += train_gcn(&train, &test, &cfg).unwrap().test_accuracy / 3.0;
        mlp += train_mlp(&train, &test, &cfg).unwrap().test_accuracy / 3.0;
    }
    assert!(gcn >= 0.95 && gcn - mlp >= 0.1, "gcn {gcn}, mlp {mlp}");
}

/// Pure-noise features on a fresh test graph carry nothing that says which
/// community is class 0, so accuracy scatters around chance.
#[test]
fn edges_without_features_do_not_identify_classes() {
    let acc = gcn_mean(3.0, 0.0, 6);
    assert!((acc - 0.5).abs() < 0.1, "{acc}");
}

#[test]
fn mlp_reads_features_and_ignores_edges() {
    let (train, test) = pair(&params(-1.0, 2.0), 4);
    let cfg = TrainConfig { seed: 4, ..TrainConfig::default() };
    let acc = train_mlp(&train, &test, &cfg).unwrap().test_accuracy;
    assert!(acc >= 0.95, "{acc}");
    let rewired = rewire_preserving_blocks(&test.graph, &test.labels, &RewireConfig::default(), &mut RngStream::new(5)).unwrap();
    let shuffled = LabeledGraph::new(rewired, test.labels.clone(), test.features.clone()).unwrap();
    assert_eq!(train_mlp(&train, &shuffled, &cfg).unwrap().test_accuracy, acc);

    let (train, test) = pair(&params(2.0, 0.0), 6);
    assert!(train_mlp(&train, &test, &cfg).unwrap().test_accuracy <= 0.6);
}

#[test]
fn spectral_detects_strong_communities_only() {
    let run = |lambda: f64| -> Vec<f64> {
        (0..20)
            .map(|s| {
                let data = sample_csbm(&params(lambda, 0.0), &RngStream::new(s)).unwrap();
                let pred = spectral_cluster(&data.graph, 2, &mut RngStream::new(s).child(3)).unwrap();
                aligned_accuracy(&pred, data.labels.classes(), true).unwrap()
            })
            .collect()
    };
    assert!(run(3.0).iter().filter(|&&a| a >= 0.9).count() >= 18);
    assert!(run(0.0).iter().filter(|&&a| a <= 0.6).count() >= 18);
}

#[test]
fn one_layer_prediction_is_scale_free_and_odd() {
    let p = CsbmParams { mean_mode: MeanMode::Diametric, sigma: 1.0, ..params(2.0, 1.0) };
    let data = sample_csbm(&p, &RngStream::new(1)).unwrap();
    let x = data.features().unwrap();
    let (m, _) = p.separating_direction().unwrap();
    let doubled: Vec<f64> = m.iter().map(|v| 2.0 * v).collect();
    let a = one_layer_predict(&data.graph, x, &m).unwrap();
    assert_eq!(a, one_layer_predict(&data.graph, x, &doubled).unwrap());
    let flipped = one_layer_predict(&data.graph, &x.map(|v| -v), &m).unwrap();
    let isolated = (0..p.n).filter(|&i| data.graph.degree(i) == 0).count();
    let disagreements = a.iter().zip(&flipped).filter(|(u, v)| u != v).count();
    assert_eq!(disagreements, p.n - isolated);
    assert!(sign_accuracy(&a, &data.labels).unwrap() > 0.85);
}

proptest! {
    #[test]
    fn aligned_accuracy_symmetric(pred in prop::collection::vec(0usize..3, 1..60), seed in any::<u64>()) {
        let truth: Vec<usize> = pred.iter().enumerate().map(|(i, &c)| if (seed >> (i % 64)) & 1 == 1 { (c + 1) % 3 } else { c }).collect();
        let ab = aligned_accuracy(&pred, &truth, true).unwrap();
        let ba = aligned_accuracy(&truth, &pred, true).unwrap();
        prop_assert!((ab - ba).abs() < 1e-15);
        prop_assert!(ab >= aligned_accuracy(&pred, &truth, false).unwrap());
    }
}
