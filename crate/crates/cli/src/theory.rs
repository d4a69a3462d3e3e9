use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use csbm_lab::generators::lambda_to_probs;
use csbm_lab::theory::{conditional_accuracy, expected_accuracy_one_layer, two_layer_accuracy, OneLayerQuery, Sign, TwoLayerQuery};

#[derive(Args)]
pub struct TheoryArgs {
    #[arg(long, value_enum)]
    formula: Formula,
    /// Feature separation along the weight direction (divided by sigma for two-layer).
    #[arg(long, default_value_t = 1.0)]
    mu: f64,
    /// Angle between the weight vector and the mean direction, radians.
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    #[arg(long, default_value_t = 0)]
    n_in: u64,
    #[arg(long, default_value_t = 0)]
    n_out: u64,
    /// Number of nodes (one-layer-expected).
    #[arg(long, default_value_t = 1000)]
    n: u64,
    #[arg(long, default_value_t = 10.0)]
    d: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    lambda: f64,
    /// Explicit edge probabilities; override d and lambda for one-layer-expected.
    #[arg(long, requires = "p_out")]
    p_in: Option<f64>,
    #[arg(long, requires = "p_in")]
    p_out: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Sign of K, the product of the two-layer weights along the mean direction.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    sign_k: i8,
    #[arg(long, default_value_t = 1e-8)]
    tail_mass: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Formula {
    OneLayerConditional,
    OneLayerExpected,
    TwoLayer,
}

pub fn run(a: &TheoryArgs) -> Result<()> {
    match a.formula {
        Formula::OneLayerConditional => {
            let acc = conditional_accuracy(&OneLayerQuery::new(a.mu, a.theta, a.n_in, a.n_out));
            println!("formula,mu,theta,n_in,n_out,accuracy");
            println!("one-layer-conditional,{},{},{},{},{acc}", a.mu, a.theta, a.n_in, a.n_out);
        }
        Formula::OneLayerExpected => {
            let (p_in, p_out) = match (a.p_in, a.p_out) {
                (Some(p), Some(q)) => (p, q),
                _ => lambda_to_probs(a.d, a.lambda, a.n as usize)?,
            };
            let acc = expected_accuracy_one_layer(a.mu, a.theta, a.n, p_in, p_out)?;
            println!("formula,mu,theta,n,p_in,p_out,accuracy");
            println!("one-layer-expected,{},{},{},{p_in},{p_out},{acc}", a.mu, a.theta, a.n);
        }
        Formula::TwoLayer => {
            let sign_k = match a.sign_k {
                1 => Sign::Plus,
                -1 => Sign::Minus,
                s => bail!("--sign-k must be 1 or -1, got {s}"),
            };
            let q = TwoLayerQuery { sign_k, tail_mass_bound: a.tail_mass, ..TwoLayerQuery::new(a.mu, a.sigma, a.d, a.lambda) };
            let r = two_layer_accuracy(&q)?;
            let t = &r.truncation_limits;
            println!("formula,mu,sigma,d,lambda,sign_k,accuracy,neglected_mass,max_n_in,max_n_out,max_n2_in,max_n2_out");
            println!(
                "two-layer,{},{},{},{},{},{},{},{},{},{},{}",
                a.mu, a.sigma, a.d, a.lambda, a.sign_k, r.accuracy, r.neglected_mass, t.n_in, t.n_out, t.n2_in, t.n2_out
            );
        }
    }
    Ok(())
}
