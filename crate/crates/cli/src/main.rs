//! `csbm-lab`: generate graphs, evaluate models and oracles, build null
//! datasets and run phase-map sweeps.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod eval;
mod generate;
mod sweep;
mod theory;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use csbm_lab::generators::{CsbmParams, MeanMode};
use csbm_lab::restructure::{nullify_dataset, NullMode, RewireConfig};

#[derive(Parser)]
#[command(name = "csbm-lab", version, about = "Contextual SBM experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a synthetic graph and write it as a dataset directory.
    Generate(generate::GenerateArgs),
    /// Evaluate a closed-form accuracy formula.
    Theory(theory::TheoryArgs),
    /// Measure a model's accuracy on a dataset or on generated graphs.
    Eval(eval::EvalArgs),
    /// Randomize a dataset's edges and/or features.
    Rewire(RewireArgs),
    /// Run a (lambda, mu) phase-map sweep.
    Sweep(sweep::SweepArgs),
}

/// cSBM parameters shared by `generate` and `eval`.
#[derive(Args, Clone, Debug)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Expected average degree.
    #[arg(long, default_value_t = 10.0)]
    pub d: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 10)]
    pub m_feat: usize,
    #[arg(long, value_enum, default_value_t = Means::Orthogonal)]
    pub means: Means,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Means {
    Orthogonal,
    Diametric,
}

impl ModelArgs {
    pub fn params(&self) -> CsbmParams {
        CsbmParams {
            n: self.n,
            k: self.k,
            d: self.d,
            lambda: self.lambda,
            mu: self.mu,
            m_feat: self.m_feat,
            sigma: self.sigma,
            mean_mode: match self.means {
                Means::Orthogonal => MeanMode::Orthogonal,
                Means::Diametric => MeanMode::Diametric,
            },
            degree_correction: None,
        }
    }
}

#[derive(Args)]
struct RewireArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Both)]
    mode: Mode,
    #[arg(long, default_value_t = 10.0)]
    swaps_per_edge: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Edges,
    Features,
    Both,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Generate(args) => generate::run(&args).map(|()| ExitCode::SUCCESS),
        Command::Theory(args) => theory::run(&args).map(|()| ExitCode::SUCCESS),
        Command::Eval(args) => eval::run(&args).map(|()| ExitCode::SUCCESS),
        Command::Rewire(args) => rewire(&args).map(|()| ExitCode::SUCCESS),
        Command::Sweep(args) => sweep::run(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn rewire(args: &RewireArgs) -> anyhow::Result<()> {
    let mode = match args.mode {
        Mode::Edges => NullMode::Edges,
        Mode::Features => NullMode::Features,
        Mode::Both => NullMode::Both,
    };
    let cfg = RewireConfig { swaps_per_edge: args.swaps_per_edge, seed: args.seed };
    nullify_dataset(&args.input, &args.out, mode, &cfg)?;
    Ok(())
}
