use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Args;
use csbm_lab::sweep::{run_sweep, write_outputs, Method, SweepConfig};

#[derive(Args)]
pub struct SweepArgs {
    /// JSON file with any subset of the sweep configuration fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated, e.g. gcn,mlp,theory-two-layer.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    methods: Option<Vec<Method>>,
    #[arg(long)]
    lambda_steps: Option<usize>,
    #[arg(long)]
    mu_steps: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    master_seed: Option<u64>,
    /// 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    no_smoothing: bool,
    #[arg(long)]
    wall_time: bool,
}

fn parse_method(s: &str) -> Result<Method, String> {
    Method::parse(s).map_err(|e| e.to_string())
}

/// Exit status is failure when some (cell, method) has no successful trial.
pub fn run(a: &SweepArgs) -> Result<ExitCode> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str::<SweepConfig>(&text).with_context(|| format!("parsing {}", path.display()))?
        }
        None => SweepConfig::default(),
    };
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(m) = &a.methods {
        cfg.methods = m.clone();
    }
    if let Some(s) = a.lambda_steps {
        cfg.lambda_grid.steps = s;
    }
    if let Some(s) = a.mu_steps {
        cfg.mu_grid.steps = s;
    }
    if let Some(n) = a.n {
        cfg.base.n = n;
    }
    if let Some(s) = a.master_seed {
        cfg.master_seed = s;
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    cfg.smoothing &= !a.no_smoothing;
    cfg.record_wall_time |= a.wall_time;

    let map = run_sweep(&cfg)?;
    let summary = write_outputs(&map, &cfg, &a.out)?;
    eprintln!("{} records, {} errors, written to {}", summary.records, summary.errors, a.out.display());
    if summary.all_nan_cells.is_empty() {
        return Ok(ExitCode::SUCCESS);
    }
    for (method, l, m) in &summary.all_nan_cells {
        eprintln!("no successful trial: method={method} lambda={l} mu={m}");
    }
    Ok(ExitCode::FAILURE)
}
