use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use csbm_lab::dataset::{write_dataset, DatasetMeta};
use csbm_lab::generators::{
    apply_triadic_closure, sample_csbm, sample_enn_sbm, sample_hsbm, sample_sbm, DegreeWeightSpec, HsbmSpec,
};
use csbm_lab::{Features, LabeledGraph, RngStream};
use serde_json::json;

use crate::ModelArgs;

#[derive(Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    model: Model,
    #[command(flatten)]
    params: ModelArgs,
    /// Power-law exponent of the degree weights (dcsbm).
    #[arg(long, default_value_t = 2.5)]
    exponent: f64,
    /// Within-sub-cluster edge probability (hsbm); defaults to 2·p_in.
    #[arg(long)]
    p_sub: Option<f64>,
    /// Norm of the sub-cluster feature offsets (hsbm); defaults to mu/4.
    #[arg(long)]
    mu_sub: Option<f64>,
    #[arg(long, default_value_t = 5)]
    subclusters: usize,
    #[arg(long, default_value_t = 0.1)]
    eps_intra: f64,
    #[arg(long, default_value_t = 0.05)]
    eps_inter: f64,
    /// Fraction of open wedges to close (triadic).
    #[arg(long, default_value_t = 0.3)]
    closure_fraction: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    Sbm,
    Csbm,
    Dcsbm,
    Hsbm,
    Enn,
    Triadic,
}

pub fn run(args: &GenerateArgs) -> Result<()> {
    let mut params = args.params.params();
    let root = RngStream::new(args.params.seed);
    let mut extra = json!({
        "model": format!("{:?}", args.model).to_lowercase(),
        "seed": args.params.seed,
        "params": &params,
    });
    let data = match args.model {
        Model::Sbm => {
            let (graph, labels) = sample_sbm(&params, &mut root.child(0))?;
            LabeledGraph::new(graph, labels, None)?
        }
        Model::Csbm => sample_csbm(&params, &root)?,
        Model::Dcsbm => {
            params.degree_correction = Some(DegreeWeightSpec::PowerLaw { exponent: args.exponent, w_min: 1.0 });
            extra["params"] = json!(&params);
            sample_csbm(&params, &root)?
        }
        Model::Hsbm => {
            let spec = HsbmSpec { subclusters_per_class: args.subclusters, p_sub: args.p_sub, mu_sub: args.mu_sub };
            let sample = sample_hsbm(&params, &spec, &root)?;
            extra["subclusters"] = json!(sample.subclusters);
            sample.data
        }
        Model::Enn => {
            let s = sample_enn_sbm(params.n, args.eps_intra, args.eps_inter, &mut root.child(0))?;
            extra["eps_intra"] = json!(args.eps_intra);
            extra["eps_inter"] = json!(args.eps_inter);
            let positions = Features::new(params.n, 2, s.positions.iter().flatten().copied().collect())?;
            LabeledGraph::new(s.graph, s.labels, Some(positions))?
        }
        Model::Triadic => {
            let base = sample_csbm(&params, &root.child(0))?;
            let graph = apply_triadic_closure(&base.graph, args.closure_fraction, &mut root.child(1))?;
            extra["closure_fraction"] = json!(args.closure_fraction);
            LabeledGraph::new(graph, base.labels, base.features)?
        }
    };
    let mut meta = DatasetMeta::for_data(&data);
    meta.extra.insert("generator".into(), extra);
    write_dataset(&args.out, &data, &meta).with_context(|| format!("writing {}", args.out.display()))?;
    eprintln!(
        "wrote {} nodes, {} edges to {}",
        data.graph.node_count(),
        data.graph.edge_count(),
        args.out.display()
    );
    Ok(())
}
