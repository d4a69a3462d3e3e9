//! (λ, μ) phase-map sweeps with trial aggregation, smoothing and
//! best-method maps.

mod config;
mod grid;
mod run;

pub use config::{Aggregation, GridSpec, Method, SweepConfig};
pub use grid::{aggregate, best_method_map, smooth, write_outputs, Grid, How, MethodGrid, SweepSummary, TIE};
pub use run::{run_sweep, PhaseMap, Record};
