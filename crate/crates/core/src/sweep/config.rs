use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::generators::CsbmParams;
use crate::models::TrainConfig;

/// Evenly spaced values from `min` to `max` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match self.steps {
            0 => Vec::new(),
            1 => vec![self.min],
            s => (0..s)
                .map(|i| {
                    if i == s - 1 {
                        self.max
                    } else {
                        self.min + (self.max - self.min) * i as f64 / (s - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Gcn,
    Mlp,
    Spectral,
    OneLayer,
    TwoLayerLinear,
    TheoryOneLayer,
    TheoryTwoLayer,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Gcn,
        Method::Mlp,
        Method::Spectral,
        Method::OneLayer,
        Method::TwoLayerLinear,
        Method::TheoryOneLayer,
        Method::TheoryTwoLayer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gcn => "gcn",
            Method::Mlp => "mlp",
            Method::Spectral => "spectral",
            Method::OneLayer => "one-layer",
            Method::TwoLayerLinear => "two-layer-linear",
            Method::TheoryOneLayer => "theory-one-layer",
            Method::TheoryTwoLayer => "theory-two-layer",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| domain(format!("unknown method {s:?}")))
    }

    /// Oracle methods are evaluated once per cell.
    pub fn is_theory(self) -> bool {
        matches!(self, Method::TheoryOneLayer | Method::TheoryTwoLayer)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Aggregation {
    Mean,
    Max,
    Both,
}

impl Aggregation {
    pub fn includes_mean(self) -> bool {
        matches!(self, Aggregation::Mean | Aggregation::Both)
    }

    pub fn includes_max(self) -> bool {
        matches!(self, Aggregation::Max | Aggregation::Both)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    pub lambda_grid: GridSpec,
    pub mu_grid: GridSpec,
    pub trials: usize,
    pub methods: Vec<Method>,
    /// λ and μ are overwritten per cell.
    pub base: CsbmParams,
    pub train: TrainConfig,
    pub aggregation: Aggregation,
    pub smoothing: bool,
    pub tie_margin: f64,
    pub master_seed: u64,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    /// Off by default so raw.csv is byte-reproducible; when off the
    /// wall_time_s column is 0.
    pub record_wall_time: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            lambda_grid: GridSpec { min: -3.0, max: 3.0, steps: 13 },
            mu_grid: GridSpec { min: 0.0, max: 2.0, steps: 9 },
            trials: 10,
            methods: vec![Method::Gcn, Method::Mlp, Method::Spectral],
            base: CsbmParams::default(),
            train: TrainConfig::default(),
            aggregation: Aggregation::Both,
            smoothing: true,
            tie_margin: 0.02,
            master_seed: 0,
            workers: 0,
            record_wall_time: false,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.lambda_grid.steps == 0 || self.mu_grid.steps == 0 {
            return Err(domain("grids must have at least one step"));
        }
        if self.trials == 0 {
            return Err(domain("trials must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(domain("no methods selected"));
        }
        let root_d = self.base.d.sqrt();
        for l in [self.lambda_grid.min, self.lambda_grid.max] {
            if !(l.abs() <= root_d) {
                return Err(domain(format!("|lambda| = {} exceeds sqrt(d) = {root_d}", l.abs())));
            }
        }
        for m in [self.mu_grid.min, self.mu_grid.max] {
            if !(m >= 0.0 && m.is_finite()) {
                return Err(domain(format!("mu grid must be non-negative, got {m}")));
            }
        }
        if !(self.tie_margin >= 0.0) {
            return Err(domain(format!("tie margin must be non-negative, got {}", self.tie_margin)));
        }
        let mut probe = self.base.clone();
        probe.lambda = self.lambda_grid.min;
        probe.mu = self.mu_grid.min;
        probe.validate()
    }
}
