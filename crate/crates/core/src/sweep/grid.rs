use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::config::{Method, SweepConfig};
use super::run::PhaseMap;
use crate::error::{domain, Error, Result};

/// Row-major `λ × μ` grid.
pub type Grid = Vec<Vec<f64>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum How {
    Mean,
    Max,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodGrid {
    pub method: Method,
    pub values: Grid,
    /// Trials excluded per cell because they failed.
    pub nan_trials: Vec<Vec<usize>>,
    /// Cells where every trial failed.
    pub flagged: Vec<(usize, usize)>,
}

/// Per-method, per-cell mean or max over trials, skipping failed trials.
pub fn aggregate(map: &PhaseMap, how: How) -> Vec<MethodGrid> {
    let (nl, nm) = (map.lambdas.len(), map.mus.len());
    let pos = |v: &[f64], x: f64| v.iter().position(|&y| y == x);
    map.methods
        .iter()
        .map(|&method| {
            let mut samples: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); nm]; nl];
            let mut nan_trials = vec![vec![0; nm]; nl];
            for r in map.records.iter().filter(|r| r.method == method) {
                let (Some(li), Some(mi)) = (pos(&map.lambdas, r.lambda), pos(&map.mus, r.mu)) else { continue };
                if r.accuracy.is_nan() {
                    nan_trials[li][mi] += 1;
                } else {
                    samples[li][mi].push(r.accuracy);
                }
            }
            let mut flagged = Vec::new();
            let values = samples
                .iter()
                .enumerate()
                .map(|(li, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(mi, s)| {
                            if s.is_empty() {
                                flagged.push((li, mi));
                                return f64::NAN;
                            }
                            match how {
                                How::Mean => s.iter().sum::<f64>() / s.len() as f64,
                                How::Max => s.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                            }
                        })
                        .collect()
                })
                .collect();
            MethodGrid { method, values, nan_trials, flagged }
        })
        .collect()
}

/// 5×5 box filter; near the border each output averages only the in-bounds
/// (and non-NaN) cells of its window.
pub fn smooth(grid: &Grid) -> Grid {
    let rows = grid.len();
    (0..rows)
        .map(|i| {
            let cols = grid[i].len();
            (0..cols)
                .map(|j| {
                    let (mut sum, mut count) = (0.0, 0usize);
                    for row in &grid[i.saturating_sub(2)..(i + 3).min(rows)] {
                        for &v in &row[j.saturating_sub(2).min(row.len())..(j + 3).min(row.len())] {
                            if !v.is_nan() {
                                sum += v;
                                count += 1;
                            }
                        }
                    }
                    if count == 0 {
                        f64::NAN
                    } else {
                        sum / count as f64
                    }
                })
                .collect()
        })
        .collect()
}

pub const TIE: &str = "tie";

/// Label each cell with the method that beats every other by at least
/// `margin`, or `"tie"`.
pub fn best_method_map(grids: &[(Method, Grid)], margin: f64) -> Result<Vec<Vec<String>>> {
    let Some((_, first)) = grids.first() else {
        return Err(domain("no grids to compare"));
    };
    for (m, g) in grids {
        if g.len() != first.len() || g.iter().zip(first).any(|(a, b)| a.len() != b.len()) {
            return Err(domain(format!("grid for {m} has a different shape")));
        }
    }
    Ok((0..first.len())
        .map(|i| {
            (0..first[i].len())
                .map(|j| {
                    let mut vals: Vec<(f64, Method)> =
                        grids.iter().map(|(m, g)| (g[i][j], *m)).filter(|(v, _)| !v.is_nan()).collect();
                    vals.sort_by(|a, b| b.0.total_cmp(&a.0));
                    match vals.as_slice() {
                        [] => TIE.to_string(),
                        [(_, m)] => m.name().to_string(),
                        [(v1, m), (v2, _), ..] if v1 > v2 && v1 - v2 >= margin => m.name().to_string(),
                        _ => TIE.to_string(),
                    }
                })
                .collect()
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    pub records: usize,
    pub errors: usize,
    /// `(method, λ, μ)` of cells with no successful trial.
    pub all_nan_cells: Vec<(Method, f64, f64)>,
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

fn grid_csv(map: &PhaseMap, grids: &[(Method, Grid)]) -> String {
    let mut out = String::from("lambda,mu,method,value\n");
    for (li, l) in map.lambdas.iter().enumerate() {
        for (mi, m) in map.mus.iter().enumerate() {
            for (method, g) in grids {
                let _ = writeln!(out, "{l},{m},{method},{}", g[li][mi]);
            }
        }
    }
    out
}

/// Write raw.csv, the aggregate grids (plus smoothed copies when enabled),
/// best.csv and, if anything failed, errors.log.
pub fn write_outputs(map: &PhaseMap, cfg: &SweepConfig, dir: &Path) -> Result<SweepSummary> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let mut raw = String::from("lambda,mu,trial,method,accuracy,wall_time_s\n");
    for r in &map.records {
        let _ = writeln!(raw, "{},{},{},{},{},{}", r.lambda, r.mu, r.trial, r.method, r.accuracy, r.wall_time_s);
    }
    write(&dir.join("raw.csv"), &raw)?;

    let mut all_nan_cells = Vec::new();
    let mut best_source = None;
    for (how, name, wanted) in [(How::Mean, "mean", cfg.aggregation.includes_mean()), (How::Max, "max", cfg.aggregation.includes_max())] {
        if !wanted {
            continue;
        }
        let aggregated = aggregate(map, how);
        if all_nan_cells.is_empty() {
            for g in &aggregated {
                all_nan_cells.extend(g.flagged.iter().map(|&(li, mi)| (g.method, map.lambdas[li], map.mus[mi])));
            }
        }
        let grids: Vec<(Method, Grid)> = aggregated.into_iter().map(|g| (g.method, g.values)).collect();
        write(&dir.join(format!("{name}.csv")), &grid_csv(map, &grids))?;
        if cfg.smoothing {
            let smoothed: Vec<(Method, Grid)> = grids.iter().map(|(m, g)| (*m, smooth(g))).collect();
            write(&dir.join(format!("{name}_smoothed.csv")), &grid_csv(map, &smoothed))?;
        }
        best_source.get_or_insert(grids);
    }

    if let Some(grids) = best_source {
        let labels = best_method_map(&grids, cfg.tie_margin)?;
        let mut best = String::from("lambda,mu,label\n");
        for (li, l) in map.lambdas.iter().enumerate() {
            for (mi, m) in map.mus.iter().enumerate() {
                let _ = writeln!(best, "{l},{m},{}", labels[li][mi]);
            }
        }
        write(&dir.join("best.csv"), &best)?;
    }
    if !map.errors.is_empty() {
        write(&dir.join("errors.log"), &(map.errors.join("\n") + "\n"))?;
    }
    Ok(SweepSummary { records: map.records.len(), errors: map.errors.len(), all_nan_cells })
}
