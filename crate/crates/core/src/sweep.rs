//! Cartesian parameter sweeps over (kind, alpha, beta, seed).

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::simulator::{run, RunResult, SimulationConfig, StrategyKind};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub kinds: Vec<StrategyKind>,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub seeds: Vec<u64>,
}

impl SweepGrid {
    /// The beta axis `0.1, 0.2, ..., 1.0`.
    pub fn beta_decades() -> Vec<f64> {
        (1..=10).map(|k| f64::from(k) / 10.0).collect()
    }

    fn cells(&self) -> Vec<(StrategyKind, f64, f64, u64)> {
        let mut cells = Vec::new();
        for kind in &self.kinds {
            for &alpha in &self.alphas {
                for &beta in &self.betas {
                    for &seed in &self.seeds {
                        cells.push((kind.clone(), alpha, beta, seed));
                    }
                }
            }
        }
        cells
    }
}

/// One run's coordinates and metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub kind: StrategyKind,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
    pub total_energy_mj: f64,
    pub satisfaction: f64,
    pub fix_count: usize,
    pub sample_count: usize,
}

impl SummaryRow {
    pub fn new(config: &SimulationConfig, result: &RunResult) -> Self {
        SummaryRow {
            kind: config.kind.clone(),
            alpha: config.strategy.alpha,
            beta: config.strategy.beta,
            seed: config.mobility.seed,
            total_energy_mj: result.total_energy_mj,
            satisfaction: result.satisfaction,
            fix_count: result.fix_count,
            sample_count: result.sample_count,
        }
    }
}

/// Seed-averaged metrics for one (kind, alpha, beta) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanRow {
    pub kind: StrategyKind,
    pub alpha: f64,
    pub beta: f64,
    pub runs: usize,
    pub total_energy_mj: f64,
    pub satisfaction: f64,
    pub fix_count: f64,
    pub sample_count: f64,
}

/// Runs every cell of `grid` on top of `base`. Cells run in parallel; rows
/// come back in (kind, alpha, beta, seed) order following the grid's lists.
pub fn sweep(base: &SimulationConfig, grid: &SweepGrid) -> Result<Vec<SummaryRow>> {
    if grid.kinds.is_empty()
        || grid.alphas.is_empty()
        || grid.betas.is_empty()
        || grid.seeds.is_empty()
    {
        return Err(Error::config(
            "sweep",
            "every sweep axis needs at least one value",
        ));
    }
    grid.cells()
        .into_par_iter()
        .map(|(kind, alpha, beta, seed)| {
            let mut cfg = base.clone();
            cfg.kind = kind.clone();
            cfg.strategy.alpha = alpha;
            cfg.strategy.beta = beta;
            cfg.mobility.seed = seed;
            run(&cfg)
                .map(|r| SummaryRow::new(&cfg, &r))
                .map_err(|e| Error::Cell {
                    kind: kind.to_string(),
                    alpha,
                    beta,
                    seed,
                    source: Box::new(e),
                })
        })
        .collect()
}

/// Averages rows over seeds, keeping first-appearance order of cells.
pub fn means(rows: &[SummaryRow]) -> Vec<MeanRow> {
    let mut out: Vec<MeanRow> = Vec::new();
    for r in rows {
        let idx = out
            .iter()
            .position(|m| m.kind == r.kind && m.alpha == r.alpha && m.beta == r.beta);
        let m = match idx {
            Some(i) => &mut out[i],
            None => {
                out.push(MeanRow {
                    kind: r.kind.clone(),
                    alpha: r.alpha,
                    beta: r.beta,
                    runs: 0,
                    total_energy_mj: 0.0,
                    satisfaction: 0.0,
                    fix_count: 0.0,
                    sample_count: 0.0,
                });
                out.last_mut().unwrap()
            }
        };
        m.runs += 1;
        m.total_energy_mj += r.total_energy_mj;
        m.satisfaction += r.satisfaction;
        m.fix_count += r.fix_count as f64;
        m.sample_count += r.sample_count as f64;
    }
    for m in &mut out {
        let n = m.runs as f64;
        m.total_energy_mj /= n;
        m.satisfaction /= n;
        m.fix_count /= n;
        m.sample_count /= n;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Energy,
    Satisfaction,
}

/// One point of a baseline-vs-adaptive series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureRow {
    pub beta: f64,
    pub gps_value: f64,
    pub ours_value: f64,
}

/// Pairs the baseline and adaptive means at `alpha` by beta, in the beta
/// order of the adaptive rows. Betas missing from either side are skipped.
pub fn figure_series(
    mean_rows: &[MeanRow],
    alpha: f64,
    baseline: &StrategyKind,
    metric: Metric,
) -> Vec<FigureRow> {
    let value = |m: &MeanRow| match metric {
        Metric::Energy => m.total_energy_mj,
        Metric::Satisfaction => m.satisfaction,
    };
    mean_rows
        .iter()
        .filter(|m| m.kind == StrategyKind::Adaptive && m.alpha == alpha)
        .filter_map(|ours| {
            mean_rows
                .iter()
                .find(|b| &b.kind == baseline && b.alpha == alpha && b.beta == ours.beta)
                .map(|b| FigureRow {
                    beta: ours.beta,
                    gps_value: value(b),
                    ours_value: value(ours),
                })
        })
        .collect()
}
