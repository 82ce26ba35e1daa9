//! Parameter sweeps over (policy grid × seeds), run in parallel.

use anyhow::Result;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::runner::run_experiment_summary;

/// One parameter point of one policy. Fields that do not apply to the
/// policy stay `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamPoint {
    pub policy: String,
    pub beta: Option<f64>,
    pub epoch_len: Option<u64>,
    pub window_len: Option<u64>,
}

impl ParamPoint {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        cfg.policy = self.policy.clone();
        if let Some(b) = self.beta {
            cfg.beta = b;
        }
        if let Some(e) = self.epoch_len {
            cfg.epoch_len = e;
        }
        if let Some(w) = self.window_len {
            cfg.window_len = w;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerSeed {
    pub seed: u64,
    pub average_regret: f64,
    pub mean_gain: f64,
    pub mean_recall: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub point: ParamPoint,
    pub mean_regret: f64,
    pub std_regret: f64,
    pub mean_gain: f64,
    pub mean_recall: Option<f64>,
    pub per_seed: Vec<PerSeed>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Best point of a policy: minimum mean average regret, first point
    /// winning ties (grid order is deterministic).
    pub fn best_for(&self, policy: &str) -> Option<&SweepPoint> {
        self.points
            .iter()
            .filter(|p| p.point.policy == policy)
            .min_by(|a, b| a.mean_regret.total_cmp(&b.mean_regret))
    }
}

fn log_space(lo_exp: f64, hi_exp: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![10f64.powf((lo_exp + hi_exp) / 2.0)];
    }
    (0..n)
        .map(|k| 10f64.powf(lo_exp + (hi_exp - lo_exp) * k as f64 / (n - 1) as f64))
        .collect()
}

fn int_log_space(lo: u64, hi: u64, n: usize) -> Vec<u64> {
    let mut vals: Vec<u64> = (0..n)
        .map(|k| {
            let f = (lo as f64) * ((hi as f64) / (lo as f64)).powf(k as f64 / (n - 1).max(1) as f64);
            f.round() as u64
        })
        .collect();
    vals.dedup();
    vals
}

/// Default per-policy grids, matching the published sweep ranges:
/// MASS β ∈ [10^-0.9, 10^0.6], SW-UCB horizon {5,10,20,30,40} with
/// β ∈ [10^-1, 10^1], Earliest Activated β ∈ [10^-1, 10^0.5], Periodic ETC
/// epoch ∈ {2..101}; all β grids log-spaced with `n_points` points.
pub fn default_grid(policy: &str, n_points: usize) -> Vec<ParamPoint> {
    let n = n_points.max(1);
    match policy {
        "mass" => log_space(-0.9, 0.6, n)
            .into_iter()
            .map(|b| ParamPoint {
                policy: policy.into(),
                beta: Some(b),
                epoch_len: None,
                window_len: None,
            })
            .collect(),
        "sw-ucb" => {
            let mut points = Vec::new();
            for w in [5u64, 10, 20, 30, 40] {
                for b in log_space(-1.0, 1.0, n) {
                    points.push(ParamPoint {
                        policy: policy.into(),
                        beta: Some(b),
                        epoch_len: None,
                        window_len: Some(w),
                    });
                }
            }
            points
        }
        "earliest-activated" => log_space(-1.0, 0.5, n)
            .into_iter()
            .map(|b| ParamPoint {
                policy: policy.into(),
                beta: Some(b),
                epoch_len: None,
                window_len: None,
            })
            .collect(),
        "etc" => int_log_space(2, 101, n)
            .into_iter()
            .map(|e| ParamPoint {
                policy: policy.into(),
                beta: None,
                epoch_len: Some(e),
                window_len: None,
            })
            .collect(),
        _ => vec![ParamPoint {
            policy: policy.into(),
            beta: None,
            epoch_len: None,
            window_len: None,
        }],
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs every (point × seed) and aggregates. Execution is parallel;
/// results are merged in deterministic (point, seed) order.
pub fn run_sweep(
    base: &ExperimentConfig,
    points: &[ParamPoint],
    seeds: &[u64],
) -> Result<SweepResult> {
    let jobs: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|p| seeds.iter().map(move |&s| (p, s)))
        .collect();
    let runs: Result<Vec<((usize, u64), PerSeed)>> = jobs
        .par_iter()
        .map(|&(pidx, seed)| {
            let mut cfg = base.clone();
            points[pidx].apply(&mut cfg);
            let res = run_experiment_summary(&cfg, seed)?;
            Ok((
                (pidx, seed),
                PerSeed {
                    seed,
                    average_regret: res.average_regret,
                    mean_gain: res.mean_gain,
                    mean_recall: res.mean_recall,
                },
            ))
        })
        .collect();
    let mut runs = runs?;
    runs.sort_by_key(|(key, _)| *key);

    let mut result = SweepResult { points: Vec::new() };
    for (pidx, point) in points.iter().enumerate() {
        let per_seed: Vec<PerSeed> = runs
            .iter()
            .filter(|((p, _), _)| *p == pidx)
            .map(|(_, r)| r.clone())
            .collect();
        let regrets: Vec<f64> = per_seed.iter().map(|r| r.average_regret).collect();
        let gains: Vec<f64> = per_seed.iter().map(|r| r.mean_gain).collect();
        let (mean_regret, std_regret) = mean_std(&regrets);
        let (mean_gain, _) = mean_std(&gains);
        let recalls: Vec<f64> = per_seed.iter().filter_map(|r| r.mean_recall).collect();
        let mean_recall = if recalls.is_empty() {
            None
        } else {
            Some(recalls.iter().sum::<f64>() / recalls.len() as f64)
        };
        result.points.push(SweepPoint {
            point: point.clone(),
            mean_regret,
            std_regret,
            mean_gain,
            mean_recall,
            per_seed,
        });
    }
    Ok(result)
}
