//! CSV and JSON artifacts: per-slot metrics, run summaries, sweep tables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::runner::SlotMetrics;
use crate::sweep::SweepResult;

pub const SLOT_CSV_HEADER: &str =
    "slot,candidate_count,scheduled_cov,observed_gain,optimal_gain,regret_increment,recall_standalone,recall_cp";
pub const SWEEP_CSV_HEADER: &str =
    "policy,beta,epoch_len,window_len,mean_regret,std_regret,mean_gain,mean_recall,is_best";

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("refusing to write an empty report")]
    EmptyResults,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Per-seed aggregates of one run, as stored in the summary JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedAggregate {
    pub seed: u64,
    pub average_regret: f64,
    pub mean_gain: f64,
    pub mean_recall: Option<f64>,
}

/// The summary JSON document: config echo, seeds, aggregates, version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummaryFile {
    pub version: String,
    pub config: ExperimentConfig,
    pub seeds: Vec<u64>,
    pub per_seed: Vec<SeedAggregate>,
    pub average_regret_mean: f64,
    pub mean_gain_mean: f64,
    pub mean_recall_mean: Option<f64>,
}

impl RunSummaryFile {
    pub fn new(config: ExperimentConfig, per_seed: Vec<SeedAggregate>) -> Result<Self, ReportError> {
        if per_seed.is_empty() {
            return Err(ReportError::EmptyResults);
        }
        let n = per_seed.len() as f64;
        let average_regret_mean = per_seed.iter().map(|s| s.average_regret).sum::<f64>() / n;
        let mean_gain_mean = per_seed.iter().map(|s| s.mean_gain).sum::<f64>() / n;
        let recalls: Vec<f64> = per_seed.iter().filter_map(|s| s.mean_recall).collect();
        let mean_recall_mean = if recalls.is_empty() {
            None
        } else {
            Some(recalls.iter().sum::<f64>() / recalls.len() as f64)
        };
        Ok(Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seeds: per_seed.iter().map(|s| s.seed).collect(),
            config,
            per_seed,
            average_regret_mean,
            mean_gain_mean,
            mean_recall_mean,
        })
    }
}

fn fmt_opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fmt_opt_u64(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes per-slot metrics with a fixed column order. Fails before
/// creating the file when `metrics` is empty.
pub fn write_slot_csv(path: impl AsRef<Path>, metrics: &[SlotMetrics]) -> Result<(), ReportError> {
    if metrics.is_empty() {
        return Err(ReportError::EmptyResults);
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", SLOT_CSV_HEADER)?;
    for m in metrics {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            m.slot,
            m.candidate_count,
            fmt_opt_u64(m.scheduled_cov),
            m.observed_gain,
            m.optimal_gain,
            m.regret_increment,
            fmt_opt_f64(m.recall_standalone),
            fmt_opt_f64(m.recall_cp),
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_json(
    path: impl AsRef<Path>,
    summary: &RunSummaryFile,
) -> Result<(), ReportError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, summary)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn read_summary_json(path: impl AsRef<Path>) -> Result<RunSummaryFile, ReportError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes the sweep table; the best point per policy (minimum mean regret)
/// is flagged in the `is_best` column.
pub fn write_sweep_csv(path: impl AsRef<Path>, sweep: &SweepResult) -> Result<(), ReportError> {
    if sweep.points.is_empty() {
        return Err(ReportError::EmptyResults);
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", SWEEP_CSV_HEADER)?;
    for p in &sweep.points {
        let best = sweep
            .best_for(&p.point.policy)
            .map(|b| b.point == p.point)
            .unwrap_or(false);
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            p.point.policy,
            fmt_opt_f64(p.point.beta),
            fmt_opt_u64(p.point.epoch_len),
            fmt_opt_u64(p.point.window_len),
            p.mean_regret,
            p.std_regret,
            p.mean_gain,
            fmt_opt_f64(p.mean_recall),
            best as u8,
        )?;
    }
    w.flush()?;
    Ok(())
}
