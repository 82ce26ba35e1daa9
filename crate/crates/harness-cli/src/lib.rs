//! Experiment orchestration: configuration, seeded runs, parameter
//! sweeps, and CSV/JSON reporting.

pub mod config;
pub mod report;
pub mod runner;
pub mod seeds;
pub mod sweep;

pub use config::{ConfigError, EnvKind, ExperimentConfig};
pub use report::{
    read_summary_json, write_slot_csv, write_summary_json, write_sweep_csv, ReportError,
    RunSummaryFile, SeedAggregate,
};
pub use runner::{run_experiment, run_experiment_summary, run_with_policy, PolicyUnderTest, RunResult, SlotMetrics};
pub use sweep::{default_grid, run_sweep, ParamPoint, PerSeed, SweepPoint, SweepResult};
