//! Synthetic restless-bandit environment.
//!
//! Per-arm normalized perception gains evolve as Gaussian random walks with
//! reflecting boundaries on [0, 1]; arms arrive and depart over time. The
//! crate also provides the offline-optimal oracle, regret accounting, and
//! empirical checkers for the well-behavedness and prompt-scheduling
//! properties that the regret analysis relies on.

pub mod analysis;
pub mod oracle;
pub mod population;
pub mod regret;
mod stream;
pub mod walk;

pub use analysis::{
    lemma1_violation_frequency, lemma2_check, mass_two_arm_average_regret, sigma_window,
    theoretical_beta, well_behaved, well_behaved_mask, AnalysisConstants, DomainError,
    Lemma1Config, Lemma2Outcome,
};
pub use oracle::{dump_gains_csv, offline_optimal, OfflineOptimal, OracleError};
pub use population::{ArmPopulation, PopulationConfig, PopulationEvents};
pub use regret::{RegretError, RegretLedger};
pub use walk::{normalize_gain, reflect, GainProcess};
