//! Scheduling policies for cooperative-perception sensor sharing.
//!
//! An ego vehicle can receive sensor data from exactly one cooperative
//! vehicle (CoV) per time slot. A [`Policy`] decides which candidate to
//! schedule, observing only the perception gain of the CoV it actually
//! scheduled. Five policies are provided:
//!
//! * [`MassPolicy`] — upper confidence bounds that grow with idle time,
//!   `ĝ_i + β·√(t − τ_i)`.
//! * [`ClosestPolicy`] — always the nearest candidate.
//! * [`PeriodicEtcPolicy`] — explore every candidate once per epoch, then
//!   commit to the best observed.
//! * [`SwUcbPolicy`] — sliding-window UCB over a fixed horizon.
//! * [`EarliestActivatedPolicy`] — activation queue drained on odd slots,
//!   leader exploited on even slots.
//!
//! All argmax/argmin ties break towards the lowest CoV id so that runs are
//! reproducible.

mod closest;
mod earliest;
mod etc;
mod mass;
mod sw_ucb;

pub use closest::{closest_select, ClosestPolicy};
pub use earliest::EarliestActivatedPolicy;
pub use etc::PeriodicEtcPolicy;
pub use mass::MassPolicy;
pub use sw_ucb::SwUcbPolicy;

use std::fmt;
use std::str::FromStr;

/// Discrete time index. Slots are numbered from 1.
pub type Slot = u64;

/// Identifier of a cooperative vehicle. The ordering of ids is the
/// tie-break order used by every policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CovId(pub u64);

impl fmt::Display for CovId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One candidate sharer as presented to the scheduler in a given slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateView {
    pub cov_id: CovId,
    /// Ego-to-CoV distance in meters, used by the distance-based policy.
    pub distance_m: f64,
    /// The slot this view belongs to.
    pub slot: Slot,
}

impl CandidateView {
    pub fn new(cov_id: u64, distance_m: f64, slot: Slot) -> Self {
        Self {
            cov_id: CovId(cov_id),
            distance_m,
            slot,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolicyError {
    #[error("no candidates available at slot {slot}")]
    NoCandidates { slot: Slot },
    #[error("unknown policy name {0:?}")]
    UnknownPolicy(String),
}

/// A sequential scheduling policy.
///
/// `select` must return a member of `candidates`; `observe` reveals the
/// gain of the scheduled CoV at the end of the slot. Policies never see
/// the gains of candidates they did not schedule.
pub trait Policy: Send {
    fn name(&self) -> &'static str;

    fn select(&mut self, candidates: &[CandidateView], t: Slot) -> Result<CovId, PolicyError>;

    fn observe(&mut self, cov: CovId, gain: f64, t: Slot);
}

/// Names of the built-in policies, as accepted by [`build_policy`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyName {
    Mass,
    Closest,
    Etc,
    SwUcb,
    EarliestActivated,
}

impl PolicyName {
    pub const ALL: [PolicyName; 5] = [
        PolicyName::Mass,
        PolicyName::Closest,
        PolicyName::Etc,
        PolicyName::SwUcb,
        PolicyName::EarliestActivated,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PolicyName::Mass => "mass",
            PolicyName::Closest => "closest",
            PolicyName::Etc => "etc",
            PolicyName::SwUcb => "sw-ucb",
            PolicyName::EarliestActivated => "earliest-activated",
        }
    }
}

impl fmt::Display for PolicyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyName {
    type Err = PolicyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mass" => Ok(PolicyName::Mass),
            "closest" => Ok(PolicyName::Closest),
            "etc" => Ok(PolicyName::Etc),
            "sw-ucb" => Ok(PolicyName::SwUcb),
            "earliest-activated" => Ok(PolicyName::EarliestActivated),
            other => Err(PolicyError::UnknownPolicy(other.to_string())),
        }
    }
}

/// Tunable parameters shared by the policies. Each policy reads only the
/// fields it needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyParams {
    /// Confidence-bound scale for MASS, SW-UCB and Earliest Activated.
    pub beta: f64,
    /// Epoch length of Periodic ETC, at least 2.
    pub epoch_len: u64,
    /// Sliding-window horizon of SW-UCB, in slots.
    pub window_len: u64,
}

impl Default for PolicyParams {
    fn default() -> Self {
        Self {
            beta: 0.6,
            epoch_len: 20,
            window_len: 20,
        }
    }
}

/// Builds a policy from its name string and parameters.
pub fn build_policy(name: PolicyName, params: &PolicyParams) -> Box<dyn Policy> {
    match name {
        PolicyName::Mass => Box::new(MassPolicy::new(params.beta)),
        PolicyName::Closest => Box::new(ClosestPolicy::new()),
        PolicyName::Etc => Box::new(PeriodicEtcPolicy::new(params.epoch_len)),
        PolicyName::SwUcb => Box::new(SwUcbPolicy::new(params.window_len, params.beta)),
        PolicyName::EarliestActivated => Box::new(EarliestActivatedPolicy::new(params.beta)),
    }
}

/// Last-seen gain and last-seen slot of one CoV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LastSeen {
    pub gain: f64,
    pub slot: Slot,
}

pub(crate) fn require_nonempty(candidates: &[CandidateView], t: Slot) -> Result<(), PolicyError> {
    if candidates.is_empty() {
        Err(PolicyError::NoCandidates { slot: t })
    } else {
        Ok(())
    }
}

/// Argmax over candidates by a scored key, ties broken by lowest id.
pub(crate) fn argmax_by_score<F>(candidates: &[CandidateView], mut score: F) -> CovId
where
    F: FnMut(&CandidateView) -> f64,
{
    debug_assert!(!candidates.is_empty());
    let mut best_id = candidates[0].cov_id;
    let mut best_score = score(&candidates[0]);
    for c in &candidates[1..] {
        let s = score(c);
        if s > best_score || (s == best_score && c.cov_id < best_id) {
            best_score = s;
            best_id = c.cov_id;
        }
    }
    best_id
}
