//! Distance-based baseline: always schedule the nearest candidate.

use crate::{require_nonempty, CandidateView, CovId, Policy, PolicyError, Slot};

/// Returns the candidate with the minimum distance, ties broken by lowest id.
pub fn closest_select(candidates: &[CandidateView]) -> Result<CovId, PolicyError> {
    let t = candidates.first().map(|c| c.slot).unwrap_or(0);
    require_nonempty(candidates, t)?;
    let mut best = &candidates[0];
    for c in &candidates[1..] {
        if c.distance_m < best.distance_m
            || (c.distance_m == best.distance_m && c.cov_id < best.cov_id)
        {
            best = c;
        }
    }
    Ok(best.cov_id)
}

/// Stateless policy wrapper around [`closest_select`].
#[derive(Debug, Clone, Default)]
pub struct ClosestPolicy;

impl ClosestPolicy {
    pub fn new() -> Self {
        Self
    }
}

impl Policy for ClosestPolicy {
    fn name(&self) -> &'static str {
        "closest"
    }

    fn select(&mut self, candidates: &[CandidateView], t: Slot) -> Result<CovId, PolicyError> {
        require_nonempty(candidates, t)?;
        closest_select(candidates)
    }

    fn observe(&mut self, _cov: CovId, _gain: f64, _t: Slot) {}
}
