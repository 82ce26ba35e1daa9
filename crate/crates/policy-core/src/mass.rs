//! Mobility-aware sensor scheduling: confidence bounds grow with idle time.

use std::collections::BTreeMap;

use crate::{argmax_by_score, require_nonempty, CandidateView, CovId, LastSeen, Policy, PolicyError, Slot};

/// Schedules the candidate with the maximum upper confidence bound
/// `ĝ_i + β·√(t − τ_i)`, where `ĝ_i` is the last observed gain of CoV `i`
/// and `τ_i` the slot of that observation. A candidate that has never been
/// scheduled is explored immediately, lowest id first, one per slot.
#[derive(Debug, Clone)]
pub struct MassPolicy {
    beta: f64,
    entries: BTreeMap<CovId, LastSeen>,
}

impl MassPolicy {
    pub fn new(beta: f64) -> Self {
        assert!(beta > 0.0, "beta must be positive");
        Self {
            beta,
            entries: BTreeMap::new(),
        }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Last-seen state of one CoV, if it has ever been scheduled.
    pub fn last_seen(&self, cov: CovId) -> Option<LastSeen> {
        self.entries.get(&cov).copied()
    }

    /// Upper confidence bound of a CoV at slot `t`, if it has an entry.
    pub fn upper_confidence(&self, cov: CovId, t: Slot) -> Option<f64> {
        self.entries.get(&cov).map(|e| {
            debug_assert!(e.slot <= t);
            e.gain + self.beta * ((t - e.slot) as f64).sqrt()
        })
    }

    pub fn entries(&self) -> impl Iterator<Item = (CovId, LastSeen)> + '_ {
        self.entries.iter().map(|(id, e)| (*id, *e))
    }
}

impl Policy for MassPolicy {
    fn name(&self) -> &'static str {
        "mass"
    }

    fn select(&mut self, candidates: &[CandidateView], t: Slot) -> Result<CovId, PolicyError> {
        require_nonempty(candidates, t)?;
        // Any never-scheduled candidate is explored first, lowest id wins.
        if let Some(new) = candidates
            .iter()
            .filter(|c| !self.entries.contains_key(&c.cov_id))
            .map(|c| c.cov_id)
            .min()
        {
            return Ok(new);
        }
        Ok(argmax_by_score(candidates, |c| {
            self.upper_confidence(c.cov_id, t).expect("entry exists")
        }))
    }

    fn observe(&mut self, cov: CovId, gain: f64, t: Slot) {
        self.entries.insert(cov, LastSeen { gain, slot: t });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cands(ids: &[u64], t: Slot) -> Vec<CandidateView> {
        ids.iter().map(|&i| CandidateView::new(i, 0.0, t)).collect()
    }

    #[test]
    fn selects_max_upper_confidence() {
        // UCB_1 = 0.3 + 0.6*sqrt(5) ≈ 1.642, UCB_2 = 0.6 + 0.6*1 = 1.2
        let mut p = MassPolicy::new(0.6);
        p.observe(CovId(1), 0.3, 5);
        p.observe(CovId(2), 0.6, 9);
        let u1 = p.upper_confidence(CovId(1), 10).unwrap();
        assert!((u1 - (0.3 + 0.6 * 5f64.sqrt())).abs() < 1e-12);
        assert_eq!(p.select(&cands(&[1, 2], 10), 10).unwrap(), CovId(1));
    }

    #[test]
    fn never_scheduled_candidate_goes_first() {
        let mut p = MassPolicy::new(0.6);
        p.observe(CovId(1), 0.9, 5);
        p.observe(CovId(2), 0.9, 5);
        assert_eq!(p.select(&cands(&[1, 2, 3], 6), 6).unwrap(), CovId(3));
    }

    #[test]
    fn multiple_new_arrivals_lowest_id_first() {
        let mut p = MassPolicy::new(0.6);
        p.observe(CovId(1), 0.9, 5);
        assert_eq!(p.select(&cands(&[1, 4, 3], 6), 6).unwrap(), CovId(3));
    }

    #[test]
    fn equal_bounds_tie_break_to_lowest_id() {
        let mut p = MassPolicy::new(0.6);
        p.observe(CovId(1), 0.5, 6);
        p.observe(CovId(2), 0.5, 6);
        assert_eq!(p.select(&cands(&[2, 1], 10), 10).unwrap(), CovId(1));
    }

    #[test]
    fn observe_touches_one_entry_only() {
        let mut p = MassPolicy::new(0.6);
        p.observe(CovId(1), 0.3, 5);
        p.observe(CovId(2), 0.4, 9);
        p.observe(CovId(2), 0.8, 10);
        assert_eq!(p.last_seen(CovId(2)).unwrap(), LastSeen { gain: 0.8, slot: 10 });
        assert_eq!(p.last_seen(CovId(1)).unwrap(), LastSeen { gain: 0.3, slot: 5 });
    }

    #[test]
    fn zero_gain_is_stored() {
        let mut p = MassPolicy::new(0.6);
        p.observe(CovId(7), 0.0, 3);
        assert_eq!(p.last_seen(CovId(7)).unwrap().gain, 0.0);
    }

    #[test]
    fn empty_candidates_error() {
        let mut p = MassPolicy::new(0.6);
        assert_eq!(
            p.select(&[], 4),
            Err(PolicyError::NoCandidates { slot: 4 })
        );
    }
}
