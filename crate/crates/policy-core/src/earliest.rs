//! Activation-queue baseline for restless bandits.

use std::collections::BTreeMap;

use crate::{require_nonempty, CandidateView, CovId, LastSeen, Policy, PolicyError, Slot};

/// Keeps the same last-seen state as MASS plus an activation queue. A
/// candidate whose upper confidence bound exceeds the leader's last-seen
/// gain is activated until scheduled. Odd slots schedule the earliest
/// activated candidate, even slots exploit the leader (the candidate with
/// the maximum last-seen gain).
#[derive(Debug, Clone)]
pub struct EarliestActivatedPolicy {
    beta: f64,
    entries: BTreeMap<CovId, LastSeen>,
    /// (cov, activation slot), ascending by activation slot; each CoV
    /// appears at most once.
    activation_queue: Vec<(CovId, Slot)>,
}

impl EarliestActivatedPolicy {
    pub fn new(beta: f64) -> Self {
        assert!(beta > 0.0, "beta must be positive");
        Self {
            beta,
            entries: BTreeMap::new(),
            activation_queue: Vec::new(),
        }
    }

    pub fn queue(&self) -> &[(CovId, Slot)] {
        &self.activation_queue
    }

    fn leader(&self, candidates: &[CandidateView]) -> (CovId, f64) {
        let mut best: Option<(CovId, f64)> = None;
        for c in candidates {
            if let Some(e) = self.entries.get(&c.cov_id) {
                match best {
                    Some((id, g)) if e.gain < g || (e.gain == g && id < c.cov_id) => {}
                    _ => best = Some((c.cov_id, e.gain)),
                }
            }
        }
        best.unwrap_or_else(|| {
            // No candidate observed yet: lowest id stands in as leader.
            let id = candidates.iter().map(|c| c.cov_id).min().expect("nonempty");
            (id, f64::NEG_INFINITY)
        })
    }
}

impl Policy for EarliestActivatedPolicy {
    fn name(&self) -> &'static str {
        "earliest-activated"
    }

    fn select(&mut self, candidates: &[CandidateView], t: Slot) -> Result<CovId, PolicyError> {
        require_nonempty(candidates, t)?;
        let (leader, leader_gain) = self.leader(candidates);

        // Activate every candidate whose UCB exceeds the leader's gain.
        let mut ids: Vec<CovId> = candidates.iter().map(|c| c.cov_id).collect();
        ids.sort();
        for id in ids {
            let ucb = match self.entries.get(&id) {
                Some(e) => e.gain + self.beta * ((t - e.slot) as f64).sqrt(),
                None => f64::INFINITY,
            };
            if ucb > leader_gain && !self.activation_queue.iter().any(|(q, _)| *q == id) {
                self.activation_queue.push((id, t));
            }
        }

        // Odd slots explore the earliest activated candidate still present;
        // even slots (and an empty queue) exploit the leader.
        let mut pick = leader;
        if t % 2 == 1 {
            if let Some((id, _)) = self
                .activation_queue
                .iter()
                .find(|(id, _)| candidates.iter().any(|c| c.cov_id == *id))
            {
                pick = *id;
            }
        }
        self.activation_queue.retain(|(id, _)| *id != pick);
        Ok(pick)
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
    fn even_slot_exploits_leader() {
        let mut p = EarliestActivatedPolicy::new(0.5);
        p.observe(CovId(1), 0.4, 9);
        p.observe(CovId(2), 0.8, 9);
        assert_eq!(p.select(&cands(&[1, 2], 10), 10).unwrap(), CovId(2));
    }

    #[test]
    fn odd_slot_takes_queue_head() {
        let mut p = EarliestActivatedPolicy::new(0.5);
        p.observe(CovId(1), 0.4, 2);
        p.observe(CovId(2), 0.8, 2);
        p.observe(CovId(3), 0.7, 2);
        // Even slot first: queue fills but the leader is exploited.
        assert_eq!(p.select(&cands(&[1, 2, 3], 4), 4).unwrap(), CovId(2));
        let queued: Vec<u64> = p.queue().iter().map(|(c, _)| c.0).collect();
        assert_eq!(queued, vec![1, 3]);
        // Odd slot drains the head.
        assert_eq!(p.select(&cands(&[1, 2, 3], 5), 5).unwrap(), CovId(1));
    }

    #[test]
    fn odd_slot_without_usable_queue_returns_leader() {
        let mut p = EarliestActivatedPolicy::new(0.5);
        p.observe(CovId(1), 0.1, 5);
        p.observe(CovId(2), 0.9, 6);
        // At t=7: UCB_1 = 0.1 + 0.5*sqrt(2) ≈ 0.81 ≤ 0.9 stays inactive; only
        // the leader self-activates, so the queue head is the leader itself.
        assert_eq!(p.select(&cands(&[1, 2], 7), 7).unwrap(), CovId(2));
        assert!(p.queue().is_empty());
    }

    #[test]
    fn departed_queue_entries_are_skipped() {
        let mut p = EarliestActivatedPolicy::new(0.5);
        p.observe(CovId(1), 0.4, 2);
        p.observe(CovId(2), 0.9, 2);
        p.observe(CovId(3), 0.5, 2);
        assert_eq!(p.select(&cands(&[1, 2, 3], 4), 4).unwrap(), CovId(2));
        // CoV 1 heads the queue but departed; CoV 3 is scheduled instead.
        assert_eq!(p.select(&cands(&[2, 3], 5), 5).unwrap(), CovId(3));
    }

    #[test]
    fn queue_holds_each_cov_once() {
        let mut p = EarliestActivatedPolicy::new(0.5);
        p.observe(CovId(1), 0.2, 2);
        p.observe(CovId(2), 0.9, 3);
        let _ = p.select(&cands(&[1, 2], 4), 4);
        let _ = p.select(&cands(&[1, 2], 6), 6);
        let count = p.queue().iter().filter(|(c, _)| *c == CovId(1)).count();
        assert_eq!(count, 1);
    }

    #[test]
    fn empty_set_errors() {
        let mut p = EarliestActivatedPolicy::new(0.5);
        assert!(p.select(&[], 3).is_err());
    }
}
