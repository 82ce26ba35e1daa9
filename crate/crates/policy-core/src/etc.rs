//! Periodic explore-then-commit baseline.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::{require_nonempty, CandidateView, CovId, Policy, PolicyError, Slot};

/// Time is divided into epochs of equal length, aligned to the absolute
/// slot index (slot 1 starts epoch 0). At the start of an epoch every
/// current candidate is queued for one exploration round in id order; for
/// the rest of the epoch the candidate with the maximum gain observed this
/// epoch is scheduled. Candidates that were never scheduled at all are
/// explored immediately; other mid-epoch arrivals wait for the next epoch.
#[derive(Debug, Clone)]
pub struct PeriodicEtcPolicy {
    epoch_len: u64,
    current_epoch: Option<u64>,
    explore_queue: VecDeque<CovId>,
    epoch_gains: BTreeMap<CovId, f64>,
    ever_scheduled: BTreeSet<CovId>,
}

impl PeriodicEtcPolicy {
    pub fn new(epoch_len: u64) -> Self {
        assert!(epoch_len >= 2, "epoch length must be at least 2");
        Self {
            epoch_len,
            current_epoch: None,
            explore_queue: VecDeque::new(),
            epoch_gains: BTreeMap::new(),
            ever_scheduled: BTreeSet::new(),
        }
    }

    pub fn epoch_len(&self) -> u64 {
        self.epoch_len
    }

    fn begin_epoch_if_needed(&mut self, candidates: &[CandidateView], t: Slot) {
        let epoch = (t.saturating_sub(1)) / self.epoch_len;
        if self.current_epoch != Some(epoch) {
            self.current_epoch = Some(epoch);
            let mut ids: Vec<CovId> = candidates.iter().map(|c| c.cov_id).collect();
            ids.sort();
            self.explore_queue = ids.into();
            self.epoch_gains.clear();
        }
    }
}

impl Policy for PeriodicEtcPolicy {
    fn name(&self) -> &'static str {
        "etc"
    }

    fn select(&mut self, candidates: &[CandidateView], t: Slot) -> Result<CovId, PolicyError> {
        require_nonempty(candidates, t)?;
        self.begin_epoch_if_needed(candidates, t);
        let present: BTreeSet<CovId> = candidates.iter().map(|c| c.cov_id).collect();

        // A candidate that has never been scheduled is explored at once.
        if let Some(new) = present
            .iter()
            .find(|id| !self.ever_scheduled.contains(id))
            .copied()
        {
            self.explore_queue.retain(|id| *id != new);
            return Ok(new);
        }

        // Exploration round: pop the queue head, skipping departed CoVs.
        while let Some(head) = self.explore_queue.pop_front() {
            if present.contains(&head) {
                return Ok(head);
            }
        }

        // Commit: best gain observed this epoch among present candidates.
        let best = self
            .epoch_gains
            .iter()
            .filter(|(id, _)| present.contains(id))
            .fold(None::<(CovId, f64)>, |acc, (id, g)| match acc {
                Some((_, bg)) if *g <= bg => acc,
                _ => Some((*id, *g)),
            });
        match best {
            Some((id, _)) => Ok(id),
            // Nothing observed this epoch: fall back to the lowest id.
            None => Ok(*present.iter().next().expect("nonempty")),
        }
    }

    fn observe(&mut self, cov: CovId, gain: f64, _t: Slot) {
        self.epoch_gains.insert(cov, gain);
        self.ever_scheduled.insert(cov);
    }
}
