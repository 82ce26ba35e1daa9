//! Sliding-window UCB: averaged rewards over a fixed-size horizon.

use std::collections::VecDeque;

use crate::{argmax_by_score, require_nonempty, CandidateView, CovId, Policy, PolicyError, Slot};

/// UCB over the last `L` slots. The score of candidate `i` is the windowed
/// mean gain plus `β·√(ln(min(t, L)) / N_i)` where `N_i` is the number of
/// times `i` was scheduled inside the window. A candidate unseen in the
/// window is explored before any seen one, lowest id first.
#[derive(Debug, Clone)]
pub struct SwUcbPolicy {
    window_len: u64,
    beta: f64,
    /// (slot, cov, gain) records covering the last `window_len` slots.
    history: VecDeque<(Slot, CovId, f64)>,
}

impl SwUcbPolicy {
    pub fn new(window_len: u64, beta: f64) -> Self {
        assert!(window_len > 0, "window length must be positive");
        assert!(beta >= 0.0, "beta must be non-negative");
        Self {
            window_len,
            beta,
            history: VecDeque::new(),
        }
    }

    pub fn window_len(&self) -> u64 {
        self.window_len
    }

    /// Drops records outside the window (t − L, t].
    fn evict(&mut self, t: Slot) {
        while let Some(&(slot, _, _)) = self.history.front() {
            if slot + self.window_len <= t {
                self.history.pop_front();
            } else {
                break;
            }
        }
    }

    fn window_stats(&self, cov: CovId) -> (u64, f64) {
        let mut n = 0u64;
        let mut sum = 0.0;
        for &(_, c, g) in &self.history {
            if c == cov {
                n += 1;
                sum += g;
            }
        }
        (n, sum)
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }
}

impl Policy for SwUcbPolicy {
    fn name(&self) -> &'static str {
        "sw-ucb"
    }

    fn select(&mut self, candidates: &[CandidateView], t: Slot) -> Result<CovId, PolicyError> {
        require_nonempty(candidates, t)?;
        self.evict(t);
        // Forced exploration of candidates unseen in the window.
        if let Some(unseen) = candidates
            .iter()
            .filter(|c| self.window_stats(c.cov_id).0 == 0)
            .map(|c| c.cov_id)
            .min()
        {
            return Ok(unseen);
        }
        let pad_num = (t.min(self.window_len).max(1) as f64).ln();
        Ok(argmax_by_score(candidates, |c| {
            let (n, sum) = self.window_stats(c.cov_id);
            sum / n as f64 + self.beta * (pad_num / n as f64).sqrt()
        }))
    }

    fn observe(&mut self, cov: CovId, gain: f64, t: Slot) {
        self.history.push_back((t, cov, gain));
        self.evict(t);
    }
}
