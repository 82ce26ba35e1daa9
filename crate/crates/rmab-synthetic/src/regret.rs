//! Regret accounting against the offline-optimal schedule.

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegretError {
    #[error(
        "negative regret increment at slot index {slot_index}: optimal {optimal} < achieved {achieved} (oracle bug)"
    )]
    NegativeIncrement {
        slot_index: usize,
        optimal: f64,
        achieved: f64,
    },
}

/// Accumulates per-slot regret increments `G*(t) − G_{a_t}(t)`.
///
/// The oracle gain must dominate the achieved gain on every slot; a
/// negative increment indicates an internal inconsistency and is rejected.
#[derive(Debug, Clone, Default)]
pub struct RegretLedger {
    optimal: Vec<f64>,
    achieved: Vec<f64>,
    cumulative: f64,
}

impl RegretLedger {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records one slot and returns the regret increment.
    pub fn record(&mut self, optimal: f64, achieved: f64) -> Result<f64, RegretError> {
        let increment = optimal - achieved;
        if increment < 0.0 {
            return Err(RegretError::NegativeIncrement {
                slot_index: self.optimal.len(),
                optimal,
                achieved,
            });
        }
        self.optimal.push(optimal);
        self.achieved.push(achieved);
        self.cumulative += increment;
        Ok(increment)
    }

    pub fn slots(&self) -> usize {
        self.optimal.len()
    }

    pub fn cumulative(&self) -> f64 {
        self.cumulative
    }

    /// Average regret R(T)/T, defined as 0 for an empty trip.
    pub fn average(&self) -> f64 {
        if self.optimal.is_empty() {
            0.0
        } else {
            self.cumulative / self.optimal.len() as f64
        }
    }

    pub fn optimal_gains(&self) -> &[f64] {
        &self.optimal
    }

    pub fn achieved_gains(&self) -> &[f64] {
        &self.achieved
    }
}
