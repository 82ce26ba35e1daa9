//! Offline-optimal schedule over a recorded gain matrix.

use std::io::{self, Write};

use policy_core::CovId;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("slot {slot_index} has no candidates")]
    EmptySlot { slot_index: usize },
}

/// Per-slot best choice and its gain.
#[derive(Debug, Clone, PartialEq)]
pub struct OfflineOptimal {
    pub choices: Vec<CovId>,
    pub gains: Vec<f64>,
}

/// Computes `a*_t = argmax_{i ∈ V_t} G_i(t)` per slot, ties to the lowest
/// id. Every slot must offer at least one candidate.
pub fn offline_optimal(per_slot: &[Vec<(CovId, f64)>]) -> Result<OfflineOptimal, OracleError> {
    let mut choices = Vec::with_capacity(per_slot.len());
    let mut gains = Vec::with_capacity(per_slot.len());
    for (slot_index, candidates) in per_slot.iter().enumerate() {
        let mut best: Option<(CovId, f64)> = None;
        for &(id, g) in candidates {
            best = match best {
                Some((bid, bg)) if g < bg || (g == bg && bid < id) => best,
                _ => Some((id, g)),
            };
        }
        let (id, g) = best.ok_or(OracleError::EmptySlot { slot_index })?;
        choices.push(id);
        gains.push(g);
    }
    Ok(OfflineOptimal { choices, gains })
}

/// Dumps a gain matrix as CSV with columns `slot,cov_id,gain`, one row per
/// (slot, arm). Slots are numbered from 1.
pub fn dump_gains_csv<W: Write>(mut w: W, per_slot: &[Vec<(CovId, f64)>]) -> io::Result<()> {
    writeln!(w, "slot,cov_id,gain")?;
    for (i, candidates) in per_slot.iter().enumerate() {
        for (id, g) in candidates {
            writeln!(w, "{},{},{}", i + 1, id, g)?;
        }
    }
    Ok(())
}
