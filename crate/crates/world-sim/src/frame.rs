//! One time slot of bird's-eye-view world state.

use std::collections::BTreeSet;
use std::sync::Arc;

use policy_core::{CandidateView, CovId, Slot};

use crate::geom::{Footprint, Rect, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleState {
    pub id: u64,
    pub center: Vec2,
    pub heading: f64,
    pub length_m: f64,
    pub width_m: f64,
    pub is_cov: bool,
    pub is_ego: bool,
}

impl VehicleState {
    pub fn footprint(&self) -> Footprint {
        Footprint::new(self.center, self.heading, self.length_m, self.width_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pedestrian {
    pub id: u64,
    pub pos: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldFrame {
    pub slot: Slot,
    pub vehicles: Vec<VehicleState>,
    pub pedestrians: Vec<Pedestrian>,
    pub buildings: Arc<Vec<Rect>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FrameError {
    #[error("frame {slot}: expected exactly one ego vehicle, found {count}")]
    EgoCount { slot: Slot, count: usize },
    #[error("frame {slot}: duplicate {kind} id {id}")]
    DuplicateId {
        slot: Slot,
        kind: &'static str,
        id: u64,
    },
    #[error("frame {slot}: vehicle {id} has a degenerate rectangle")]
    DegenerateVehicle { slot: Slot, id: u64 },
    #[error("frame {slot}: entity {id} has non-finite coordinates")]
    NonFinite { slot: Slot, id: u64 },
}

impl WorldFrame {
    pub fn ego(&self) -> &VehicleState {
        self.vehicles
            .iter()
            .find(|v| v.is_ego)
            .expect("validated frame has one ego")
    }

    pub fn validate(&self) -> Result<(), FrameError> {
        let ego_count = self.vehicles.iter().filter(|v| v.is_ego).count();
        if ego_count != 1 {
            return Err(FrameError::EgoCount {
                slot: self.slot,
                count: ego_count,
            });
        }
        let mut seen = BTreeSet::new();
        for v in &self.vehicles {
            if !seen.insert(v.id) {
                return Err(FrameError::DuplicateId {
                    slot: self.slot,
                    kind: "vehicle",
                    id: v.id,
                });
            }
            if !(v.center.is_finite() && v.heading.is_finite()) {
                return Err(FrameError::NonFinite {
                    slot: self.slot,
                    id: v.id,
                });
            }
            if !(v.length_m > 0.0 && v.width_m > 0.0) {
                return Err(FrameError::DegenerateVehicle {
                    slot: self.slot,
                    id: v.id,
                });
            }
        }
        let mut seen = BTreeSet::new();
        for p in &self.pedestrians {
            if !seen.insert(p.id) {
                return Err(FrameError::DuplicateId {
                    slot: self.slot,
                    kind: "pedestrian",
                    id: p.id,
                });
            }
            if !p.pos.is_finite() {
                return Err(FrameError::NonFinite {
                    slot: self.slot,
                    id: p.id,
                });
            }
        }
        Ok(())
    }

    /// CoV-flagged vehicles (excluding the ego) within `range_m` of the
    /// ego, capped at `v_max` keeping the nearest. Views are returned in
    /// id order.
    pub fn candidates(&self, range_m: f64, v_max: usize) -> Vec<CandidateView> {
        let ego = self.ego();
        let mut in_range: Vec<(f64, u64)> = self
            .vehicles
            .iter()
            .filter(|v| v.is_cov && !v.is_ego)
            .map(|v| (ego.center.distance(v.center), v.id))
            .filter(|(d, _)| *d <= range_m)
            .collect();
        in_range.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        in_range.truncate(v_max);
        in_range.sort_by_key(|(_, id)| *id);
        in_range
            .into_iter()
            .map(|(d, id)| CandidateView {
                cov_id: CovId(id),
                distance_m: d,
                slot: self.slot,
            })
            .collect()
    }
}
