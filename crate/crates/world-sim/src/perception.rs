//! Perception cost, gain and recall from merged point counts.

use std::collections::BTreeMap;

use policy_core::{CandidateView, CovId};

use crate::detection::{detect, importance_weight, DifficultyTable, ObjectKind};
use crate::frame::WorldFrame;
use crate::lidar::{LidarSpec, SweepContext};

/// Per-object bookkeeping of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectPerception {
    pub kind: ObjectKind,
    pub id: u64,
    pub weight: f64,
    pub difficulty: u64,
    pub ego_points: u64,
    /// CoV points after down-sampling.
    pub cov_points: u64,
    pub detected_standalone: bool,
    pub detected_cp: bool,
}

/// Aggregate outcome of one (frame, CoV) evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptionOutcome {
    pub objects: Vec<ObjectPerception>,
    /// Standalone cost c_0 = Σ w·(1 − Φ_standalone).
    pub cost_standalone: f64,
    /// Cooperative cost c_i = Σ w·(1 − Φ_standalone)·(1 − Φ_cp).
    pub cost_cp: f64,
    /// Perception gain g_i = c_0 − c_i.
    pub gain: f64,
    pub recall_standalone: f64,
    pub recall_cp: f64,
}

/// Evaluates the detection outcome from per-object
/// (weight, difficulty, ego points, down-sampled CoV points). Objects with
/// zero weight must be filtered out by the caller.
pub fn evaluate_perception(items: &[(ObjectKind, u64, f64, u64, u64, u64)]) -> PerceptionOutcome {
    let mut objects = Vec::with_capacity(items.len());
    let mut cost_standalone = 0.0;
    let mut cost_cp = 0.0;
    let mut standalone_detected = 0usize;
    let mut cp_detected = 0usize;
    for &(kind, id, weight, difficulty, ego_points, cov_points) in items {
        let detected_standalone = detect(ego_points, difficulty);
        let detected_cp = detect(ego_points + cov_points, difficulty);
        if detected_standalone {
            standalone_detected += 1;
        }
        if detected_cp {
            cp_detected += 1;
        }
        let miss_standalone = if detected_standalone { 0.0 } else { 1.0 };
        let miss_cp = if detected_cp { 0.0 } else { 1.0 };
        cost_standalone += weight * miss_standalone;
        cost_cp += weight * miss_standalone * miss_cp;
        objects.push(ObjectPerception {
            kind,
            id,
            weight,
            difficulty,
            ego_points,
            cov_points,
            detected_standalone,
            detected_cp,
        });
    }
    let count = items.len();
    let (recall_standalone, recall_cp) = if count == 0 {
        (1.0, 1.0)
    } else {
        (
            standalone_detected as f64 / count as f64,
            cp_detected as f64 / count as f64,
        )
    };
    PerceptionOutcome {
        objects,
        cost_standalone,
        cost_cp,
        gain: cost_standalone - cost_cp,
        recall_standalone,
        recall_cp,
    }
}

/// Scales a raw CoV point count by the link's down-sampling ratio,
/// rounding to the nearest integer.
pub fn downsample_points(raw: u64, rho: f64) -> u64 {
    debug_assert!((0.0..=1.0).contains(&rho));
    (raw as f64 * rho).round() as u64
}

/// In-scope objects of a frame: every non-ego car and every pedestrian
/// with a positive importance weight, with ego point counts.
#[derive(Debug, Clone)]
pub struct SlotObjects {
    /// (kind, id, weight, difficulty, ego_points, raw target info)
    entries: Vec<ObjectEntry>,
}

#[derive(Debug, Clone, Copy)]
struct ObjectEntry {
    kind: ObjectKind,
    id: u64,
    weight: f64,
    difficulty: u64,
    ego_points: u64,
}

impl SlotObjects {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Full counterfactual evaluation of one slot: ego sweep, per-candidate
/// sweeps, and the perception outcome each candidate would produce.
pub struct SlotEvaluation {
    pub objects: SlotObjects,
    /// Outcome of scheduling each candidate, keyed by CoV id.
    pub per_candidate: BTreeMap<CovId, PerceptionOutcome>,
    pub recall_standalone: f64,
}

/// Evaluates every candidate's would-be perception gain in `frame`.
/// `rhos` maps each candidate to its down-sampling ratio for this slot.
/// The returned gains are what the regret oracle consumes; the scheduler
/// itself only ever sees the gain of the CoV it scheduled.
pub fn evaluate_slot(
    frame: &WorldFrame,
    spec: &LidarSpec,
    difficulties: &mut DifficultyTable,
    candidates: &[CandidateView],
    rhos: &BTreeMap<CovId, f64>,
) -> SlotEvaluation {
    let ego = frame.ego();
    let ego_ctx = SweepContext::new(frame, ego.id, spec);

    let mut entries = Vec::new();
    for v in &frame.vehicles {
        if v.is_ego {
            continue;
        }
        let weight = importance_weight(ego.center.distance(v.center));
        if weight <= 0.0 {
            continue;
        }
        entries.push(ObjectEntry {
            kind: ObjectKind::Car,
            id: v.id,
            weight,
            difficulty: difficulties.difficulty(ObjectKind::Car, v.id),
            ego_points: ego_ctx.vehicle_points(v.id, v.center),
        });
    }
    for p in &frame.pedestrians {
        let weight = importance_weight(ego.center.distance(p.pos));
        if weight <= 0.0 {
            continue;
        }
        entries.push(ObjectEntry {
            kind: ObjectKind::Pedestrian,
            id: p.id,
            weight,
            difficulty: difficulties.difficulty(ObjectKind::Pedestrian, p.id),
            ego_points: ego_ctx.pedestrian_points(p.pos),
        });
    }

    let mut per_candidate = BTreeMap::new();
    for cand in candidates {
        let cov_id = cand.cov_id;
        let rho = rhos.get(&cov_id).copied().unwrap_or(1.0);
        let cov_ctx = SweepContext::new(frame, cov_id.0, spec);
        let items: Vec<(ObjectKind, u64, f64, u64, u64, u64)> = entries
            .iter()
            .map(|e| {
                let raw = match e.kind {
                    ObjectKind::Car => {
                        let center = frame
                            .vehicles
                            .iter()
                            .find(|v| v.id == e.id)
                            .expect("object in frame")
                            .center;
                        // The scheduled CoV does not scan itself.
                        if e.id == cov_id.0 {
                            0
                        } else {
                            cov_ctx.vehicle_points(e.id, center)
                        }
                    }
                    ObjectKind::Pedestrian => {
                        let pos = frame
                            .pedestrians
                            .iter()
                            .find(|p| p.id == e.id)
                            .expect("object in frame")
                            .pos;
                        cov_ctx.pedestrian_points(pos)
                    }
                };
                let cov_points = downsample_points(raw, rho);
                (e.kind, e.id, e.weight, e.difficulty, e.ego_points, cov_points)
            })
            .collect();
        per_candidate.insert(cov_id, evaluate_perception(&items));
    }

    let recall_standalone = if entries.is_empty() {
        1.0
    } else {
        entries
            .iter()
            .filter(|e| detect(e.ego_points, e.difficulty))
            .count() as f64
            / entries.len() as f64
    };

    SlotEvaluation {
        objects: SlotObjects { entries },
        per_candidate,
        recall_standalone,
    }
}

/// Per-candidate gains of one slot (the offline oracle's view).
pub fn oracle_gains(evaluation: &SlotEvaluation) -> BTreeMap<CovId, f64> {
    evaluation
        .per_candidate
        .iter()
        .map(|(id, outcome)| (*id, outcome.gain))
        .collect()
}

/// 2D link geometry between the ego and one CoV: distance, vehicle
/// blockers on the segment, and whether a building blocks it.
pub fn link_geometry(frame: &WorldFrame, cov_id: u64) -> (f64, usize, bool) {
    let ego = frame.ego();
    let cov = frame
        .vehicles
        .iter()
        .find(|v| v.id == cov_id)
        .expect("cov in frame");
    let a = ego.center;
    let b = cov.center;
    let blockers = frame
        .vehicles
        .iter()
        .filter(|v| v.id != ego.id && v.id != cov_id)
        .filter(|v| v.footprint().intersects_segment(a, b))
        .count();
    let building_blocked = frame.buildings.iter().any(|r| r.intersects_segment(a, b));
    (a.distance(b), blockers, building_blocked)
}
