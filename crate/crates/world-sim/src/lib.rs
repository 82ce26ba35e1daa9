//! Bird's-eye-view cooperative-perception world.
//!
//! A Manhattan-grid traffic generator (or an ingested trace) produces
//! per-slot [`WorldFrame`]s; 2D LiDAR ray casting with building and
//! vehicle occlusion yields per-object point counts; a power-law
//! difficulty model turns point counts into detections; perception gain
//! is the weighted cost of objects newly detected thanks to a CoV's
//! shared points.

pub mod detection;
pub mod frame;
pub mod geom;
pub mod lidar;
pub mod mobility;
pub mod perception;
mod stream;
pub mod trace;

pub use detection::{
    detect, difficulty_from_uniform, importance_weight, sample_difficulty, DifficultyTable,
    ObjectKind, MISS_EXPONENT,
};
pub use frame::{FrameError, Pedestrian, VehicleState, WorldFrame};
pub use geom::{Footprint, Rect, Vec2};
pub use lidar::{raycast_points, LidarSpec, SweepContext, Target, OBJECT_HEIGHT_M};
pub use mobility::{ManhattanConfig, ManhattanTrace, MobilityError};
pub use perception::{
    downsample_points, evaluate_perception, evaluate_slot, link_geometry, oracle_gains,
    ObjectPerception, PerceptionOutcome, SlotEvaluation,
};
pub use trace::{
    load_buildings, load_trace, save_buildings, save_trace, TraceError, TraceWriter,
};
