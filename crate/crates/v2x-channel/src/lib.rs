//! V2V sidelink channel model for urban cooperative perception.
//!
//! Links are classified LOS / NLOSv / NLOS from 2D geometry; pathloss uses
//! the urban sidelink formulas with log-normal shadowing and per-vehicle
//! blockage loss; per-CoV bandwidth availability follows a three-state
//! Markov chain; the Shannon rate drives the sensor-data down-sampling
//! ratio.

mod pathloss;
mod rate;
mod resource;

pub use pathloss::{pathloss_db, sample_blockage_loss_db, sample_pathloss_db, sample_shadowing_db};
pub use rate::{downsample_ratio, shannon_rate_bps};
pub use resource::{ResourceRatioChain, RESOURCE_RATIOS};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ChannelError {
    #[error("link distance must be positive, got {0} m")]
    NonPositiveDistance(f64),
}

/// Link state between one CoV and the ego vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LinkClass {
    Los,
    /// Direct path blocked by vehicles only; behaves like LOS with extra
    /// per-vehicle attenuation.
    NLosV,
    /// Direct path blocked by a building.
    NLos,
}

impl LinkClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            LinkClass::Los => "LOS",
            LinkClass::NLosV => "NLOSv",
            LinkClass::NLos => "NLOS",
        }
    }
}

/// 2D geometry of one ego–CoV link at one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub distance_m: f64,
    pub fc_ghz: f64,
    /// Vehicles whose footprint intersects the direct segment.
    pub blockers: usize,
    /// Whether any building intersects the direct segment.
    pub building_blocked: bool,
}

impl LinkGeometry {
    pub fn new(distance_m: f64, blockers: usize, building_blocked: bool) -> Self {
        Self {
            distance_m,
            fc_ghz: 5.9,
            blockers,
            building_blocked,
        }
    }
}

/// Buildings dominate vehicles: NLOS if a building blocks, else NLOSv if
/// any vehicle blocks, else LOS.
pub fn classify_link(geometry: &LinkGeometry) -> LinkClass {
    if geometry.building_blocked {
        LinkClass::NLos
    } else if geometry.blockers >= 1 {
        LinkClass::NLosV
    } else {
        LinkClass::Los
    }
}

/// Radio parameters of the sidelink.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    pub tx_power_dbm: f64,
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub bandwidth_hz: f64,
    pub shadow_std_los_db: f64,
    pub shadow_std_nlos_db: f64,
    /// Per-vehicle blockage loss is max{0, Normal(mean, std²)} dB.
    pub blockage_mean_db: f64,
    pub blockage_std_db: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            tx_power_dbm: 23.0,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 9.0,
            bandwidth_hz: 30e6,
            shadow_std_los_db: 3.0,
            shadow_std_nlos_db: 4.0,
            blockage_mean_db: 5.0,
            blockage_std_db: 2.0,
        }
    }
}

impl RadioParams {
    pub fn shadow_std_db(&self, class: LinkClass) -> f64 {
        match class {
            LinkClass::Los | LinkClass::NLosV => self.shadow_std_los_db,
            LinkClass::NLos => self.shadow_std_nlos_db,
        }
    }
}
