//! Experiment configuration: a flat key = value text format plus CLI
//! overrides. Every simulation parameter has a key; defaults follow the
//! standard parameter table.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: unknown config key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: bad value for {key}: {msg}")]
    BadValue {
        line: usize,
        key: String,
        msg: String,
    },
    #[error("line {line}: expected `key = value`")]
    Malformed { line: usize },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    Synth,
    World,
    Trace,
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EnvKind::Synth => "synth",
            EnvKind::World => "world",
            EnvKind::Trace => "trace",
        };
        f.write_str(s)
    }
}

impl FromStr for EnvKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "synth" | "synthetic" => Ok(EnvKind::Synth),
            "world" => Ok(EnvKind::World),
            "trace" => Ok(EnvKind::Trace),
            other => Err(format!("unknown env {other:?}")),
        }
    }
}

/// Full experiment description. One instance drives one seeded run; sweeps
/// clone it per parameter point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub env: EnvKind,
    pub policy: String,
    pub slots: u64,
    pub delta_t_s: f64,
    pub candidate_cap: usize,

    // Policy parameters.
    pub beta: f64,
    pub epoch_len: u64,
    pub window_len: u64,

    // Synthetic environment.
    pub sigma: f64,
    pub arrival_rate: f64,
    pub mean_lifetime: f64,
    pub initial_arms: usize,
    pub g_max: f64,

    // World environment.
    pub grid: usize,
    pub block_side_m: f64,
    pub n_cars: usize,
    pub cov_ratio: f64,
    pub speed_limit_kmh: f64,
    pub turn_prob_left: f64,
    pub turn_prob_right: f64,
    pub ped_rate_per_s: f64,
    pub ped_speed_mps: f64,
    pub light_green_s: f64,
    pub candidate_range_m: f64,
    pub trace_path: Option<String>,
    pub buildings_path: Option<String>,

    // LiDAR.
    pub lidar_channels: u32,
    pub lidar_vfov_deg: f64,
    pub lidar_max_range_m: f64,
    pub lidar_azimuth_res_deg: f64,
    pub lidar_mount_height_m: f64,
    pub lidar_data_rate_64ch_mbps: f64,

    // Radio.
    pub fc_ghz: f64,
    pub tx_power_dbm: f64,
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub bandwidth_mhz: f64,
    pub shadow_std_los_db: f64,
    pub shadow_std_nlos_db: f64,
    pub blockage_mean_db: f64,
    pub blockage_std_db: f64,
    pub eta_dwell_s: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            env: EnvKind::Synth,
            policy: "mass".into(),
            slots: 10_000,
            delta_t_s: 0.1,
            candidate_cap: 8,

            beta: 0.6,
            epoch_len: 20,
            window_len: 20,

            sigma: 0.1,
            arrival_rate: 0.03,
            mean_lifetime: 300.0,
            initial_arms: 2,
            g_max: 1.0,

            grid: 4,
            block_side_m: 200.0,
            n_cars: 200,
            cov_ratio: 0.3,
            speed_limit_kmh: 50.0,
            turn_prob_left: 0.25,
            turn_prob_right: 0.25,
            ped_rate_per_s: 0.2,
            ped_speed_mps: 1.2,
            light_green_s: 30.0,
            candidate_range_m: 100.0,
            trace_path: None,
            buildings_path: None,

            lidar_channels: 64,
            lidar_vfov_deg: 26.8,
            lidar_max_range_m: 100.0,
            lidar_azimuth_res_deg: 0.09,
            lidar_mount_height_m: 1.9,
            lidar_data_rate_64ch_mbps: 33.27,

            fc_ghz: 5.9,
            tx_power_dbm: 23.0,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 9.0,
            bandwidth_mhz: 30.0,
            shadow_std_los_db: 3.0,
            shadow_std_nlos_db: 4.0,
            blockage_mean_db: 5.0,
            blockage_std_db: 2.0,
            eta_dwell_s: 10.0,
        }
    }
}

macro_rules! set_parsed {
    ($self:ident, $field:ident, $value:expr, $line:expr, $key:expr) => {
        $self.$field = $value.parse().map_err(|e| ConfigError::BadValue {
            line: $line,
            key: $key.to_string(),
            msg: format!("{e}"),
        })?
    };
}

impl ExperimentConfig {
    /// Applies one `key = value` assignment. Unknown keys are errors.
    pub fn apply(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "env" => set_parsed!(self, env, v, line, key),
            "policy" => self.policy = v.to_string(),
            "slots" => set_parsed!(self, slots, v, line, key),
            "delta_t_s" => set_parsed!(self, delta_t_s, v, line, key),
            "candidate_cap" => set_parsed!(self, candidate_cap, v, line, key),
            "beta" => set_parsed!(self, beta, v, line, key),
            "epoch_len" => set_parsed!(self, epoch_len, v, line, key),
            "window_len" => set_parsed!(self, window_len, v, line, key),
            "sigma" => set_parsed!(self, sigma, v, line, key),
            "arrival_rate" => set_parsed!(self, arrival_rate, v, line, key),
            "mean_lifetime" => set_parsed!(self, mean_lifetime, v, line, key),
            "initial_arms" => set_parsed!(self, initial_arms, v, line, key),
            "g_max" => set_parsed!(self, g_max, v, line, key),
            "grid" => set_parsed!(self, grid, v, line, key),
            "block_side_m" => set_parsed!(self, block_side_m, v, line, key),
            "n_cars" => set_parsed!(self, n_cars, v, line, key),
            "cov_ratio" => set_parsed!(self, cov_ratio, v, line, key),
            "speed_limit_kmh" => set_parsed!(self, speed_limit_kmh, v, line, key),
            "turn_prob_left" => set_parsed!(self, turn_prob_left, v, line, key),
            "turn_prob_right" => set_parsed!(self, turn_prob_right, v, line, key),
            "ped_rate_per_s" => set_parsed!(self, ped_rate_per_s, v, line, key),
            "ped_speed_mps" => set_parsed!(self, ped_speed_mps, v, line, key),
            "light_green_s" => set_parsed!(self, light_green_s, v, line, key),
            "candidate_range_m" => set_parsed!(self, candidate_range_m, v, line, key),
            "trace_path" => self.trace_path = Some(v.to_string()),
            "buildings_path" => self.buildings_path = Some(v.to_string()),
            "lidar_channels" => set_parsed!(self, lidar_channels, v, line, key),
            "lidar_vfov_deg" => set_parsed!(self, lidar_vfov_deg, v, line, key),
            "lidar_max_range_m" => set_parsed!(self, lidar_max_range_m, v, line, key),
            "lidar_azimuth_res_deg" => set_parsed!(self, lidar_azimuth_res_deg, v, line, key),
            "lidar_mount_height_m" => set_parsed!(self, lidar_mount_height_m, v, line, key),
            "lidar_data_rate_64ch_mbps" => {
                set_parsed!(self, lidar_data_rate_64ch_mbps, v, line, key)
            }
            "fc_ghz" => set_parsed!(self, fc_ghz, v, line, key),
            "tx_power_dbm" => set_parsed!(self, tx_power_dbm, v, line, key),
            "noise_psd_dbm_hz" => set_parsed!(self, noise_psd_dbm_hz, v, line, key),
            "noise_figure_db" => set_parsed!(self, noise_figure_db, v, line, key),
            "bandwidth_mhz" => set_parsed!(self, bandwidth_mhz, v, line, key),
            "shadow_std_los_db" => set_parsed!(self, shadow_std_los_db, v, line, key),
            "shadow_std_nlos_db" => set_parsed!(self, shadow_std_nlos_db, v, line, key),
            "blockage_mean_db" => set_parsed!(self, blockage_mean_db, v, line, key),
            "blockage_std_db" => set_parsed!(self, blockage_std_db, v, line, key),
            "eta_dwell_s" => set_parsed!(self, eta_dwell_s, v, line, key),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    /// Parses the flat `key = value` format (# starts a comment) on top of
    /// the defaults.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        cfg.merge(text)?;
        Ok(cfg)
    }

    /// Applies a config document on top of the current values.
    pub fn merge(&mut self, text: &str) -> Result<(), ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let stripped = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let stripped = stripped.trim();
            if stripped.is_empty() {
                continue;
            }
            let (key, value) = stripped
                .split_once('=')
                .ok_or(ConfigError::Malformed { line })?;
            self.apply(key.trim(), value, line)?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.slots == 0 {
            return Err(ConfigError::Invalid("slots must be ≥ 1".into()));
        }
        if self.env == EnvKind::Trace && self.trace_path.is_none() {
            return Err(ConfigError::Invalid("trace env needs trace_path".into()));
        }
        if !(0.0..=1.0).contains(&self.cov_ratio) {
            return Err(ConfigError::Invalid("cov_ratio outside [0,1]".into()));
        }
        if self.sigma <= 0.0 || self.sigma >= 1.0 {
            return Err(ConfigError::Invalid("sigma must lie in (0,1)".into()));
        }
        Ok(())
    }

    pub fn speed_limit_mps(&self) -> f64 {
        self.speed_limit_kmh / 3.6
    }
}
