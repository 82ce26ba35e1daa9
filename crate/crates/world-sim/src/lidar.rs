//! 2D LiDAR scanning with occlusion.
//!
//! Azimuth rays sit on a half-offset grid, `θ_k = (k + 0.5)·res` over
//! [0°, 360°); elevation channels sit at the centers of `channels` equal
//! bins spanning the vertical field of view. The point count on a target
//! is `n_azimuth · n_vertical`, where `n_azimuth` counts azimuth rays whose
//! nearest obstruction is the target within range, and `n_vertical` counts
//! channels whose ray height at the target's distance falls on the object.

use std::collections::BTreeMap;

use crate::frame::WorldFrame;
use crate::geom::{ray_circle_entry, Footprint, Rect, Vec2};

/// Standing objects (cars' detectable height and pedestrians) per the
/// detection model.
pub const OBJECT_HEIGHT_M: f64 = 1.7;
/// Pedestrians are scanned as discs of this radius; they never occlude.
pub const PEDESTRIAN_RADIUS_M: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LidarSpec {
    pub channels: u32,
    pub vfov_deg: f64,
    pub max_range_m: f64,
    pub azimuth_res_deg: f64,
    pub mount_height_m: f64,
    /// Raw data rate of the 64-channel configuration; frames scale
    /// linearly with the channel count.
    pub data_rate_64ch_bps: f64,
}

impl Default for LidarSpec {
    fn default() -> Self {
        Self {
            channels: 64,
            vfov_deg: 26.8,
            max_range_m: 100.0,
            azimuth_res_deg: 0.09,
            mount_height_m: 1.9,
            data_rate_64ch_bps: 33.27e6,
        }
    }
}

impl LidarSpec {
    pub fn n_azimuth_rays(&self) -> usize {
        (360.0 / self.azimuth_res_deg).round() as usize
    }

    pub fn azimuth_angle_rad(&self, k: usize) -> f64 {
        (k as f64 + 0.5) * self.azimuth_res_deg.to_radians()
    }

    /// Bits in one full sensor frame captured during `delta_t_s`.
    pub fn frame_bits(&self, delta_t_s: f64) -> f64 {
        self.data_rate_64ch_bps * delta_t_s * self.channels as f64 / 64.0
    }

    /// Number of elevation channels whose ray height at `distance_m` lands
    /// on an object of `object_height_m` standing on the ground.
    pub fn vertical_hits(&self, distance_m: f64, object_height_m: f64) -> u32 {
        let spacing = self.vfov_deg / self.channels as f64;
        let mut hits = 0;
        for j in 0..self.channels {
            let el_deg = -self.vfov_deg / 2.0 + (j as f64 + 0.5) * spacing;
            let h = self.mount_height_m + distance_m * el_deg.to_radians().tan();
            if (0.0..=object_height_m).contains(&h) {
                hits += 1;
            }
        }
        hits
    }
}

/// Opaque surface a ray can terminate on.
#[derive(Debug, Clone, Copy)]
pub enum Surface {
    Vehicle(Footprint),
    Building(Rect),
}

impl Surface {
    fn ray_entry(&self, origin: Vec2, dir: Vec2) -> Option<f64> {
        match self {
            Surface::Vehicle(f) => f.ray_entry(origin, dir),
            Surface::Building(r) => r.ray_entry(origin, dir),
        }
    }

    fn corners(&self) -> [Vec2; 4] {
        match self {
            Surface::Vehicle(f) => f.corners(),
            Surface::Building(r) => r.corners(),
        }
    }

    fn contains(&self, p: Vec2) -> bool {
        match self {
            Surface::Vehicle(f) => f.contains(p),
            Surface::Building(r) => r.contains(p),
        }
    }
}

const NO_HIT: u32 = u32::MAX;

/// Polar depth buffer of one sensor in one frame: for every azimuth ray,
/// the nearest opaque surface and its distance. Built once per sensor and
/// queried per target.
#[derive(Debug, Clone)]
pub struct SensorSweep {
    origin: Vec2,
    res_rad: f64,
    n_rays: usize,
    max_range: f64,
    nearest: Vec<f64>,
    winner: Vec<u32>,
}

impl SensorSweep {
    pub fn new(origin: Vec2, spec: &LidarSpec, opaque: &[Surface]) -> Self {
        let n_rays = spec.n_azimuth_rays();
        let res_rad = spec.azimuth_res_deg.to_radians();
        let mut sweep = Self {
            origin,
            res_rad,
            n_rays,
            max_range: spec.max_range_m,
            nearest: vec![f64::INFINITY; n_rays],
            winner: vec![NO_HIT; n_rays],
        };
        for (tag, surface) in opaque.iter().enumerate() {
            sweep.rasterize(tag as u32, surface);
        }
        sweep
    }

    fn ray_dir(&self, k: usize) -> Vec2 {
        Vec2::from_angle((k as f64 + 0.5) * self.res_rad)
    }

    /// Azimuth ray indices covering the angular interval of the surface,
    /// padded by one ray spacing so corner-grazing rays are never skipped.
    fn candidate_rays(&self, surface: &Surface) -> RayRange {
        if surface.contains(self.origin) {
            return RayRange::full(self.n_rays);
        }
        let corners = surface.corners();
        let reference = (corners[0] - self.origin).angle();
        let mut lo = 0.0f64;
        let mut hi = 0.0f64;
        for c in &corners[1..] {
            let mut delta = (*c - self.origin).angle() - reference;
            while delta > std::f64::consts::PI {
                delta -= 2.0 * std::f64::consts::PI;
            }
            while delta < -std::f64::consts::PI {
                delta += 2.0 * std::f64::consts::PI;
            }
            lo = lo.min(delta);
            hi = hi.max(delta);
        }
        RayRange::span(
            reference + lo - self.res_rad,
            reference + hi + self.res_rad,
            self.res_rad,
            self.n_rays,
        )
    }

    fn rasterize(&mut self, tag: u32, surface: &Surface) {
        for k in self.candidate_rays(surface).iter() {
            let dir = self.ray_dir(k);
            if let Some(t) = surface.ray_entry(self.origin, dir) {
                if t < self.nearest[k] {
                    self.nearest[k] = t;
                    self.winner[k] = tag;
                }
            }
        }
    }

    /// Number of azimuth rays whose nearest hit is the tagged surface,
    /// within range.
    pub fn azimuth_hits(&self, tag: u32, surface: &Surface) -> u32 {
        let mut hits = 0;
        for k in self.candidate_rays(surface).iter() {
            if self.winner[k] == tag && self.nearest[k] <= self.max_range {
                hits += 1;
            }
        }
        hits
    }

    /// Azimuth hits on a transparent disc (pedestrian): the disc must be
    /// strictly nearer than every opaque surface on the ray.
    pub fn azimuth_hits_on_disc(&self, center: Vec2, radius: f64) -> u32 {
        let d = self.origin.distance(center);
        if d <= radius {
            return 0;
        }
        let half = (radius / d).asin();
        let mid = (center - self.origin).angle();
        let range = RayRange::span(
            mid - half - self.res_rad,
            mid + half + self.res_rad,
            self.res_rad,
            self.n_rays,
        );
        let mut hits = 0;
        for k in range.iter() {
            let dir = self.ray_dir(k);
            if let Some(t) = ray_circle_entry(self.origin, dir, center, radius) {
                if t <= self.max_range && t < self.nearest[k] {
                    hits += 1;
                }
            }
        }
        hits
    }
}

/// A contiguous (possibly wrapping) range of azimuth ray indices.
struct RayRange {
    start: usize,
    count: usize,
    n_rays: usize,
}

impl RayRange {
    fn full(n_rays: usize) -> Self {
        Self {
            start: 0,
            count: n_rays,
            n_rays,
        }
    }

    fn span(lo_rad: f64, hi_rad: f64, res_rad: f64, n_rays: usize) -> Self {
        if hi_rad - lo_rad >= 2.0 * std::f64::consts::PI {
            return Self::full(n_rays);
        }
        // Rays sit at (k + 0.5)·res: first index with angle ≥ lo.
        let k_min = ((lo_rad / res_rad) - 0.5).ceil() as i64;
        let k_max = ((hi_rad / res_rad) - 0.5).floor() as i64;
        if k_max < k_min {
            return Self {
                start: 0,
                count: 0,
                n_rays,
            };
        }
        let count = ((k_max - k_min + 1) as usize).min(n_rays);
        let start = k_min.rem_euclid(n_rays as i64) as usize;
        Self {
            start,
            count,
            n_rays,
        }
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.count).map(move |i| (self.start + i) % self.n_rays)
    }
}

/// Tagged geometry of one frame from one sensor's point of view.
pub struct SweepContext {
    sweep: SensorSweep,
    surfaces: Vec<Surface>,
    vehicle_tags: BTreeMap<u64, u32>,
    sensor_pos: Vec2,
    spec: LidarSpec,
}

impl SweepContext {
    /// Builds the depth buffer for the sensor mounted on `sensor_vehicle`.
    /// Opaque surfaces are every other vehicle footprint plus all
    /// buildings; pedestrians are transparent.
    pub fn new(frame: &WorldFrame, sensor_vehicle: u64, spec: &LidarSpec) -> Self {
        let sensor_pos = frame
            .vehicles
            .iter()
            .find(|v| v.id == sensor_vehicle)
            .expect("sensor vehicle in frame")
            .center;
        let mut surfaces = Vec::with_capacity(frame.vehicles.len() + frame.buildings.len());
        let mut vehicle_tags = BTreeMap::new();
        for v in &frame.vehicles {
            if v.id == sensor_vehicle {
                continue;
            }
            vehicle_tags.insert(v.id, surfaces.len() as u32);
            surfaces.push(Surface::Vehicle(v.footprint()));
        }
        for b in frame.buildings.iter() {
            surfaces.push(Surface::Building(*b));
        }
        let sweep = SensorSweep::new(sensor_pos, spec, &surfaces);
        Self {
            sweep,
            surfaces,
            vehicle_tags,
            sensor_pos,
            spec: *spec,
        }
    }

    pub fn sensor_pos(&self) -> Vec2 {
        self.sensor_pos
    }

    /// Point count on a vehicle target: azimuth visibility times the
    /// elevation hits at the target's center distance. Targets beyond the
    /// sensor range score zero.
    pub fn vehicle_points(&self, target_id: u64, target_center: Vec2) -> u64 {
        let d = self.sensor_pos.distance(target_center);
        if d > self.spec.max_range_m {
            return 0;
        }
        let Some(&tag) = self.vehicle_tags.get(&target_id) else {
            return 0;
        };
        let az = self.sweep.azimuth_hits(tag, &self.surfaces[tag as usize]);
        let vert = self.spec.vertical_hits(d, OBJECT_HEIGHT_M);
        az as u64 * vert as u64
    }

    /// Point count on a pedestrian target.
    pub fn pedestrian_points(&self, pos: Vec2) -> u64 {
        let d = self.sensor_pos.distance(pos);
        if d > self.spec.max_range_m {
            return 0;
        }
        let az = self.sweep.azimuth_hits_on_disc(pos, PEDESTRIAN_RADIUS_M);
        let vert = self.spec.vertical_hits(d, OBJECT_HEIGHT_M);
        az as u64 * vert as u64
    }
}

/// One-off point count of a single target; builds a fresh sweep.
pub fn raycast_points(
    frame: &WorldFrame,
    sensor_vehicle: u64,
    spec: &LidarSpec,
    target: Target,
) -> u64 {
    let ctx = SweepContext::new(frame, sensor_vehicle, spec);
    match target {
        Target::Vehicle(id) => {
            let center = frame
                .vehicles
                .iter()
                .find(|v| v.id == id)
                .expect("target vehicle in frame")
                .center;
            ctx.vehicle_points(id, center)
        }
        Target::Pedestrian(pos) => ctx.pedestrian_points(pos),
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Target {
    Vehicle(u64),
    Pedestrian(Vec2),
}

pub mod reference {
    //! Exhaustive ray enumerator used to cross-check [`SensorSweep`]:
    //! every azimuth ray is tested against every surface edge with an
    //! unrelated segment-intersection routine, with no angular culling.

    use super::{Surface, Target, NO_HIT};
    use crate::frame::WorldFrame;
    use crate::geom::{ray_segment_hit, Vec2};
    use crate::lidar::{LidarSpec, OBJECT_HEIGHT_M, PEDESTRIAN_RADIUS_M};

    fn edge_hit(origin: Vec2, dir: Vec2, surface: &Surface) -> Option<f64> {
        let corners = surface.corners();
        let mut best: Option<f64> = None;
        for i in 0..4 {
            let a = corners[i];
            let b = corners[(i + 1) % 4];
            if let Some(t) = ray_segment_hit(origin, dir, a, b - a) {
                best = Some(match best {
                    Some(cur) if cur <= t => cur,
                    _ => t,
                });
            }
        }
        best
    }

    fn disc_hit(origin: Vec2, dir: Vec2, center: Vec2, radius: f64) -> Option<f64> {
        // Solve |origin + t·dir − center|² = radius² by hand.
        let fx = origin.x - center.x;
        let fy = origin.y - center.y;
        let a = dir.x * dir.x + dir.y * dir.y;
        let b = 2.0 * (fx * dir.x + fy * dir.y);
        let c = fx * fx + fy * fy - radius * radius;
        if c <= 0.0 {
            return None;
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return None;
        }
        let t = (-b - disc.sqrt()) / (2.0 * a);
        if t >= 0.0 {
            Some(t)
        } else {
            None
        }
    }

    /// Brute-force twin of [`super::raycast_points`].
    pub fn raycast_points_brute(
        frame: &WorldFrame,
        sensor_vehicle: u64,
        spec: &LidarSpec,
        target: Target,
    ) -> u64 {
        let sensor = frame
            .vehicles
            .iter()
            .find(|v| v.id == sensor_vehicle)
            .expect("sensor vehicle in frame")
            .center;

        // Same surface ordering as the fast path: vehicles, then buildings.
        let mut surfaces = Vec::new();
        let mut target_tag = NO_HIT;
        for v in &frame.vehicles {
            if v.id == sensor_vehicle {
                continue;
            }
            if let Target::Vehicle(id) = target {
                if v.id == id {
                    target_tag = surfaces.len() as u32;
                }
            }
            surfaces.push(Surface::Vehicle(v.footprint()));
        }
        for b in frame.buildings.iter() {
            surfaces.push(Surface::Building(*b));
        }

        let target_center = match target {
            Target::Vehicle(id) => {
                frame
                    .vehicles
                    .iter()
                    .find(|v| v.id == id)
                    .expect("target vehicle in frame")
                    .center
            }
            Target::Pedestrian(pos) => pos,
        };
        let center_dist = sensor.distance(target_center);
        if center_dist > spec.max_range_m {
            return 0;
        }

        let n_rays = (360.0 / spec.azimuth_res_deg).round() as usize;
        let mut azimuth_hits = 0u64;
        for k in 0..n_rays {
            let theta = (k as f64 + 0.5) * spec.azimuth_res_deg.to_radians();
            let dir = Vec2::new(theta.cos(), theta.sin());
            let mut nearest = f64::INFINITY;
            let mut winner = NO_HIT;
            for (tag, surface) in surfaces.iter().enumerate() {
                if let Some(t) = edge_hit(sensor, dir, surface) {
                    if t < nearest {
                        nearest = t;
                        winner = tag as u32;
                    }
                }
            }
            let hit = match target {
                Target::Vehicle(_) => winner == target_tag && nearest <= spec.max_range_m,
                Target::Pedestrian(pos) => match disc_hit(sensor, dir, pos, PEDESTRIAN_RADIUS_M) {
                    Some(t) => t <= spec.max_range_m && t < nearest,
                    None => false,
                },
            };
            if hit {
                azimuth_hits += 1;
            }
        }

        let mut vertical_hits = 0u64;
        let spacing = spec.vfov_deg / spec.channels as f64;
        for j in 0..spec.channels {
            let el = (-spec.vfov_deg / 2.0 + (j as f64 + 0.5) * spacing).to_radians();
            let h = spec.mount_height_m + center_dist * el.tan();
            if (0.0..=OBJECT_HEIGHT_M).contains(&h) {
                vertical_hits += 1;
            }
        }
        azimuth_hits * vertical_hits
    }
}
