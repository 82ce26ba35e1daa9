//! 2D primitives for the bird's-eye-view world.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn length(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).length()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Counter-clockwise rotation by `theta` radians.
    pub fn rotate(self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

/// Axis-aligned rectangle (buildings).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self {
            min: Vec2::new(x0.min(x1), y0.min(y1)),
            max: Vec2::new(x0.max(x1), y0.max(y1)),
        }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn corners(&self) -> [Vec2; 4] {
        [
            self.min,
            Vec2::new(self.max.x, self.min.y),
            self.max,
            Vec2::new(self.min.x, self.max.y),
        ]
    }

    /// Entry distance of the ray `origin + t·dir` (unit `dir`), if the ray
    /// hits from outside. A ray starting inside reports no surface hit.
    pub fn ray_entry(&self, origin: Vec2, dir: Vec2) -> Option<f64> {
        slab_ray_entry(origin, dir, self.min, self.max)
    }

    /// Whether the open segment a–b crosses the rectangle.
    pub fn intersects_segment(&self, a: Vec2, b: Vec2) -> bool {
        slab_segment_overlap(a, b, self.min, self.max)
    }
}

/// Oriented rectangle footprint (vehicles).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    pub center: Vec2,
    pub heading: f64,
    pub half_len: f64,
    pub half_wid: f64,
}

impl Footprint {
    pub fn new(center: Vec2, heading: f64, length: f64, width: f64) -> Self {
        Self {
            center,
            heading,
            half_len: length / 2.0,
            half_wid: width / 2.0,
        }
    }

    fn to_local(&self, p: Vec2) -> Vec2 {
        (p - self.center).rotate(-self.heading)
    }

    pub fn corners(&self) -> [Vec2; 4] {
        let corners_local = [
            Vec2::new(self.half_len, self.half_wid),
            Vec2::new(-self.half_len, self.half_wid),
            Vec2::new(-self.half_len, -self.half_wid),
            Vec2::new(self.half_len, -self.half_wid),
        ];
        corners_local.map(|c| c.rotate(self.heading) + self.center)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let l = self.to_local(p);
        l.x.abs() <= self.half_len && l.y.abs() <= self.half_wid
    }

    pub fn ray_entry(&self, origin: Vec2, dir: Vec2) -> Option<f64> {
        let o = self.to_local(origin);
        let d = dir.rotate(-self.heading);
        slab_ray_entry(
            o,
            d,
            Vec2::new(-self.half_len, -self.half_wid),
            Vec2::new(self.half_len, self.half_wid),
        )
    }

    pub fn intersects_segment(&self, a: Vec2, b: Vec2) -> bool {
        slab_segment_overlap(
            self.to_local(a),
            self.to_local(b),
            Vec2::new(-self.half_len, -self.half_wid),
            Vec2::new(self.half_len, self.half_wid),
        )
    }
}

fn slab_ray_entry(origin: Vec2, dir: Vec2, min: Vec2, max: Vec2) -> Option<f64> {
    let mut t_enter = f64::NEG_INFINITY;
    let mut t_exit = f64::INFINITY;
    for ((o, d), (lo, hi)) in [
        ((origin.x, dir.x), (min.x, max.x)),
        ((origin.y, dir.y), (min.y, max.y)),
    ] {
        if d.abs() < 1e-300 {
            if o < lo || o > hi {
                return None;
            }
        } else {
            let ta = (lo - o) / d;
            let tb = (hi - o) / d;
            let (a, b) = if ta < tb { (ta, tb) } else { (tb, ta) };
            t_enter = t_enter.max(a);
            t_exit = t_exit.min(b);
            if t_enter > t_exit {
                return None;
            }
        }
    }
    if t_enter >= 0.0 && t_enter <= t_exit {
        Some(t_enter)
    } else {
        None
    }
}

fn slab_segment_overlap(a: Vec2, b: Vec2, min: Vec2, max: Vec2) -> bool {
    let dir = b - a;
    let mut t_enter = 0.0f64;
    let mut t_exit = 1.0f64;
    for ((o, d), (lo, hi)) in [
        ((a.x, dir.x), (min.x, max.x)),
        ((a.y, dir.y), (min.y, max.y)),
    ] {
        if d.abs() < 1e-300 {
            if o < lo || o > hi {
                return false;
            }
        } else {
            let ta = (lo - o) / d;
            let tb = (hi - o) / d;
            let (p, q) = if ta < tb { (ta, tb) } else { (tb, ta) };
            t_enter = t_enter.max(p);
            t_exit = t_exit.min(q);
            if t_enter > t_exit {
                return false;
            }
        }
    }
    true
}

/// Parameter `t ≥ 0` of the first intersection of ray `p + t·r` with the
/// segment `q → q + s`, if any. Parallel overlaps report no hit.
pub fn ray_segment_hit(p: Vec2, r: Vec2, q: Vec2, s: Vec2) -> Option<f64> {
    let rxs = r.cross(s);
    if rxs.abs() < 1e-15 {
        return None;
    }
    let qp = q - p;
    let t = qp.cross(s) / rxs;
    let u = qp.cross(r) / rxs;
    if t >= 0.0 && (0.0..=1.0).contains(&u) {
        Some(t)
    } else {
        None
    }
}

/// Entry distance of ray `o + t·d` (unit `d`) into the circle at `c` with
/// radius `r`, if the ray starts outside and hits it.
pub fn ray_circle_entry(o: Vec2, d: Vec2, c: Vec2, r: f64) -> Option<f64> {
    let oc = o - c;
    let b = oc.dot(d);
    let q = oc.dot(oc) - r * r;
    if q <= 0.0 {
        return None; // origin inside or on the circle
    }
    let disc = b * b - q;
    if disc < 0.0 {
        return None;
    }
    let t = -b - disc.sqrt();
    if t >= 0.0 {
        Some(t)
    } else {
        None
    }
}
