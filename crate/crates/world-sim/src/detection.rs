//! Empirical detection model: power-law difficulties and distance weights.

use std::collections::HashMap;

use rand::Rng;

use crate::stream::substream;

/// Exponent of the miss-probability power law: an object with `n` scanned
/// points is missed with probability `n^-MISS_EXPONENT`.
pub const MISS_EXPONENT: f64 = 0.6265;

/// Draws a detection difficulty: the minimum number of points needed to
/// detect the object. `N = ⌈U^(-1/0.6265)⌉` with `U ~ Uniform(0, 1]`, so
/// that `P(N > n) = n^-0.6265` at every integer `n`.
pub fn sample_difficulty<R: Rng>(rng: &mut R) -> u64 {
    // random::<f64>() is [0, 1); flip to (0, 1].
    let u = 1.0 - rng.random::<f64>();
    difficulty_from_uniform(u)
}

pub fn difficulty_from_uniform(u: f64) -> u64 {
    debug_assert!(u > 0.0 && u <= 1.0);
    let n = u.powf(-1.0 / MISS_EXPONENT).ceil();
    if n >= u64::MAX as f64 {
        u64::MAX
    } else {
        (n as u64).max(1)
    }
}

/// Threshold detection: an object is detected iff the merged point count
/// reaches its difficulty.
pub fn detect(points_total: u64, difficulty: u64) -> bool {
    points_total >= difficulty
}

/// Distance-based importance weight: 1 inside 10 m, `2 − log10(d)` out to
/// 100 m, 0 beyond.
pub fn importance_weight(distance_m: f64) -> f64 {
    debug_assert!(distance_m >= 0.0);
    if distance_m <= 10.0 {
        1.0
    } else if distance_m < 100.0 {
        2.0 - distance_m.log10()
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjectKind {
    Car,
    Pedestrian,
}

/// Lifetime-stable difficulties: each object's threshold is drawn once
/// from a stream keyed by its identity, then cached.
#[derive(Debug, Clone)]
pub struct DifficultyTable {
    seed: u64,
    cache: HashMap<(ObjectKind, u64), u64>,
}

impl DifficultyTable {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            cache: HashMap::new(),
        }
    }

    pub fn difficulty(&mut self, kind: ObjectKind, id: u64) -> u64 {
        let seed = self.seed;
        *self.cache.entry((kind, id)).or_insert_with(|| {
            let label = match kind {
                ObjectKind::Car => "difficulty-car",
                ObjectKind::Pedestrian => "difficulty-ped",
            };
            let mut rng = substream(seed, label, id);
            sample_difficulty(&mut rng)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn difficulty_boundary_values() {
        assert_eq!(difficulty_from_uniform(1.0), 1);
        // 0.5^(-1/0.6265) ≈ 3.023 → 4; 0.25^(-1/0.6265) ≈ 9.14 → 10;
        // 0.013^(-1/0.6265) ≈ 1024.4 → 1025.
        assert_eq!(difficulty_from_uniform(0.5), 4);
        assert_eq!(difficulty_from_uniform(0.25), 10);
        assert_eq!(difficulty_from_uniform(0.013), 1025);
    }

    #[test]
    fn survival_matches_power_law_at_1024() {
        // P(N > 1024) = 1024^-0.6265 ≈ 0.0130.
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let n = 200_000;
        let over = (0..n)
            .filter(|_| sample_difficulty(&mut rng) > 1024)
            .count();
        let rate = over as f64 / n as f64;
        let expected = 1024f64.powf(-MISS_EXPONENT);
        assert!(
            (rate - expected).abs() < 3.0 * (expected / n as f64).sqrt() + 1e-4,
            "survival {} vs expected {}",
            rate,
            expected
        );
    }

    #[test]
    fn log_log_regression_recovers_exponent() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let n = 100_000usize;
        let mut sample: Vec<u64> = (0..n).map(|_| sample_difficulty(&mut rng)).collect();
        sample.sort_unstable();
        // Empirical miss rate at point counts 2^0..2^10.
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for e in 0..=10u32 {
            let pts = 2u64.pow(e);
            let missed = sample.partition_point(|&d| d <= pts);
            let miss_rate = (n - missed) as f64 / n as f64;
            if miss_rate > 0.0 {
                xs.push((pts as f64).ln());
                ys.push(miss_rate.ln());
            }
        }
        let m = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        let slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        assert!(
            (slope + MISS_EXPONENT).abs() < 0.05,
            "slope {} not within 0.05 of {}",
            slope,
            -MISS_EXPONENT
        );
    }

    #[test]
    fn detection_threshold_semantics() {
        assert!(detect(5, 5));
        assert!(!detect(4, 5));
        assert!(!detect(0, 1));
    }

    #[test]
    fn weight_branches() {
        assert_eq!(importance_weight(5.0), 1.0);
        assert_eq!(importance_weight(10.0), 1.0);
        let d = 10f64.powf(1.5);
        assert!((importance_weight(d) - 0.5).abs() < 1e-12);
        assert_eq!(importance_weight(100.0), 0.0);
        assert_eq!(importance_weight(250.0), 0.0);
    }

    #[test]
    fn difficulties_are_lifetime_stable() {
        let mut table = DifficultyTable::new(77);
        let first = table.difficulty(ObjectKind::Car, 12);
        for _ in 0..10 {
            assert_eq!(table.difficulty(ObjectKind::Car, 12), first);
        }
        let mut other = DifficultyTable::new(77);
        assert_eq!(other.difficulty(ObjectKind::Car, 12), first);
    }
}
