//! Reflected Gaussian random walk on [0, 1].

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

/// Folds any real into [0, 1]: with `x' ≡ x mod 2`, returns `x'` when
/// `x' < 1` and `2 − x'` otherwise.
pub fn reflect(x: f64) -> f64 {
    let xp = x.rem_euclid(2.0);
    if xp < 1.0 {
        xp
    } else {
        2.0 - xp
    }
}

/// Caps a raw gain at `g_max` and maps it to [0, 1].
pub fn normalize_gain(gain: f64, g_max: f64) -> f64 {
    debug_assert!(gain >= 0.0 && g_max > 0.0);
    (gain / g_max).min(1.0)
}

/// One arm's normalized gain, stepped by i.i.d. Gaussian increments and
/// reflected back into [0, 1].
#[derive(Debug, Clone)]
pub struct GainProcess {
    gain: f64,
    sigma: f64,
    noise: Normal<f64>,
    rng: ChaCha12Rng,
}

impl GainProcess {
    pub fn new(initial: f64, sigma: f64, rng: ChaCha12Rng) -> Self {
        assert!((0.0..=1.0).contains(&initial), "initial gain outside [0,1]");
        assert!(sigma >= 0.0, "sigma must be non-negative");
        Self {
            gain: initial,
            sigma,
            noise: Normal::new(0.0, sigma).expect("valid normal"),
            rng,
        }
    }

    /// Starts from the stationary law: G(0) ~ Uniform[0, 1].
    pub fn stationary(sigma: f64, mut rng: ChaCha12Rng) -> Self {
        let initial = rng.random::<f64>();
        Self::new(initial, sigma, rng)
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Advances one slot and returns the new gain.
    pub fn step(&mut self) -> f64 {
        let x = self.noise.sample(&mut self.rng);
        self.gain = reflect(self.gain + x);
        self.gain
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn reflect_interior_identity() {
        assert_eq!(reflect(0.5), 0.5);
    }

    #[test]
    fn reflect_folds_at_upper_boundary() {
        assert!((reflect(1.3) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn reflect_folds_at_lower_boundary() {
        // −0.2 mod 2 = 1.8 ≥ 1, so 2 − 1.8 = 0.2.
        assert!((reflect(-0.2) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn reflect_near_boundary_step() {
        assert!((reflect(0.999 + 0.05) - 0.951).abs() < 1e-12);
    }

    #[test]
    fn zero_sigma_keeps_gain_fixed() {
        let mut p = GainProcess::new(0.42, 0.0, ChaCha12Rng::seed_from_u64(1));
        for _ in 0..100 {
            assert_eq!(p.step(), 0.42);
        }
    }

    #[test]
    fn gain_stays_in_unit_interval() {
        let mut p = GainProcess::stationary(0.7, ChaCha12Rng::seed_from_u64(9));
        for _ in 0..100_000 {
            let g = p.step();
            assert!((0.0..=1.0).contains(&g), "gain {} escaped [0,1]", g);
        }
    }

    #[test]
    fn normalize_caps_at_one() {
        assert_eq!(normalize_gain(2.0, 4.0), 0.5);
        assert_eq!(normalize_gain(10.0, 4.0), 1.0);
        assert_eq!(normalize_gain(0.0, 4.0), 0.0);
    }
}
