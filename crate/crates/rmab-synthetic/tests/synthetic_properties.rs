//! Distributional and structural properties of the synthetic environment.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rmab_synthetic::{reflect, GainProcess};

proptest! {
    /// reflect maps anything into [0,1] and is idempotent there.
    #[test]
    fn reflect_lands_in_unit_interval(x in -1e6f64..1e6) {
        let r = reflect(x);
        prop_assert!((0.0..=1.0).contains(&r));
        prop_assert!((reflect(r) - r).abs() < 1e-12);
    }

    /// reflect is 2-periodic: reflect(x) = reflect(x + 2k).
    #[test]
    fn reflect_is_two_periodic(x in -100.0f64..100.0, k in -50i32..50) {
        let shifted = x + 2.0 * k as f64;
        prop_assert!((reflect(x) - reflect(shifted)).abs() < 1e-9);
    }

    /// Long paths never escape [0,1], for any sigma.
    #[test]
    fn walk_stays_bounded(sigma in 0.0f64..3.0, seed in 0u64..1000) {
        let mut p = GainProcess::stationary(sigma, ChaCha12Rng::seed_from_u64(seed));
        for _ in 0..2_000 {
            let g = p.step();
            prop_assert!((0.0..=1.0).contains(&g));
        }
    }
}

/// Kolmogorov–Smirnov distance between a sorted sample and Uniform[0,1].
fn ks_uniform(sample: &mut [f64]) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sample.iter().enumerate() {
        let hi = (i + 1) as f64 / n - x;
        let lo = x - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    d
}

/// The marginal of a long reflected walk approaches Uniform[0,1]. The
/// full-length anchor lives in the acceptance suite; this is a smoke check.
#[test]
fn marginal_is_near_uniform() {
    let mut p = GainProcess::new(0.5, 0.05, ChaCha12Rng::seed_from_u64(12));
    let mut sample: Vec<f64> = (0..200_000).map(|_| p.step()).collect();
    let d = ks_uniform(&mut sample);
    assert!(d < 0.03, "KS distance {} too large", d);
}
