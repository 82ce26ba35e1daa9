//! Cross-policy behavioural properties.

use policy_core::{
    build_policy, CandidateView, CovId, MassPolicy, Policy, PolicyName, PolicyParams,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn views(ids: &[u64], t: u64) -> Vec<CandidateView> {
    ids.iter()
        .map(|&i| CandidateView::new(i, (i % 7) as f64 + 1.0, t))
        .collect()
}

proptest! {
    /// Whatever the history, `select` returns a member of the candidate set.
    #[test]
    fn select_returns_a_candidate(
        seed in 0u64..1_000,
        slots in prop::collection::vec(prop::collection::btree_set(0u64..12, 1..6), 1..60),
    ) {
        let params = PolicyParams { beta: 0.5, epoch_len: 4, window_len: 6 };
        for name in PolicyName::ALL {
            let mut policy = build_policy(name, &params);
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            for (i, ids) in slots.iter().enumerate() {
                let t = (i + 1) as u64;
                let ids: Vec<u64> = ids.iter().copied().collect();
                let cands = views(&ids, t);
                let picked = policy.select(&cands, t).unwrap();
                prop_assert!(
                    ids.contains(&picked.0),
                    "{} picked {} outside {:?} at t={}",
                    name, picked, ids, t
                );
                policy.observe(picked, rng.random::<f64>(), t);
            }
        }
    }

    /// Scaling every last-seen gain and beta by the same positive constant
    /// leaves the MASS argmax unchanged.
    #[test]
    fn mass_argmax_scale_invariant(
        scale in 0.01f64..100.0,
        gains in prop::collection::vec(0.0f64..1.0, 2..6),
        taus in prop::collection::vec(1u64..20, 2..6),
    ) {
        let n = gains.len().min(taus.len());
        let t = 21u64;
        let mut base = MassPolicy::new(0.6);
        let mut scaled = MassPolicy::new(0.6 * scale);
        for i in 0..n {
            base.observe(CovId(i as u64), gains[i], taus[i]);
            scaled.observe(CovId(i as u64), gains[i] * scale, taus[i]);
        }
        let ids: Vec<u64> = (0..n as u64).collect();
        let a = base.select(&views(&ids, t), t).unwrap();
        let b = scaled.select(&views(&ids, t), t).unwrap();
        prop_assert_eq!(a, b);
    }
}

/// A newly arrived candidate is scheduled at its first appearance slot.
#[test]
fn mass_explores_new_arrival_at_first_appearance() {
    let mut policy = MassPolicy::new(0.3);
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    for t in 1..=50 {
        let ids: Vec<u64> = if t < 25 { vec![0, 1] } else { vec![0, 1, 9] };
        let picked = policy.select(&views(&ids, t), t).unwrap();
        if t == 25 {
            assert_eq!(picked, CovId(9));
        }
        policy.observe(picked, rng.random::<f64>(), t);
    }
}

/// Over long two-arm runs with bounded gains, no arm stays idle longer
/// than (1/beta * (1 + max gain))^2 + 2 slots.
#[test]
fn mass_idle_time_is_bounded() {
    for beta in [0.1f64, 0.3, 1.0] {
        let mut policy = MassPolicy::new(beta);
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let mut last = [0u64, 0];
        let mut max_idle = 0u64;
        let t_max = 100_000u64;
        for t in 1..=t_max {
            let picked = policy.select(&views(&[0, 1], t), t).unwrap();
            let idx = picked.0 as usize;
            if last[idx] > 0 {
                max_idle = max_idle.max(t - last[idx]);
            }
            last[idx] = t;
            policy.observe(picked, rng.random::<f64>(), t);
        }
        let bound = (2.0 / beta).powi(2) + 2.0;
        assert!(
            (max_idle as f64) <= bound,
            "beta={}: max idle {} exceeds bound {}",
            beta,
            max_idle,
            bound
        );
    }
}

/// `observe` never perturbs other CoVs' entries.
#[test]
fn observe_is_isolated_per_cov() {
    let mut policy = MassPolicy::new(0.6);
    policy.observe(CovId(1), 0.25, 3);
    policy.observe(CovId(2), 0.5, 4);
    let before: Vec<_> = policy.entries().collect();
    policy.observe(CovId(3), 0.9, 5);
    let after: Vec<_> = policy.entries().filter(|(id, _)| id.0 != 3).collect();
    assert_eq!(before, after);
}
