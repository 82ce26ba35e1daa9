//! Empirical checkers for the regret analysis: well-behavedness of sample
//! paths, prompt scheduling of the optimal arm and the leader, and the
//! two-arm average regret probe.

use policy_core::{CandidateView, CovId, MassPolicy, Policy};

use crate::population::ArmPopulation;
use crate::regret::RegretLedger;
use crate::stream::substream;
use crate::walk::GainProcess;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("sigma must lie in (0, 1), got {0}")]
    SigmaOutOfRange(f64),
}

/// The confidence-bound scale of the fixed-candidate regret bound,
/// `15·σ·ln(1/σ)`.
pub fn theoretical_beta(sigma: f64) -> Result<f64, DomainError> {
    if !(0.0..1.0).contains(&sigma) || sigma == 0.0 {
        return Err(DomainError::SigmaOutOfRange(sigma));
    }
    Ok(15.0 * sigma * (1.0 / sigma).ln())
}

/// The well-behavedness constant `c_f = 3·√(ln(1/σ))`.
pub fn c_f(sigma: f64) -> Result<f64, DomainError> {
    if !(0.0..1.0).contains(&sigma) || sigma == 0.0 {
        return Err(DomainError::SigmaOutOfRange(sigma));
    }
    Ok(3.0 * (1.0 / sigma).ln().sqrt())
}

/// Derived constants of one problem instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConstants {
    pub c_f: f64,
    pub beta_theory: f64,
    pub g_max: f64,
}

impl AnalysisConstants {
    pub fn new(sigma: f64, g_max: f64) -> Result<Self, DomainError> {
        assert!(g_max > 0.0, "g_max must be positive");
        Ok(Self {
            c_f: c_f(sigma)?,
            beta_theory: theoretical_beta(sigma)?,
            g_max,
        })
    }
}

/// Half-width of the well-behavedness window, `σ⁻²` rounded to a slot count.
pub fn sigma_window(sigma: f64) -> usize {
    (1.0 / (sigma * sigma)).round() as usize
}

/// Direct check that every arm's path satisfies
/// `|G(t') − G(t'')| ≤ c_f·√|t' − t''|·σ` for all pairs in
/// `[t − σ⁻², t + σ⁻²] ∩ [0, T]`.
pub fn well_behaved(paths: &[Vec<f64>], t: usize, c_f: f64, sigma: f64) -> bool {
    let w = sigma_window(sigma);
    for path in paths {
        let hi = (t + w).min(path.len() - 1);
        let lo = t.saturating_sub(w);
        for a in lo..hi {
            for b in (a + 1)..=hi {
                let threshold = c_f * ((b - a) as f64).sqrt() * sigma;
                if (path[b] - path[a]).abs() > threshold {
                    return false;
                }
            }
        }
    }
    true
}

/// `mask[t]` is true iff the instance is well-behaved near slot `t`.
///
/// Equivalent to calling [`well_behaved`] at every `t`, but computed by
/// locating every violating pair once and marking the window of slots it
/// poisons. Pair lags beyond `(1/(c_f·σ))²` cannot violate because gains
/// live in [0, 1].
pub fn well_behaved_mask(paths: &[Vec<f64>], c_f: f64, sigma: f64) -> Vec<bool> {
    let t_max = paths.iter().map(|p| p.len()).min().unwrap_or(0);
    if t_max == 0 {
        return Vec::new();
    }
    let last = t_max - 1;
    let w = sigma_window(sigma);
    let lag_cap = (1.0 / (c_f * sigma)).powi(2).ceil() as usize;
    let max_lag = (2 * w).min(last).min(lag_cap.max(1));
    let mut diff = vec![0i64; t_max + 1];
    for path in paths {
        for lag in 1..=max_lag {
            let threshold = c_f * (lag as f64).sqrt() * sigma;
            if threshold >= 1.0 {
                break;
            }
            for a in 0..=(last - lag) {
                let b = a + lag;
                if (path[b] - path[a]).abs() > threshold {
                    // The pair (a, b) invalidates every t with both ends
                    // inside [t − w, t + w], i.e. t ∈ [b − w, a + w].
                    let lo = b.saturating_sub(w);
                    let hi = (a + w).min(last);
                    if lo <= hi {
                        diff[lo] += 1;
                        diff[hi + 1] -= 1;
                    }
                }
            }
        }
    }
    let mut mask = Vec::with_capacity(t_max);
    let mut acc = 0i64;
    for d in &diff[..t_max] {
        acc += d;
        mask.push(acc == 0);
    }
    mask
}

/// Monte-Carlo estimate of how often the well-behavedness event fails.
#[derive(Debug, Clone, Copy)]
pub struct Lemma1Config {
    pub sigma: f64,
    /// Slots per sampled instance (excluding the initial state).
    pub path_len: usize,
    /// Independent two-arm instances to draw windows from.
    pub instances: usize,
    /// Total number of sampled window centers.
    pub windows: usize,
    pub seed: u64,
}

/// Fraction of sampled window centers `t` at which the two-arm instance is
/// not well-behaved near `t`, with `c_f = 3√(ln 1/σ)`.
pub fn lemma1_violation_frequency(cfg: &Lemma1Config) -> Result<f64, DomainError> {
    let c_f = c_f(cfg.sigma)?;
    let mut violations = 0usize;
    let mut sampled = 0usize;
    let per_instance = cfg.windows.div_ceil(cfg.instances);
    for instance in 0..cfg.instances {
        let paths: Vec<Vec<f64>> = (0..2)
            .map(|arm| {
                let rng = substream(cfg.seed, "lemma1", (instance * 2 + arm) as u64);
                let mut p = GainProcess::stationary(cfg.sigma, rng);
                let mut path = Vec::with_capacity(cfg.path_len + 1);
                path.push(p.gain());
                for _ in 0..cfg.path_len {
                    path.push(p.step());
                }
                path
            })
            .collect();
        let mask = well_behaved_mask(&paths, c_f, cfg.sigma);
        let mut rng = substream(cfg.seed, "lemma1-windows", instance as u64);
        for _ in 0..per_instance {
            if sampled == cfg.windows {
                break;
            }
            let t = rand::Rng::random_range(&mut rng, 0..mask.len());
            if !mask[t] {
                violations += 1;
            }
            sampled += 1;
        }
    }
    Ok(violations as f64 / sampled as f64)
}

/// Outcome of the prompt-scheduling check on a two-arm MASS run.
#[derive(Debug, Clone, Copy, Default)]
pub struct Lemma2Outcome {
    /// Slots where the well-behavedness predicate held and the check ran.
    pub checked_slots: usize,
    /// Well-behaved slots whose optimal arm was not scheduled by t+1.
    pub optimal_violations: usize,
    /// Well-behaved slots whose leader was not scheduled by t+1.
    pub leader_violations: usize,
    pub total_slots: usize,
}

/// Runs MASS with `β = 5·c_f` on two fixed arms and verifies that at every
/// well-behaved slot `t` both the slot-`t` optimal arm and the slot-`t`
/// leader are scheduled at `t` or `t + 1`.
pub fn lemma2_check(sigma: f64, t_slots: usize, seed: u64) -> Result<Lemma2Outcome, DomainError> {
    let c_f = c_f(sigma)?;
    let beta = 5.0 * c_f;
    let mut population = ArmPopulation::fixed_pair(sigma, seed);
    let mut policy = MassPolicy::new(beta);

    // paths[arm][slot], slot 0 = initial state before any scheduling.
    let mut paths = vec![Vec::with_capacity(t_slots + 1); 2];
    for (id, g) in population.gains() {
        paths[id.0 as usize].push(g);
    }
    let mut schedule = vec![usize::MAX; t_slots + 1];
    let mut leaders = vec![usize::MAX; t_slots + 1];

    for t in 1..=t_slots {
        population.step();
        let gains = population.gains();
        for (id, g) in &gains {
            paths[id.0 as usize].push(*g);
        }
        // Leader before this slot's selection: argmax last-seen gain.
        let mut leader: Option<(CovId, f64)> = None;
        for (id, entry) in policy.entries() {
            leader = match leader {
                Some((_, lg)) if entry.gain <= lg => leader,
                _ => Some((id, entry.gain)),
            };
        }
        if let Some((id, _)) = leader {
            leaders[t] = id.0 as usize;
        }
        let candidates: Vec<CandidateView> = gains
            .iter()
            .map(|(id, _)| CandidateView::new(id.0, id.0 as f64, t as u64))
            .collect();
        let picked = policy.select(&candidates, t as u64).expect("two arms");
        schedule[t] = picked.0 as usize;
        let observed = population.gain(picked).expect("picked is active");
        policy.observe(picked, observed, t as u64);
    }

    let mask = well_behaved_mask(&paths, c_f, sigma);
    let mut outcome = Lemma2Outcome {
        total_slots: t_slots,
        ..Default::default()
    };
    // Skip the first two slots (forced exploration, leader undefined).
    for t in 3..t_slots {
        if !mask[t] {
            continue;
        }
        outcome.checked_slots += 1;
        let optimal = if paths[0][t] >= paths[1][t] { 0 } else { 1 };
        if schedule[t] != optimal && schedule[t + 1] != optimal {
            outcome.optimal_violations += 1;
        }
        let leader = leaders[t];
        if leader != usize::MAX && schedule[t] != leader && schedule[t + 1] != leader {
            outcome.leader_violations += 1;
        }
    }
    Ok(outcome)
}

/// Average regret of MASS on two fixed arms over `t_slots` slots.
pub fn mass_two_arm_average_regret(sigma: f64, beta: f64, t_slots: usize, seed: u64) -> f64 {
    let mut population = ArmPopulation::fixed_pair(sigma, seed);
    let mut policy = MassPolicy::new(beta);
    let mut ledger = RegretLedger::new();
    for t in 1..=t_slots {
        population.step();
        let gains = population.gains();
        let optimal = gains
            .iter()
            .map(|(_, g)| *g)
            .fold(f64::NEG_INFINITY, f64::max);
        let candidates: Vec<CandidateView> = gains
            .iter()
            .map(|(id, _)| CandidateView::new(id.0, id.0 as f64, t as u64))
            .collect();
        let picked = policy.select(&candidates, t as u64).expect("two arms");
        let achieved = population.gain(picked).expect("picked is active");
        ledger.record(optimal, achieved).expect("oracle dominates");
        policy.observe(picked, achieved, t as u64);
    }
    ledger.average()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theoretical_beta_values() {
        // σ = 1/e gives 15/e; σ = 0.01 gives 15·0.01·ln 100.
        let e = std::f64::consts::E;
        assert!((theoretical_beta(1.0 / e).unwrap() - 15.0 / e).abs() < 1e-12);
        assert!((theoretical_beta(0.01).unwrap() - 0.6907755278982137).abs() < 1e-12);
        // β → 0 as σ → 1⁻.
        assert!(theoretical_beta(0.999999).unwrap() < 1e-4);
        assert!(theoretical_beta(1.0).is_err());
        assert!(theoretical_beta(0.0).is_err());
        assert!(theoretical_beta(1.5).is_err());
    }

    #[test]
    fn constant_paths_are_well_behaved() {
        let paths = vec![vec![0.4; 200], vec![0.9; 200]];
        let cf = c_f(0.1).unwrap();
        assert!(well_behaved(&paths, 100, cf, 0.1));
    }

    #[test]
    fn unit_jump_violates() {
        let mut path = vec![0.0; 200];
        for v in path.iter_mut().skip(100) {
            *v = 1.0;
        }
        let cf = c_f(0.1).unwrap();
        // c_f·σ < 1, so a jump of 1.0 between adjacent slots violates.
        assert!(cf * 0.1 < 1.0);
        assert!(!well_behaved(&[path], 100, cf, 0.1));
    }

    #[test]
    fn mask_matches_direct_check() {
        let sigma = 0.3;
        let mut process = GainProcess::stationary(sigma, substream(5, "test", 0));
        let mut path = vec![process.gain()];
        for _ in 0..120 {
            path.push(process.step());
        }
        let paths = vec![path];
        let cf = 1.0; // deliberately small so violations occur
        let mask = well_behaved_mask(&paths, cf, sigma);
        for t in 0..paths[0].len() {
            assert_eq!(
                mask[t],
                well_behaved(&paths, t, cf, sigma),
                "mask and direct check disagree at t={}",
                t
            );
        }
        assert!(mask.iter().any(|m| !*m), "test should exercise violations");
    }

    #[test]
    fn lemma1_frequency_small_at_sigma_005() {
        let cfg = Lemma1Config {
            sigma: 0.05,
            path_len: 5_000,
            instances: 2,
            windows: 1_000,
            seed: 7,
        };
        let f = lemma1_violation_frequency(&cfg).unwrap();
        assert!(f < 0.05, "violation frequency {} too high", f);
    }

    #[test]
    fn lemma2_no_violations_on_well_behaved_slots() {
        let outcome = lemma2_check(0.05, 5_000, 3).unwrap();
        assert!(outcome.checked_slots > 0);
        assert_eq!(outcome.optimal_violations, 0);
        assert_eq!(outcome.leader_violations, 0);
    }

    #[test]
    fn two_arm_regret_is_deterministic_and_positive() {
        let a = mass_two_arm_average_regret(0.02, 1.17, 20_000, 5);
        let b = mass_two_arm_average_regret(0.02, 1.17, 20_000, 5);
        assert_eq!(a, b);
        assert!(a > 0.0 && a < 0.5, "unexpected average regret {}", a);
    }
}
