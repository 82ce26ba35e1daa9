//! Dynamic arm population: arrivals, departures, capped candidate set.

use std::collections::BTreeMap;

use policy_core::CovId;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::stream::substream;
use crate::walk::GainProcess;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopulationConfig {
    /// Per-step increment standard deviation of every arm.
    pub sigma: f64,
    /// Expected arrivals per slot; at most one arrival per slot.
    pub arrival_rate: f64,
    /// Mean lifetime in slots; departures are geometric. `f64::INFINITY`
    /// disables departures.
    pub mean_lifetime: f64,
    /// Hard cap on the number of simultaneously active arms.
    pub v_max: usize,
    /// Arms present at slot 0.
    pub initial_arms: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PopulationEvents {
    pub arrivals: Vec<CovId>,
    pub departures: Vec<CovId>,
}

/// The set of active arms. Fresh ids are never reused; new arms start from
/// the stationary Uniform[0, 1] gain and own an independent RNG stream.
#[derive(Debug, Clone)]
pub struct ArmPopulation {
    cfg: PopulationConfig,
    seed: u64,
    arms: BTreeMap<CovId, GainProcess>,
    next_id: u64,
    rng: ChaCha12Rng,
}

impl ArmPopulation {
    pub fn new(cfg: PopulationConfig, seed: u64) -> Self {
        assert!(cfg.v_max >= 1, "v_max must be at least 1");
        assert!(cfg.initial_arms <= cfg.v_max, "initial arms exceed v_max");
        assert!(cfg.mean_lifetime > 0.0, "mean lifetime must be positive");
        assert!(cfg.arrival_rate >= 0.0, "arrival rate must be non-negative");
        let mut pop = Self {
            cfg,
            seed,
            arms: BTreeMap::new(),
            next_id: 0,
            rng: substream(seed, "population", 0),
        };
        for _ in 0..cfg.initial_arms {
            pop.spawn_arm();
        }
        pop
    }

    /// Two fixed arms, no arrivals, no departures.
    pub fn fixed_pair(sigma: f64, seed: u64) -> Self {
        Self::new(
            PopulationConfig {
                sigma,
                arrival_rate: 0.0,
                mean_lifetime: f64::INFINITY,
                v_max: 2,
                initial_arms: 2,
            },
            seed,
        )
    }

    fn spawn_arm(&mut self) -> CovId {
        let id = CovId(self.next_id);
        self.next_id += 1;
        let stream = substream(self.seed, "arm", id.0);
        self.arms
            .insert(id, GainProcess::stationary(self.cfg.sigma, stream));
        id
    }

    pub fn config(&self) -> &PopulationConfig {
        &self.cfg
    }

    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn gain(&self, id: CovId) -> Option<f64> {
        self.arms.get(&id).map(|p| p.gain())
    }

    /// Active arms and their current gains, in id order.
    pub fn gains(&self) -> Vec<(CovId, f64)> {
        self.arms.iter().map(|(id, p)| (*id, p.gain())).collect()
    }

    /// Advances one slot: every arm steps its gain, arms depart
    /// geometrically, and at most one arrival is drawn (rejected when the
    /// population sits at `v_max`).
    pub fn step(&mut self) -> PopulationEvents {
        let mut events = PopulationEvents::default();
        for process in self.arms.values_mut() {
            process.step();
        }
        let p_depart = if self.cfg.mean_lifetime.is_finite() {
            1.0 / self.cfg.mean_lifetime
        } else {
            0.0
        };
        if p_depart > 0.0 {
            let ids: Vec<CovId> = self.arms.keys().copied().collect();
            for id in ids {
                if self.rng.random::<f64>() < p_depart {
                    self.arms.remove(&id);
                    events.departures.push(id);
                }
            }
        }
        let p_arrive = self.cfg.arrival_rate.min(1.0);
        if p_arrive > 0.0 && self.rng.random::<f64>() < p_arrive {
            if self.arms.len() < self.cfg.v_max {
                events.arrivals.push(self.spawn_arm());
            }
        }
        events
    }
}
