//! Three-state Markov chain of the available communication resource ratio.

use rand::Rng;
use rand_chacha::ChaCha12Rng;

/// Available resource ratios: 1.2, 6 and 30 MHz over a 30 MHz band.
pub const RESOURCE_RATIOS: [f64; 3] = [0.04, 0.2, 1.0];

/// Per-CoV resource-ratio chain. Every `Δt` the chain jumps with
/// probability `Δt / dwell` to one of the other two states, uniformly;
/// the default dwell time is 10 s.
#[derive(Debug, Clone)]
pub struct ResourceRatioChain {
    state: usize,
    switch_prob: f64,
    rng: ChaCha12Rng,
}

impl ResourceRatioChain {
    /// Starts from the stationary law (uniform over the three states).
    pub fn new(delta_t_s: f64, mean_dwell_s: f64, mut rng: ChaCha12Rng) -> Self {
        assert!(delta_t_s > 0.0 && mean_dwell_s > 0.0);
        let switch_prob = (delta_t_s / mean_dwell_s).min(1.0);
        let state = rng.random_range(0..3);
        Self {
            state,
            switch_prob,
            rng,
        }
    }

    /// A chain pinned to one state forever (switch probability 0).
    pub fn frozen(state: usize, rng: ChaCha12Rng) -> Self {
        assert!(state < 3);
        Self {
            state,
            switch_prob: 0.0,
            rng,
        }
    }

    pub fn switch_prob(&self) -> f64 {
        self.switch_prob
    }

    pub fn eta(&self) -> f64 {
        RESOURCE_RATIOS[self.state]
    }

    /// Advances one slot and returns the new ratio.
    pub fn step(&mut self) -> f64 {
        if self.switch_prob > 0.0 && self.rng.random::<f64>() < self.switch_prob {
            let other = self.rng.random_range(0..2usize);
            self.state = (self.state + 1 + other) % 3;
        }
        self.eta()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn zero_switch_prob_is_constant() {
        let mut chain = ResourceRatioChain::frozen(1, ChaCha12Rng::seed_from_u64(1));
        for _ in 0..1000 {
            assert_eq!(chain.step(), 0.2);
        }
    }

    #[test]
    fn slot_length_sets_switch_probability() {
        let chain = ResourceRatioChain::new(0.1, 10.0, ChaCha12Rng::seed_from_u64(2));
        assert!((chain.switch_prob() - 0.01).abs() < 1e-12);
    }

    #[test]
    fn long_run_occupancy_is_uniform() {
        let mut chain = ResourceRatioChain::new(0.1, 10.0, ChaCha12Rng::seed_from_u64(3));
        let mut counts = [0usize; 3];
        let steps = 1_000_000;
        for _ in 0..steps {
            let eta = chain.step();
            let idx = RESOURCE_RATIOS.iter().position(|&r| r == eta).unwrap();
            counts[idx] += 1;
        }
        for (i, &c) in counts.iter().enumerate() {
            let share = c as f64 / steps as f64;
            assert!(
                (share - 1.0 / 3.0).abs() < 0.02,
                "state {} occupancy {} not near 1/3",
                i,
                share
            );
        }
    }

    #[test]
    fn distinct_streams_are_uncorrelated() {
        let mut a = ResourceRatioChain::new(0.1, 1.0, ChaCha12Rng::seed_from_u64(10));
        let mut b = ResourceRatioChain::new(0.1, 1.0, ChaCha12Rng::seed_from_u64(11));
        let n = 200_000;
        let (mut sa, mut sb, mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let xa = a.step();
            let xb = b.step();
            sa += xa;
            sb += xb;
            sab += xa * xb;
            saa += xa * xa;
            sbb += xb * xb;
        }
        let nf = n as f64;
        let cov = sab / nf - (sa / nf) * (sb / nf);
        let var_a = saa / nf - (sa / nf).powi(2);
        let var_b = sbb / nf - (sb / nf).powi(2);
        let corr = cov / (var_a * var_b).sqrt();
        assert!(corr.abs() < 0.02, "cross-correlation {} not near 0", corr);
    }
}
