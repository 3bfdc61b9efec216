use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::RegularGraph;
use crate::tree::IsingParams;

use super::{SamplerError, SpinConfig};

/// A single Markov chain: configuration, its private generator, and a step counter.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub config: SpinConfig,
    pub rng: ChaCha8Rng,
    /// Glauber sweeps or Wolff cluster flips performed so far.
    pub sweeps_done: u64,
    stack: Vec<usize>,
}

impl ChainState {
    pub fn new(config: SpinConfig, seed: u64) -> Self {
        Self { config, rng: ChaCha8Rng::seed_from_u64(seed), sweeps_done: 0, stack: Vec::new() }
    }

    /// Independent uniform initial spins drawn from the chain's own generator.
    pub fn random(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spins = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        Self {
            config: SpinConfig::new(spins).expect("±1 by construction"),
            rng,
            sweeps_done: 0,
            stack: Vec::new(),
        }
    }
}

/// Transition kernel with its acceptance probabilities precomputed for fixed parameters.
#[derive(Debug, Clone)]
pub enum Kernel {
    Glauber {
        k: i64,
        /// Heat-bath probability of `+1`, indexed by local field sum plus `k`.
        p_plus: Vec<f64>,
    },
    Wolff {
        p_add: f64,
    },
}

impl Kernel {
    pub fn new(g: &RegularGraph, p: &IsingParams, algorithm: super::Algorithm) -> Result<Self, SamplerError> {
        match algorithm {
            super::Algorithm::Glauber => {
                let k = g.k() as i64;
                let p_plus = (-k..=k)
                    .map(|s| 1.0 / (1.0 + (-2.0 * (p.beta * s as f64 + p.field)).exp()))
                    .collect();
                Ok(Kernel::Glauber { k, p_plus })
            }
            super::Algorithm::Wolff => {
                if p.field != 0.0 {
                    return Err(SamplerError::NonzeroField(p.field));
                }
                Ok(Kernel::Wolff { p_add: 1.0 - (-2.0 * p.beta).exp() })
            }
        }
    }

    /// One sweep (Glauber) or one cluster flip (Wolff); returns the number of sites touched.
    pub fn step(&self, g: &RegularGraph, state: &mut ChainState) -> usize {
        match self {
            Kernel::Glauber { k, p_plus } => {
                let n = g.n();
                for _ in 0..n {
                    let i = state.rng.gen_range(0..n);
                    let local: i64 = g.neighbors(i).iter().map(|&w| state.config.get(w) as i64).sum();
                    let s = if state.rng.gen::<f64>() < p_plus[(local + k) as usize] { 1 } else { -1 };
                    state.config.set(i, s);
                }
                state.sweeps_done += 1;
                n
            }
            Kernel::Wolff { p_add } => {
                let seed = state.rng.gen_range(0..g.n());
                let s0 = state.config.get(seed);
                // Sites are flipped as they join, so "still equal to s0" doubles as "not yet in
                // the cluster".
                state.config.flip(seed);
                state.stack.clear();
                state.stack.push(seed);
                let mut size = 1;
                while let Some(v) = state.stack.pop() {
                    for &w in g.neighbors(v) {
                        if state.config.get(w) == s0 && state.rng.gen::<f64>() < *p_add {
                            state.config.flip(w);
                            state.stack.push(w);
                            size += 1;
                        }
                    }
                }
                state.sweeps_done += 1;
                size
            }
        }
    }
}

/// `n` random-scan heat-bath updates: a uniformly chosen site is set to `+1` with probability
/// `1 / (1 + exp(-2 (beta * sum_{j~i} x_j + B)))`.
pub fn glauber_sweep(g: &RegularGraph, p: &IsingParams, state: &mut ChainState) {
    Kernel::new(g, p, super::Algorithm::Glauber).expect("glauber accepts any field").step(g, state);
}

/// One Wolff cluster flip at zero field; returns the cluster size.
///
/// The seed site is uniform; the cluster grows through equal-spin neighbours, each bond
/// accepted with probability `1 - exp(-2 beta)`, and the whole cluster is flipped.
pub fn wolff_step(g: &RegularGraph, p: &IsingParams, state: &mut ChainState) -> Result<usize, SamplerError> {
    Ok(Kernel::new(g, p, super::Algorithm::Wolff)?.step(g, state))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wolff_at_infinite_temperature_flips_one_site() {
        let g = RegularGraph::petersen();
        let p = IsingParams::new(3, 0.0).unwrap();
        let mut st = ChainState::new(SpinConfig::all_plus(10), 1);
        for _ in 0..50 {
            let before = st.config.clone();
            assert_eq!(wolff_step(&g, &p, &mut st).unwrap(), 1);
            let changed = (0..10).filter(|&i| before.get(i) != st.config.get(i)).count();
            assert_eq!(changed, 1);
        }
    }

    #[test]
    fn wolff_rejects_field() {
        let g = RegularGraph::petersen();
        let p = IsingParams::with_field(3, 0.5, 0.1).unwrap();
        let mut st = ChainState::new(SpinConfig::all_plus(10), 1);
        assert!(matches!(wolff_step(&g, &p, &mut st), Err(SamplerError::NonzeroField(_))));
    }

    #[test]
    fn glauber_frozen_at_low_temperature() {
        let g = RegularGraph::complete_k4();
        let p = IsingParams::new(3, 10.0).unwrap();
        let mut st = ChainState::new(SpinConfig::all_plus(4), 9);
        for _ in 0..1000 {
            glauber_sweep(&g, &p, &mut st);
        }
        assert_eq!(st.config, SpinConfig::all_plus(4));
        assert_eq!(st.sweeps_done, 1000);
    }

    #[test]
    fn chains_are_seed_deterministic() {
        let g = crate::graph::generate_random_regular(200, 3, 4).unwrap();
        let p = IsingParams::new(3, 0.8).unwrap();
        let run = |seed| {
            let mut st = ChainState::random(200, seed);
            for _ in 0..20 {
                glauber_sweep(&g, &p, &mut st);
                wolff_step(&g, &p, &mut st).unwrap();
            }
            st.config
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn glauber_at_infinite_temperature_is_unbiased() {
        let g = crate::graph::generate_random_regular(100, 3, 2).unwrap();
        let p = IsingParams::new(3, 0.0).unwrap();
        let mut st = ChainState::new(SpinConfig::all_plus(100), 3);
        for _ in 0..20 {
            glauber_sweep(&g, &p, &mut st);
        }
        let mut sum = vec![0.0; 100];
        let sweeps = 2000;
        for _ in 0..sweeps {
            glauber_sweep(&g, &p, &mut st);
            for (acc, &s) in sum.iter_mut().zip(st.config.spins()) {
                *acc += s as f64;
            }
        }
        // Successive sweeps are correlated (each site is refreshed with prob 1 - 1/e), so the
        // per-site standard error is inflated; allow 3 sigma on the chain-adjusted scale.
        let sigma = ((1.0 + (-1.0f64).exp()) / (1.0 - (-1.0f64).exp()) / sweeps as f64).sqrt();
        let mean_of_means = sum.iter().sum::<f64>() / (100.0 * sweeps as f64);
        assert!(mean_of_means.abs() < 3.0 * sigma / 10.0);
        let outliers = sum.iter().filter(|&&s| (s / sweeps as f64).abs() > 3.0 * sigma).count();
        assert!(outliers <= 2, "{outliers} sites beyond 3 sigma");
    }
}
