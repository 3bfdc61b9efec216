//! Sampling the Ising measure on a finite regular graph.
//!
//! `mu(x) ∝ exp(beta * sum_{(i,j) in E} x_i x_j + B * sum_i x_i)`.
//!
//! Small graphs (`n <= 24`) are handled by exact enumeration, which is also the oracle for the
//! two Markov chains: random-scan heat-bath (Glauber) dynamics and the Wolff cluster algorithm.
//! The measure conditioned on positive magnetization is obtained from unconditioned samples by
//! the global spin flip, which is exact at zero field.

mod batch;
mod exact;
mod mcmc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use batch::{sample_conditioned_plus, sample_unconditioned, BatchMeta, SampleBatch, SamplerSettings};
pub use exact::{exact_distribution, log_partition, ExactDistribution, EXACT_MAX_N};
pub use mcmc::{glauber_sweep, wolff_step, ChainState, Kernel};

#[derive(Debug, Error)]
pub enum SamplerError {
    #[error("exact enumeration limited to n <= {max}, got n = {n}")]
    SizeLimit { n: usize, max: usize },
    #[error("operation requires zero external field, got B = {0}")]
    NonzeroField(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("batch parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Glauber,
    Wolff,
}

impl Algorithm {
    /// Wolff in the non-uniqueness regime at zero field, heat-bath otherwise.
    pub fn default_for(p: &crate::IsingParams) -> Self {
        if p.field == 0.0 && !p.is_uniqueness() {
            Algorithm::Wolff
        } else {
            Algorithm::Glauber
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Glauber => "glauber",
            Algorithm::Wolff => "wolff",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = SamplerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "glauber" | "heat-bath" | "heatbath" => Ok(Algorithm::Glauber),
            "wolff" => Ok(Algorithm::Wolff),
            other => Err(SamplerError::Invalid(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// A `±1` spin assignment with its magnetization cached.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    spins: Vec<i8>,
    magnetization: i64,
}

impl SpinConfig {
    pub fn new(spins: Vec<i8>) -> Result<Self, SamplerError> {
        if let Some(bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(SamplerError::Invalid(format!("spin value {bad} is not ±1")));
        }
        let magnetization = spins.iter().map(|&s| s as i64).sum();
        Ok(Self { spins, magnetization })
    }

    pub fn all_plus(n: usize) -> Self {
        Self { spins: vec![1; n], magnetization: n as i64 }
    }

    /// Configuration whose spin `j` is `+1` iff bit `j` of `index` is set.
    pub fn from_index(n: usize, index: usize) -> Self {
        Self::new((0..n).map(|j| crate::spin_at(index, j)).collect()).expect("±1 by construction")
    }

    pub fn index(&self) -> usize {
        crate::pattern_index(self.spins.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn magnetization(&self) -> i64 {
        self.magnetization
    }

    #[inline]
    pub fn get(&self, i: usize) -> i8 {
        self.spins[i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, s: i8) {
        debug_assert!(s == 1 || s == -1);
        self.magnetization += (s - self.spins[i]) as i64;
        self.spins[i] = s;
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        let s = -self.spins[i];
        self.set(i, s);
    }

    pub fn flip_all(&mut self) {
        self.spins.iter_mut().for_each(|s| *s = -*s);
        self.magnetization = -self.magnetization;
    }
}
