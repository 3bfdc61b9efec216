use crate::graph::RegularGraph;
use crate::tree::IsingParams;

use super::SamplerError;

pub const EXACT_MAX_N: usize = 24;

/// The Ising measure on a small graph, tabulated over all `2^n` configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactDistribution {
    n: usize,
    probs: Vec<f64>,
    log_z: f64,
}

/// Enumerates every configuration in Gray-code order, tracking the integer agreement count
/// `sum_E x_i x_j` and magnetization so that each log-weight is evaluated exactly.
pub fn exact_distribution(g: &RegularGraph, p: &IsingParams) -> Result<ExactDistribution, SamplerError> {
    let n = g.n();
    if n > EXACT_MAX_N {
        return Err(SamplerError::SizeLimit { n, max: EXACT_MAX_N });
    }
    let states = 1usize << n;
    let mut spins = vec![-1i8; n];
    let mut agreement = g.edges().len() as i64;
    let mut magnetization = -(n as i64);
    let mut logw = vec![0.0f64; states];
    logw[0] = p.beta * agreement as f64 + p.field * magnetization as f64;
    for step in 1..states {
        let j = step.trailing_zeros() as usize;
        let s = spins[j] as i64;
        let local: i64 = g.neighbors(j).iter().map(|&w| spins[w] as i64).sum();
        agreement -= 2 * s * local;
        magnetization -= 2 * s;
        spins[j] = -spins[j];
        let gray = step ^ (step >> 1);
        logw[gray] = p.beta * agreement as f64 + p.field * magnetization as f64;
    }
    let max = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for w in logw.iter_mut() {
        *w = (*w - max).exp();
        z += *w;
    }
    logw.iter_mut().for_each(|w| *w /= z);
    Ok(ExactDistribution { n, probs: logw, log_z: max + z.ln() })
}

pub fn log_partition(g: &RegularGraph, p: &IsingParams) -> Result<f64, SamplerError> {
    Ok(exact_distribution(g, p)?.log_z)
}

fn magnetization_of(index: usize, n: usize) -> i64 {
    2 * index.count_ones() as i64 - n as i64
}

impl ExactDistribution {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.probs[index]
    }

    /// Law conditioned on `M > 0`, by direct restriction and renormalization.
    pub fn conditioned_positive(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .probs
            .iter()
            .enumerate()
            .map(|(i, &q)| if magnetization_of(i, self.n) > 0 { q } else { 0.0 })
            .collect();
        let z: f64 = out.iter().sum();
        out.iter_mut().for_each(|q| *q /= z);
        out
    }

    /// Law of the output of the flip map (flip when `M < 0`, discard `M = 0`) applied to an
    /// exact draw.
    pub fn flip_map_pushforward(&self) -> Vec<f64> {
        let full = (1usize << self.n) - 1;
        let mut out = vec![0.0; self.probs.len()];
        for (i, &q) in self.probs.iter().enumerate() {
            match magnetization_of(i, self.n) {
                m if m > 0 => out[i] += q,
                m if m < 0 => out[full ^ i] += q,
                _ => {}
            }
        }
        let kept: f64 = out.iter().sum();
        out.iter_mut().for_each(|q| *q /= kept);
        out
    }

    /// Joint law of the spins on `vertices`, packed in the given order.
    pub fn marginal(&self, vertices: &[usize]) -> Vec<f64> {
        let mut out = vec![0.0; 1 << vertices.len()];
        for (i, &q) in self.probs.iter().enumerate() {
            let pattern = crate::pattern_index(vertices.iter().map(|&v| crate::spin_at(i, v)));
            out[pattern] += q;
        }
        out
    }

    /// `P(M = m)` for `m = -n, -n+2, ..., n`, as `(m, probability)` pairs.
    pub fn magnetization_law(&self) -> Vec<(i64, f64)> {
        let mut out: Vec<(i64, f64)> = (0..=self.n).map(|u| (2 * u as i64 - self.n as i64, 0.0)).collect();
        for (i, &q) in self.probs.iter().enumerate() {
            out[i.count_ones() as usize].1 += q;
        }
        out
    }

    /// `E[x_i x_j]` for every edge, in the graph's edge order.
    pub fn edge_expectations(&self, g: &RegularGraph) -> Vec<f64> {
        g.edges()
            .iter()
            .map(|&(a, b)| {
                self.probs
                    .iter()
                    .enumerate()
                    .map(|(i, &q)| q * (crate::spin_at(i, a) * crate::spin_at(i, b)) as f64)
                    .sum()
            })
            .collect()
    }
}
