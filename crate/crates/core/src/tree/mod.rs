//! Exact computations for the ferromagnetic Ising model on the infinite `k`-regular tree.
//!
//! The central object is the cavity field `h`: the effective field a vertex receives from the
//! `k - 1` subtrees hanging below it. It solves
//!
//! ```text
//! h = (k - 1) * atanh(tanh(beta) * tanh(h))
//! ```
//!
//! and under the plus-boundary measure the pair of spins on any edge has law proportional to
//! `exp(beta*x*y + h*x + h*y)`. Closed forms for the magnetization, the edge correlation, and
//! the Bethe free energy all follow from `h`.

mod marginal;
mod structure;

use serde::Serialize;
use thiserror::Error;

pub use marginal::{
    dlr_check, f_statistic_tree, f_statistic_tree_sampled, free_boundary_marginal,
    leaf_field_marginal, minus_boundary_marginal, mixture_marginal, plus_boundary_marginal,
    plus_limit_marginal, Boundary, Phase, TreeMarginal, TreeModel, MAX_TABLE_SPINS,
};
pub use structure::RegularTree;

pub const FIXED_POINT_TOL: f64 = 1e-12;
pub const FIXED_POINT_MAX_ITER: usize = 10_000;

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("tree computations require zero external field, got B = {0}")]
    NonzeroField(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("exact table needs {spins} spins, limit is {max}")]
    SizeLimit { spins: usize, max: usize },
    #[error("invalid depth: {0}")]
    InvalidDepth(String),
    #[error("delta must lie in (0, rho) = (0, {rho}), got {delta}")]
    InvalidDelta { delta: f64, rho: f64 },
}

/// Degree, inverse temperature, and external field of a ferromagnetic Ising model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsingParams {
    pub k: usize,
    pub beta: f64,
    pub field: f64,
}

impl IsingParams {
    pub fn new(k: usize, beta: f64) -> Result<Self, TreeError> {
        Self::with_field(k, beta, 0.0)
    }

    pub fn with_field(k: usize, beta: f64, field: f64) -> Result<Self, TreeError> {
        let p = Self { k, beta, field };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), TreeError> {
        if self.k < 3 {
            return Err(TreeError::InvalidParams(format!("degree k = {} must be >= 3", self.k)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(TreeError::InvalidParams(format!("beta = {} must be finite and >= 0", self.beta)));
        }
        if !self.field.is_finite() {
            return Err(TreeError::InvalidParams("external field must be finite".into()));
        }
        Ok(())
    }

    /// `(k - 1) tanh(beta) <= 1`: the tree has a single Gibbs measure.
    pub fn is_uniqueness(&self) -> bool {
        (self.k as f64 - 1.0) * self.beta.tanh() <= 1.0
    }

    fn require_zero_field(&self) -> Result<(), TreeError> {
        self.validate()?;
        if self.field != 0.0 {
            return Err(TreeError::NonzeroField(self.field));
        }
        Ok(())
    }
}

/// Uniqueness threshold `atanh(1 / (k - 1))`.
pub fn critical_beta(k: usize) -> f64 {
    (1.0 / (k as f64 - 1.0)).atanh()
}

/// Message sent across an edge by a vertex whose cavity field is `h`.
#[inline]
pub(crate) fn edge_message(beta_tanh: f64, h: f64) -> f64 {
    (beta_tanh * h.tanh()).atanh()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreeFixedPoint {
    /// Largest non-negative solution of the cavity recursion.
    pub h: f64,
    /// `tanh(h)`.
    pub m: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Largest fixed point of `h -> (k-1) atanh(tanh(beta) tanh(h))`.
///
/// The map is increasing and concave on `[0, inf)` with slope `(k-1) tanh(beta)` at the
/// origin, so in the uniqueness regime `h = 0` is the only fixed point and is returned
/// exactly. Otherwise the iteration starts at `k * beta`, above every fixed point, and
/// decreases monotonically to the largest one.
pub fn solve_fixed_point(p: &IsingParams) -> Result<TreeFixedPoint, TreeError> {
    p.require_zero_field()?;
    if p.is_uniqueness() {
        return Ok(TreeFixedPoint { h: 0.0, m: 0.0, converged: true, iterations: 0 });
    }
    let t = p.beta.tanh();
    let branches = p.k as f64 - 1.0;
    let mut h = p.k as f64 * p.beta;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < FIXED_POINT_MAX_ITER {
        let next = branches * edge_message(t, h);
        iterations += 1;
        let delta = (next - h).abs();
        h = next;
        if delta < FIXED_POINT_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("fixed point for k={}, beta={} not converged after {iterations} iterations", p.k, p.beta);
    }
    Ok(TreeFixedPoint { h, m: h.tanh(), converged, iterations })
}

/// `nu_+(x_o x_1) = (tanh(beta) + m^2) / (1 + tanh(beta) m^2)` with `m = tanh(h)`.
pub fn edge_correlation(p: &IsingParams) -> Result<f64, TreeError> {
    let m = solve_fixed_point(p)?.m;
    let t = p.beta.tanh();
    Ok((t + m * m) / (1.0 + t * m * m))
}

/// `rho = nu_+(x_o)`: the root sees `k` subtrees, i.e. cavity field `h` plus one more message.
pub fn root_magnetization(p: &IsingParams) -> Result<f64, TreeError> {
    let m = solve_fixed_point(p)?.m;
    let t = p.beta.tanh();
    Ok((m + t * m) / (1.0 + t * m * m))
}

/// Bethe free energy density `lim (1/n) log Z_n`.
pub fn free_energy(p: &IsingParams) -> Result<f64, TreeError> {
    let m = solve_fixed_point(p)?.m;
    let t = p.beta.tanh();
    let k = p.k as f64;
    let tm = t * m;
    // log{(1+tm)^k + (1-tm)^k}, factored to stay finite for large k * beta.
    let log_sum = k * (1.0 + tm).ln() + (1.0 + ((1.0 - tm) / (1.0 + tm)).powf(k)).ln();
    Ok(0.5 * k * log_cosh(p.beta) - 0.5 * k * (1.0 + tm * m).ln() + log_sum)
}

fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `nu_+(x_j x_j')` for two vertices at distance `d >= 1`.
///
/// Along the path the spins form a Markov chain. Its endpoints receive field `h` from their
/// `k - 1` off-path subtrees and interior vertices receive `(k - 2)` messages.
pub fn pair_correlation(p: &IsingParams, d: usize) -> Result<f64, TreeError> {
    if d < 1 {
        return Err(TreeError::InvalidDepth("pair distance must be >= 1".into()));
    }
    let h = solve_fixed_point(p)?.h;
    let u = edge_message(p.beta.tanh(), h);
    let side = (p.k as f64 - 2.0) * u;
    let fields: Vec<f64> = (0..=d).map(|i| if i == 0 || i == d { h } else { side }).collect();
    Ok(path_end_correlation(p.beta, &fields))
}

/// `E[x_0 x_d]` for the Ising chain with couplings `beta` and per-site fields.
fn path_end_correlation(beta: f64, fields: &[f64]) -> f64 {
    // w[s0][s] = unnormalized weight of (x_0 = s0, x_i = s), rescaled each step.
    let spin = |i: usize| if i == 0 { -1.0 } else { 1.0 };
    let mut w = [[0.0f64; 2]; 2];
    for (a, row) in w.iter_mut().enumerate() {
        row[a] = (fields[0] * spin(a)).exp();
    }
    for &f in &fields[1..] {
        let mut next = [[0.0f64; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                next[a][b] = (0..2)
                    .map(|c| w[a][c] * (beta * spin(c) * spin(b)).exp())
                    .sum::<f64>()
                    * (f * spin(b)).exp();
            }
        }
        let scale = next.iter().flatten().cloned().fold(0.0, f64::max);
        for x in next.iter_mut().flatten() {
            *x /= scale;
        }
        w = next;
    }
    let z: f64 = w.iter().flatten().sum();
    (w[0][0] + w[1][1] - w[0][1] - w[1][0]) / z
}
