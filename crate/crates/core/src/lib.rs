//! Ising measures on locally tree-like regular graphs.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`graph`]: random regular graphs, radius-`t` balls, girth, and edge expansion.
//! * [`tree`]: exact Gibbs measures of the Ising model on the `k`-regular tree
//!   (fixed-point cavity field, boundary-condition marginals, free energy, correlations).
//! * [`sampler`]: exact enumeration and Monte Carlo sampling of the Ising measure on a
//!   finite graph, plus the measure conditioned on positive magnetization.
//! * [`diagnostics`]: local convergence statistics computed from sample batches.
//!
//! Spins are `i8` values in `{-1, +1}`. Whenever a spin configuration on an ordered vertex
//! list is packed into an integer index, bit `j` is set iff the `j`-th spin is `+1`.

pub mod diagnostics;
pub mod graph;
pub mod json;
pub mod sampler;
pub mod seed;
pub mod tree;

pub use diagnostics::{ConvergenceReport, DiagnosticsError};
pub use graph::{Ball, GraphError, RegularGraph};
pub use sampler::{Algorithm, SampleBatch, SamplerError, SpinConfig};
pub use tree::{Boundary, IsingParams, TreeError, TreeFixedPoint, TreeMarginal};

/// Packs spins (given in a fixed vertex order) into a configuration index.
#[inline]
pub fn pattern_index<I: IntoIterator<Item = i8>>(spins: I) -> usize {
    spins
        .into_iter()
        .enumerate()
        .fold(0usize, |acc, (j, s)| if s > 0 { acc | (1 << j) } else { acc })
}

/// Spin of position `j` in a packed configuration index.
#[inline]
pub fn spin_at(index: usize, j: usize) -> i8 {
    if index >> j & 1 == 1 {
        1
    } else {
        -1
    }
}
