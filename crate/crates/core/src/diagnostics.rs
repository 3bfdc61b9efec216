//! Local convergence statistics computed from sample batches.
//!
//! Ball laws are compared with tree marginals in total variation. A ball that is not
//! isomorphic to `T_k(t)` has no counterpart under the tree reference, so its whole mass counts
//! towards the distance.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{greedy_independent_set, BallIndex, RegularGraph};
use crate::sampler::{SampleBatch, SpinConfig};
use crate::tree::{RegularTree, TreeError, TreeMarginal, MAX_TABLE_SPINS};

#[derive(Debug, Error)]
pub enum DiagnosticsError {
    #[error("batch is empty")]
    EmptyBatch,
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("ball has {spins} spins, tables are limited to {max}")]
    SizeLimit { spins: usize, max: usize },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// How configurations are turned into empirical laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Averaging {
    /// Each configuration counts once.
    Plain,
    /// Each configuration and its global spin flip count one half each. Unbiased whenever the
    /// sampled measure is flip invariant (zero field, unconditioned).
    FlipSymmetric,
}

/// Empirical law of the spins in `B_i(t)`, packed in canonical ball order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallLaw {
    pub center: usize,
    pub t: usize,
    pub probs: Vec<f64>,
    pub tree_shaped: bool,
}

fn check_batch(batch: &SampleBatch, g: &RegularGraph) -> Result<(), DiagnosticsError> {
    if batch.is_empty() {
        return Err(DiagnosticsError::EmptyBatch);
    }
    if batch.meta().n != g.n() {
        return Err(DiagnosticsError::Mismatch(format!(
            "batch has n = {}, graph has n = {}",
            batch.meta().n,
            g.n()
        )));
    }
    Ok(())
}

fn check_reference(g: &RegularGraph, t: usize, reference: &TreeMarginal) -> Result<(), DiagnosticsError> {
    let expected = RegularTree::size_of(g.k(), t);
    if reference.t() != t || reference.len() != expected {
        return Err(DiagnosticsError::Mismatch(format!(
            "reference lives on a tree with {} spins, T_{}({t}) has {expected}",
            reference.len(),
            g.k()
        )));
    }
    Ok(())
}

pub fn empirical_ball_law(batch: &SampleBatch, g: &RegularGraph, i: usize, t: usize) -> Result<BallLaw, DiagnosticsError> {
    check_batch(batch, g)?;
    let b = crate::graph::ball(g, i, t);
    if b.len() > MAX_TABLE_SPINS {
        return Err(DiagnosticsError::SizeLimit { spins: b.len(), max: MAX_TABLE_SPINS });
    }
    let mut probs = vec![0.0; 1 << b.len()];
    for c in batch.configs() {
        probs[crate::pattern_index(b.vertices.iter().map(|&v| c.get(v)))] += 1.0;
    }
    let total = batch.len() as f64;
    probs.iter_mut().for_each(|x| *x /= total);
    Ok(BallLaw { center: i, t, probs, tree_shaped: crate::graph::is_tree_isomorphic(&b, g.k()) })
}

pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64, DiagnosticsError> {
    if p.len() != q.len() {
        return Err(DiagnosticsError::Mismatch(format!("tables of length {} and {}", p.len(), q.len())));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Adds one configuration's ball pattern to `counts`, in units of half an observation.
#[inline]
fn record(counts: &mut [u64], pattern: usize, full: usize, averaging: Averaging) {
    match averaging {
        Averaging::Plain => counts[pattern] += 2,
        Averaging::FlipSymmetric => {
            counts[pattern] += 1;
            counts[pattern ^ full] += 1;
        }
    }
}

/// TV between the vertex-averaged empirical ball law and `reference`.
///
/// Balls that are not tree-shaped contribute their whole mass to the distance.
pub fn mode_a_statistic(
    batch: &SampleBatch,
    g: &RegularGraph,
    t: usize,
    reference: &TreeMarginal,
    averaging: Averaging,
) -> Result<f64, DiagnosticsError> {
    check_batch(batch, g)?;
    check_reference(g, t, reference)?;
    let index = BallIndex::new(g, t);
    mode_a_with_index(batch, &index, reference, averaging)
}

fn mode_a_with_index(
    batch: &SampleBatch,
    index: &BallIndex,
    reference: &TreeMarginal,
    averaging: Averaging,
) -> Result<f64, DiagnosticsError> {
    let table = reference.table()?;
    let full = table.len() - 1;
    let mut counts = vec![0u64; table.len()];
    let tree_vertices: Vec<usize> = (0..index.len()).filter(|&i| index.is_tree_shaped(i)).collect();
    for c in batch.configs() {
        let spins = c.spins();
        for &i in &tree_vertices {
            record(&mut counts, index.pattern(i, spins), full, averaging);
        }
    }
    let denom = 2.0 * batch.len() as f64 * index.len() as f64;
    let non_tree = 1.0 - tree_vertices.len() as f64 / index.len() as f64;
    let diff: f64 = counts.iter().zip(table).map(|(&c, &q)| (c as f64 / denom - q).abs()).sum();
    Ok(0.5 * (diff + non_tree))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeC {
    /// TV of each vertex's empirical ball law to the reference (1 for non-tree balls).
    pub per_vertex: Vec<f64>,
    /// Fraction of vertices whose TV exceeds `epsilon`.
    pub exceed_fraction: f64,
}

pub fn mode_c_statistic(
    batch: &SampleBatch,
    g: &RegularGraph,
    t: usize,
    reference: &TreeMarginal,
    epsilon: f64,
    averaging: Averaging,
) -> Result<ModeC, DiagnosticsError> {
    check_batch(batch, g)?;
    check_reference(g, t, reference)?;
    let index = BallIndex::new(g, t);
    mode_c_with_index(batch, &index, reference, epsilon, averaging)
}

fn mode_c_with_index(
    batch: &SampleBatch,
    index: &BallIndex,
    reference: &TreeMarginal,
    epsilon: f64,
    averaging: Averaging,
) -> Result<ModeC, DiagnosticsError> {
    let table = reference.table()?;
    let width = table.len();
    let full = width - 1;
    let n = index.len();
    let mut counts = vec![0u64; n * width];
    for c in batch.configs() {
        let spins = c.spins();
        for i in (0..n).filter(|&i| index.is_tree_shaped(i)) {
            record(&mut counts[i * width..(i + 1) * width], index.pattern(i, spins), full, averaging);
        }
    }
    let denom = 2.0 * batch.len() as f64;
    let per_vertex: Vec<f64> = (0..n)
        .map(|i| {
            if !index.is_tree_shaped(i) {
                return 1.0;
            }
            let row = &counts[i * width..(i + 1) * width];
            0.5 * row.iter().zip(table).map(|(&c, &q)| (c as f64 / denom - q).abs()).sum::<f64>()
        })
        .collect();
    let exceed_fraction = per_vertex.iter().filter(|&&d| d > epsilon).count() as f64 / n as f64;
    Ok(ModeC { per_vertex, exceed_fraction })
}

/// Sample mean and its normal-approximation standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let stderr = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr }
    }
}

fn sample_variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    // Shifting by the first value keeps constant sequences at exactly zero.
    let shift = values[0];
    let n = values.len() as f64;
    let mean = values.iter().map(|v| v - shift).sum::<f64>() / n;
    values.iter().map(|v| (v - shift - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// `E mu(x_I x_J)` for a uniform vertex `I` and uniform neighbour `J`, i.e. the average of
/// `x_i x_j` over edges.
pub fn edge_agreement(batch: &SampleBatch, g: &RegularGraph) -> Result<Estimate, DiagnosticsError> {
    check_batch(batch, g)?;
    let m = g.edges().len() as f64;
    let values: Vec<f64> = batch
        .configs()
        .iter()
        .map(|c| g.edges().iter().map(|&(a, b)| (c.get(a) * c.get(b)) as i64).sum::<i64>() as f64 / m)
        .collect();
    Ok(Estimate::from_values(&values))
}

/// Minus-state indicators `F_i(ell, delta)` of every vertex for one configuration.
fn f_indicators(config: &SpinConfig, index: &BallIndex, delta: f64) -> Vec<bool> {
    let spins = config.spins();
    (0..index.len())
        .map(|i| {
            let ball = index.vertices(i);
            let sum: i64 = ball.iter().map(|&v| spins[v] as i64).sum();
            sum as f64 <= -delta * ball.len() as f64
        })
        .collect()
}

/// `F_i = 1` iff `sum_{j in B_i(ell)} x_j <= -delta |B_i(ell)|`.
pub fn f_indicator(config: &SpinConfig, g: &RegularGraph, i: usize, ell: usize, delta: f64) -> u8 {
    let b = crate::graph::ball(g, i, ell);
    let sum: i64 = b.vertices.iter().map(|&v| config.get(v) as i64).sum();
    u8::from(sum as f64 <= -delta * b.len() as f64)
}

/// Upper bound on the census for non-negative magnetization on large tree-like graphs.
pub fn census_bound(delta: f64) -> f64 {
    1.0 / (1.0 + delta / 2.0)
}

fn census_with_index(config: &SpinConfig, index: &BallIndex, delta: f64) -> f64 {
    let f = f_indicators(config, index, delta);
    let census = f.iter().filter(|&&x| x).count() as f64 / f.len() as f64;
    if config.magnetization() >= 0 && index.tree_fraction() > 0.99 && census > census_bound(delta) {
        log::warn!(
            "F-census {census:.4} exceeds 1/(1+delta/2) = {:.4} at n = {}; the bound is asymptotic",
            census_bound(delta),
            index.len()
        );
    }
    census
}

/// Fraction of vertices in the minus state.
pub fn f_census(config: &SpinConfig, g: &RegularGraph, ell: usize, delta: f64) -> f64 {
    census_with_index(config, &BallIndex::new(g, ell), delta)
}

fn disagreement_with_index(config: &SpinConfig, g: &RegularGraph, index: &BallIndex, delta: f64) -> f64 {
    let f = f_indicators(config, index, delta);
    g.edges().iter().filter(|&&(a, b)| f[a] != f[b]).count() as f64 / g.edges().len() as f64
}

/// Fraction of edges whose endpoints disagree on `F`.
pub fn f_disagreement(config: &SpinConfig, g: &RegularGraph, ell: usize, delta: f64) -> f64 {
    disagreement_with_index(config, g, &BallIndex::new(g, ell), delta)
}

/// Mean F-census over a batch: the empirical weight of the minus phase.
pub fn q_hat(batch: &SampleBatch, g: &RegularGraph, ell: usize, delta: f64) -> Result<f64, DiagnosticsError> {
    check_batch(batch, g)?;
    let index = BallIndex::new(g, ell);
    Ok(batch.configs().iter().map(|c| census_with_index(c, &index, delta)).sum::<f64>() / batch.len() as f64)
}

pub fn f_disagreement_mean(batch: &SampleBatch, g: &RegularGraph, ell: usize, delta: f64) -> Result<f64, DiagnosticsError> {
    check_batch(batch, g)?;
    let index = BallIndex::new(g, ell);
    Ok(batch.configs().iter().map(|c| disagreement_with_index(c, g, &index, delta)).sum::<f64>() / batch.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Anticoncentration {
    /// `sup_m P(M = m) * sqrt(|I|)`.
    pub statistic: f64,
    pub sup_probability: f64,
    pub independent_set_size: usize,
    /// The batch is a point mass in `M`.
    pub degenerate: bool,
}

/// Largest empirical point probability of the magnetization, scaled by the square root of a
/// greedy independent-set size.
pub fn anticoncentration(batch: &SampleBatch, g: &RegularGraph) -> Result<Anticoncentration, DiagnosticsError> {
    check_batch(batch, g)?;
    let mut counts = std::collections::BTreeMap::<i64, usize>::new();
    for c in batch.configs() {
        *counts.entry(c.magnetization()).or_default() += 1;
    }
    let max = *counts.values().max().expect("nonempty");
    let sup_probability = max as f64 / batch.len() as f64;
    let independent_set_size = greedy_independent_set(g).len();
    Ok(Anticoncentration {
        statistic: sup_probability * (independent_set_size as f64).sqrt(),
        sup_probability,
        independent_set_size,
        degenerate: counts.len() == 1,
    })
}

/// Bounded functions of a vertex's ball.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalFunction {
    Constant(f64),
    /// `f_i = x_i`.
    Spin,
    /// Fraction of the center's neighbours that agree with it (radius >= 1).
    NeighbourAgreement,
}

impl LocalFunction {
    /// Radius of the ball the function reads.
    pub fn radius(self) -> usize {
        match self {
            LocalFunction::Constant(_) | LocalFunction::Spin => 0,
            LocalFunction::NeighbourAgreement => 1,
        }
    }

    /// Evaluates on ball spins in canonical order (center first, then its neighbours).
    pub fn evaluate(self, ball_spins: &[i8], k: usize) -> f64 {
        match self {
            LocalFunction::Constant(c) => c,
            LocalFunction::Spin => ball_spins[0] as f64,
            LocalFunction::NeighbourAgreement => {
                let agree = ball_spins[1..=k].iter().filter(|&&s| s == ball_spins[0]).count();
                agree as f64 / k as f64
            }
        }
    }
}

/// Variance across the batch of `(1/n) sum_i f_i(x_{B_i(ell)})`.
pub fn local_average_variance<F>(batch: &SampleBatch, g: &RegularGraph, ell: usize, f: F) -> Result<f64, DiagnosticsError>
where
    F: Fn(usize, &[i8]) -> f64,
{
    check_batch(batch, g)?;
    let index = BallIndex::new(g, ell);
    let mut scratch = Vec::new();
    let averages: Vec<f64> = batch
        .configs()
        .iter()
        .map(|c| {
            let spins = c.spins();
            let total: f64 = (0..g.n())
                .map(|i| {
                    scratch.clear();
                    scratch.extend(index.vertices(i).iter().map(|&v| spins[v]));
                    f(i, &scratch)
                })
                .sum();
            total / g.n() as f64
        })
        .collect();
    Ok(sample_variance(&averages))
}

/// Variance of the local average of a built-in [`LocalFunction`].
pub fn local_function_variance(batch: &SampleBatch, g: &RegularGraph, f: LocalFunction) -> Result<f64, DiagnosticsError> {
    let k = g.k();
    local_average_variance(batch, g, f.radius(), |_, spins| f.evaluate(spins, k))
}

/// Options for assembling a [`ConvergenceReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportSettings {
    pub t: usize,
    pub ell: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub averaging: Averaging,
}

/// Statistics of one batch against one tree reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub n: usize,
    pub samples: usize,
    pub conditioned: bool,
    pub t: usize,
    pub tree_fraction: f64,
    pub mode_a_tv: f64,
    pub mode_c_tv_per_vertex: Vec<f64>,
    pub mode_c_mean_tv: f64,
    pub mode_c_exceed_fraction: f64,
    pub edge_agreement: f64,
    pub edge_agreement_stderr: f64,
    pub f_census_mean: f64,
    pub f_disagreement_mean: f64,
    pub q_hat: f64,
    pub anticoncentration_sup: f64,
}

impl ConvergenceReport {
    pub fn compute(
        batch: &SampleBatch,
        g: &RegularGraph,
        reference: &TreeMarginal,
        settings: &ReportSettings,
    ) -> Result<Self, DiagnosticsError> {
        check_batch(batch, g)?;
        check_reference(g, settings.t, reference)?;
        let balls = BallIndex::new(g, settings.t);
        let mode_a_tv = mode_a_with_index(batch, &balls, reference, settings.averaging)?;
        let mode_c = mode_c_with_index(batch, &balls, reference, settings.epsilon, settings.averaging)?;
        let energy = edge_agreement(batch, g)?;
        let f_index = BallIndex::new(g, settings.ell);
        let census: f64 =
            batch.configs().iter().map(|c| census_with_index(c, &f_index, settings.delta)).sum::<f64>() / batch.len() as f64;
        let disagreement: f64 = batch
            .configs()
            .iter()
            .map(|c| disagreement_with_index(c, g, &f_index, settings.delta))
            .sum::<f64>()
            / batch.len() as f64;
        let mode_c_mean_tv = mode_c.per_vertex.iter().sum::<f64>() / mode_c.per_vertex.len() as f64;
        Ok(Self {
            n: g.n(),
            samples: batch.len(),
            conditioned: batch.meta().conditioned,
            t: settings.t,
            tree_fraction: balls.tree_fraction(),
            mode_a_tv,
            mode_c_tv_per_vertex: mode_c.per_vertex,
            mode_c_mean_tv,
            mode_c_exceed_fraction: mode_c.exceed_fraction,
            edge_agreement: energy.mean,
            edge_agreement_stderr: energy.stderr,
            f_census_mean: census,
            f_disagreement_mean: disagreement,
            q_hat: census,
            anticoncentration_sup: anticoncentration(batch, g)?.sup_probability,
        })
    }

    pub fn csv_header() -> &'static str {
        "n,samples,conditioned,t,tree_fraction,mode_a_tv,mode_c_mean_tv,mode_c_exceed_fraction,\
         edge_agreement,edge_agreement_stderr,f_census_mean,f_disagreement_mean,q_hat,anticoncentration_sup"
    }

    /// One CSV row matching [`ConvergenceReport::csv_header`]; per-vertex TVs are summarized.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            self.n,
            self.samples,
            self.conditioned,
            self.t,
            self.tree_fraction,
            self.mode_a_tv,
            self.mode_c_mean_tv,
            self.mode_c_exceed_fraction,
            self.edge_agreement,
            self.edge_agreement_stderr,
            self.f_census_mean,
            self.f_disagreement_mean,
            self.q_hat,
            self.anticoncentration_sup
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{BatchMeta, SampleBatch, Algorithm};
    use crate::tree::{mixture_marginal, IsingParams};

    fn batch_of(configs: Vec<SpinConfig>) -> SampleBatch {
        let n = configs[0].len();
        let meta = BatchMeta {
            graph_hash: String::new(),
            n,
            beta: 0.0,
            field: 0.0,
            algorithm: Algorithm::Glauber,
            burn_in: 0,
            thin: 1,
            flip_symmetry: false,
            seed: 0,
            conditioned: false,
        };
        SampleBatch::new(configs, meta).unwrap()
    }

    #[test]
    fn tv_basics() {
        let p = [0.25, 0.25, 0.5];
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(tv_distance(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), 0.5);
        assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn single_config_gives_point_mass() {
        let g = RegularGraph::petersen();
        let c = SpinConfig::new(vec![1, -1, 1, 1, -1, 1, 1, 1, -1, 1]).unwrap();
        let law = empirical_ball_law(&batch_of(vec![c]), &g, 0, 1).unwrap();
        assert!(law.tree_shaped);
        // Ball order: 0, then neighbours 1, 4, 5.
        let pattern = crate::pattern_index([1i8, -1, -1, 1]);
        assert_eq!(law.probs[pattern], 1.0);
        assert_eq!(law.probs.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn f_indicator_cases() {
        let g = RegularGraph::petersen();
        let plus = SpinConfig::all_plus(10);
        let mut minus = plus.clone();
        minus.flip_all();
        for i in 0..10 {
            assert_eq!(f_indicator(&plus, &g, i, 1, 0.3), 0);
            assert_eq!(f_indicator(&minus, &g, i, 1, 0.99), 1);
        }
        // Ball of 0 at radius 1 is {0, 1, 4, 5}: two plus, two minus.
        let half = SpinConfig::new(vec![1, 1, -1, -1, -1, -1, 1, 1, 1, 1]).unwrap();
        assert_eq!(f_indicator(&half, &g, 0, 1, 0.1), 0);
        assert_eq!(f_indicator(&half, &g, 0, 1, 0.0), 1);
        assert_eq!(f_census(&plus, &g, 1, 0.3), 0.0);
        assert_eq!(f_census(&minus, &g, 1, 0.3), 1.0);
        assert_eq!(f_disagreement(&minus, &g, 1, 0.3), 0.0);
    }

    #[test]
    fn point_batches() {
        let g = RegularGraph::petersen();
        let b = batch_of(vec![SpinConfig::all_plus(10); 5]);
        let e = edge_agreement(&b, &g).unwrap();
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));
        let a = anticoncentration(&b, &g).unwrap();
        assert!(a.degenerate);
        assert_eq!(a.sup_probability, 1.0);
        assert_eq!(a.statistic, (a.independent_set_size as f64).sqrt());
        assert_eq!(local_function_variance(&b, &g, LocalFunction::Spin).unwrap(), 0.0);
        assert_eq!(local_function_variance(&b, &g, LocalFunction::Constant(0.3)).unwrap(), 0.0);
        assert_eq!(q_hat(&b, &g, 1, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn mismatched_inputs() {
        let g = RegularGraph::petersen();
        let b = batch_of(vec![SpinConfig::all_plus(4)]);
        assert!(matches!(edge_agreement(&b, &g), Err(DiagnosticsError::Mismatch(_))));
        let b = batch_of(vec![SpinConfig::all_plus(10)]);
        let p = IsingParams::new(3, 1.0).unwrap();
        let wrong_depth = mixture_marginal(&p, 2, 10).unwrap();
        assert!(mode_a_statistic(&b, &g, 1, &wrong_depth, Averaging::Plain).is_err());
    }

    #[test]
    fn non_tree_balls_count_fully() {
        let g = RegularGraph::complete_k4();
        let p = IsingParams::new(3, 1.0).unwrap();
        let reference = mixture_marginal(&p, 1, 10).unwrap();
        let b = batch_of(vec![SpinConfig::all_plus(4)]);
        assert!((mode_a_statistic(&b, &g, 1, &reference, Averaging::Plain).unwrap() - 1.0).abs() < 1e-12);
        let c = mode_c_statistic(&b, &g, 1, &reference, 0.5, Averaging::Plain).unwrap();
        assert_eq!(c.per_vertex, vec![1.0; 4]);
        assert_eq!(c.exceed_fraction, 1.0);
    }

    #[test]
    fn flip_symmetric_averaging_symmetrizes() {
        let g = RegularGraph::petersen();
        let p = IsingParams::new(3, 1.0).unwrap();
        let reference = mixture_marginal(&p, 1, 10).unwrap();
        let plus = batch_of(vec![SpinConfig::all_plus(10)]);
        let mut m = SpinConfig::all_plus(10);
        m.flip_all();
        let both = batch_of(vec![SpinConfig::all_plus(10), m]);
        let a = mode_a_statistic(&plus, &g, 1, &reference, Averaging::FlipSymmetric).unwrap();
        let b = mode_a_statistic(&both, &g, 1, &reference, Averaging::Plain).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn neighbour_agreement_function() {
        assert_eq!(LocalFunction::NeighbourAgreement.evaluate(&[1, 1, -1, 1], 3), 2.0 / 3.0);
        assert_eq!(LocalFunction::Spin.evaluate(&[-1], 3), -1.0);
    }
}
