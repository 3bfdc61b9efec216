use std::fmt;
use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::structure::RegularTree;
use super::{edge_message, root_magnetization, solve_fixed_point, IsingParams, TreeError};

/// Largest tree for which a full probability table (`2^spins` entries) is materialized.
pub const MAX_TABLE_SPINS: usize = 22;

/// Boundary condition defining a measure on `T_k(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// All spins at depth `t_plus` forced to `+1`.
    Plus { t_plus: usize },
    /// All spins at depth `t_plus` forced to `-1`.
    Minus { t_plus: usize },
    /// No forcing.
    Free,
    /// Equal-weight mixture of plus and minus.
    Mixture { t_plus: usize },
    /// Every vertex just outside the ball has cavity field `h_leaf`.
    LeafField(f64),
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Boundary::Plus { t_plus } => write!(f, "plus(t_plus={t_plus})"),
            Boundary::Minus { t_plus } => write!(f, "minus(t_plus={t_plus})"),
            Boundary::Free => write!(f, "free"),
            Boundary::Mixture { t_plus } => write!(f, "mixture(t_plus={t_plus})"),
            Boundary::LeafField(h) => write!(f, "leaf_field(h={h})"),
        }
    }
}

/// Which extremal measure a tree statistic is evaluated under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Plus,
    Minus,
}

/// Ising model on `T_k(t)` with uniform coupling and arbitrary per-vertex fields.
///
/// Every boundary condition reduces to this form: the influence of the spins outside the ball
/// is summarized by fields on the depth-`t` vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    tree: RegularTree,
    beta: f64,
    fields: Vec<f64>,
}

impl TreeModel {
    pub fn new(tree: RegularTree, beta: f64, fields: Vec<f64>) -> Self {
        assert_eq!(tree.len(), fields.len());
        Self { tree, beta, fields }
    }

    pub fn tree(&self) -> &RegularTree {
        &self.tree
    }

    pub fn fields(&self) -> &[f64] {
        &self.fields
    }

    /// Spin-flip image.
    pub fn flipped(&self) -> Self {
        Self { fields: self.fields.iter().map(|f| -f).collect(), ..self.clone() }
    }

    /// Upward cavity fields: `H_v` is the field on `v` from its own subtree and external field.
    fn cavity_fields(&self) -> Vec<f64> {
        let tb = self.beta.tanh();
        let mut h = self.fields.clone();
        for v in (1..self.tree.len()).rev() {
            let p = self.tree.parent(v).expect("non-root");
            h[p] += edge_message(tb, h[v]);
        }
        h
    }

    /// Total effective fields, so that the single-site mean of `v` is `tanh(F_v)`.
    fn full_fields(&self, cavity: &[f64]) -> Vec<f64> {
        let tb = self.beta.tanh();
        let mut full = cavity.to_vec();
        for v in 1..self.tree.len() {
            let p = self.tree.parent(v).expect("non-root");
            let parent_excl = full[p] - edge_message(tb, cavity[v]);
            full[v] = cavity[v] + edge_message(tb, parent_excl);
        }
        full
    }

    pub fn vertex_means(&self) -> Vec<f64> {
        let cavity = self.cavity_fields();
        self.full_fields(&cavity).iter().map(|f| f.tanh()).collect()
    }

    /// `E[x_parent(c) x_c]` for every non-root `c` (index 0 is unused and set to `NaN`).
    pub fn edge_expectations(&self) -> Vec<f64> {
        let tb = self.beta.tanh();
        let cavity = self.cavity_fields();
        let full = self.full_fields(&cavity);
        let mut out = vec![f64::NAN; self.tree.len()];
        for c in 1..self.tree.len() {
            let p = self.tree.parent(c).expect("non-root");
            let a = (full[p] - edge_message(tb, cavity[c])).tanh();
            let b = cavity[c].tanh();
            out[c] = (tb + a * b) / (1.0 + tb * a * b);
        }
        out
    }

    fn log_weight(&self, index: usize) -> f64 {
        let s = |v: usize| crate::spin_at(index, v) as f64;
        let mut w: f64 = self.fields.iter().enumerate().map(|(v, f)| f * s(v)).sum();
        for (p, c) in self.tree.edges() {
            w += self.beta * s(p) * s(c);
        }
        w
    }

    pub fn table(&self) -> Result<Vec<f64>, TreeError> {
        let spins = self.tree.len();
        if spins > MAX_TABLE_SPINS {
            return Err(TreeError::SizeLimit { spins, max: MAX_TABLE_SPINS });
        }
        let mut w: Vec<f64> = (0..1usize << spins).map(|i| self.log_weight(i)).collect();
        let max = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        w.iter_mut().for_each(|x| *x = (*x - max).exp());
        let z = compensated_sum(&w);
        w.iter_mut().for_each(|x| *x /= z);
        Ok(w)
    }

    /// Exact draw: root from its marginal, then each child given its parent.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<i8> {
        let cavity = self.cavity_fields();
        let full_root = cavity[0];
        let mut spins = vec![0i8; self.tree.len()];
        spins[0] = draw(rng, full_root);
        for c in 1..self.tree.len() {
            let p = self.tree.parent(c).expect("non-root");
            spins[c] = draw(rng, self.beta * spins[p] as f64 + cavity[c]);
        }
        spins
    }
}

/// Neumaier summation; plain accumulation over `2^22` entries drifts by ~1e-11.
pub(crate) fn compensated_sum(values: &[f64]) -> f64 {
    let (mut sum, mut c) = (0.0f64, 0.0f64);
    for &x in values {
        let t = sum + x;
        c += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + c
}

/// `+1` with probability `(1 + tanh(field)) / 2`.
fn draw<R: Rng + ?Sized>(rng: &mut R, field: f64) -> i8 {
    let p_plus = 0.5 * (1.0 + field.tanh());
    if rng.gen::<f64>() < p_plus {
        1
    } else {
        -1
    }
}

/// Exact law of the spins on `T_k(t)` under a boundary condition.
///
/// Held as a weighted mixture of [`TreeModel`]s (message form, any depth). When the tree has
/// at most [`MAX_TABLE_SPINS`] vertices the full probability table over `{-1,+1}^{T_k(t)}` is
/// also materialized, indexed by packed configuration in canonical vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeMarginal {
    t: usize,
    boundary: Boundary,
    components: Vec<(f64, TreeModel)>,
    table: Option<Vec<f64>>,
}

impl TreeMarginal {
    fn from_components(t: usize, boundary: Boundary, components: Vec<(f64, TreeModel)>) -> Self {
        let table = if components[0].1.tree.len() <= MAX_TABLE_SPINS {
            let mut acc: Option<Vec<f64>> = None;
            for (w, m) in &components {
                let tab = m.table().expect("size checked");
                acc = Some(match acc {
                    None => tab.into_iter().map(|x| w * x).collect(),
                    Some(mut a) => {
                        a.iter_mut().zip(tab).for_each(|(a, x)| *a += w * x);
                        a
                    }
                });
            }
            acc
        } else {
            None
        };
        Self { t, boundary, components, table }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn tree(&self) -> &RegularTree {
        &self.components[0].1.tree
    }

    /// Number of spins, `|T_k(t)|`.
    pub fn len(&self) -> usize {
        self.tree().len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn components(&self) -> &[(f64, TreeModel)] {
        &self.components
    }

    pub fn table(&self) -> Result<&[f64], TreeError> {
        self.table
            .as_deref()
            .ok_or(TreeError::SizeLimit { spins: self.len(), max: MAX_TABLE_SPINS })
    }

    pub fn vertex_means(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (w, m) in &self.components {
            out.iter_mut().zip(m.vertex_means()).for_each(|(o, x)| *o += w * x);
        }
        out
    }

    pub fn root_mean(&self) -> f64 {
        self.vertex_means()[0]
    }

    /// `E[x_o x_1]` for the root and its first child.
    pub fn root_edge_expectation(&self) -> f64 {
        assert!(self.t >= 1, "root edge needs depth >= 1");
        self.components.iter().map(|(w, m)| w * m.edge_expectations()[1]).sum()
    }

    pub fn edge_expectations(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (w, m) in &self.components {
            out.iter_mut().zip(m.edge_expectations()).for_each(|(o, x)| *o += w * x);
        }
        out
    }

    pub fn tv_distance(&self, other: &TreeMarginal) -> Result<f64, TreeError> {
        let (a, b) = (self.table()?, other.table()?);
        if a.len() != b.len() {
            return Err(TreeError::InvalidDepth("marginals live on different trees".into()));
        }
        Ok(0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<i8> {
        let mut u: f64 = rng.gen();
        for (w, m) in &self.components {
            if u < *w {
                return m.sample(rng);
            }
            u -= w;
        }
        self.components.last().expect("nonempty").1.sample(rng)
    }

    /// CSV `index,probability` with a comment header documenting the spin ordering.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let table = self
            .table()
            .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e.to_string()))?;
        let tree = self.tree();
        writeln!(w, "# tree marginal on T_k(t), k={}, t={}, boundary={}", tree.k(), self.t, self.boundary)?;
        writeln!(
            w,
            "# vertex order: canonical BFS (root=0, children of each vertex consecutive, in parent order)"
        )?;
        writeln!(w, "# index bit j set <=> spin of vertex j is +1")?;
        let parents: Vec<String> = (1..tree.len()).map(|c| tree.parent(c).unwrap().to_string()).collect();
        writeln!(w, "# parents of vertices 1..: {}", parents.join(" "))?;
        writeln!(w, "index,probability")?;
        for (i, p) in table.iter().enumerate() {
            writeln!(w, "{i},{p:.16e}")?;
        }
        Ok(())
    }
}

fn check_depths(t: usize, t_plus: usize) -> Result<(), TreeError> {
    if t_plus <= t {
        return Err(TreeError::InvalidDepth(format!("t_plus = {t_plus} must exceed t = {t}")));
    }
    Ok(())
}

/// Message into a depth-`t` vertex from a child when all depth-`t_plus` spins are `+1`.
fn plus_boundary_message(p: &IsingParams, t: usize, t_plus: usize) -> f64 {
    let tb = p.beta.tanh();
    // A forced +1 spin sends atanh(tanh(beta)) = beta.
    let mut u = p.beta;
    for _ in (t + 1)..t_plus {
        u = edge_message(tb, (p.k as f64 - 1.0) * u);
    }
    u
}

fn model_with_boundary_message(p: &IsingParams, t: usize, u: f64) -> TreeModel {
    let tree = RegularTree::new(p.k, t);
    let fields = (0..tree.len()).map(|v| tree.outside_degree(v) as f64 * u).collect();
    TreeModel::new(tree, p.beta, fields)
}

/// Law on `T_k(t)` of the depth-`t_plus` model with all depth-`t_plus` spins fixed to `+1`.
pub fn plus_boundary_marginal(p: &IsingParams, t: usize, t_plus: usize) -> Result<TreeMarginal, TreeError> {
    p.require_zero_field()?;
    check_depths(t, t_plus)?;
    let model = model_with_boundary_message(p, t, plus_boundary_message(p, t, t_plus));
    Ok(TreeMarginal::from_components(t, Boundary::Plus { t_plus }, vec![(1.0, model)]))
}

pub fn minus_boundary_marginal(p: &IsingParams, t: usize, t_plus: usize) -> Result<TreeMarginal, TreeError> {
    p.require_zero_field()?;
    check_depths(t, t_plus)?;
    let model = model_with_boundary_message(p, t, -plus_boundary_message(p, t, t_plus));
    Ok(TreeMarginal::from_components(t, Boundary::Minus { t_plus }, vec![(1.0, model)]))
}

/// Free boundary; its restriction to `T_k(t)` does not depend on the outer depth.
pub fn free_boundary_marginal(p: &IsingParams, t: usize) -> Result<TreeMarginal, TreeError> {
    p.require_zero_field()?;
    Ok(TreeMarginal::from_components(t, Boundary::Free, vec![(1.0, model_with_boundary_message(p, t, 0.0))]))
}

pub fn mixture_marginal(p: &IsingParams, t: usize, t_plus: usize) -> Result<TreeMarginal, TreeError> {
    p.require_zero_field()?;
    check_depths(t, t_plus)?;
    let plus = model_with_boundary_message(p, t, plus_boundary_message(p, t, t_plus));
    let minus = plus.flipped();
    // Build the table from the plus table alone so that it is exactly flip symmetric.
    let table = plus.table().ok().map(|a| {
        let full = a.len() - 1;
        (0..a.len()).map(|i| 0.5 * (a[i] + a[full ^ i])).collect()
    });
    Ok(TreeMarginal {
        t,
        boundary: Boundary::Mixture { t_plus },
        components: vec![(0.5, plus), (0.5, minus)],
        table,
    })
}

/// Every vertex just outside `T_k(t)` carries cavity field `h_leaf`.
pub fn leaf_field_marginal(p: &IsingParams, t: usize, h_leaf: f64) -> Result<TreeMarginal, TreeError> {
    p.require_zero_field()?;
    let u = edge_message(p.beta.tanh(), h_leaf);
    Ok(TreeMarginal::from_components(t, Boundary::LeafField(h_leaf), vec![(1.0, model_with_boundary_message(p, t, u))]))
}

/// Restriction of the infinite-volume plus measure: leaf field equal to the fixed point.
pub fn plus_limit_marginal(p: &IsingParams, t: usize) -> Result<TreeMarginal, TreeError> {
    leaf_field_marginal(p, t, solve_fixed_point(p)?.h)
}

fn f_threshold(tree_len: usize, delta: f64) -> f64 {
    -delta * tree_len as f64
}

fn check_delta(p: &IsingParams, delta: f64) -> Result<(), TreeError> {
    let rho = root_magnetization(p)?;
    if !(delta > 0.0 && delta < rho) {
        return Err(TreeError::InvalidDelta { delta, rho });
    }
    Ok(())
}

/// `nu_phase(F_o(ell, delta) = 1)`: probability that the average spin on `T_k(ell)` is at most
/// `-delta`.
///
/// Exact summation over the probability table when `|T_k(ell)| <= MAX_TABLE_SPINS`; otherwise
/// an estimate from `nsamples` exact top-down draws.
pub fn f_statistic_tree(
    p: &IsingParams,
    phase: Phase,
    ell: usize,
    delta: f64,
    nsamples: usize,
    seed: u64,
) -> Result<f64, TreeError> {
    check_delta(p, delta)?;
    let marginal = plus_limit_marginal(p, ell)?;
    let Ok(table) = marginal.table() else {
        return f_statistic_tree_sampled(p, phase, ell, delta, nsamples, seed);
    };
    let threshold = f_threshold(marginal.len(), delta);
    let sign = match phase {
        Phase::Plus => 1.0,
        Phase::Minus => -1.0,
    };
    Ok(table
        .iter()
        .enumerate()
        .filter(|&(i, _)| {
            let sum = 2.0 * i.count_ones() as f64 - marginal.len() as f64;
            sign * sum <= threshold
        })
        .map(|(_, p)| p)
        .sum())
}

/// Monte Carlo version of [`f_statistic_tree`] using exact top-down sampling.
pub fn f_statistic_tree_sampled(
    p: &IsingParams,
    phase: Phase,
    ell: usize,
    delta: f64,
    nsamples: usize,
    seed: u64,
) -> Result<f64, TreeError> {
    check_delta(p, delta)?;
    if nsamples == 0 {
        return Err(TreeError::InvalidParams("nsamples must be positive".into()));
    }
    let mut model = plus_limit_marginal(p, ell)?.components[0].1.clone();
    if phase == Phase::Minus {
        model = model.flipped();
    }
    let threshold = f_threshold(model.tree.len(), delta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..nsamples)
        .filter(|_| {
            let sum: i64 = model.sample(&mut rng).iter().map(|&s| s as i64).sum();
            sum as f64 <= threshold
        })
        .count();
    Ok(hits as f64 / nsamples as f64)
}

/// Largest total-variation gap between the conditional law of `T_k(t)` given the spins on
/// depths `t+1 .. t_plus`, taken from the plus-boundary measure, and the Ising specification
/// `exp(beta * sum over E(T_k(t+1)) of x_i x_j)`.
///
/// The maximum runs over every shell configuration of positive probability.
pub fn dlr_check(p: &IsingParams, t: usize, t_plus: usize) -> Result<f64, TreeError> {
    p.require_zero_field()?;
    check_depths(t, t_plus)?;
    // Joint law of all free spins: the plus measure on T_k(t_plus - 1).
    let outer_depth = t_plus - 1;
    let joint = plus_boundary_marginal(p, outer_depth, t_plus)?;
    let table = joint.table()?;
    let outer = joint.tree();
    let inner = RegularTree::new(p.k, t);
    let n_inner = inner.len();
    let inner_mask = (1usize << n_inner) - 1;

    // Conditional of the inner spins for each shell assignment (the high bits of the index).
    let n_shell_states = 1usize << (outer.len() - n_inner);
    let mut worst: f64 = 0.0;
    let mut conditional = vec![0.0; 1 << n_inner];
    let mut specification = vec![0.0; 1 << n_inner];
    for shell in 0..n_shell_states {
        let base = shell << n_inner;
        let mass: f64 = (0..=inner_mask).map(|x| table[base | x]).sum();
        if mass <= 0.0 {
            continue;
        }
        for x in 0..=inner_mask {
            conditional[x] = table[base | x] / mass;
        }
        // Spin of a depth-(t+1) vertex: from the shell, or the forced +1 boundary.
        let outside_spin = |v: usize| -> f64 {
            if t + 1 > outer_depth {
                1.0
            } else {
                crate::spin_at(base, v) as f64
            }
        };
        let mut z = 0.0;
        for x in 0..=inner_mask {
            let s = |v: usize| crate::spin_at(x, v) as f64;
            let mut e: f64 = inner.edges().map(|(a, b)| s(a) * s(b)).sum();
            for v in inner.level_range(t) {
                if t + 1 > outer_depth {
                    e += s(v) * outside_spin(0) * inner.outside_degree(v) as f64;
                } else {
                    e += outer.children(v).map(|c| s(v) * outside_spin(c)).sum::<f64>();
                }
            }
            specification[x] = (p.beta * e).exp();
            z += specification[x];
        }
        let tv: f64 = 0.5
            * conditional
                .iter()
                .zip(&specification)
                .map(|(c, s)| (c - s / z).abs())
                .sum::<f64>();
        worst = worst.max(tv);
    }
    Ok(worst)
}
