use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::{GraphError, RegularGraph};

pub const EXACT_EXPANSION_MAX_N: usize = 24;
pub const SPECTRAL_EXPANSION_MAX_N: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpansionMethod {
    Exact,
    Spectral,
}

/// Edge-expansion estimate: every `S` with `|S| <= gamma * n` has `|∂S| >= lambda * |S|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub gamma: f64,
    pub lambda: f64,
    pub method: ExpansionMethod,
    /// A set attaining the minimum ratio (exact method only).
    pub witness: Option<Vec<usize>>,
}

/// Number of edges with exactly one endpoint in `set`. Duplicates in `set` are ignored.
pub fn edge_boundary(g: &RegularGraph, set: &[usize]) -> usize {
    let mut inside = vec![false; g.n()];
    for &v in set {
        inside[v] = true;
    }
    g.edges().iter().filter(|&&(a, b)| inside[a] != inside[b]).count()
}

pub fn expansion_lower_bound(
    g: &RegularGraph,
    gamma: f64,
    method: ExpansionMethod,
) -> Result<ExpansionReport, GraphError> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(GraphError::Invalid(format!("gamma must lie in (0, 1], got {gamma}")));
    }
    match method {
        ExpansionMethod::Exact => exact_expansion(g, gamma),
        ExpansionMethod::Spectral => spectral_expansion(g, gamma),
    }
}

fn exact_expansion(g: &RegularGraph, gamma: f64) -> Result<ExpansionReport, GraphError> {
    let n = g.n();
    if n > EXACT_EXPANSION_MAX_N {
        return Err(GraphError::SizeLimit { what: "exact expansion", n, max: EXACT_EXPANSION_MAX_N });
    }
    let max_size = ((gamma * n as f64) + 1e-9).floor() as u32;
    if max_size == 0 {
        return Err(GraphError::Invalid(format!("gamma * n < 1 leaves no admissible set (n = {n})")));
    }
    let masks: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    // Compare ratios boundary/size exactly as fractions.
    let mut best: Option<(usize, u32, u32)> = None;
    for s in 1u32..(1u32 << n) {
        let size = s.count_ones();
        if size > max_size {
            continue;
        }
        let mut boundary = 0u32;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            boundary += (masks[v] & !s).count_ones();
        }
        let better = match best {
            None => true,
            Some((_, bb, bs)) => (boundary as u64) * (bs as u64) < (bb as u64) * (size as u64),
        };
        if better {
            best = Some((s as usize, boundary, size));
        }
    }
    let (set, boundary, size) = best.expect("at least one singleton is admissible");
    let witness = (0..n).filter(|&v| set >> v & 1 == 1).collect();
    Ok(ExpansionReport {
        gamma,
        lambda: boundary as f64 / size as f64,
        method: ExpansionMethod::Exact,
        witness: Some(witness),
    })
}

/// Cheeger-type bound from the second adjacency eigenvalue.
///
/// For `|S| <= gamma * n`, `|∂S| >= (k - λ₂) |S| (n - |S|) / n >= (k - λ₂)(1 - gamma) |S|`,
/// which is `(k - λ₂) / 2` at `gamma = 1/2`.
fn spectral_expansion(g: &RegularGraph, gamma: f64) -> Result<ExpansionReport, GraphError> {
    let n = g.n();
    if n > SPECTRAL_EXPANSION_MAX_N {
        return Err(GraphError::SizeLimit { what: "spectral expansion", n, max: SPECTRAL_EXPANSION_MAX_N });
    }
    let mut a = DMatrix::<f64>::zeros(n, n);
    for &(x, y) in g.edges() {
        a[(x, y)] = 1.0;
        a[(y, x)] = 1.0;
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    let k = g.k() as f64;
    // Round λ₂ up so the bound stays certified under eigensolver rounding.
    let lambda2 = eig.get(1).copied().unwrap_or(k) + 1e-9 * k;
    let lambda = ((k - lambda2) * (1.0 - gamma)).max(0.0);
    Ok(ExpansionReport { gamma, lambda, method: ExpansionMethod::Spectral, witness: None })
}

/// Greedy maximal independent set scanning vertices by ascending id.
pub fn greedy_independent_set(g: &RegularGraph) -> Vec<usize> {
    let mut blocked = vec![false; g.n()];
    let mut set = Vec::new();
    for v in 0..g.n() {
        if !blocked[v] {
            set.push(v);
            blocked[v] = true;
            for &w in g.neighbors(v) {
                blocked[w] = true;
            }
        }
    }
    set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate_random_regular;

    #[test]
    fn boundary_of_trivial_sets() {
        let g = RegularGraph::petersen();
        assert_eq!(edge_boundary(&g, &[]), 0);
        assert_eq!(edge_boundary(&g, &(0..10).collect::<Vec<_>>()), 0);
        assert_eq!(edge_boundary(&RegularGraph::complete_k4(), &[0, 1]), 4);
        assert_eq!(edge_boundary(&RegularGraph::complete_k4(), &[0, 1, 1]), 4);
    }

    #[test]
    fn k4_exact_expansion_is_two() {
        let r = expansion_lower_bound(&RegularGraph::complete_k4(), 0.5, ExpansionMethod::Exact).unwrap();
        assert_eq!(r.lambda, 2.0);
        let w = r.witness.unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(edge_boundary(&RegularGraph::complete_k4(), &w), 4);
    }

    #[test]
    fn disconnected_graph_has_zero_expansion() {
        let k4 = RegularGraph::complete_k4();
        let g = RegularGraph::disjoint_union(&[k4.clone(), k4]).unwrap();
        let r = expansion_lower_bound(&g, 0.5, ExpansionMethod::Exact).unwrap();
        assert_eq!(r.lambda, 0.0);
        let w = r.witness.unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(edge_boundary(&g, &w), 0);
    }

    #[test]
    fn petersen_spectral_bound() {
        let g = RegularGraph::petersen();
        let s = expansion_lower_bound(&g, 0.5, ExpansionMethod::Spectral).unwrap();
        assert!((s.lambda - 1.0).abs() < 1e-6, "{}", s.lambda);
        let e = expansion_lower_bound(&g, 0.5, ExpansionMethod::Exact).unwrap();
        assert_eq!(e.lambda, 1.0);
        assert!(e.lambda >= s.lambda);
    }

    #[test]
    fn size_limits() {
        let g = generate_random_regular(26, 3, 1).unwrap();
        assert!(matches!(
            expansion_lower_bound(&g, 0.5, ExpansionMethod::Exact),
            Err(GraphError::SizeLimit { .. })
        ));
        assert!(expansion_lower_bound(&g, 0.0, ExpansionMethod::Spectral).is_err());
    }

    #[test]
    fn greedy_set_is_maximal_and_independent() {
        let g = generate_random_regular(500, 3, 3).unwrap();
        let set = greedy_independent_set(&g);
        let mut inside = vec![false; g.n()];
        set.iter().for_each(|&v| inside[v] = true);
        assert!(g.edges().iter().all(|&(a, b)| !(inside[a] && inside[b])));
        assert!((0..g.n()).all(|v| inside[v] || g.neighbors(v).iter().any(|&w| inside[w])));
        assert!(set.len() * (g.k() + 1) >= g.n());
    }
}
