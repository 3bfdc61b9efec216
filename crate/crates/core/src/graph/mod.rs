//! Simple `k`-regular graphs and the local structure statistics computed on them.

mod ball;
mod expansion;

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use ball::{ball, girth, is_tree_isomorphic, tree_likeness_fraction, Ball, BallIndex};
pub use expansion::{
    edge_boundary, expansion_lower_bound, greedy_independent_set, ExpansionMethod,
    ExpansionReport, EXACT_EXPANSION_MAX_N, SPECTRAL_EXPANSION_MAX_N,
};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid degree: no simple {k}-regular graph on {n} vertices (need k >= 3, n > k, n*k even)")]
    InvalidDegree { n: usize, k: usize },
    #[error("{what} limited to n <= {max}, got n = {n}")]
    SizeLimit { what: &'static str, n: usize, max: usize },
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A simple undirected `k`-regular graph on vertices `0..n`.
///
/// Adjacency lists are sorted ascending and the edge list holds each edge once as `(i, j)`
/// with `i < j`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    k: usize,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl RegularGraph {
    /// Builds a graph from an edge list, checking simplicity and `k`-regularity.
    pub fn from_edges(n: usize, k: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if !(n * k).is_multiple_of(2) {
            return Err(GraphError::Invalid(format!("n*k = {} is odd", n * k)));
        }
        let mut adjacency = vec![Vec::with_capacity(k); n];
        let mut normalized = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::Invalid(format!("edge ({a}, {b}) out of range for n = {n}")));
            }
            if a == b {
                return Err(GraphError::Invalid(format!("self-loop at {a}")));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
            normalized.push((a.min(b), a.max(b)));
        }
        normalized.sort_unstable();
        if normalized.windows(2).any(|w| w[0] == w[1]) {
            return Err(GraphError::Invalid("repeated edge".into()));
        }
        for (v, nbrs) in adjacency.iter_mut().enumerate() {
            if nbrs.len() != k {
                return Err(GraphError::Invalid(format!(
                    "vertex {v} has degree {}, expected {k}",
                    nbrs.len()
                )));
            }
            nbrs.sort_unstable();
        }
        Ok(Self { n, k, adjacency, edges: normalized })
    }

    /// The complete graph on four vertices, the unique simple 3-regular graph of that order.
    pub fn complete_k4() -> Self {
        let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        Self::from_edges(4, 3, &edges).expect("K4 is 3-regular")
    }

    /// The Petersen graph: outer 5-cycle `0..5`, inner pentagram `5..10`, spokes `i -- i+5`.
    pub fn petersen() -> Self {
        let mut edges = Vec::with_capacity(15);
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
            edges.push((i, i + 5));
        }
        Self::from_edges(10, 3, &edges).expect("Petersen graph is 3-regular")
    }

    /// Looks up a built-in graph by (case-insensitive) name.
    pub fn named(name: &str) -> Result<Self, GraphError> {
        match name.to_ascii_lowercase().as_str() {
            "k4" => Ok(Self::complete_k4()),
            "petersen" => Ok(Self::petersen()),
            other => Err(GraphError::Invalid(format!("unknown named graph `{other}`"))),
        }
    }

    /// Disjoint union; component `c` occupies a contiguous block of vertex ids.
    pub fn disjoint_union(parts: &[RegularGraph]) -> Result<Self, GraphError> {
        let k = match parts.first() {
            Some(g) => g.k,
            None => return Err(GraphError::Invalid("disjoint union of zero graphs".into())),
        };
        let mut offset = 0;
        let mut edges = Vec::new();
        for g in parts {
            if g.k != k {
                return Err(GraphError::Invalid("components have different degrees".into()));
            }
            edges.extend(g.edges.iter().map(|&(a, b)| (a + offset, b + offset)));
            offset += g.n;
        }
        Self::from_edges(offset, k, &edges)
    }

    /// Applies the vertex relabeling `v -> perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::Invalid("permutation length differs from n".into()));
        }
        let edges: Vec<_> = self.edges.iter().map(|&(a, b)| (perm[a], perm[b])).collect();
        Self::from_edges(self.n, self.k, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Connected components as lists of vertices, in order of smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut head = 0;
            while head < comp.len() {
                let v = comp[head];
                head += 1;
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Hex SHA-256 of the canonical edge-list serialization.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.to_edge_list_string().as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    /// Plain-text edge list: `n k` header, then one `i j` line per edge (`i < j`, ascending).
    pub fn to_edge_list_string(&self) -> String {
        let mut s = String::with_capacity(8 * self.edges.len() + 16);
        let _ = writeln!(s, "{} {}", self.n, self.k);
        for &(a, b) in &self.edges {
            let _ = writeln!(s, "{a} {b}");
        }
        s
    }

    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<(), GraphError> {
        w.write_all(self.to_edge_list_string().as_bytes())?;
        Ok(())
    }

    /// Reads the edge-list format written by [`RegularGraph::write_edge_list`].
    ///
    /// Blank lines and lines starting with `#` are ignored.
    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize, GraphError> {
                tok.ok_or_else(|| GraphError::Parse { line: idx + 1, msg: "expected two integers".into() })?
                    .parse()
                    .map_err(|e| GraphError::Parse { line: idx + 1, msg: format!("{e}") })
            };
            let a = parse(fields.next())?;
            let b = parse(fields.next())?;
            if fields.next().is_some() {
                return Err(GraphError::Parse { line: idx + 1, msg: "trailing tokens".into() });
            }
            match header {
                None => header = Some((a, b)),
                Some(_) => edges.push((a, b)),
            }
        }
        let (n, k) = header.ok_or(GraphError::Parse { line: 0, msg: "missing `n k` header".into() })?;
        if edges.len() != n * k / 2 {
            return Err(GraphError::Invalid(format!(
                "expected {} edges for n = {n}, k = {k}, found {}",
                n * k / 2,
                edges.len()
            )));
        }
        Self::from_edges(n, k, &edges)
    }
}

/// Uniformly random simple `k`-regular graph on `n` labeled vertices.
///
/// Configuration model: the `n*k` half-edges are matched by a uniform random pairing, and the
/// whole pairing is redrawn whenever it produces a self-loop or a repeated edge. Every simple
/// graph corresponds to exactly `(k!)^n` pairings, so the accepted graph is uniform.
pub fn generate_random_regular(n: usize, k: usize, seed: u64) -> Result<RegularGraph, GraphError> {
    if k < 3 || n <= k || !(n * k).is_multiple_of(2) {
        return Err(GraphError::InvalidDegree { n, k });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<usize> = (0..n * k).map(|p| p / k).collect();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::with_capacity(k); n];
    let mut attempts = 0u64;
    'retry: loop {
        attempts += 1;
        points.shuffle(&mut rng);
        adjacency.iter_mut().for_each(Vec::clear);
        for pair in points.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b || adjacency[a].contains(&b) {
                continue 'retry;
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        break;
    }
    log::debug!("random {k}-regular graph on {n} vertices accepted after {attempts} pairings");
    let edges: Vec<_> = points.chunks_exact(2).map(|p| (p[0], p[1])).collect();
    RegularGraph::from_edges(n, k, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_is_the_only_cubic_graph_on_four_vertices() {
        for seed in 0..20 {
            let g = generate_random_regular(4, 3, seed).unwrap();
            assert_eq!(g, RegularGraph::complete_k4());
        }
    }

    #[test]
    fn odd_degree_sum_is_rejected() {
        assert!(matches!(
            generate_random_regular(5, 3, 1),
            Err(GraphError::InvalidDegree { n: 5, k: 3 })
        ));
        assert!(matches!(generate_random_regular(3, 3, 1), Err(GraphError::InvalidDegree { .. })));
        assert!(matches!(generate_random_regular(10, 2, 1), Err(GraphError::InvalidDegree { .. })));
    }

    #[test]
    fn generated_graphs_are_simple_regular_and_seed_deterministic() {
        for &(n, k) in &[(10, 3), (50, 4), (100, 5), (1000, 3)] {
            let g = generate_random_regular(n, k, 42).unwrap();
            assert_eq!(g.edges().len(), n * k / 2);
            for v in 0..n {
                assert_eq!(g.neighbors(v).len(), k);
                assert!(!g.neighbors(v).contains(&v));
            }
            assert_eq!(g, generate_random_regular(n, k, 42).unwrap());
        }
        assert_ne!(generate_random_regular(100, 3, 1).unwrap(), generate_random_regular(100, 3, 2).unwrap());
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(RegularGraph::from_edges(4, 3, &[(0, 0)]).is_err());
        let k4 = RegularGraph::complete_k4();
        let mut e = k4.edges().to_vec();
        e[5] = (0, 1);
        assert!(RegularGraph::from_edges(4, 3, &e).is_err());
        assert!(RegularGraph::from_edges(4, 3, &e[..5]).is_err());
    }

    #[test]
    fn edge_list_round_trip_and_validation() {
        let g = generate_random_regular(30, 3, 9).unwrap();
        let text = g.to_edge_list_string();
        assert!(text.starts_with("30 3\n"));
        let back = RegularGraph::read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.fingerprint(), g.fingerprint());

        let missing_edge: String = text.lines().take(45).map(|l| format!("{l}\n")).collect();
        assert!(RegularGraph::read_edge_list(missing_edge.as_bytes()).is_err());
        assert!(RegularGraph::read_edge_list("4 3\n0 1\n0 x\n".as_bytes()).is_err());
    }

    #[test]
    fn petersen_structure() {
        let p = RegularGraph::petersen();
        assert_eq!(p.n(), 10);
        assert_eq!(p.edges().len(), 15);
        assert_eq!(p.components().len(), 1);
        let two = RegularGraph::disjoint_union(&[RegularGraph::complete_k4(), RegularGraph::complete_k4()]).unwrap();
        assert_eq!(two.components(), vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]]);
    }
}
