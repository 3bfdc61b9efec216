use std::collections::{HashMap, VecDeque};

use super::RegularGraph;

/// The radius-`t` neighbourhood of a vertex.
///
/// `vertices` is in canonical order: breadth-first from the center, visiting each vertex's
/// neighbours by ascending id. Distances are therefore non-decreasing along the list, and when
/// the ball is a tree the `j`-th vertex corresponds to the `j`-th vertex of the canonical
/// breadth-first labeling of the regular tree of the same depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub center: usize,
    pub radius: usize,
    pub vertices: Vec<usize>,
    /// Distance from the center, parallel to `vertices`.
    pub depths: Vec<usize>,
    /// Induced edges as `(a, b)` host ids with `a < b`, sorted.
    pub induced_edges: Vec<(usize, usize)>,
    pub is_tree: bool,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

pub fn ball(g: &RegularGraph, center: usize, t: usize) -> Ball {
    assert!(center < g.n(), "vertex {center} out of range");
    let mut local: HashMap<usize, usize> = HashMap::new();
    let mut vertices = vec![center];
    let mut depths = vec![0];
    local.insert(center, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(idx) = queue.pop_front() {
        let (v, d) = (vertices[idx], depths[idx]);
        if d == t {
            continue;
        }
        for &w in g.neighbors(v) {
            if let std::collections::hash_map::Entry::Vacant(e) = local.entry(w) {
                e.insert(vertices.len());
                vertices.push(w);
                depths.push(d + 1);
                queue.push_back(vertices.len() - 1);
            }
        }
    }
    let mut induced_edges = Vec::new();
    for &v in &vertices {
        for &w in g.neighbors(v) {
            if v < w && local.contains_key(&w) {
                induced_edges.push((v, w));
            }
        }
    }
    induced_edges.sort_unstable();
    // BFS balls are connected, so acyclicity is the edge count.
    let is_tree = induced_edges.len() + 1 == vertices.len();
    Ball { center, radius: t, vertices, depths, induced_edges, is_tree }
}

/// Whether the ball, rooted at its center, is isomorphic to the depth-`radius` `k`-regular tree.
pub fn is_tree_isomorphic(b: &Ball, k: usize) -> bool {
    if !b.is_tree {
        return false;
    }
    let pos: HashMap<usize, usize> = b.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut degree = vec![0usize; b.len()];
    for &(x, y) in &b.induced_edges {
        degree[pos[&x]] += 1;
        degree[pos[&y]] += 1;
    }
    b.depths.iter().zip(&degree).all(|(&d, &deg)| {
        if b.radius == 0 {
            deg == 0
        } else if d < b.radius {
            deg == k
        } else {
            deg == 1
        }
    })
}

pub fn tree_likeness_fraction(g: &RegularGraph, t: usize) -> f64 {
    let hits = (0..g.n()).filter(|&i| is_tree_isomorphic(&ball(g, i, t), g.k())).count();
    hits as f64 / g.n() as f64
}

/// Length of the shortest cycle, or `None` for a forest.
pub fn girth(g: &RegularGraph) -> Option<usize> {
    let n = g.n();
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for s in 0..n {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[s] = 0;
        parent[s] = usize::MAX;
        queue.clear();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            if 2 * dist[v] + 1 >= best {
                break;
            }
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    parent[w] = v;
                    queue.push_back(w);
                } else if parent[v] != w {
                    best = best.min(dist[v] + dist[w] + 1);
                }
            }
        }
    }
    (best != usize::MAX).then_some(best)
}

/// Radius-`t` balls of every vertex, precomputed once for repeated pattern extraction.
#[derive(Debug, Clone)]
pub struct BallIndex {
    radius: usize,
    balls: Vec<Vec<usize>>,
    tree_shaped: Vec<bool>,
}

impl BallIndex {
    pub fn new(g: &RegularGraph, t: usize) -> Self {
        let mut balls = Vec::with_capacity(g.n());
        let mut tree_shaped = Vec::with_capacity(g.n());
        for i in 0..g.n() {
            let b = ball(g, i, t);
            tree_shaped.push(is_tree_isomorphic(&b, g.k()));
            balls.push(b.vertices);
        }
        Self { radius: t, balls, tree_shaped }
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn vertices(&self, i: usize) -> &[usize] {
        &self.balls[i]
    }

    pub fn is_tree_shaped(&self, i: usize) -> bool {
        self.tree_shaped[i]
    }

    pub fn tree_fraction(&self) -> f64 {
        self.tree_shaped.iter().filter(|&&b| b).count() as f64 / self.len() as f64
    }

    /// Packed spin pattern of ball `i` in canonical order.
    #[inline]
    pub fn pattern(&self, i: usize, spins: &[i8]) -> usize {
        crate::pattern_index(self.balls[i].iter().map(|&v| spins[v]))
    }
}
