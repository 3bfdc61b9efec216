/// The depth-`t` rooted `k`-regular tree `T_k(t)` in canonical breadth-first labeling.
///
/// Vertex 0 is the root; the root has `k` children and every other internal vertex has
/// `k - 1`. Children of a vertex are consecutive, and the blocks of children appear in the
/// order of their parents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularTree {
    k: usize,
    depth: usize,
    parent: Vec<Option<usize>>,
    level: Vec<usize>,
    children: Vec<std::ops::Range<usize>>,
}

impl RegularTree {
    pub fn new(k: usize, depth: usize) -> Self {
        let size = Self::size_of(k, depth);
        let mut parent = Vec::with_capacity(size);
        let mut level = Vec::with_capacity(size);
        let mut children = Vec::with_capacity(size);
        parent.push(None);
        level.push(0);
        let mut v = 0;
        while v < parent.len() {
            let lv = level[v];
            let start = parent.len();
            if lv < depth {
                let count = if v == 0 { k } else { k - 1 };
                for _ in 0..count {
                    parent.push(Some(v));
                    level.push(lv + 1);
                }
            }
            children.push(start..parent.len());
            v += 1;
        }
        debug_assert_eq!(parent.len(), size);
        Self { k, depth, parent, level, children }
    }

    /// `|T_k(t)| = 1 + k * ((k-1)^t - 1) / (k - 2)`.
    pub fn size_of(k: usize, depth: usize) -> usize {
        let mut total = 1;
        let mut layer = k;
        for _ in 0..depth {
            total += layer;
            layer *= k - 1;
        }
        total
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn level(&self, v: usize) -> usize {
        self.level[v]
    }

    pub fn children(&self, v: usize) -> std::ops::Range<usize> {
        self.children[v].clone()
    }

    /// Edges as `(parent, child)`, in child order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.len()).map(move |c| (self.parent[c].expect("non-root"), c))
    }

    /// Vertices in `[0, len)` lying at exactly `depth`.
    pub fn level_range(&self, depth: usize) -> std::ops::Range<usize> {
        let start = Self::size_of(self.k, depth) - if depth == 0 { 1 } else { Self::layer(self.k, depth) };
        start..Self::size_of(self.k, depth)
    }

    fn layer(k: usize, depth: usize) -> usize {
        if depth == 0 {
            1
        } else {
            k * (k - 1).pow(depth as u32 - 1)
        }
    }

    /// Number of neighbours of `v` lying outside the tree (its missing children).
    pub fn outside_degree(&self, v: usize) -> usize {
        let inside = self.children[v].len() + usize::from(self.parent[v].is_some());
        self.k - inside
    }
}
