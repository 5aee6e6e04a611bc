use crate::graph::Homology;

/// Union-find that tracks, for every cluster, the rank of the lattice spanned
/// by the homology classes of its cycles.
///
/// Each vertex stores the homology displacement to its parent, so the class
/// of the cycle closed by an edge `a -> b` with crossing vector `h` inside
/// one cluster is `disp(a) + h - disp(b)`.
#[derive(Debug, Clone)]
pub struct HomologyUnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    disp: Vec<Homology>,
    /// First nonzero cycle class of the cluster rooted here, if any.
    generator: Vec<Option<Homology>>,
    rank: Vec<u8>,
    components: usize,
}

fn det(a: Homology, b: Homology) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

fn add(a: Homology, b: Homology) -> Homology {
    [a[0] + b[0], a[1] + b[1]]
}

fn sub(a: Homology, b: Homology) -> Homology {
    [a[0] - b[0], a[1] - b[1]]
}

impl HomologyUnionFind {
    pub fn new(n: usize) -> Self {
        HomologyUnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            disp: vec![[0, 0]; n],
            generator: vec![None; n],
            rank: vec![0; n],
            components: n,
        }
    }

    /// Root of `v` and the displacement from the root to `v`.
    pub fn find(&mut self, v: usize) -> (usize, Homology) {
        let p = self.parent[v];
        if p == v {
            return (v, [0, 0]);
        }
        let (root, d) = self.find(p);
        self.disp[v] = add(self.disp[v], d);
        self.parent[v] = root;
        (root, self.disp[v])
    }

    fn absorb_cycle(&mut self, root: usize, class: Homology) {
        if class == [0, 0] || self.rank[root] == 2 {
            return;
        }
        match self.generator[root] {
            None => {
                self.generator[root] = Some(class);
                self.rank[root] = 1;
            }
            Some(g) if det(g, class) != 0 => self.rank[root] = 2,
            Some(_) => {}
        }
    }

    /// Adds the open edge `a -> b` with crossing vector `h`.
    pub fn union(&mut self, a: usize, b: usize, h: Homology) {
        let (ra, da) = self.find(a);
        let (rb, db) = self.find(b);
        if ra == rb {
            self.absorb_cycle(ra, sub(add(da, h), db));
            return;
        }
        // attach the smaller tree; offset is the displacement from the new
        // root to the old one
        let (big, small, offset) = if self.size[ra] >= self.size[rb] {
            (ra, rb, sub(add(da, h), db))
        } else {
            (rb, ra, sub(sub(db, h), da))
        };
        self.parent[small] = big;
        self.disp[small] = offset;
        self.size[big] += self.size[small];
        self.components -= 1;
        if self.rank[small] == 2 {
            self.rank[big] = 2;
        } else if let Some(g) = self.generator[small] {
            self.absorb_cycle(big, g);
        }
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Homology rank (0, 1 or 2) of the cluster containing `v`.
    pub fn rank_of(&mut self, v: usize) -> u8 {
        let (r, _) = self.find(v);
        self.rank[r]
    }

    /// Ranks of all clusters, ordered by smallest member vertex.
    pub fn cluster_ranks(&mut self) -> Vec<u8> {
        let n = self.parent.len();
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(self.components);
        for v in 0..n {
            let (r, _) = self.find(v);
            if !seen[r] {
                seen[r] = true;
                out.push(self.rank[r]);
            }
        }
        out
    }
}

/// Union by size without path compression, so unions can be undone in
/// stack order. Used by exhaustive bond-configuration sweeps.
#[derive(Debug, Clone)]
pub struct RollbackUnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<Option<usize>>,
    components: usize,
}

impl RollbackUnionFind {
    pub fn new(n: usize) -> Self {
        RollbackUnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            history: Vec::new(),
            components: n,
        }
    }

    pub fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    /// Records one history entry whether or not the roots differ.
    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.history.push(None);
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.components -= 1;
        self.history.push(Some(rb));
    }

    pub fn rollback(&mut self) {
        if let Some(rb) = self.history.pop().expect("rollback without union") {
            let ra = self.parent[rb];
            self.size[ra] -= self.size[rb];
            self.parent[rb] = rb;
            self.components += 1;
        }
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_classes_build_rank() {
        let mut uf = HomologyUnionFind::new(1);
        uf.union(0, 0, [0, 0]);
        assert_eq!(uf.rank_of(0), 0);
        uf.union(0, 0, [0, 1]);
        assert_eq!(uf.rank_of(0), 1);
        uf.union(0, 0, [0, -3]);
        assert_eq!(uf.rank_of(0), 1);
        uf.union(0, 0, [1, -1]);
        assert_eq!(uf.rank_of(0), 2);
    }

    #[test]
    fn cycle_through_tree_path() {
        // square 0-1-2-3-0 wrapping once horizontally
        let mut uf = HomologyUnionFind::new(4);
        uf.union(0, 1, [0, 0]);
        uf.union(2, 1, [0, 0]);
        uf.union(2, 3, [0, 0]);
        assert_eq!(uf.rank_of(3), 0);
        uf.union(3, 0, [1, 0]);
        assert_eq!(uf.rank_of(2), 1);
        assert_eq!(uf.components(), 1);
    }

    #[test]
    fn merging_ranked_clusters() {
        let mut uf = HomologyUnionFind::new(2);
        uf.union(0, 0, [1, 0]);
        uf.union(1, 1, [0, 1]);
        assert_eq!(uf.cluster_ranks(), vec![1, 1]);
        uf.union(1, 0, [5, 7]);
        assert_eq!(uf.cluster_ranks(), vec![2]);
    }

    #[test]
    fn rollback_restores_components() {
        let mut uf = RollbackUnionFind::new(4);
        uf.union(0, 1);
        uf.union(1, 0);
        uf.union(2, 3);
        assert_eq!(uf.components(), 2);
        uf.rollback();
        uf.rollback();
        assert_eq!(uf.components(), 3);
        uf.rollback();
        assert_eq!(uf.components(), 4);
    }
}
