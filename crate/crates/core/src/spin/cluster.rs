use serde::Serialize;

use super::config::BondConfig;
use super::union_find::HomologyUnionFind;
use crate::error::{structural, Result};
use crate::graph::{Graph, Side};
use crate::triangulation::TorusComplex;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterStats {
    /// Open edges `o(w)`.
    pub open: usize,
    /// Closed edges `c(w)`.
    pub closed: usize,
    /// Clusters `k(w)`, isolated vertices included.
    pub clusters: usize,
    /// Faces delimited by `w`, equal to `k(w*)`.
    pub faces: usize,
    /// 2 if some cluster is a net, 1 if some cluster is a cycle, else 0.
    pub delta: u8,
    /// Homology rank of each cluster, ordered by smallest vertex.
    pub ranks: Vec<u8>,
}

impl ClusterStats {
    /// `|V| - o(w) + f(w) = k(w) + 1 - δ(w)`.
    pub fn euler_holds(&self, num_vertices: usize) -> bool {
        num_vertices as i64 - self.open as i64 + self.faces as i64
            == self.clusters as i64 + 1 - i64::from(self.delta)
    }
}

/// Clusters of the open subgraph with per-cluster homology rank.
pub fn clusters_with_rank(graph: &Graph, open: &[bool]) -> Result<(usize, Vec<u8>)> {
    if !graph.has_homology() {
        return structural("graph edges carry no homology annotations");
    }
    let mut uf = HomologyUnionFind::new(graph.num_vertices());
    for (e, edge) in graph.edges().iter().enumerate() {
        if open[e] {
            uf.union(edge.tail, edge.head, edge.homology.unwrap());
        }
    }
    Ok((uf.components(), uf.cluster_ranks()))
}

/// Plain cluster count of the open subgraph.
pub fn cluster_count(graph: &Graph, open: &[bool]) -> usize {
    let mut uf = super::union_find::RollbackUnionFind::new(graph.num_vertices());
    for (e, edge) in graph.edges().iter().enumerate() {
        if open[e] {
            uf.union(edge.tail, edge.head);
        }
    }
    uf.components()
}

/// `w*(e*) = 1 - w(e)`, mapped through the complex's edge back-map.
pub fn dual_config(complex: &TorusComplex, w: &BondConfig) -> BondConfig {
    let mut bits = vec![true; w.len()];
    for (e, &b) in w.bits().iter().enumerate() {
        bits[complex.map_edge(w.side(), e)] = !b;
    }
    BondConfig::new(w.side().opposite(), bits)
}

pub fn cluster_stats(complex: &TorusComplex, w: &BondConfig) -> Result<ClusterStats> {
    let graph = complex.graph(w.side());
    if w.len() != graph.num_edges() {
        return structural(format!(
            "bond configuration has {} entries but the host has {} edges",
            w.len(),
            graph.num_edges()
        ));
    }
    let (clusters, ranks) = clusters_with_rank(graph, w.bits())?;
    let dual = dual_config(complex, w);
    let faces = cluster_count(complex.graph(dual.side()), dual.bits());
    let delta = ranks.iter().copied().max().unwrap_or(0);
    let open = w.open_count();
    Ok(ClusterStats {
        open,
        closed: w.len() - open,
        clusters,
        faces,
        delta,
        ranks,
    })
}

/// Convenience for the primal side.
pub fn primal_cluster_stats(complex: &TorusComplex, mask: u64) -> Result<ClusterStats> {
    let w = BondConfig::from_mask(Side::Primal, complex.primal.graph().num_edges(), mask);
    cluster_stats(complex, &w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::{enumerate_triangulations, CausalTriangulation, Strip};

    fn smallest() -> TorusComplex {
        TorusComplex::new(CausalTriangulation::build(vec![Strip::parse("UD", 0).unwrap()]).unwrap())
    }

    #[test]
    fn all_open_three_loops() {
        let c = smallest();
        let s = primal_cluster_stats(&c, 0b111).unwrap();
        assert_eq!((s.open, s.faces, s.clusters, s.delta), (3, 2, 1, 2));
        assert!(s.euler_holds(1));
    }

    #[test]
    fn all_closed_is_trivial() {
        for t in enumerate_triangulations(2, 2).unwrap() {
            let c = TorusComplex::new(t);
            let v = c.primal.graph().num_vertices();
            let s = primal_cluster_stats(&c, 0).unwrap();
            assert_eq!((s.open, s.faces, s.clusters, s.delta), (0, 1, v, 0));
            assert!(s.euler_holds(v));
        }
    }

    #[test]
    fn dual_config_is_an_involution() {
        let c = TorusComplex::new(enumerate_triangulations(2, 2).unwrap().nth(9).unwrap());
        let e = c.primal.graph().num_edges();
        for mask in [0u64, 1, 0b1011, (1 << e) - 1] {
            let w = BondConfig::from_mask(Side::Primal, e, mask);
            let d = dual_config(&c, &w);
            assert_eq!(d.side(), Side::Dual);
            assert_eq!(w.open_count() + d.open_count(), e);
            assert_eq!(dual_config(&c, &d), w);
        }
    }

    #[test]
    fn missing_homology_is_structural_error() {
        let g = Graph::from_edges(2, &[(0, 1)]);
        assert!(matches!(
            clusters_with_rank(&g, &[true]),
            Err(crate::Error::Structural(_))
        ));
    }

    #[test]
    fn euler_and_delta_duality_exhaustive_small() {
        for t in enumerate_triangulations(2, 2).unwrap().filter(|t| t.graph().num_edges() <= 12) {
            let c = TorusComplex::new(t);
            let e = c.primal.graph().num_edges();
            let v = c.primal.graph().num_vertices();
            for mask in 0..1u64 << e {
                let w = BondConfig::from_mask(Side::Primal, e, mask);
                let s = cluster_stats(&c, &w).unwrap();
                assert!(s.euler_holds(v), "mask {mask:b}: {s:?}");
                let d = cluster_stats(&c, &dual_config(&c, &w)).unwrap();
                assert_eq!(s.delta + d.delta, 2);
                assert_eq!(s.faces, d.clusters);
                assert!(d.euler_holds(c.dual.graph().num_vertices()));
            }
        }
    }
}
