use serde::{Deserialize, Serialize};

use super::complex::{CausalTriangulation, EdgeKind};
use crate::graph::{Graph, Homology};

/// The dual of a causal triangulation: one vertex per triangle, one edge per
/// primal edge.
///
/// The dual edge `e*` runs from the face on the right of `e` to the face on
/// its left, so it crosses `e` from right to left. Its homology vector is the
/// pair of signed intersection numbers with two primal loops that form a
/// basis: slice 0 (temporal component) and the rooted time loop (spatial
/// component). Because the intersection pairing is unimodular these two
/// numbers determine the homology class of any dual cycle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualGraph {
    graph: Graph,
    /// Faces of the dual, one per primal vertex: `(dual edge, sign)` with
    /// sign `+1` when the counterclockwise boundary follows the dual edge.
    faces: Vec<Vec<(usize, i8)>>,
    to_dual: Vec<usize>,
    to_primal: Vec<usize>,
}

impl DualGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn faces(&self) -> &[Vec<(usize, i8)>] {
        &self.faces
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// Dual edge index of a primal edge.
    pub fn to_dual(&self, primal_edge: usize) -> usize {
        self.to_dual[primal_edge]
    }

    /// Primal edge index of a dual edge.
    pub fn to_primal(&self, dual_edge: usize) -> usize {
        self.to_primal[dual_edge]
    }

    pub fn back_map(&self) -> (&[usize], &[usize]) {
        (&self.to_dual, &self.to_primal)
    }

    /// Overwrites one entry of the back-map. Only for fault-injection tests of
    /// the verification suites.
    #[doc(hidden)]
    pub fn corrupt_back_map(&mut self, primal_edge: usize, dual_edge: usize) {
        self.to_dual[primal_edge] = dual_edge;
    }

    /// Whether `to_primal ∘ to_dual` and `to_dual ∘ to_primal` are identities.
    pub fn back_map_is_bijection(&self) -> bool {
        self.to_dual.len() == self.to_primal.len()
            && self.to_dual.iter().enumerate().all(|(e, &d)| self.to_primal.get(d) == Some(&e))
            && self.to_primal.iter().enumerate().all(|(d, &e)| self.to_dual.get(e) == Some(&d))
    }

    pub fn face_homology(&self, face: usize) -> Homology {
        let mut sum = [0i64; 2];
        for &(d, s) in &self.faces[face] {
            let h = self.graph.edge(d).homology.expect("dual edges carry homology");
            sum[0] += i64::from(s) * h[0];
            sum[1] += i64::from(s) * h[1];
        }
        sum
    }

    /// Dualizes again: one vertex per dual face, edges joining the two faces
    /// whose boundaries contain each dual edge. Edge `i` of the result
    /// corresponds to dual edge `i`.
    pub fn dual_of_dual(&self) -> Graph {
        let mut tail = vec![usize::MAX; self.graph.num_edges()];
        let mut head = vec![usize::MAX; self.graph.num_edges()];
        for (f, face) in self.faces.iter().enumerate() {
            for &(d, s) in face {
                if s > 0 {
                    tail[d] = f;
                } else {
                    head[d] = f;
                }
            }
        }
        let pairs: Vec<_> = tail.into_iter().zip(head).collect();
        Graph::from_edges(self.faces.len(), &pairs)
    }
}

impl CausalTriangulation {
    pub fn dualize(&self) -> DualGraph {
        let primal = self.graph();
        let mut graph = Graph::new(self.faces().len());
        let time_loop = self.time_loop();
        for (e, kind) in self.edge_kinds().iter().enumerate() {
            let (left, right) = self.edge_sides(e);
            let temporal = i64::from(matches!(kind, EdgeKind::Horizontal { slice: 0, .. }));
            // e* crosses the upward time loop leftwards
            let spatial = -i64::from(time_loop.contains(&e));
            graph.add_edge_with_homology(right, left, [temporal, spatial]);
        }
        let mut faces = vec![Vec::new(); primal.num_vertices()];
        for (e, edge) in primal.edges().iter().enumerate() {
            faces[edge.tail].push((e, 1));
            faces[edge.head].push((e, -1));
        }
        let ids: Vec<usize> = (0..primal.num_edges()).collect();
        DualGraph {
            graph,
            faces,
            to_dual: ids.clone(),
            to_primal: ids,
        }
    }
}
