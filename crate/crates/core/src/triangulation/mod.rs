//! Rooted causal triangulations of the periodic `N`-strip cylinder, realized
//! as torus-embedded multigraphs, and their duals.

mod complex;
mod dual;
mod enumerate;
mod strip;
pub mod text;

pub use complex::{CausalTriangulation, EdgeKind, Face, Vertex};
pub use dual::DualGraph;
pub use enumerate::{
    count_triangulations, enumerate_triangulations, width_sequences, TriangulationsWithWidths,
};
pub use strip::{enumerate_strips, Orientation, Strip};

use crate::error::Result;

/// Glues a compatible cyclic sequence of strips.
pub fn build_graph(strips: Vec<Strip>) -> Result<CausalTriangulation> {
    CausalTriangulation::build(strips)
}

/// A triangulation bundled with its dual; the host for bond configurations.
#[derive(Debug, Clone)]
pub struct TorusComplex {
    pub primal: CausalTriangulation,
    pub dual: DualGraph,
}

impl TorusComplex {
    pub fn new(primal: CausalTriangulation) -> Self {
        let dual = primal.dualize();
        TorusComplex { primal, dual }
    }

    pub fn volume(&self) -> usize {
        self.primal.volume()
    }

    pub fn graph(&self, side: crate::Side) -> &crate::Graph {
        match side {
            crate::Side::Primal => self.primal.graph(),
            crate::Side::Dual => self.dual.graph(),
        }
    }

    /// Index of the edge on `to` that corresponds to edge `e` on `from`.
    pub fn map_edge(&self, from: crate::Side, e: usize) -> usize {
        match from {
            crate::Side::Primal => self.dual.to_dual(e),
            crate::Side::Dual => self.dual.to_primal(e),
        }
    }
}
