//! Edge-indexed multigraphs with optional torus homology annotations.
//!
//! Edges are identified by their index, never by their endpoint pair, so
//! self-loops and parallel edges are first-class. Every edge carries an
//! orientation (`tail -> head`); the homology vector of an edge is the pair of
//! signed crossing numbers of that oriented edge with the two fundamental cuts
//! of the torus.

use serde::{Deserialize, Serialize};

/// Signed crossing counts `(temporal, spatial)` of an oriented edge.
pub type Homology = [i64; 2];

/// Which graph of a primal/dual pair a configuration lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Primal,
    Dual,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Primal => Side::Dual,
            Side::Dual => Side::Primal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub homology: Option<Homology>,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn new(num_vertices: usize) -> Self {
        Graph {
            num_vertices,
            edges: Vec::new(),
        }
    }

    pub fn from_edges(num_vertices: usize, pairs: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(num_vertices);
        for &(a, b) in pairs {
            g.add_edge(a, b);
        }
        g
    }

    /// Adds an edge without homology annotation and returns its index.
    pub fn add_edge(&mut self, tail: usize, head: usize) -> usize {
        self.push(Edge {
            tail,
            head,
            homology: None,
        })
    }

    pub fn add_edge_with_homology(&mut self, tail: usize, head: usize, homology: Homology) -> usize {
        self.push(Edge {
            tail,
            head,
            homology: Some(homology),
        })
    }

    fn push(&mut self, edge: Edge) -> usize {
        assert!(
            edge.tail < self.num_vertices && edge.head < self.num_vertices,
            "edge endpoint out of range"
        );
        self.edges.push(edge);
        self.edges.len() - 1
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> &Edge {
        &self.edges[index]
    }

    pub fn has_homology(&self) -> bool {
        self.edges.iter().all(|e| e.homology.is_some())
    }

    pub fn num_loops(&self) -> usize {
        self.edges.iter().filter(|e| e.is_loop()).count()
    }

    /// Incident edge indices per vertex; a loop appears twice at its vertex.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.num_vertices];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.tail].push(i);
            inc[e.head].push(i);
        }
        inc
    }
}
