use serde::{Deserialize, Serialize};

use super::strip::{Orientation, Strip};
use crate::error::{structural, Result};
use crate::graph::{Graph, Homology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub slice: usize,
    pub position: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    /// Edge `position -> position + 1` on a slice.
    Horizontal { slice: usize, position: usize },
    /// The `index`-th time-like edge of a strip, oriented lower -> upper.
    /// Diagonal `k` is the left side of triangle `k` of the rooted word.
    Diagonal { strip: usize, index: usize },
}

/// A triangle, with its boundary listed counterclockwise.
///
/// Each entry is `(edge index, forward)` where `forward` says whether the
/// counterclockwise boundary runs along the edge's own orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub strip: usize,
    pub orientation: Orientation,
    pub boundary: [(usize, bool); 3],
}

/// A rooted periodic causal triangulation embedded in the torus.
///
/// Homology convention: the temporal cut sits between slice `N-1` and slice
/// 0, so every diagonal of the last strip crosses it once (`+1` in the
/// temporal component, oriented upward). The spatial cut runs between
/// position `n^i - 1` and position 0 on every slice and is continued through
/// each strip along the rooted diagonal 0; an oriented edge's spatial
/// component counts how often it wraps past position 0. Both components are
/// cocycles: they sum to zero around every triangle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CausalTriangulation {
    strips: Vec<Strip>,
    widths: Vec<usize>,
    slice_offsets: Vec<usize>,
    vertices: Vec<Vertex>,
    graph: Graph,
    kinds: Vec<EdgeKind>,
    faces: Vec<Face>,
    /// `(left face, right face)` per edge.
    sides: Vec<(usize, usize)>,
}

impl CausalTriangulation {
    /// Glues a cyclically compatible strip sequence into a torus multigraph.
    pub fn build(strips: Vec<Strip>) -> Result<Self> {
        if strips.is_empty() {
            return structural("a triangulation needs at least one strip");
        }
        let n_strips = strips.len();
        for (i, s) in strips.iter().enumerate() {
            let next = &strips[(i + 1) % n_strips];
            if s.upper_width() != next.lower_width() {
                return structural(format!(
                    "strip {i} has upper width {} but strip {} has lower width {}",
                    s.upper_width(),
                    (i + 1) % n_strips,
                    next.lower_width()
                ));
            }
        }
        let strips: Vec<Strip> = strips.iter().map(Strip::canonical).collect();
        let widths: Vec<usize> = strips.iter().map(Strip::lower_width).collect();

        let mut slice_offsets = Vec::with_capacity(n_strips + 1);
        let mut vertices = Vec::new();
        for (slice, &w) in widths.iter().enumerate() {
            slice_offsets.push(vertices.len());
            vertices.extend((0..w).map(|position| Vertex { slice, position }));
        }
        slice_offsets.push(vertices.len());
        let vid = |slice: usize, pos: usize| slice_offsets[slice] + pos % widths[slice];

        let mut graph = Graph::new(vertices.len());
        let mut kinds = Vec::new();

        // Horizontal edges first: edge index of (slice, j) is offset[slice] + j.
        for (slice, &w) in widths.iter().enumerate() {
            for j in 0..w {
                let wraps = i64::from(j + 1 == w);
                graph.add_edge_with_homology(vid(slice, j), vid(slice, j + 1), [0, wraps]);
                kinds.push(EdgeKind::Horizontal { slice, position: j });
            }
        }
        let horizontal = |slice: usize, pos: usize| slice_offsets[slice] + pos % widths[slice];

        let mut faces = Vec::new();
        for (i, strip) in strips.iter().enumerate() {
            let upper_slice = (i + 1) % n_strips;
            let (n, n_up) = (strip.lower_width(), strip.upper_width());
            let len = strip.num_triangles();
            let temporal = i64::from(i + 1 == n_strips);
            let first_diag = graph.num_edges();

            // Walk the rooted word with unwrapped lower/upper pointers.
            let (mut a, mut b) = (0usize, 0usize);
            let mut pointers = Vec::with_capacity(len);
            for o in strip.rooted_word() {
                pointers.push((a, b));
                match o {
                    Orientation::Up => a += 1,
                    Orientation::Down => b += 1,
                }
            }
            debug_assert_eq!((a, b), (n, n_up));
            for (index, &(a, b)) in pointers.iter().enumerate() {
                let spatial = (b / n_up) as i64 - (a / n) as i64;
                graph.add_edge_with_homology(vid(i, a), vid(upper_slice, b), [temporal, spatial]);
                kinds.push(EdgeKind::Diagonal { strip: i, index });
            }
            let diag = |k: usize| first_diag + k % len;

            for (k, (o, &(a, b))) in strip.rooted_word().zip(&pointers).enumerate() {
                let boundary = match o {
                    // counterclockwise (a, a+1, b)
                    Orientation::Up => [(horizontal(i, a), true), (diag(k + 1), true), (diag(k), false)],
                    // counterclockwise (a, b+1, b)
                    Orientation::Down => [
                        (diag(k + 1), true),
                        (horizontal(upper_slice, b), false),
                        (diag(k), false),
                    ],
                };
                faces.push(Face {
                    strip: i,
                    orientation: o,
                    boundary,
                });
            }
        }

        let mut left = vec![usize::MAX; graph.num_edges()];
        let mut right = vec![usize::MAX; graph.num_edges()];
        for (f, face) in faces.iter().enumerate() {
            for &(e, forward) in &face.boundary {
                let slot = if forward { &mut left[e] } else { &mut right[e] };
                if *slot != usize::MAX {
                    return structural(format!("edge {e} borders more than two faces"));
                }
                *slot = f;
            }
        }
        let sides = left.into_iter().zip(right).collect();

        Ok(CausalTriangulation {
            strips,
            widths,
            slice_offsets,
            vertices,
            graph,
            kinds,
            faces,
            sides,
        })
    }

    pub fn strips(&self) -> &[Strip] {
        &self.strips
    }

    pub fn num_strips(&self) -> usize {
        self.strips.len()
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    /// `n(t)`, the number of triangles.
    pub fn volume(&self) -> usize {
        self.faces.len()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex_index(&self, slice: usize, position: usize) -> usize {
        self.slice_offsets[slice] + position
    }

    pub fn edge_kinds(&self) -> &[EdgeKind] {
        &self.kinds
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    /// `(left face, right face)` of an edge relative to its orientation.
    pub fn edge_sides(&self, edge: usize) -> (usize, usize) {
        self.sides[edge]
    }

    /// The rooted time loop: diagonal 0 of every strip.
    pub fn time_loop(&self) -> Vec<usize> {
        self.kinds
            .iter()
            .enumerate()
            .filter(|(_, k)| matches!(k, EdgeKind::Diagonal { index: 0, .. }))
            .map(|(e, _)| e)
            .collect()
    }

    /// Horizontal edges of slice 0, a spatial loop.
    pub fn slice_loop(&self, slice: usize) -> Vec<usize> {
        (0..self.widths[slice]).map(|j| self.slice_offsets[slice] + j).collect()
    }

    pub fn face_homology(&self, face: usize) -> Homology {
        let mut sum = [0i64; 2];
        for &(e, forward) in &self.faces[face].boundary {
            let h = self.graph.edge(e).homology.expect("triangulation edges carry homology");
            let s = if forward { 1 } else { -1 };
            sum[0] += s * h[0];
            sum[1] += s * h[1];
        }
        sum
    }

    /// Checks every structural invariant; returns a description of the first
    /// violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.volume();
        let expected: usize = (0..self.num_strips())
            .map(|i| self.widths[i] + self.widths[(i + 1) % self.num_strips()])
            .sum();
        if n != expected {
            return Err(format!("n(t) = {n} but sum of n^i + n^(i+1) = {expected}"));
        }
        if n % 2 != 0 {
            return Err(format!("odd volume {n}"));
        }
        let (v, e) = (self.graph.num_vertices(), self.graph.num_edges());
        if 2 * v != n || 2 * e != 3 * n {
            return Err(format!("|V| = {v}, |E| = {e} disagree with n(t) = {n}"));
        }
        if v as i64 - e as i64 + n as i64 != 0 {
            return Err("Euler characteristic is not 0".into());
        }
        for (f, face) in self.faces.iter().enumerate() {
            let horizontal = face
                .boundary
                .iter()
                .filter(|(e, _)| matches!(self.kinds[*e], EdgeKind::Horizontal { .. }))
                .count();
            if horizontal != 1 {
                return Err(format!("face {f} has {horizontal} horizontal edges"));
            }
            if self.face_homology(f) != [0, 0] {
                return Err(format!("face {f} has nonzero boundary homology"));
            }
        }
        for (e, kind) in self.kinds.iter().enumerate() {
            let (l, r) = self.sides[e];
            if l == usize::MAX || r == usize::MAX {
                return Err(format!("edge {e} does not border two faces"));
            }
            if let EdgeKind::Horizontal { .. } = kind {
                let (lo, ro) = (self.faces[l].orientation, self.faces[r].orientation);
                if lo != Orientation::Up || ro != Orientation::Down {
                    return Err(format!("horizontal edge {e} is not between an up and a down triangle"));
                }
            }
        }
        for (slice, &w) in self.widths.iter().enumerate() {
            let count = self
                .kinds
                .iter()
                .filter(|k| matches!(k, EdgeKind::Horizontal { slice: s, .. } if *s == slice))
                .count();
            if count != w {
                return Err(format!("slice {slice} has {count} horizontal edges, width {w}"));
            }
        }
        Ok(())
    }
}
