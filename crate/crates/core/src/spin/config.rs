use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::{Graph, Side};

/// A Potts spin assignment. Colors are stored as `0..q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinConfig {
    q: u32,
    values: Vec<u32>,
}

impl SpinConfig {
    pub fn new(q: u32, values: Vec<u32>) -> Result<Self> {
        if q < 2 {
            return domain(format!("q must be at least 2, got {q}"));
        }
        if let Some(v) = values.iter().find(|&&v| v >= q) {
            return domain(format!("spin value {v} out of range for q = {q}"));
        }
        Ok(SpinConfig { q, values })
    }

    pub fn uniform(q: u32, n: usize) -> Self {
        SpinConfig {
            q,
            values: vec![0; n],
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, v: usize) -> u32 {
        self.values[v]
    }

    pub fn set(&mut self, v: usize, value: u32) {
        assert!(value < self.q);
        self.values[v] = value;
    }

    /// Number of satisfied edges `Σ_e δ(σ_tail, σ_head)`; self-loops always count.
    pub fn satisfied_edges(&self, graph: &Graph) -> usize {
        graph
            .edges()
            .iter()
            .filter(|e| self.values[e.tail] == self.values[e.head])
            .count()
    }

    /// Potts energy `h(σ) = -Σ_e δ(σ_tail, σ_head)`.
    pub fn energy(&self, graph: &Graph) -> i64 {
        -(self.satisfied_edges(graph) as i64)
    }

    /// Mixed-radix index `Σ_v σ_v q^v`, for histogramming small systems.
    pub fn index(&self) -> u64 {
        self.values
            .iter()
            .rev()
            .fold(0u64, |acc, &v| acc * u64::from(self.q) + u64::from(v))
    }

    pub fn from_index(q: u32, n: usize, mut index: u64) -> Self {
        let values = (0..n)
            .map(|_| {
                let v = (index % u64::from(q)) as u32;
                index /= u64::from(q);
                v
            })
            .collect();
        SpinConfig { q, values }
    }
}

/// An FK bond configuration on the primal or dual side.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BondConfig {
    side: Side,
    bits: Vec<bool>,
}

impl BondConfig {
    pub fn new(side: Side, bits: Vec<bool>) -> Self {
        BondConfig { side, bits }
    }

    pub fn all(side: Side, num_edges: usize, open: bool) -> Self {
        BondConfig {
            side,
            bits: vec![open; num_edges],
        }
    }

    /// Bit `e` of `mask` opens edge `e`.
    pub fn from_mask(side: Side, num_edges: usize, mask: u64) -> Self {
        BondConfig {
            side,
            bits: (0..num_edges).map(|e| mask >> e & 1 == 1).collect(),
        }
    }

    pub fn mask(&self) -> u64 {
        assert!(self.bits.len() <= 64);
        self.bits
            .iter()
            .enumerate()
            .fold(0, |m, (e, &b)| m | (u64::from(b) << e))
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_open(&self, e: usize) -> bool {
        self.bits[e]
    }

    pub fn open_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}
