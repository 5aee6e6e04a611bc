use std::collections::BTreeMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{domain, Error, Result};
use crate::graph::Graph;
use crate::numeric::{ln_biguint, log_sum_exp};

pub const DEFAULT_SPIN_BUDGET: f64 = 1e8;

/// `Z_P(β) = Σ_m C_m e^{βm}`, with `m` the number of satisfied edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionPolynomial {
    pub q: u32,
    pub num_edges: usize,
    pub num_vertices: usize,
    /// `coeffs[m] = C_m`, for `m = 0..=|E|`.
    pub coeffs: Vec<BigUint>,
}

impl PartitionPolynomial {
    pub fn total(&self) -> BigUint {
        self.coeffs.iter().sum()
    }

    pub fn log_eval(&self, beta: f64) -> f64 {
        log_sum_exp(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(m, c)| ln_biguint(c) + beta * m as f64),
        )
    }

    pub fn to_json(&self) -> Value {
        let coeffs: serde_json::Map<String, Value> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != BigUint::ZERO)
            .map(|(m, c)| (m.to_string(), Value::String(c.to_string())))
            .collect();
        json!({"q": self.q, "E": self.num_edges, "V": self.num_vertices, "coeffs": coeffs})
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let field = |k: &str| {
            value
                .get(k)
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Structural(format!("missing integer field {k:?}")))
        };
        let q = field("q")? as u32;
        let num_edges = field("E")? as usize;
        let num_vertices = field("V")? as usize;
        let mut coeffs = vec![BigUint::ZERO; num_edges + 1];
        let map = value
            .get("coeffs")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Structural("missing object field \"coeffs\"".into()))?;
        for (m, c) in map {
            let m: usize = m
                .parse()
                .ok()
                .filter(|&m| m <= num_edges)
                .ok_or_else(|| Error::Structural(format!("bad exponent {m:?}")))?;
            coeffs[m] = c
                .as_str()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Structural(format!("bad coefficient for m = {m}")))?;
        }
        Ok(PartitionPolynomial {
            q,
            num_edges,
            num_vertices,
            coeffs,
        })
    }
}

pub fn potts_partition_exact(graph: &Graph, q: u32) -> Result<PartitionPolynomial> {
    potts_partition_with_budget(graph, q, DEFAULT_SPIN_BUDGET)
}

/// Exact coefficients by enumerating spin configurations.
///
/// Global color permutations preserve `m`, so vertex 0 is pinned to color 0
/// and the counts are multiplied by `q`.
pub fn potts_partition_with_budget(graph: &Graph, q: u32, budget: f64) -> Result<PartitionPolynomial> {
    if q < 2 {
        return domain(format!("q must be at least 2, got {q}"));
    }
    let nv = graph.num_vertices();
    let ne = graph.num_edges();
    let required = f64::from(q).powi(nv as i32);
    if required > budget {
        return Err(Error::Resource {
            what: format!("Potts enumeration (q = {q}, |V| = {nv})"),
            required,
            budget,
        });
    }
    let loops = graph.num_loops();
    if nv == 0 {
        let mut coeffs = vec![BigUint::ZERO; ne + 1];
        coeffs[loops] = BigUint::from(1u32);
        return Ok(PartitionPolynomial { q, num_edges: ne, num_vertices: 0, coeffs });
    }
    // neighbors through non-loop edges, with multiplicity
    let mut nbrs = vec![Vec::new(); nv];
    for e in graph.edges().iter().filter(|e| !e.is_loop()) {
        nbrs[e.tail].push(e.head);
        nbrs[e.head].push(e.tail);
    }
    let count = |last: u32| -> Vec<u64> {
        let mut counts = vec![0u64; ne + 1];
        let mut s = vec![0u32; nv];
        s[nv - 1] = last;
        let mut m = loops
            + graph
                .edges()
                .iter()
                .filter(|e| !e.is_loop() && s[e.tail] == s[e.head])
                .count();
        // odometer over vertices 1..nv-1 (vertex 0 pinned, vertex nv-1 fixed per task)
        let free: Vec<usize> = (1..nv.saturating_sub(1)).collect();
        loop {
            counts[m] += 1;
            let mut i = 0;
            loop {
                if i == free.len() {
                    return counts;
                }
                let v = free[i];
                let old = s[v];
                let new = if old + 1 == q { 0 } else { old + 1 };
                for &u in &nbrs[v] {
                    m -= usize::from(s[u] == old);
                    m += usize::from(s[u] == new);
                }
                s[v] = new;
                if new != 0 {
                    break;
                }
                i += 1;
            }
        }
    };
    let counts: Vec<u64> = if nv == 1 {
        count(0)
    } else {
        (0..q)
            .into_par_iter()
            .map(count)
            .reduce(|| vec![0; ne + 1], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect())
    };
    let coeffs = counts.into_iter().map(|c| BigUint::from(c) * q).collect();
    Ok(PartitionPolynomial {
        q,
        num_edges: ne,
        num_vertices: nv,
        coeffs,
    })
}

/// Exact coefficient map keyed by `m`, skipping zeros.
pub fn coefficient_map(poly: &PartitionPolynomial) -> BTreeMap<usize, BigUint> {
    poly.coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != BigUint::ZERO)
        .map(|(m, c)| (m, c.clone()))
        .collect()
}
