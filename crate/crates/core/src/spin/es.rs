use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{BondConfig, SpinConfig};
use super::union_find::RollbackUnionFind;
use crate::error::{domain, Error, Result};
use crate::graph::{Graph, Side};

/// Opens each satisfied edge independently with probability `p`.
pub fn sample_bonds<R: Rng + ?Sized>(
    graph: &Graph,
    side: Side,
    spins: &SpinConfig,
    p: f64,
    rng: &mut R,
) -> BondConfig {
    let bits = graph
        .edges()
        .iter()
        .map(|e| spins.get(e.tail) == spins.get(e.head) && rng.gen::<f64>() < p)
        .collect();
    BondConfig::new(side, bits)
}

/// Gives every open cluster a fresh uniform color; returns the cluster count.
pub fn recolor_clusters<R: Rng + ?Sized>(
    graph: &Graph,
    bonds: &BondConfig,
    spins: &mut SpinConfig,
    rng: &mut R,
) -> usize {
    let n = graph.num_vertices();
    let mut uf = RollbackUnionFind::new(n);
    for (e, edge) in graph.edges().iter().enumerate() {
        if bonds.is_open(e) && !edge.is_loop() {
            uf.union(edge.tail, edge.head);
        }
    }
    let q = spins.q();
    let mut color = vec![u32::MAX; n];
    for v in 0..n {
        let r = uf.find(v);
        if color[r] == u32::MAX {
            color[r] = rng.gen_range(0..q);
        }
        spins.set(v, color[r]);
    }
    uf.components()
}

/// One Swendsen–Wang update; returns the intermediate bonds and cluster count.
pub fn swendsen_wang_step<R: Rng + ?Sized>(
    graph: &Graph,
    beta: f64,
    spins: &mut SpinConfig,
    rng: &mut R,
) -> (BondConfig, usize) {
    let p = -(-beta).exp_m1();
    let bonds = sample_bonds(graph, Side::Primal, spins, p, rng);
    let k = recolor_clusters(graph, &bonds, spins, rng);
    (bonds, k)
}

pub const DEFAULT_ES_BUDGET: f64 = 1e6;

/// Exact sampler for the Edwards–Sokal joint measure on a small graph: the
/// spins are drawn from the exact Potts measure and the bonds from their
/// conditional law given the spins.
#[derive(Debug, Clone)]
pub struct EsSampler {
    graph: Graph,
    q: u32,
    p: f64,
    spins: WeightedIndex<f64>,
}

impl EsSampler {
    pub fn new(graph: &Graph, q: u32, beta: f64) -> Result<Self> {
        if q < 2 {
            return domain(format!("q must be at least 2, got {q}"));
        }
        if !(beta >= 0.0) {
            return domain(format!("beta must be nonnegative, got {beta}"));
        }
        let nv = graph.num_vertices();
        let states = f64::from(q).powi(nv as i32);
        if states > DEFAULT_ES_BUDGET {
            return Err(Error::Resource {
                what: format!("exact Edwards–Sokal sampling (q = {q}, |V| = {nv})"),
                required: states,
                budget: DEFAULT_ES_BUDGET,
            });
        }
        let weights: Vec<f64> = (0..states as u64)
            .map(|i| {
                let m = SpinConfig::from_index(q, nv, i).satisfied_edges(graph);
                // relative to the all-satisfied weight, so no overflow
                (beta * (m as f64 - graph.num_edges() as f64)).exp()
            })
            .collect();
        Ok(EsSampler {
            graph: graph.clone(),
            q,
            p: -(-beta).exp_m1(),
            spins: WeightedIndex::new(&weights).expect("positive weights"),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (SpinConfig, BondConfig) {
        let idx = self.spins.sample(rng) as u64;
        let s = SpinConfig::from_index(self.q, self.graph.num_vertices(), idx);
        let w = sample_bonds(&self.graph, Side::Primal, &s, self.p, rng);
        (s, w)
    }
}

/// One exact draw from the Edwards–Sokal measure with a caller seed.
pub fn sample_es_coupled(graph: &Graph, q: u32, beta: f64, seed: u64) -> Result<(SpinConfig, BondConfig)> {
    let sampler = EsSampler::new(graph, q, beta)?;
    Ok(sampler.sample(&mut ChaCha8Rng::seed_from_u64(seed)))
}
