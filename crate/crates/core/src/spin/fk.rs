use rayon::prelude::*;
use serde::Serialize;

use super::potts::potts_partition_exact;
use super::union_find::RollbackUnionFind;
use crate::error::{domain, Error, Result};
use crate::graph::Graph;
use crate::numeric::{log_sum_exp, xlny};

pub const DEFAULT_FK_MAX_EDGES: usize = 24;

/// Joint histogram of `(o(w), k(w))` over all `2^|E|` bond configurations.
/// Determines `Z_FK(p, q)` for every `p` and `q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FkHistogram {
    pub num_edges: usize,
    pub num_vertices: usize,
    /// `counts[o][k]`.
    pub counts: Vec<Vec<u64>>,
}

impl FkHistogram {
    pub fn new(graph: &Graph) -> Result<Self> {
        Self::with_max_edges(graph, DEFAULT_FK_MAX_EDGES)
    }

    pub fn with_max_edges(graph: &Graph, max_edges: usize) -> Result<Self> {
        let ne = graph.num_edges();
        let nv = graph.num_vertices();
        if ne > max_edges {
            return Err(Error::Resource {
                what: format!("FK enumeration (|E| = {ne})"),
                required: 2f64.powi(ne as i32),
                budget: 2f64.powi(max_edges as i32),
            });
        }
        let edges: Vec<(usize, usize)> = graph.edges().iter().map(|e| (e.tail, e.head)).collect();
        let prefix = ne.min(8);
        let empty = || vec![vec![0u64; nv + 1]; ne + 1];
        let counts = (0..1u64 << prefix)
            .into_par_iter()
            .map(|mask| {
                let mut uf = RollbackUnionFind::new(nv);
                let mut open = 0;
                for (e, &(a, b)) in edges.iter().enumerate().take(prefix) {
                    if mask >> e & 1 == 1 {
                        uf.union(a, b);
                        open += 1;
                    }
                }
                let mut counts = empty();
                sweep(&edges, prefix, open, &mut uf, &mut counts);
                counts
            })
            .reduce(empty, |mut a, b| {
                for (ra, rb) in a.iter_mut().zip(&b) {
                    ra.iter_mut().zip(rb).for_each(|(x, y)| *x += y);
                }
                a
            });
        Ok(FkHistogram {
            num_edges: ne,
            num_vertices: nv,
            counts,
        })
    }

    /// `ln Z_FK(p, q) = ln Σ_w p^o (1-p)^c q^k`.
    pub fn log_partition(&self, p: f64, q: f64) -> Result<f64> {
        check_fk_params(p, q)?;
        let ne = self.num_edges;
        Ok(log_sum_exp(self.counts.iter().enumerate().flat_map(|(o, row)| {
            row.iter().enumerate().filter(|(_, &c)| c > 0).map(move |(k, &c)| {
                (c as f64).ln() + xlny(o as f64, p) + xlny((ne - o) as f64, 1.0 - p) + k as f64 * q.ln()
            })
        })))
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

fn sweep(
    edges: &[(usize, usize)],
    e: usize,
    open: usize,
    uf: &mut RollbackUnionFind,
    counts: &mut [Vec<u64>],
) {
    if e == edges.len() {
        counts[open][uf.components()] += 1;
        return;
    }
    sweep(edges, e + 1, open, uf, counts);
    uf.union(edges[e].0, edges[e].1);
    sweep(edges, e + 1, open + 1, uf, counts);
    uf.rollback();
}

fn check_fk_params(p: f64, q: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("p must lie in [0, 1], got {p}"));
    }
    if !(q > 0.0) {
        return domain(format!("q must be positive, got {q}"));
    }
    Ok(())
}

/// `Z_FK(p, q)` by direct enumeration (at most 24 edges by default).
pub fn fk_partition_exact(graph: &Graph, p: f64, q: f64) -> Result<f64> {
    Ok(log_fk_partition_exact(graph, p, q)?.exp())
}

pub fn log_fk_partition_exact(graph: &Graph, p: f64, q: f64) -> Result<f64> {
    check_fk_params(p, q)?;
    FkHistogram::new(graph)?.log_partition(p, q)
}

#[derive(Debug, Clone, Serialize)]
pub struct EsDiscrepancy {
    pub beta: f64,
    pub log_fk: f64,
    pub log_potts_scaled: f64,
    pub relative: f64,
}

/// `|Z_FK - e^{-β|E|} Z_P| / Z_FK` at `p = 1 - e^{-β}` for every `β` in the grid.
pub fn edwards_sokal_discrepancies(graph: &Graph, q: u32, betas: &[f64]) -> Result<Vec<EsDiscrepancy>> {
    edwards_sokal_with_histogram(&FkHistogram::new(graph)?, graph, q, betas)
}

/// Same as [`edwards_sokal_discrepancies`] with a precomputed histogram of
/// `graph`, so several `q` can share one bond enumeration.
pub fn edwards_sokal_with_histogram(
    hist: &FkHistogram,
    graph: &Graph,
    q: u32,
    betas: &[f64],
) -> Result<Vec<EsDiscrepancy>> {
    if hist.num_edges != graph.num_edges() || hist.num_vertices != graph.num_vertices() {
        return domain("histogram does not belong to this graph");
    }
    let poly = potts_partition_exact(graph, q)?;
    betas
        .iter()
        .map(|&beta| {
            if !(beta >= 0.0) {
                return domain(format!("beta must be nonnegative, got {beta}"));
            }
            let p = -(-beta).exp_m1();
            let log_fk = hist.log_partition(p, f64::from(q))?;
            let log_potts_scaled = poly.log_eval(beta) - beta * graph.num_edges() as f64;
            let relative = (log_potts_scaled - log_fk).exp_m1().abs();
            Ok(EsDiscrepancy {
                beta,
                log_fk,
                log_potts_scaled,
                relative,
            })
        })
        .collect()
}

/// Maximum relative Edwards–Sokal discrepancy over the grid.
pub fn edwards_sokal_check(graph: &Graph, q: u32, betas: &[f64]) -> Result<f64> {
    Ok(edwards_sokal_discrepancies(graph, q, betas)?
        .iter()
        .map(|d| d.relative)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::cluster::cluster_count;
    use crate::triangulation::enumerate_triangulations;

    #[test]
    fn loops_only() {
        let g = Graph::from_edges(1, &[(0, 0), (0, 0), (0, 0)]);
        for (p, q) in [(0.3, 2.0), (0.9, 3.5)] {
            assert!((fk_partition_exact(&g, p, q).unwrap() - q).abs() < 1e-12);
        }
    }

    #[test]
    fn endpoints_of_p() {
        let t = enumerate_triangulations(2, 2).unwrap().nth(5).unwrap();
        let g = t.graph();
        let q: f64 = 3.0;
        let z0 = fk_partition_exact(g, 0.0, q).unwrap();
        assert!((z0 - q.powi(g.num_vertices() as i32)).abs() < 1e-9);
        let k = cluster_count(g, &vec![true; g.num_edges()]);
        let z1 = fk_partition_exact(g, 1.0, q).unwrap();
        assert!((z1 - q.powi(k as i32)).abs() < 1e-12);
    }

    #[test]
    fn histogram_matches_direct_sweep() {
        let t = enumerate_triangulations(2, 2).unwrap().nth(13).unwrap();
        let g = t.graph();
        let h = FkHistogram::new(g).unwrap();
        assert_eq!(h.total(), 1 << g.num_edges());
        let mut direct = vec![vec![0u64; g.num_vertices() + 1]; g.num_edges() + 1];
        for mask in 0..1u64 << g.num_edges() {
            let open: Vec<bool> = (0..g.num_edges()).map(|e| mask >> e & 1 == 1).collect();
            direct[mask.count_ones() as usize][cluster_count(g, &open)] += 1;
        }
        assert_eq!(h.counts, direct);
    }

    #[test]
    fn single_edge_by_hand() {
        // Z_FK = (1-p) q^2 + p q and e^{-β}(q e^β + q(q-1)) agree
        let g = Graph::from_edges(2, &[(0, 1)]);
        let beta: f64 = 1.0;
        let p = 1.0 - (-beta).exp();
        let fk = fk_partition_exact(&g, p, 2.0).unwrap();
        assert!((fk - ((1.0 - p) * 4.0 + p * 2.0)).abs() < 1e-14);
        assert!((fk - (-beta).exp() * (2.0 * beta.exp() + 2.0)).abs() < 1e-14);
        assert!(edwards_sokal_check(&g, 2, &[beta]).unwrap() < 1e-14);
    }

    #[test]
    fn edwards_sokal_on_small_triangulations() {
        for t in enumerate_triangulations(2, 2).unwrap() {
            for q in [2, 3, 4] {
                let d = edwards_sokal_check(t.graph(), q, &[0.2, 0.7, 1.5]).unwrap();
                assert!(d < 1e-9, "{d}");
            }
        }
    }

    #[test]
    fn invalid_params() {
        let g = Graph::from_edges(1, &[]);
        assert!(fk_partition_exact(&g, 1.5, 2.0).is_err());
        assert!(fk_partition_exact(&g, 0.5, 0.0).is_err());
    }
}
