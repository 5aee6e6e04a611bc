use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::state::{ChainParams, ChainState};
use crate::error::{domain, Error, Result};
use crate::graph::Graph;
use crate::numeric::log_sum_exp;
use crate::spin::{swendsen_wang_step, SpinConfig};
use crate::triangulation::enumerate_triangulations;

/// Cells of an exact distribution beyond this count are refused.
pub const MAX_HISTOGRAM_CELLS: usize = 1_000_000;

/// Tolerance in standard errors used by the per-cell comparison.
pub const CELL_Z_TOLERANCE: f64 = 4.0;

#[derive(Debug, Clone, Serialize)]
pub struct CellReport {
    pub label: String,
    pub exact: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramReport {
    pub samples: u64,
    pub batches: usize,
    pub cells: Vec<CellReport>,
    pub max_abs_z: f64,
    pub tolerance: f64,
    pub ok: bool,
}

/// Per-cell frequencies with batch-means standard errors.
///
/// The standard error of a cell is the larger of the batch-means estimate
/// and the independent-sample value `sqrt(p(1-p)/n)`: for rare cells the
/// batch estimate is often exactly zero.
struct Histogram {
    exact: Vec<f64>,
    labels: Vec<String>,
    batch_len: u64,
    current: Vec<u64>,
    batch_means: Vec<Vec<f64>>,
    totals: Vec<u64>,
    samples: u64,
}

impl Histogram {
    fn new(labels: Vec<String>, exact: Vec<f64>, samples: u64, batches: usize) -> Self {
        let k = exact.len();
        Histogram {
            exact,
            labels,
            batch_len: (samples / batches as u64).max(1),
            current: vec![0; k],
            batch_means: Vec::with_capacity(batches),
            totals: vec![0; k],
            samples: 0,
        }
    }

    fn record(&mut self, cell: usize) {
        self.current[cell] += 1;
        self.totals[cell] += 1;
        self.samples += 1;
        if self.samples % self.batch_len == 0 {
            let b = self.batch_len as f64;
            self.batch_means
                .push(self.current.iter().map(|&c| c as f64 / b).collect());
            self.current.iter_mut().for_each(|c| *c = 0);
        }
    }

    fn report(self) -> HistogramReport {
        let n = self.samples as f64;
        let nb = self.batch_means.len();
        let mut cells = Vec::with_capacity(self.exact.len());
        for (i, (&p, label)) in self.exact.iter().zip(self.labels).enumerate() {
            let f = self.totals[i] as f64 / n;
            let batch_se = if nb >= 2 {
                let m = self.batch_means.iter().map(|b| b[i]).sum::<f64>() / nb as f64;
                let var = self.batch_means.iter().map(|b| (b[i] - m).powi(2)).sum::<f64>()
                    / (nb - 1) as f64;
                (var / nb as f64).sqrt()
            } else {
                0.0
            };
            let iid_se = (p * (1.0 - p) / n).sqrt();
            let se = batch_se.max(iid_se);
            let z = if se > 0.0 { (f - p) / se } else { 0.0 };
            cells.push(CellReport { label, exact: p, empirical: f, std_error: se, z });
        }
        let max_abs_z = cells.iter().map(|c| c.z.abs()).fold(0.0, f64::max);
        HistogramReport {
            samples: self.samples,
            batches: nb,
            cells,
            max_abs_z,
            tolerance: CELL_Z_TOLERANCE,
            ok: max_abs_z <= CELL_Z_TOLERANCE,
        }
    }
}

fn normalize(log_w: &[f64]) -> Vec<f64> {
    let z = log_sum_exp(log_w.iter().copied());
    log_w.iter().map(|w| (w - z).exp()).collect()
}

/// Exact joint law of (triangulation, spins) for `N` strips, widths at most
/// `K_max`. Keys are `(rooted words, spin index)`.
pub fn exact_joint_law(
    n_strips: usize,
    params: &ChainParams,
) -> Result<(HashMap<(Vec<String>, u64), usize>, Vec<String>, Vec<f64>)> {
    params.validate()?;
    let mut index = HashMap::new();
    let mut labels = Vec::new();
    let mut log_w = Vec::new();
    for t in enumerate_triangulations(n_strips, params.k_max)? {
        let v = t.graph().num_vertices();
        let states = (params.q as f64).powi(v as i32);
        if labels.len() as f64 + states > MAX_HISTOGRAM_CELLS as f64 {
            return Err(Error::Resource {
                what: "exact joint law cells".into(),
                required: labels.len() as f64 + states,
                budget: MAX_HISTOGRAM_CELLS as f64,
            });
        }
        let words: Vec<String> = t.strips().iter().map(|s| s.word_string()).collect();
        for idx in 0..states as u64 {
            let s = SpinConfig::from_index(params.q, v, idx);
            let m = s.satisfied_edges(t.graph()) as f64;
            log_w.push(-params.mu * t.volume() as f64 + params.beta * m);
            labels.push(format!("{}|{}", words.join(","), idx));
            index.insert((words.clone(), idx), index.len());
        }
    }
    let p = normalize(&log_w);
    Ok((index, labels, p))
}

/// Runs the joint chain and compares the visited (triangulation, spin)
/// histogram with the exact law, cell by cell.
pub fn joint_histogram_check(
    n_strips: usize,
    params: ChainParams,
    steps: u64,
    seed: u64,
) -> Result<HistogramReport> {
    let (index, labels, exact) = exact_joint_law(n_strips, &params)?;
    if steps < 200 {
        return domain("need at least 200 steps for a histogram check");
    }
    let mut chain = ChainState::new(n_strips, params, seed)?;
    for _ in 0..steps / 20 {
        chain.step()?;
    }
    let mut h = Histogram::new(labels, exact, steps, 100);
    for _ in 0..steps {
        chain.step()?;
        let key = (chain.word_strings(), chain.spins().index());
        h.record(index[&key]);
    }
    Ok(h.report())
}

/// Swendsen–Wang alone on a fixed graph against the exact Potts measure.
pub fn sw_histogram_check(
    graph: &Graph,
    q: u32,
    beta: f64,
    sweeps: u64,
    seed: u64,
) -> Result<HistogramReport> {
    let v = graph.num_vertices();
    let states = (q as f64).powi(v as i32);
    if states > 1e4 {
        return Err(Error::Resource {
            what: "Potts configurations".into(),
            required: states,
            budget: 1e4,
        });
    }
    if sweeps < 200 {
        return domain("need at least 200 sweeps for a histogram check");
    }
    let states = states as u64;
    let log_w: Vec<f64> = (0..states)
        .map(|i| beta * SpinConfig::from_index(q, v, i).satisfied_edges(graph) as f64)
        .collect();
    let labels = (0..states).map(|i| i.to_string()).collect();
    let mut h = Histogram::new(labels, normalize(&log_w), sweeps, 100);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spins = SpinConfig::uniform(q, v);
    for _ in 0..sweeps / 20 {
        swendsen_wang_step(graph, beta, &mut spins, &mut rng);
    }
    for _ in 0..sweeps {
        swendsen_wang_step(graph, beta, &mut spins, &mut rng);
        h.record(spins.index() as usize);
    }
    Ok(h.report())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::enumerate_triangulations;

    #[test]
    fn exact_law_sizes() {
        let p = ChainParams { beta: 0.5, mu: 1.5, q: 2, k_max: 2 };
        let (index, labels, probs) = exact_joint_law(2, &p).unwrap();
        assert_eq!(index.len(), 4 + 2 * 2 * 8 + 9 * 16);
        assert_eq!(labels.len(), probs.len());
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_chain_matches_exact_law_single_strip() {
        let p = ChainParams { beta: 0.7, mu: 1.2, q: 2, k_max: 3 };
        let r = joint_histogram_check(1, p, 200_000, 3).unwrap();
        assert!(r.ok, "max |z| = {}", r.max_abs_z);
    }

    #[test]
    fn sw_matches_potts_on_small_triangulation() {
        let t = enumerate_triangulations(2, 2).unwrap().nth(5).unwrap();
        let r = sw_histogram_check(t.graph(), 3, 0.8, 100_000, 5).unwrap();
        assert!(r.ok, "max |z| = {}", r.max_abs_z);
    }
}
