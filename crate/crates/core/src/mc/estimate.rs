use rayon::prelude::*;
use serde::Serialize;

use super::state::{ChainParams, ChainState};
use crate::bounds::classify_point;
use crate::error::{domain, Result};
use crate::graph::Side;
use crate::transfer::z_n_truncated;

/// 8-point Gauss–Legendre rule on `[-1, 1]`.
const GL_NODES: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_5),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_3),
];

const JACKKNIFE_BLOCKS: usize = 20;

#[derive(Debug, Clone, Serialize)]
pub struct NodeEstimate {
    pub beta: f64,
    pub weight: f64,
    pub mean_satisfied: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FreeEnergyEstimate {
    pub n_strips: usize,
    pub k_max: usize,
    pub beta: f64,
    pub mu: f64,
    pub q: u32,
    pub sweeps_per_node: u64,
    /// `(1/N) ln Ξ_N` at truncation `K_max`.
    pub value: f64,
    /// Jackknife standard error of `value`.
    pub error: f64,
    /// `ln Ξ_N(0, μ) = ln Z_N(μ - ½ ln q)` at the same truncation.
    pub log_xi_at_zero: f64,
    pub nodes: Vec<NodeEstimate>,
}

/// Estimates `(1/N) ln Ξ_N(β, μ)` by thermodynamic integration in `β`:
/// `ln Ξ(β) = ln Ξ(0) + ∫_0^β ⟨m⟩_b db`, with `⟨m⟩` the mean number of
/// satisfied edges under the joint chain at each Gauss–Legendre node.
///
/// Points strictly below the lower curve, where the untruncated sum
/// diverges, are refused.
pub fn estimate_free_energy(
    n_strips: usize,
    params: ChainParams,
    sweeps: u64,
    seed: u64,
) -> Result<FreeEnergyEstimate> {
    params.validate()?;
    if n_strips == 0 {
        return domain("N must be positive");
    }
    if params.beta > 0.0 {
        let v = classify_point(params.beta, params.mu, params.q as f64, Side::Primal)?;
        if v.in_no_gibbs_region {
            return domain(format!(
                "(beta, mu) = ({}, {}) lies below the lower curve (no Gibbs measure); refusing to estimate",
                params.beta, params.mu
            ));
        }
    }
    if sweeps < (JACKKNIFE_BLOCKS as u64) * 10 {
        return domain(format!("need at least {} sweeps per node", JACKKNIFE_BLOCKS * 10));
    }
    let q = params.q as f64;
    let log_xi0 = z_n_truncated(n_strips, params.mu - 0.5 * q.ln(), params.k_max)?;
    let half = params.beta / 2.0;
    let block_len = sweeps / JACKKNIFE_BLOCKS as u64;

    let runs = GL_NODES
        .par_iter()
        .enumerate()
        .map(|(i, &(x, w))| -> Result<(NodeEstimate, Vec<f64>)> {
            let b = half * (x + 1.0);
            let p = ChainParams { beta: b, ..params };
            let mut chain = ChainState::with_stream(n_strips, p, seed, i as u64)?;
            for _ in 0..sweeps / 10 {
                chain.step()?;
            }
            let mut blocks = Vec::with_capacity(JACKKNIFE_BLOCKS);
            for _ in 0..JACKKNIFE_BLOCKS {
                let mut sum = 0.0;
                for _ in 0..block_len {
                    chain.step()?;
                    sum += chain.satisfied() as f64;
                }
                blocks.push(sum / block_len as f64);
            }
            let mean = blocks.iter().sum::<f64>() / blocks.len() as f64;
            Ok((NodeEstimate { beta: b, weight: half * w, mean_satisfied: mean }, blocks))
        })
        .collect::<Result<Vec<_>>>()?;

    let integral = |skip: Option<usize>| -> f64 {
        runs.iter()
            .map(|(node, blocks)| {
                let m = match skip {
                    None => node.mean_satisfied,
                    Some(j) => {
                        (blocks.iter().sum::<f64>() - blocks[j]) / (blocks.len() - 1) as f64
                    }
                };
                node.weight * m
            })
            .sum()
    };
    let full = integral(None);
    let b = JACKKNIFE_BLOCKS as f64;
    let leave_out: Vec<f64> = (0..JACKKNIFE_BLOCKS).map(|j| integral(Some(j))).collect();
    let mean_lo = leave_out.iter().sum::<f64>() / b;
    let var = (b - 1.0) / b * leave_out.iter().map(|x| (x - mean_lo).powi(2)).sum::<f64>();

    let n = n_strips as f64;
    Ok(FreeEnergyEstimate {
        n_strips,
        k_max: params.k_max,
        beta: params.beta,
        mu: params.mu,
        q: params.q,
        sweeps_per_node: sweeps,
        value: (log_xi0 + full) / n,
        error: var.sqrt() / n,
        log_xi_at_zero: log_xi0,
        nodes: runs.into_iter().map(|(node, _)| node).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::AnnealedEnsemble;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let int = |f: &dyn Fn(f64) -> f64| GL_NODES.iter().map(|&(x, w)| w * f(x)).sum::<f64>();
        assert!((int(&|_| 1.0) - 2.0).abs() < 1e-14);
        assert!((int(&|x| x.powi(14)) - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn beta_zero_is_exact() {
        let p = ChainParams { beta: 0.0, mu: 2.0, q: 2, k_max: 2 };
        let e = estimate_free_energy(2, p, 400, 0).unwrap();
        assert_eq!(e.error, 0.0);
        let exact = AnnealedEnsemble::new(2, 2, 2).unwrap().log_xi(0.0, 2.0) / 2.0;
        assert!((e.value - exact).abs() < 1e-10);
    }

    #[test]
    fn matches_exact_on_small_ensemble() {
        let p = ChainParams { beta: 0.5, mu: 2.5, q: 2, k_max: 2 };
        let e = estimate_free_energy(2, p, 40_000, 1).unwrap();
        let exact = AnnealedEnsemble::new(2, 2, 2).unwrap().log_xi(0.5, 2.5) / 2.0;
        assert!((e.value - exact).abs() < 4.0 * e.error, "{} vs {exact} ± {}", e.value, e.error);
    }

    #[test]
    fn refuses_no_gibbs_points() {
        let p = ChainParams { beta: 0.5, mu: 0.1, q: 2, k_max: 2 };
        assert!(estimate_free_energy(2, p, 1000, 0).is_err());
    }
}
