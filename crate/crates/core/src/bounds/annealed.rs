use serde::Serialize;
use serde_json::json;

use crate::duality::AnnealedEnsemble;
use crate::error::{domain, Result};
use crate::report::Inequality;
use crate::transfer::z_n_truncated;

#[derive(Debug, Clone, Serialize)]
pub struct AnnealedBound {
    /// Natural log of the bound at truncation `K`.
    pub log_value: f64,
    /// `(shifted μ, ln of the branch)` for each branch of the bound.
    pub branches: Vec<(f64, f64)>,
    /// Some shifted `μ` is at most `ln 2`, so the untruncated pure-CDT sum
    /// behind this bound diverges.
    pub divergent: bool,
}

fn check(beta: f64, q: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return domain(format!("beta must be nonnegative and finite, got {beta}"));
    }
    if !(q >= 2.0) {
        return domain(format!("q must be at least 2, got {q}"));
    }
    Ok(())
}

fn bound(n_strips: usize, k: usize, branches: Vec<(f64, f64)>) -> Result<AnnealedBound> {
    let evaluated = branches
        .into_iter()
        .map(|(mu, prefactor)| Ok((mu, prefactor + z_n_truncated(n_strips, mu, k)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(AnnealedBound {
        log_value: evaluated.iter().map(|b| b.1).fold(f64::NEG_INFINITY, f64::max),
        divergent: evaluated.iter().any(|b| b.0 <= std::f64::consts::LN_2),
        branches: evaluated,
    })
}

/// `Ξ_N(β, μ) >= max{q Z_N(μ - (3/2) ln(e^β - 1)), Z_N(μ - ½ ln q)}`.
pub fn annealed_lower_bound(n_strips: usize, beta: f64, mu: f64, q: f64, k: usize) -> Result<AnnealedBound> {
    check(beta, q)?;
    bound(
        n_strips,
        k,
        vec![(mu - 1.5 * beta.exp_m1().ln(), q.ln()), (mu - 0.5 * q.ln(), 0.0)],
    )
}

/// `μ̃ = μ - (3/2) ln((q+h)/q) - ½ ln q - (3/2) ln(1+u)`.
pub fn mu_tilde(beta: f64, mu: f64, q: f64) -> f64 {
    let h = beta.exp_m1();
    let u = (q.powf(2.0 / 3.0) - 1.0) * h / (q + h);
    mu - 1.5 * (h / q).ln_1p() - 0.5 * q.ln() - 1.5 * u.ln_1p()
}

/// `Ξ_N(β, μ) <= q^{2/3} Z_N(μ̃)`.
pub fn annealed_upper_bound(n_strips: usize, beta: f64, mu: f64, q: f64, k: usize) -> Result<AnnealedBound> {
    check(beta, q)?;
    bound(n_strips, k, vec![(mu_tilde(beta, mu, q), 2.0 / 3.0 * q.ln())])
}

/// Compares both bounds with the exact truncated `Ξ_N` at the same `K`.
pub fn annealed_sandwich(ensemble: &AnnealedEnsemble, beta: f64, mu: f64) -> Result<Vec<Inequality>> {
    let (n, k, q) = (ensemble.num_strips(), ensemble.truncation(), f64::from(ensemble.q()));
    let xi = ensemble.log_xi(beta, mu);
    let lo = annealed_lower_bound(n, beta, mu, q, k)?;
    let up = annealed_upper_bound(n, beta, mu, q, k)?;
    let params = json!({"N": n, "K": k, "q": ensemble.q(), "beta": beta, "mu": mu});
    Ok(vec![
        Inequality::new("annealed_lower_bound", params.clone(), lo.log_value, xi),
        Inequality::new("annealed_upper_bound", params, xi, up.log_value),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_point_lower() {
        let e = AnnealedEnsemble::new(2, 2, 2).unwrap();
        let r = annealed_sandwich(&e, 0.7, 2.5).unwrap();
        assert!(r[0].ok, "{r:?}");
    }

    #[test]
    fn beta_zero_reductions() {
        let lo = annealed_lower_bound(3, 0.0, 2.0, 3.0, 4).unwrap();
        assert_eq!(lo.branches[0].1, f64::NEG_INFINITY);
        let z = z_n_truncated(3, 2.0 - 0.5 * 3f64.ln(), 4).unwrap();
        assert!((lo.log_value - z).abs() < 1e-12);
        let up = annealed_upper_bound(3, 0.0, 2.0, 3.0, 4).unwrap();
        assert!((up.log_value - (z + 2.0 / 3.0 * 3f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_k() {
        let e2 = AnnealedEnsemble::new(2, 2, 2).unwrap();
        let e3 = AnnealedEnsemble::new(2, 3, 2).unwrap();
        assert!(e3.log_xi(0.5, 2.0) > e2.log_xi(0.5, 2.0));
        let a = annealed_lower_bound(2, 0.5, 2.0, 2.0, 2).unwrap().log_value;
        let b = annealed_lower_bound(2, 0.5, 2.0, 2.0, 3).unwrap().log_value;
        assert!(b > a);
    }

    #[test]
    fn divergence_flag() {
        assert!(annealed_lower_bound(2, 0.5, 0.5, 2.0, 3).unwrap().divergent);
        assert!(!annealed_lower_bound(2, 0.5, 3.0, 2.0, 3).unwrap().divergent);
    }
}
