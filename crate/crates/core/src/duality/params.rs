use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::graph::Side;

/// A point of the coupled model on one side of the duality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoupledParams {
    pub beta: f64,
    pub mu: f64,
    pub q: f64,
    pub side: Side,
}

impl CoupledParams {
    pub fn new(beta: f64, mu: f64, q: f64, side: Side) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return domain(format!("beta must be positive and finite, got {beta}"));
        }
        if !(q >= 2.0) || !q.is_finite() {
            return domain(format!("q must be at least 2, got {q}"));
        }
        if mu.is_nan() {
            return domain("mu is NaN");
        }
        Ok(CoupledParams { beta, mu, q, side })
    }

    pub fn primal(beta: f64, mu: f64, q: f64) -> Result<Self> {
        Self::new(beta, mu, q, Side::Primal)
    }

    /// Bond probability `p = 1 - e^{-β}`.
    pub fn p(&self) -> f64 {
        -(-self.beta).exp_m1()
    }
}

/// `β' = ln(1 + q/(e^β - 1))`; the temperature map is an involution.
pub fn dual_beta(beta: f64, q: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return domain(format!("beta must be positive, got {beta}"));
    }
    Ok((q / beta.exp_m1()).ln_1p())
}

/// Maps a point to the opposite side:
/// primal to dual `μ* = μ - (3/2) ln(e^β - 1) + ln q`,
/// dual to primal `μ = μ* - (3/2) ln(e^{β*} - 1) + (1/2) ln q`.
pub fn dual_point(params: CoupledParams) -> Result<CoupledParams> {
    let CoupledParams { beta, mu, q, side } = CoupledParams::new(params.beta, params.mu, params.q, params.side)?;
    let h = beta.exp_m1();
    let mu_other = match side {
        Side::Primal => mu - 1.5 * h.ln() + q.ln(),
        Side::Dual => mu - 1.5 * h.ln() + 0.5 * q.ln(),
    };
    CoupledParams::new(dual_beta(beta, q)?, mu_other, q, side.opposite())
}

/// `p* = (1-p) q / ((1-p) q + p)`.
pub fn p_star(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p must lie in (0, 1), got {p}"));
    }
    if !(q > 0.0) {
        return domain(format!("q must be positive, got {q}"));
    }
    Ok((1.0 - p) * q / ((1.0 - p) * q + p))
}

/// Self-dual bond probability `√q / (1 + √q)`.
pub fn self_dual_p(q: f64) -> f64 {
    q.sqrt() / (1.0 + q.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ising_fixed_point() {
        let b = 2f64.sqrt().ln_1p();
        assert!((dual_beta(b, 2.0).unwrap() - b).abs() < 1e-12);
    }

    #[test]
    fn round_trip() {
        let p = CoupledParams::primal(0.7, 1.1, 3.0).unwrap();
        let d = dual_point(p).unwrap();
        assert_eq!(d.side, Side::Dual);
        let back = dual_point(d).unwrap();
        assert!((back.beta - 0.7).abs() < 1e-12);
        assert!((back.mu - 1.1).abs() < 1e-12);
        let prod = p.beta.exp_m1() * d.beta.exp_m1();
        assert!((prod - 3.0).abs() < 1e-12);
    }

    #[test]
    fn large_beta_limit() {
        let b = 30.0;
        let d = dual_beta(b, 2.0).unwrap();
        assert!((d / (2.0 * (-b as f64).exp()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn p_star_values() {
        assert!((p_star(0.5, 2.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        for q in [2.0, 3.0, 9.0] {
            let s = self_dual_p(q);
            assert!((p_star(s, q).unwrap() - s).abs() < 1e-14);
            let p = 0.37;
            let ps = p_star(p, q).unwrap();
            assert!((ps / (1.0 - ps) * p / (1.0 - p) - q).abs() < 1e-14 * q);
        }
        assert!(p_star(1.0 - 1e-12, 2.0).unwrap() < 1e-11);
        assert!(p_star(0.0, 2.0).is_err());
        assert!(dual_beta(0.0, 2.0).is_err());
    }

    #[test]
    fn p_star_agrees_with_dual_beta() {
        let (beta, q) = (0.9f64, 3.0);
        let ps = p_star(-(-beta).exp_m1(), q).unwrap();
        let bs = dual_beta(beta, q).unwrap();
        assert!((ps - -(-bs).exp_m1()).abs() < 1e-14);
    }
}
