use serde::Serialize;

use crate::duality::{dual_point, CoupledParams};
use crate::error::{domain, structural, Result};
use crate::graph::Side;
use crate::transfer::lambda_closed_form;

const LN_2: f64 = std::f64::consts::LN_2;

fn check(beta: f64, q: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return domain(format!("beta must be positive and finite, got {beta}"));
    }
    if !(q >= 2.0) || !q.is_finite() {
        return domain(format!("q must be at least 2, got {q}"));
    }
    Ok(())
}

/// Constant branch of the no-Gibbs boundary: `ln 2√q` (primal), `ln 2q` (dual).
pub fn small_beta_constant(q: f64, side: Side) -> f64 {
    match side {
        Side::Primal => LN_2 + 0.5 * q.ln(),
        Side::Dual => LN_2 + q.ln(),
    }
}

/// Boundary of the no-Gibbs region: `max{const, (3/2) ln(e^β - 1) + ln 2}`.
pub fn lower_curve(beta: f64, q: f64, side: Side) -> Result<f64> {
    check(beta, q)?;
    Ok(small_beta_constant(q, side).max(1.5 * beta.exp_m1().ln() + LN_2))
}

/// Boundary of the sufficient subcriticality condition.
///
/// Primal: `(3/2) ln(q + e^β - 1) + ln 2 - ln q + (3/2) ln(1 + (q^{2/3}-1)(e^β-1)/(q+e^β-1))`.
/// Dual: `(3/2) β + ln 2 + (3/2) ln(1 + (q^{2/3}-1) e^{-β})`.
pub fn upper_curve(beta: f64, q: f64, side: Side) -> Result<f64> {
    check(beta, q)?;
    let c = q.powf(2.0 / 3.0) - 1.0;
    Ok(match side {
        Side::Primal => {
            let h = beta.exp_m1();
            1.5 * (q + h).ln() + LN_2 - q.ln() + 1.5 * (c * h / (q + h)).ln_1p()
        }
        Side::Dual => 1.5 * beta + LN_2 + 1.5 * (c * (-beta).exp()).ln_1p(),
    })
}

/// Large-β asymptote `(3/2) β + ln 2` shared by all four curves.
pub fn asymptote(beta: f64) -> f64 {
    1.5 * beta + LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionVerdict {
    pub beta: f64,
    pub mu: f64,
    pub q: f64,
    pub side: Side,
    /// Strictly below the lower curve: `Ξ_N = ∞` for large `N`.
    pub in_no_gibbs_region: bool,
    /// Strictly above the upper curve: free energy exists.
    pub in_subcritical_region: bool,
    /// Neither; the critical curve lies here. Boundary points land here.
    pub band: bool,
}

pub fn classify_point(beta: f64, mu: f64, q: f64, side: Side) -> Result<RegionVerdict> {
    if mu.is_nan() {
        return domain("mu is NaN");
    }
    let lower = lower_curve(beta, q, side)?;
    let upper = upper_curve(beta, q, side)?;
    let in_no_gibbs_region = mu < lower;
    let in_subcritical_region = mu > upper;
    if in_no_gibbs_region && in_subcritical_region {
        return structural(format!(
            "inconsistent regions at beta = {beta}, mu = {mu}, q = {q}: lower curve {lower} exceeds upper curve {upper}"
        ));
    }
    Ok(RegionVerdict {
        beta,
        mu,
        q,
        side,
        in_no_gibbs_region,
        in_subcritical_region,
        band: !in_no_gibbs_region && !in_subcritical_region,
    })
}

/// `φ(β, μ) = (ln(1 + q/(e^β - 1)), μ - (3/2) ln(e^β - 1) + ln q)`; the
/// same map as the primal-to-dual parameter duality.
pub fn region_map_phi(beta: f64, mu: f64, q: f64) -> Result<(f64, f64)> {
    let d = dual_point(CoupledParams::primal(beta, mu, q)?)?;
    Ok((d.beta, d.mu))
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveRow {
    pub beta: f64,
    pub lower: f64,
    pub upper: f64,
    pub asymptote: f64,
    pub small_beta_const: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveTable {
    pub q: f64,
    pub side: Side,
    pub rows: Vec<CurveRow>,
}

impl CurveTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta,lower,upper,asymptote,small_beta_const\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.beta, r.lower, r.upper, r.asymptote, r.small_beta_const
            ));
        }
        out
    }

    pub fn lower_below_upper(&self) -> bool {
        self.rows.iter().all(|r| r.lower <= r.upper)
    }
}

pub fn curve_table(q: f64, side: Side, betas: &[f64]) -> Result<CurveTable> {
    if betas.is_empty() {
        return domain("empty beta grid");
    }
    if betas.windows(2).any(|w| !(w[1] > w[0])) || !(betas[0] > 0.0) {
        return domain("beta grid must be positive and strictly increasing");
    }
    let rows = betas
        .iter()
        .map(|&beta| {
            Ok(CurveRow {
                beta,
                lower: lower_curve(beta, q, side)?,
                upper: upper_curve(beta, q, side)?,
                asymptote: asymptote(beta),
                small_beta_const: small_beta_constant(q, side),
            })
        })
        .collect::<Result<_>>()?;
    Ok(CurveTable { q, side, rows })
}

/// `n` points from `a` to `b` inclusive, evenly spaced in `ln β`.
pub fn log_grid(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if !(a > 0.0 && b > a) || n < 2 {
        return domain(format!("need 0 < a < b and n >= 2, got {a}:{b}:{n}"));
    }
    let (la, lb) = (a.ln(), b.ln());
    Ok((0..n)
        .map(|i| match i {
            0 => a,
            i if i == n - 1 => b,
            i => (la + (lb - la) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoteCheck {
    pub q: f64,
    pub side: Side,
    /// `|lower(10^-3) - small_beta_const|`.
    pub small_beta_deviation: f64,
    /// `|lower(20) - asymptote(20)|` and `|upper(20) - asymptote(20)|`.
    pub large_beta_lower_deviation: f64,
    pub large_beta_upper_deviation: f64,
    pub ok: bool,
}

pub const SMALL_BETA: f64 = 1e-3;
pub const LARGE_BETA: f64 = 20.0;
pub const SMALL_BETA_TOLERANCE: f64 = 1e-6;
pub const LARGE_BETA_TOLERANCE: f64 = 0.01;

pub fn asymptote_check(q: f64, side: Side) -> Result<AsymptoteCheck> {
    let small = (lower_curve(SMALL_BETA, q, side)? - small_beta_constant(q, side)).abs();
    let a = asymptote(LARGE_BETA);
    let lo = (lower_curve(LARGE_BETA, q, side)? - a).abs();
    let up = (upper_curve(LARGE_BETA, q, side)? - a).abs();
    Ok(AsymptoteCheck {
        q,
        side,
        small_beta_deviation: small,
        large_beta_lower_deviation: lo,
        large_beta_upper_deviation: up,
        ok: small <= SMALL_BETA_TOLERANCE && lo <= LARGE_BETA_TOLERANCE && up <= LARGE_BETA_TOLERANCE,
    })
}

/// q = 2 dual-side curves: `φ_inf(β*) = max{2 ln 2, (3/2) ln(e^{β*}-1) + ln 2}`
/// and the closed-form branch `φ_sup(β*) = (3/2) ln(2^{2/3} + e^{β*} - 1) + ln 2`.
/// The competing transfer-matrix curve from the literature is not included,
/// so `φ_sup` here is only its closed-form argument.
pub fn phi_inf(beta_star: f64) -> Result<f64> {
    lower_curve(beta_star, 2.0, Side::Dual)
}

pub fn phi_sup(beta_star: f64) -> Result<f64> {
    check(beta_star, 2.0)?;
    Ok(1.5 * (2f64.powf(2.0 / 3.0) + beta_star.exp_m1()).ln() + LN_2)
}

#[derive(Debug, Clone, Serialize)]
pub struct FreeEnergySandwich {
    pub beta_star: f64,
    pub mu_star: f64,
    /// `ln Λ(μ* - φ_inf(β*) + ln 2)`, `None` when the argument is below `ln 2`.
    pub lower: Option<f64>,
    /// `ln Λ(μ* - φ_sup(β*) + ln 2)`, `None` when the argument is below `ln 2`.
    pub upper: Option<f64>,
    pub note: &'static str,
}

/// Bracket for `lim (1/N) ln Ξ*_N` on the q = 2 dual side.
pub fn free_energy_sandwich(beta_star: f64, mu_star: f64) -> Result<FreeEnergySandwich> {
    let eval = |phi: f64| lambda_closed_form(mu_star - phi + LN_2).ok().map(f64::ln);
    Ok(FreeEnergySandwich {
        beta_star,
        mu_star,
        lower: eval(phi_inf(beta_star)?),
        upper: eval(phi_sup(beta_star)?),
        note: "phi_sup uses only its closed-form branch",
    })
}

/// The q = 2 critical-temperature display compares against `½ ln(1 + √2)`,
/// while the temperature map used here fixes `β = ln(1 + √2)`; the factor of
/// two reflects a different spin-coupling normalization. Reported, not asserted.
pub fn ising_critical_commentary() -> (f64, f64) {
    let fixed = 2f64.sqrt().ln_1p();
    (0.5 * fixed, fixed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upper_curve_simplifications() {
        for q in [2.0f64, 3.0, 9.0] {
            for beta in [0.01, 0.5, 3.0] {
                let h = f64::exp_m1(beta);
                let p = 1.5 * (q.cbrt() + h).ln() + LN_2;
                assert!((upper_curve(beta, q, Side::Primal).unwrap() - p).abs() < 1e-12);
                let d = 1.5 * (q.powf(2.0 / 3.0) + h).ln() + LN_2;
                assert!((upper_curve(beta, q, Side::Dual).unwrap() - d).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classification_examples() {
        let v = classify_point(0.1, 1.0, 4.0, Side::Primal).unwrap();
        assert!(v.in_no_gibbs_region && !v.band);
        let v = classify_point(5.0, 10.0, 2.0, Side::Primal).unwrap();
        assert!(v.in_subcritical_region);
        let mid = classify_point(1.0, 1.8, 2.0, Side::Primal).unwrap();
        assert!(mid.band);
        // boundary points fall in the band
        let b = lower_curve(0.3, 3.0, Side::Dual).unwrap();
        assert!(classify_point(0.3, b, 3.0, Side::Dual).unwrap().band);
    }

    #[test]
    fn phi_maps_boundary_branches() {
        for q in [2.0f64, 3.0, 4.0, 9.0] {
            for beta in [0.05, 0.4, 1.0, 2.5, 7.0] {
                // μ = ½ ln q + ln 2  ->  μ* = (3/2) ln(e^{β*} - 1) + ln 2
                let (bs, ms) = region_map_phi(beta, 0.5 * q.ln() + LN_2, q).unwrap();
                assert!((ms - (1.5 * bs.exp_m1().ln() + LN_2)).abs() < 1e-10);
                // μ = (3/2) ln(e^β - 1) + ln 2  ->  μ* = ln q + ln 2
                let (_, ms) = region_map_phi(beta, 1.5 * beta.exp_m1().ln() + LN_2, q).unwrap();
                assert!((ms - (q.ln() + LN_2)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn table_and_limits() {
        let grid = log_grid(0.01, 20.0, 200).unwrap();
        assert_eq!(grid.len(), 200);
        assert_eq!(grid[199], 20.0);
        for q in [2.0, 3.0, 4.0, 9.0] {
            for side in [Side::Primal, Side::Dual] {
                assert!(curve_table(q, side, &grid).unwrap().lower_below_upper());
                assert!(asymptote_check(q, side).unwrap().ok);
            }
        }
        let csv = curve_table(2.0, Side::Dual, &[1.0]).unwrap().to_csv();
        assert!(csv.starts_with("beta,lower,upper,asymptote,small_beta_const\n1,"));
        assert!(curve_table(2.0, Side::Dual, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn sandwich_orders() {
        let s = free_energy_sandwich(0.5, 5.0).unwrap();
        let (lo, up) = (s.lower.unwrap(), s.upper.unwrap());
        assert!(lo < up);
        assert!(free_energy_sandwich(0.5, 1.0).unwrap().lower.is_none());
    }
}
