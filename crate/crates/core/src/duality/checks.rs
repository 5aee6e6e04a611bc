use serde_json::json;

use super::params::{dual_beta, p_star};
use crate::error::{domain, Result};
use crate::report::Inequality;
use crate::spin::{potts_partition_exact, FkHistogram, PartitionPolynomial};
use crate::triangulation::CausalTriangulation;

/// The four two-sided comparison bounds between a ratio `r` of partition
/// functions and closed-form prefactors, in log form.
fn two_sided(
    prefix: &str,
    params: &serde_json::Value,
    ratio: f64,
    lower: f64,
    upper: f64,
) -> [Inequality; 2] {
    [
        Inequality::new(format!("{prefix}.lower"), params.clone(), lower, ratio),
        Inequality::new(format!("{prefix}.upper"), params.clone(), ratio, upper),
    ]
}

/// FK partition-function histograms of a triangulation and its dual, reusable
/// across `(p, q)`.
#[derive(Debug, Clone)]
pub struct FkDualityContext {
    n: usize,
    primal: FkHistogram,
    dual: FkHistogram,
}

impl FkDualityContext {
    pub fn new(t: &CausalTriangulation) -> Result<Self> {
        Ok(FkDualityContext {
            n: t.volume(),
            primal: FkHistogram::new(t.graph())?,
            dual: FkHistogram::new(t.dualize().graph())?,
        })
    }

    /// `ln Z_FK(p, q, t) - ln Z_FK(p*, q, t*)`.
    pub fn log_ratio(&self, p: f64, q: f64) -> Result<f64> {
        let ps = p_star(p, q)?;
        Ok(self.primal.log_partition(p, q)? - self.dual.log_partition(ps, q)?)
    }

    /// Both comparison inequalities, primal over dual and dual over primal.
    pub fn check(&self, p: f64, q: f64) -> Result<Vec<Inequality>> {
        let ps = p_star(p, q)?;
        let n = self.n as f64;
        let lq = q.ln();
        let r = self.log_ratio(p, q)?;
        let params = json!({"p": p, "p_star": ps, "q": q, "n": self.n});
        let a = 1.5 * n * (p / (1.0 - ps)).ln();
        let b = 1.5 * n * (ps / (1.0 - p)).ln();
        let mut out = Vec::with_capacity(4);
        out.extend(two_sided("fk_primal_over_dual", &params, r, a + (-1.0 - n) * lq, a + (1.0 - n) * lq));
        out.extend(two_sided(
            "fk_dual_over_primal",
            &params,
            -r,
            b + (-1.0 - 0.5 * n) * lq,
            b + (1.0 - 0.5 * n) * lq,
        ));
        Ok(out)
    }
}

pub fn fk_duality_check(t: &CausalTriangulation, p: f64, q: f64) -> Result<Vec<Inequality>> {
    FkDualityContext::new(t)?.check(p, q)
}

/// Exact Potts polynomials of a triangulation and its dual for one `q`.
#[derive(Debug, Clone)]
pub struct PottsDualityContext {
    n: usize,
    q: u32,
    primal: PartitionPolynomial,
    dual: PartitionPolynomial,
}

impl PottsDualityContext {
    pub fn new(t: &CausalTriangulation, q: u32) -> Result<Self> {
        Ok(PottsDualityContext {
            n: t.volume(),
            q,
            primal: potts_partition_exact(t.graph(), q)?,
            dual: potts_partition_exact(t.dualize().graph(), q)?,
        })
    }

    /// `ln Z_P(β, q, t) - ln Z_P(β*, q, t*)`.
    pub fn log_ratio(&self, beta: f64) -> Result<f64> {
        let bs = dual_beta(beta, f64::from(self.q))?;
        Ok(self.primal.log_eval(beta) - self.dual.log_eval(bs))
    }

    pub fn check(&self, beta: f64) -> Result<Vec<Inequality>> {
        if !(beta > 0.0) {
            return domain(format!("beta must be positive, got {beta}"));
        }
        let q = f64::from(self.q);
        let bs = dual_beta(beta, q)?;
        let (p, ps) = (-(-beta).exp_m1(), -(-bs).exp_m1());
        let n = self.n as f64;
        let lq = q.ln();
        let r = self.log_ratio(beta)?;
        let params = json!({"beta": beta, "beta_star": bs, "q": self.q, "n": self.n});
        let a = 1.5 * n * (p / (1.0 - ps)).ln() + 1.5 * (beta - bs) * n;
        let b = 1.5 * n * (ps / (1.0 - p)).ln() + 1.5 * (bs - beta) * n;
        let mut out = Vec::with_capacity(4);
        out.extend(two_sided("potts_primal_over_dual", &params, r, a + (-1.0 - n) * lq, a + (1.0 - n) * lq));
        out.extend(two_sided(
            "potts_dual_over_primal",
            &params,
            -r,
            b + (-1.0 - 0.5 * n) * lq,
            b + (1.0 - 0.5 * n) * lq,
        ));
        Ok(out)
    }
}

pub fn potts_duality_check(t: &CausalTriangulation, beta: f64, q: u32) -> Result<Vec<Inequality>> {
    PottsDualityContext::new(t, q)?.check(beta)
}
