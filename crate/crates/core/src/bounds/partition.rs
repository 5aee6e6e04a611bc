use serde::Serialize;
use serde_json::json;

use crate::error::{domain, Result};
use crate::graph::{Graph, Side};
use crate::report::Inequality;
use crate::spin::{PartitionPolynomial, RollbackUnionFind};

fn check(beta: f64, q: f64) -> Result<()> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return domain(format!("beta must be nonnegative and finite, got {beta}"));
    }
    if !(q >= 2.0) {
        return domain(format!("q must be at least 2, got {q}"));
    }
    Ok(())
}

/// Log lower bounds on `Z_P` for a triangulation of volume `n` (primal) or
/// its dual: `(ln q + (3/2) n ln(e^β - 1), ln q^{n/2})` on the primal and
/// `(ln q + (3/2) n ln(e^β - 1), ln q^n)` on the dual. Returns
/// `(low-temperature, high-temperature)`.
pub fn lower_bounds_zp(n: usize, beta: f64, q: f64, side: Side) -> Result<(f64, f64)> {
    check(beta, q)?;
    let n = n as f64;
    let low_t = q.ln() + 1.5 * n * beta.exp_m1().ln();
    let high_t = match side {
        Side::Primal => 0.5 * n * q.ln(),
        Side::Dual => n * q.ln(),
    };
    Ok((low_t, high_t))
}

/// Log of the high-temperature bound
/// `((q+h)/q)^{|E|} q^{|V|+2/3} (1+u)^{|E|}` with `h = e^β - 1` and
/// `u = (q^{2/3} - 1) h / (q + h)`.
pub fn high_t_upper_bound(graph: &Graph, beta: f64, q: f64) -> Result<f64> {
    high_t_upper_bound_counts(graph.num_vertices(), graph.num_edges(), beta, q)
}

pub fn high_t_upper_bound_counts(v: usize, e: usize, beta: f64, q: f64) -> Result<f64> {
    check(beta, q)?;
    let h = beta.exp_m1();
    let u = (q.powf(2.0 / 3.0) - 1.0) * h / (q + h);
    let e = e as f64;
    Ok(e * (h / q).ln_1p() + (v as f64 + 2.0 / 3.0) * q.ln() + e * u.ln_1p())
}

/// Checks `max(lower bounds) <= Z_P <= high-T bound` for one graph.
pub fn zp_domination(
    graph: &Graph,
    poly: &PartitionPolynomial,
    n: usize,
    side: Side,
    beta: f64,
) -> Result<Vec<Inequality>> {
    let q = f64::from(poly.q);
    let z = poly.log_eval(beta);
    let (lo_t, hi_t) = lower_bounds_zp(n, beta, q, side)?;
    let up = high_t_upper_bound(graph, beta, q)?;
    let params = json!({"beta": beta, "q": poly.q, "n": n, "side": side,
        "V": graph.num_vertices(), "E": graph.num_edges()});
    Ok(vec![
        Inequality::new("zp_lower.low_temperature", params.clone(), lo_t, z),
        Inequality::new("zp_lower.high_temperature", params.clone(), hi_t, z),
        Inequality::new("zp_upper.high_temperature_expansion", params, z, up),
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct CircuitViolation {
    pub edges: Vec<usize>,
    pub k: usize,
    pub xi: usize,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CircuitReport {
    pub max_k: usize,
    pub subsets_checked: u64,
    pub violations: u64,
    /// Largest `ξ - (2/3)(k+1)` found, with its edge set.
    pub worst: Option<CircuitViolation>,
}

impl CircuitReport {
    pub fn ok(&self) -> bool {
        self.violations == 0
    }
}

/// Exhaustively compares the number of independent circuits
/// `ξ(A) = |A| - |V| + k(A)` with `(2/3)(|A| + 1)` for all edge subsets `A`
/// with `|A| <= max_k`.
pub fn circuit_bound_diagnostic(graph: &Graph, max_k: usize) -> CircuitReport {
    struct State<'a> {
        edges: Vec<(usize, usize)>,
        uf: RollbackUnionFind,
        chosen: Vec<usize>,
        nv: usize,
        max_k: usize,
        report: &'a mut CircuitReport,
        worst_excess: f64,
    }
    fn visit(s: &mut State<'_>, e: usize) {
        if e == s.edges.len() {
            let k = s.chosen.len();
            let xi = k + s.uf.components() - s.nv;
            let bound = 2.0 / 3.0 * (k as f64 + 1.0);
            s.report.subsets_checked += 1;
            if xi as f64 > bound {
                s.report.violations += 1;
                let excess = xi as f64 - bound;
                if excess > s.worst_excess {
                    s.worst_excess = excess;
                    s.report.worst = Some(CircuitViolation {
                        edges: s.chosen.clone(),
                        k,
                        xi,
                        bound,
                    });
                }
            }
            return;
        }
        visit(s, e + 1);
        if s.chosen.len() < s.max_k {
            let (a, b) = s.edges[e];
            s.uf.union(a, b);
            s.chosen.push(e);
            visit(s, e + 1);
            s.chosen.pop();
            s.uf.rollback();
        }
    }
    let mut report = CircuitReport {
        max_k,
        subsets_checked: 0,
        violations: 0,
        worst: None,
    };
    let mut state = State {
        edges: graph.edges().iter().map(|e| (e.tail, e.head)).collect(),
        uf: RollbackUnionFind::new(graph.num_vertices()),
        chosen: Vec::new(),
        nv: graph.num_vertices(),
        max_k,
        report: &mut report,
        worst_excess: f64::NEG_INFINITY,
    };
    visit(&mut state, 0);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::potts_partition_exact;

    #[test]
    fn three_loop_example() {
        let g = Graph::from_edges(1, &[(0, 0), (0, 0), (0, 0)]);
        let z = potts_partition_exact(&g, 2).unwrap();
        // Z = 2 e^3 dominates both lower bounds and is dominated at β = 1
        let r = zp_domination(&g, &z, 2, Side::Primal, 1.0).unwrap();
        assert!(r.iter().all(|i| i.ok), "{r:?}");
        assert!((z.log_eval(1.0) - (2f64.ln() + 3.0)).abs() < 1e-12);
    }

    #[test]
    fn beta_zero_values() {
        let g = Graph::from_edges(2, &[(0, 1), (0, 1), (1, 1)]);
        assert!((high_t_upper_bound(&g, 0.0, 3.0).unwrap() - (2.0 + 2.0 / 3.0) * 3f64.ln()).abs() < 1e-12);
        let (_, hi) = lower_bounds_zp(4, 0.0, 3.0, Side::Primal).unwrap();
        assert!((hi - 2.0 * 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn high_t_bound_fails_at_large_beta_on_loops() {
        // q^{V + 2/3} (1 + q^{-1/3} h)^E against q e^{βE}: the ratio tends to q^{-1/3}
        let g = Graph::from_edges(1, &[(0, 0), (0, 0), (0, 0)]);
        let z = potts_partition_exact(&g, 2).unwrap();
        let r = zp_domination(&g, &z, 2, Side::Primal, 2.0).unwrap();
        assert!(!r[2].ok);
    }

    #[test]
    fn circuit_counts() {
        let g = Graph::from_edges(1, &[(0, 0), (0, 0), (0, 0)]);
        let r = circuit_bound_diagnostic(&g, 12);
        assert_eq!(r.subsets_checked, 8);
        // two loops: ξ = 2 = (2/3)·3 is fine; three loops: ξ = 3 > 8/3
        assert_eq!(r.violations, 1);
        assert_eq!(r.worst.as_ref().unwrap().xi, 3);
        let tree = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        assert!(circuit_bound_diagnostic(&tree, 12).ok());
    }
}
