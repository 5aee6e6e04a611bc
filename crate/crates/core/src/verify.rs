//! Verification suites shared by the command-line tool and the acceptance
//! tests: exhaustive Euler/δ sweeps, Edwards–Sokal identities, duality
//! inequalities and bound domination over sets of enumerated triangulations.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{circuit_bound_diagnostic, zp_domination};
use crate::duality::{AnnealedEnsemble, FkDualityContext, PottsDualityContext};
use crate::error::Result;
use crate::graph::Side;
use crate::report::Inequality;
use crate::spin::{
    cluster_stats, dual_config, edwards_sokal_with_histogram, potts_partition_exact, BondConfig, FkHistogram,
};
use crate::triangulation::{enumerate_triangulations, TorusComplex};

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub suite: String,
    pub name: String,
    pub instance: String,
    pub ok: bool,
    /// Log-scale margin for inequalities, discrepancy for identities.
    pub margin: Option<f64>,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkipRecord {
    pub suite: String,
    pub instance: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckRecord>,
    pub skipped: Vec<SkipRecord>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.ok)
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.checks.extend(other.checks);
        self.skipped.extend(other.skipped);
    }

    fn push_inequalities(&mut self, suite: &str, instance: &str, items: Vec<Inequality>) {
        for i in items {
            self.checks.push(CheckRecord {
                suite: suite.into(),
                name: i.name.clone(),
                instance: instance.into(),
                ok: i.ok,
                margin: Some(i.margin_log),
                detail: serde_json::to_value(&i).unwrap_or(Value::Null),
            });
        }
    }
}

/// One enumerated triangulation with its dual.
#[derive(Debug, Clone)]
pub struct Instance {
    pub n_strips: usize,
    pub max_width: usize,
    pub label: String,
    pub complex: TorusComplex,
}

impl Instance {
    pub fn num_edges(&self) -> usize {
        self.complex.primal.graph().num_edges()
    }
}

/// Every triangulation with `1 <= N <= n_max` and widths at most `k_max`.
pub fn instances(n_max: usize, k_max: usize) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        for (i, t) in enumerate_triangulations(n, k_max)?.enumerate() {
            let words: Vec<String> = t.strips().iter().map(|s| s.word_string()).collect();
            out.push(Instance {
                n_strips: n,
                max_width: k_max,
                label: format!("N={n} K={k_max} #{i} [{}]", words.join(",")),
                complex: TorusComplex::new(t),
            });
        }
    }
    Ok(out)
}

/// Overwrites one back-map entry of the first instance with at least two
/// edges, for negative tests.
pub fn inject_backmap_fault(instances: &mut [Instance]) -> Option<String> {
    let inst = instances.iter_mut().find(|i| i.num_edges() >= 2)?;
    inst.complex.dual.corrupt_back_map(0, 1);
    Some(inst.label.clone())
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Primal => "primal",
        Side::Dual => "dual",
    }
}

fn side_label(inst: &Instance, side: Side) -> String {
    format!("{} {}", inst.label, side_name(side))
}

fn skip(suite: &str, inst: &Instance, reason: String) -> SkipRecord {
    SkipRecord { suite: suite.into(), instance: inst.label.clone(), reason }
}

/// Exhaustive sweep over all `2^|E|` bond configurations: the Euler relation
/// `|V| - o(w) + f(w) = k(w) + 1 - δ(w)`, `δ(w) + δ(w*) = 2` and
/// `f(w) = k(w*)`. Instances with more than `max_edges` edges are skipped.
pub fn euler_suite(instances: &[Instance], max_edges: usize) -> Result<SuiteReport> {
    const SUITE: &str = "euler";
    let mut report = SuiteReport::default();
    for inst in instances {
        let c = &inst.complex;
        let bijective = c.dual.back_map_is_bijection();
        report.checks.push(CheckRecord {
            suite: SUITE.into(),
            name: "dual.back_map_bijection".into(),
            instance: inst.label.clone(),
            ok: bijective,
            margin: None,
            detail: Value::Null,
        });
        let e = inst.num_edges();
        if e > max_edges {
            report.skipped.push(skip(SUITE, inst, format!("|E| = {e} exceeds the exhaustive budget {max_edges}")));
            continue;
        }
        let v = c.primal.graph().num_vertices();
        let (euler_bad, delta_bad, face_bad) = (0..1u64 << e)
            .into_par_iter()
            .map(|mask| -> Result<(u64, u64, u64)> {
                let w = BondConfig::from_mask(Side::Primal, e, mask);
                let s = cluster_stats(c, &w)?;
                let ds = cluster_stats(c, &dual_config(c, &w))?;
                Ok((
                    u64::from(!s.euler_holds(v)),
                    u64::from(s.delta + ds.delta != 2),
                    u64::from(s.faces != ds.clusters),
                ))
            })
            .try_reduce(|| (0, 0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1, a.2 + b.2)))?;
        let configs = 1u64 << e;
        for (name, bad) in [
            ("euler.relation", euler_bad),
            ("euler.delta_sum", delta_bad),
            ("euler.faces_are_dual_clusters", face_bad),
        ] {
            report.checks.push(CheckRecord {
                suite: SUITE.into(),
                name: name.into(),
                instance: inst.label.clone(),
                ok: bad == 0,
                margin: None,
                detail: json!({"configurations": configs, "violations": bad}),
            });
        }
    }
    Ok(report)
}

/// Relative discrepancy between `Z_FK(p, q)` and `e^{-β|E|} Z_P(β, q)` on the
/// requested graphs of each instance.
pub fn es_suite(
    instances: &[Instance],
    sides: &[Side],
    qs: &[u32],
    betas: &[f64],
    max_edges: usize,
    tolerance: f64,
) -> Result<SuiteReport> {
    const SUITE: &str = "edwards_sokal";
    let mut report = SuiteReport::default();
    for inst in instances {
        if inst.num_edges() > max_edges {
            report.skipped.push(skip(SUITE, inst, format!("|E| = {} exceeds {max_edges}", inst.num_edges())));
            continue;
        }
        for &side in sides {
            let graph = inst.complex.graph(side);
            let hist = match FkHistogram::new(graph) {
                Ok(h) => h,
                Err(crate::Error::Resource { what, required, budget }) => {
                    let why = format!("{} {what}: {required:e} exceeds {budget:e}", side_name(side));
                    report.skipped.push(skip(SUITE, inst, why));
                    continue;
                }
                Err(e) => return Err(e),
            };
            for &q in qs {
                match edwards_sokal_with_histogram(&hist, graph, q, betas) {
                    Ok(d) => {
                        let rel = d.iter().map(|x| x.relative).fold(0.0, f64::max);
                        report.checks.push(CheckRecord {
                            suite: SUITE.into(),
                            name: format!("es.{}", side_name(side)),
                            instance: inst.label.clone(),
                            ok: rel <= tolerance,
                            margin: Some(rel),
                            detail: json!({"q": q, "betas": betas, "max_relative": rel, "tolerance": tolerance}),
                        });
                    }
                    Err(crate::Error::Resource { what, required, budget }) => report.skipped.push(skip(
                        SUITE,
                        inst,
                        format!("{} q={q} {what}: {required:e} exceeds {budget:e}", side_name(side)),
                    )),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(report)
}

/// Per-triangulation FK and Potts comparison inequalities, then the annealed
/// sums for every `N <= n_max` at truncation `k_max`.
pub fn duality_suite(
    instances: &[Instance],
    n_max: usize,
    k_max: usize,
    qs: &[u32],
    betas: &[f64],
    mus: &[f64],
) -> Result<SuiteReport> {
    const SUITE: &str = "duality";
    let mut report = SuiteReport::default();
    for inst in instances {
        let fk = FkDualityContext::new(&inst.complex.primal)?;
        for &q in qs {
            let potts = PottsDualityContext::new(&inst.complex.primal, q)?;
            for &beta in betas {
                let p = -(-beta).exp_m1();
                report.push_inequalities(SUITE, &inst.label, fk.check(p, f64::from(q))?);
                report.push_inequalities(SUITE, &inst.label, potts.check(beta)?);
            }
        }
    }
    for n in 1..=n_max {
        for &q in qs {
            let ens = AnnealedEnsemble::new(n, k_max, q)?;
            let label = format!("annealed N={n} K={k_max} q={q}");
            for &beta in betas {
                for &mu in mus {
                    let r = ens.duality_check(beta, mu)?;
                    report.push_inequalities(SUITE, &label, r.inequalities);
                }
            }
        }
    }
    Ok(report)
}

/// Exact `Z_P` against the lower bounds and the high-temperature upper bound
/// on both sides, plus the exhaustive circuit-count bound up to `circuit_k`.
pub fn bounds_suite(
    instances: &[Instance],
    sides: &[Side],
    qs: &[u32],
    betas: &[f64],
    circuit_k: usize,
) -> Result<SuiteReport> {
    const SUITE: &str = "bounds";
    let mut report = SuiteReport::default();
    for inst in instances {
        let n = inst.complex.volume();
        for &side in sides {
            let graph = inst.complex.graph(side);
            for &q in qs {
                let poly = match potts_partition_exact(graph, q) {
                    Ok(p) => p,
                    Err(crate::Error::Resource { what, required, budget }) => {
                        report.skipped.push(skip(SUITE, inst, format!("{what}: {required:e} exceeds {budget:e}")));
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                for &beta in betas {
                    let label = side_label(inst, side);
                    report.push_inequalities(SUITE, &label, zp_domination(graph, &poly, n, side, beta)?);
                }
            }
            if circuit_k > 0 {
                let c = circuit_bound_diagnostic(graph, circuit_k);
                report.checks.push(CheckRecord {
                    suite: SUITE.into(),
                    name: "circuit_bound".into(),
                    instance: side_label(inst, side),
                    ok: c.ok(),
                    margin: c.worst.as_ref().map(|w| w.bound - w.xi as f64),
                    detail: serde_json::to_value(&c).unwrap_or(Value::Null),
                });
            }
        }
    }
    Ok(report)
}
