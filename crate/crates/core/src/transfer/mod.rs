//! Pure causal-triangulation transfer matrix: `u(n, n') = binom(n+n'-1, n-1) e^{-μ(n+n')}`.

mod matrix;
mod sample;

use serde::Serialize;

pub use matrix::ScaledMatrix;
pub use sample::{sample_widths, PureGibbsWidthLaw};

use crate::error::{domain, Result};
use crate::numeric::{ln_binomial, log_sum_exp};

/// `ln u(n, n')` for widths `n, n' >= 1`.
pub fn log_u(n: usize, n_up: usize, mu: f64) -> f64 {
    ln_binomial((n + n_up - 1) as u64, (n - 1) as u64) - mu * (n + n_up) as f64
}

fn check_finite(name: &str, x: f64) -> Result<()> {
    if x.is_nan() {
        return domain(format!("{name} is NaN"));
    }
    Ok(())
}

/// The `K x K` truncation of the transfer matrix. Row index is the lower
/// width, column the upper width, both 1-based in the accessors.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    mu: f64,
    k: usize,
    matrix: ScaledMatrix,
}

impl TransferMatrix {
    pub fn new(mu: f64, k: usize) -> Result<Self> {
        check_finite("mu", mu)?;
        if k == 0 {
            return domain("truncation K must be at least 1");
        }
        let matrix = ScaledMatrix::from_log_entries(k, |i, j| log_u(i + 1, j + 1, mu));
        Ok(TransferMatrix { mu, k, matrix })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn truncation(&self) -> usize {
        self.k
    }

    /// `ln u(n, n')`, 1-based.
    pub fn log_entry(&self, n: usize, n_up: usize) -> f64 {
        self.matrix.log_entry(n - 1, n_up - 1)
    }

    pub fn scaled(&self) -> &ScaledMatrix {
        &self.matrix
    }

    /// `ln` of the leading eigenvalue by power iteration (relative stop 1e-12,
    /// at most 1e5 iterations).
    pub fn log_leading_eigenvalue(&self) -> Result<f64> {
        let (l, iters, ok) = self.matrix.log_leading_eigenvalue(1e-12, 100_000);
        if !ok {
            return domain(format!("power iteration did not converge in {iters} iterations"));
        }
        Ok(l)
    }

    /// `ln tr(U^N)`.
    pub fn log_trace_power(&self, n_strips: usize) -> f64 {
        self.matrix.pow(n_strips).log_trace()
    }
}

/// `Λ(μ) = [(1 - sqrt(1 - 4e^{-2μ})) / (2e^{-μ})]^2`, evaluated as
/// `[e^{-d} / (1 + sqrt(-expm1(-2d)))]^2` with `d = μ - ln 2` so that
/// `Λ(ln 2) = 1` exactly.
pub fn lambda_closed_form(mu: f64) -> Result<f64> {
    check_finite("mu", mu)?;
    let d = mu - std::f64::consts::LN_2;
    if d < 0.0 {
        return domain(format!("Λ undefined below ln 2 (mu = {mu})"));
    }
    let r = (-d).exp() / (1.0 + (-(-2.0 * d).exp_m1()).sqrt());
    Ok(r * r)
}

/// `ln Σ_{widths <= K} Π_i u(n^i, n^{i+1}) = ln tr(U_K^N)`.
pub fn z_n_truncated(n_strips: usize, mu: f64, k: usize) -> Result<f64> {
    if n_strips == 0 {
        return domain("N must be at least 1");
    }
    Ok(TransferMatrix::new(mu, k)?.log_trace_power(n_strips))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converging,
    Diverging,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivergenceReport {
    pub n: usize,
    pub mu: f64,
    pub k_max: usize,
    /// `ln(2 cos(π/(N+1)))`; `Z_N` can only be finite above it.
    pub threshold: f64,
    pub verdict: Verdict,
    /// Geometric increment ratio fitted over the top half of `K`.
    pub ratio: f64,
    /// `ln(Z^{(K)} - Z^{(K-1)})` for `K = 1..=K_max` (with `Z^{(0)} = 0`).
    pub log_increments: Vec<f64>,
}

/// `ln(Z_N^{(K)} - Z_N^{(K-1)})`: the weight of width sequences whose maximum
/// is exactly `K`.
///
/// Computed without subtraction on a doubled state space `(n, seen_K)`, so the
/// increment is a sum of nonnegative path weights.
pub fn log_increment(n_strips: usize, mu: f64, k: usize) -> Result<f64> {
    if n_strips == 0 || k == 0 {
        return domain("need N >= 1 and K >= 1");
    }
    check_finite("mu", mu)?;
    // states: (n, 0) at index n-1, (n, 1) at index k + n - 1
    let dim = 2 * k;
    let m = ScaledMatrix::from_log_entries(dim, |i, j| {
        let (a, fa) = (i % k + 1, i / k);
        let (b, fb) = (j % k + 1, j / k);
        let allowed = match (fa, fb) {
            (0, 0) => a < k && b < k,
            (0, 1) => a < k && b == k,
            (1, 1) => true,
            _ => false,
        };
        if allowed {
            log_u(a, b, mu)
        } else {
            f64::NEG_INFINITY
        }
    });
    let p = m.pow(n_strips);
    let terms = (0..k - 1)
        .map(|n0| p.log_entry(n0, k + n0))
        .chain(std::iter::once(p.log_entry(k + k - 1, k + k - 1)));
    Ok(log_sum_exp(terms))
}

pub fn divergence_threshold(n_strips: usize) -> f64 {
    (2.0 * (std::f64::consts::PI / (n_strips as f64 + 1.0)).cos()).ln()
}

/// Heuristic finite-`K` verdict on whether `Z_N(μ)` is finite; the analytic
/// threshold is reported alongside and is the authoritative necessary
/// condition.
pub fn divergence_diagnostic(n_strips: usize, mu: f64, k_max: usize) -> Result<DivergenceReport> {
    if k_max < 8 {
        return domain(format!("K_max = {k_max} < 8 leaves no window for the diagnostic"));
    }
    let log_increments = (1..=k_max)
        .map(|k| log_increment(n_strips, mu, k))
        .collect::<Result<Vec<_>>>()?;
    let half = k_max / 2;
    // top half: K in half..=k_max, 1-based
    let window = &log_increments[half - 1..];
    let non_decreasing = window.windows(2).all(|w| w[1] >= w[0]);
    let ratio = ((log_increments[k_max - 1] - log_increments[half - 1]) / (k_max - half) as f64).exp();
    let verdict = if non_decreasing || ratio >= 1.0 {
        Verdict::Diverging
    } else {
        Verdict::Converging
    };
    Ok(DivergenceReport {
        n: n_strips,
        mu,
        k_max,
        threshold: divergence_threshold(n_strips),
        verdict,
        ratio,
        log_increments,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub k: usize,
    pub mu: f64,
    pub log_zn: f64,
    /// `ln Λ(μ)`, `NaN` below `ln 2`.
    pub log_lambda: f64,
    /// `(1/N) ln Z_N - ln Λ(μ)`.
    pub gap: f64,
}

pub fn scan(ns: &[usize], ks: &[usize], mus: &[f64]) -> Result<Vec<ScanRow>> {
    use rayon::prelude::*;
    let points: Vec<(usize, usize, f64)> = ns
        .iter()
        .flat_map(|&n| ks.iter().flat_map(move |&k| mus.iter().map(move |&mu| (n, k, mu))))
        .collect();
    points
        .into_par_iter()
        .map(|(n, k, mu)| {
            let log_zn = z_n_truncated(n, mu, k)?;
            let log_lambda = lambda_closed_form(mu).map_or(f64::NAN, f64::ln);
            Ok(ScanRow {
                n,
                k,
                mu,
                log_zn,
                log_lambda,
                gap: log_zn / n as f64 - log_lambda,
            })
        })
        .collect()
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut out = String::from("N,K,mu,log_ZN,log_lambda,gap\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.n, r.k, r.mu, r.log_zn, r.log_lambda, r.gap
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_at_ln2_is_one() {
        assert_eq!(lambda_closed_form(std::f64::consts::LN_2).unwrap(), 1.0);
        assert!(lambda_closed_form(0.5).is_err());
        assert!(lambda_closed_form(f64::NAN).is_err());
    }

    #[test]
    fn lambda_matches_naive_formula() {
        for mu in [0.8f64, 1.0, 2.0, 5.0] {
            let g = (-mu).exp();
            let naive = ((1.0 - (1.0 - 4.0 * g * g).sqrt()) / (2.0 * g)).powi(2);
            assert!((lambda_closed_form(mu).unwrap() - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_is_decreasing() {
        let vals: Vec<f64> = (0..50)
            .map(|i| lambda_closed_form(0.7 + 0.2 * i as f64).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert!(lambda_closed_form(40.0).unwrap() < 1e-30);
    }

    #[test]
    fn leading_eigenvalue_matches_closed_form() {
        let tm = TransferMatrix::new(1.0, 200).unwrap();
        let l = tm.log_leading_eigenvalue().unwrap().exp();
        let c = lambda_closed_form(1.0).unwrap();
        assert!((l - c).abs() < 1e-8 * c, "{l} vs {c}");
    }

    #[test]
    fn single_term_trace() {
        let z = z_n_truncated(1, std::f64::consts::LN_2, 1).unwrap();
        assert!((z - 0.25f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn u_is_not_symmetric_but_detailed_balanced() {
        // n' u(n, n') = n u(n', n)
        let tm = TransferMatrix::new(0.9, 8).unwrap();
        assert!((tm.log_entry(3, 2) - tm.log_entry(2, 3)).abs() > 0.1);
        for n in 1..=8 {
            for m in 1..=8 {
                let l = (m as f64).ln() + tm.log_entry(n, m);
                let r = (n as f64).ln() + tm.log_entry(m, n);
                assert!((l - r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn increments_sum_to_truncated_trace() {
        for (n, mu) in [(1, 0.9), (3, 1.2), (4, 0.4)] {
            let incs: Vec<f64> = (1..=6).map(|k| log_increment(n, mu, k).unwrap()).collect();
            for k in 1..=6 {
                let total = log_sum_exp(incs[..k].iter().copied());
                let z = z_n_truncated(n, mu, k).unwrap();
                assert!((total - z).abs() < 1e-12 * z.abs().max(1.0), "N={n} K={k}");
            }
        }
    }

    #[test]
    fn diagnostic_verdicts() {
        let low = divergence_diagnostic(3, 0.2, 30).unwrap();
        assert_eq!(low.verdict, Verdict::Diverging);
        let high = divergence_diagnostic(3, 1.0, 30).unwrap();
        assert_eq!(high.verdict, Verdict::Converging);
        assert!(high.ratio < 1.0);
        assert!((high.threshold - 2f64.sqrt().ln()).abs() < 1e-15);
        assert!(divergence_diagnostic(3, 1.0, 7).is_err());
    }

    #[test]
    fn csv_header() {
        let rows = scan(&[2], &[4], &[1.0]).unwrap();
        let csv = scan_csv(&rows);
        assert!(csv.starts_with("N,K,mu,log_ZN,log_lambda,gap\n2,4,1,"));
    }
}
