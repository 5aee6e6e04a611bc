use rayon::prelude::*;

/// Dense square matrix with a shared logarithmic scale factor: the value of
/// entry `(i, j)` is `data[i * dim + j] * exp(log_scale)`.
///
/// Every product is renormalized so the largest entry is 1, which keeps
/// powers of the transfer matrix representable for any `N` and `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMatrix {
    dim: usize,
    data: Vec<f64>,
    log_scale: f64,
}

impl ScaledMatrix {
    /// Builds from natural-log entries; `-inf` encodes zero.
    pub fn from_log_entries(dim: usize, log_entry: impl Fn(usize, usize) -> f64) -> Self {
        let logs: Vec<f64> = (0..dim * dim).map(|k| log_entry(k / dim, k % dim)).collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let shift = if max.is_finite() { max } else { 0.0 };
        let data = logs.iter().map(|l| (l - shift).exp()).collect();
        ScaledMatrix {
            dim,
            data,
            log_scale: shift,
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        (0..dim).for_each(|i| data[i * dim + i] = 1.0);
        ScaledMatrix {
            dim,
            data,
            log_scale: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Natural log of entry `(i, j)`.
    pub fn log_entry(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j].ln() + self.log_scale
    }

    /// Entry `(i, j)` relative to the common scale.
    pub(crate) fn raw(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    fn normalize(&mut self) {
        let max = self.data.iter().copied().fold(0.0, f64::max);
        if max > 0.0 && max.is_finite() {
            self.data.iter_mut().for_each(|x| *x /= max);
            self.log_scale += max.ln();
        }
    }

    pub fn mul(&self, other: &ScaledMatrix) -> ScaledMatrix {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut data = vec![0.0; n * n];
        let row = |(i, out): (usize, &mut [f64])| {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a != 0.0 {
                    let b = &other.data[k * n..(k + 1) * n];
                    out.iter_mut().zip(b).for_each(|(o, &b)| *o += a * b);
                }
            }
        };
        if n >= 64 {
            data.par_chunks_mut(n).enumerate().for_each(row);
        } else {
            data.chunks_mut(n).enumerate().for_each(row);
        }
        let mut out = ScaledMatrix {
            dim: n,
            data,
            log_scale: self.log_scale + other.log_scale,
        };
        out.normalize();
        out
    }

    pub fn pow(&self, mut exp: usize) -> ScaledMatrix {
        let mut result = ScaledMatrix::identity(self.dim);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// `ln tr(M)`.
    pub fn log_trace(&self) -> f64 {
        let t: f64 = (0..self.dim).map(|i| self.data[i * self.dim + i]).sum();
        t.ln() + self.log_scale
    }

    /// Leading eigenvalue of an entrywise nonnegative irreducible matrix by
    /// power iteration. Returns `(ln λ, iterations, converged)`.
    pub fn log_leading_eigenvalue(&self, tol: f64, max_iter: usize) -> (f64, usize, bool) {
        let n = self.dim;
        let mut v = vec![1.0 / n as f64; n];
        let mut lambda = f64::NAN;
        for it in 1..=max_iter {
            let w: Vec<f64> = (0..n)
                .map(|i| {
                    let row = &self.data[i * n..(i + 1) * n];
                    row.iter().zip(&v).map(|(a, b)| a * b).sum()
                })
                .collect();
            // v is normalized to unit sum, so the sum of w estimates λ
            let s: f64 = w.iter().sum();
            let next = s;
            v = w.into_iter().map(|x| x / s).collect();
            if (next - lambda).abs() <= tol * next.abs() {
                return (next.ln() + self.log_scale, it, true);
            }
            lambda = next;
        }
        (lambda.ln() + self.log_scale, max_iter, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_matches_naive_product() {
        let m = ScaledMatrix::from_log_entries(3, |i, j| ((i + 2 * j + 1) as f64).ln());
        let mut naive = ScaledMatrix::identity(3);
        for _ in 0..7 {
            naive = naive.mul(&m);
        }
        let fast = m.pow(7);
        for i in 0..3 {
            for j in 0..3 {
                assert!((naive.log_entry(i, j) - fast.log_entry(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn eigenvalue_of_two_by_two() {
        // [[2, 1], [1, 2]] has eigenvalues 3 and 1
        let m = ScaledMatrix::from_log_entries(2, |i, j| if i == j { 2f64.ln() } else { 0.0 });
        let (l, _, ok) = m.log_leading_eigenvalue(1e-14, 1000);
        assert!(ok);
        assert!((l.exp() - 3.0).abs() < 1e-12);
        assert!((m.pow(5).log_trace().exp() - (243.0 + 1.0)).abs() < 1e-9);
    }

    #[test]
    fn huge_entries_stay_finite() {
        let m = ScaledMatrix::from_log_entries(2, |_, _| 500.0);
        let p = m.pow(10);
        // each entry of J^10 is 2^9, times e^5000
        assert!((p.log_entry(0, 1) - (5000.0 + 9.0 * 2f64.ln())).abs() < 1e-9);
    }
}
