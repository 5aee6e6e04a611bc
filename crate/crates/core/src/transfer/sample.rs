use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::{log_u, ScaledMatrix, TransferMatrix};
use crate::error::{domain, Result};

/// The truncated pure-CDT width law
/// `P(n^0, ..., n^{N-1}) = Π_i u(n^i, n^{i+1}) / tr(U_K^N)`.
#[derive(Debug, Clone)]
pub struct PureGibbsWidthLaw {
    n: usize,
    mu: f64,
    k: usize,
    log_z: f64,
    /// `U^j` for `j = 0..=N`.
    powers: Vec<ScaledMatrix>,
}

impl PureGibbsWidthLaw {
    pub fn new(n_strips: usize, mu: f64, k: usize) -> Result<Self> {
        if n_strips == 0 {
            return domain("N must be at least 1");
        }
        let u = TransferMatrix::new(mu, k)?;
        let mut powers = vec![ScaledMatrix::identity(k)];
        for j in 1..=n_strips {
            powers.push(powers[j - 1].mul(u.scaled()));
        }
        let log_z = powers[n_strips].log_trace();
        Ok(PureGibbsWidthLaw {
            n: n_strips,
            mu,
            k,
            log_z,
            powers,
        })
    }

    pub fn num_strips(&self) -> usize {
        self.n
    }

    pub fn truncation(&self) -> usize {
        self.k
    }

    pub fn log_partition(&self) -> f64 {
        self.log_z
    }

    pub fn log_probability(&self, widths: &[usize]) -> f64 {
        assert_eq!(widths.len(), self.n);
        if widths.iter().any(|&w| w == 0 || w > self.k) {
            return f64::NEG_INFINITY;
        }
        let s: f64 = (0..self.n)
            .map(|i| log_u(widths[i], widths[(i + 1) % self.n], self.mu))
            .sum();
        s - self.log_z
    }

    /// Exact draw: the first width from the diagonal of `U^N`, then each next
    /// width conditioned on the previous one and on closing the cycle.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let k = self.k;
        let top = &self.powers[self.n];
        let first: Vec<f64> = (0..k).map(|a| top.raw(a, a)).collect();
        let n0 = WeightedIndex::new(&first).expect("positive diagonal").sample(rng);
        let mut widths = vec![n0 + 1];
        for i in 1..self.n {
            let prev = widths[i - 1];
            let rest = &self.powers[self.n - i];
            let logs: Vec<f64> = (0..k)
                .map(|b| log_u(prev, b + 1, self.mu) + rest.log_entry(b, n0))
                .collect();
            let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let w: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
            let b = WeightedIndex::new(&w).expect("positive weights").sample(rng);
            widths.push(b + 1);
        }
        widths
    }
}

pub fn sample_widths<R: Rng + ?Sized>(law: &PureGibbsWidthLaw, rng: &mut R) -> Vec<usize> {
    law.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::log_sum_exp;
    use crate::triangulation::width_sequences;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn probabilities_sum_to_one() {
        let law = PureGibbsWidthLaw::new(3, 0.9, 4).unwrap();
        let total = log_sum_exp(width_sequences(3, 4).map(|w| law.log_probability(&w)));
        assert!(total.abs() < 1e-12);
    }

    #[test]
    fn k_one_is_deterministic() {
        let law = PureGibbsWidthLaw::new(4, 1.0, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            assert_eq!(law.sample(&mut rng), vec![1; 4]);
        }
    }

    #[test]
    fn seeded_draws_reproduce() {
        let law = PureGibbsWidthLaw::new(3, 0.8, 5).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..20).map(|_| law.sample(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
        assert_ne!(draw(11), draw(12));
    }

    #[test]
    fn frequencies_match_law() {
        let law = PureGibbsWidthLaw::new(2, 1.0, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let draws = 100_000;
        let mut counts = std::collections::HashMap::new();
        for _ in 0..draws {
            *counts.entry(law.sample(&mut rng)).or_insert(0usize) += 1;
        }
        for w in width_sequences(2, 2) {
            let p = law.log_probability(&w).exp();
            let f = *counts.get(&w).unwrap_or(&0) as f64 / draws as f64;
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((f - p).abs() < 4.0 * se, "{w:?}: {f} vs {p}");
        }
    }
}
