use super::complex::CausalTriangulation;
use super::strip::{enumerate_strips, Strip};
use crate::error::{domain, Result};

/// Width sequences `(n^0, ..., n^{N-1})` with entries in `1..=max_width`, in
/// lexicographic order.
pub fn width_sequences(n_strips: usize, max_width: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current = (n_strips > 0 && max_width > 0).then(|| vec![1; n_strips]);
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let next = current.as_mut().unwrap();
        let mut i = n_strips;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if next[i] < max_width {
                next[i] += 1;
                next[i + 1..].iter_mut().for_each(|w| *w = 1);
                break;
            }
        }
        Some(out)
    })
}

/// Deterministic stream of all rooted triangulations with a fixed width
/// sequence, in lexicographic order of strip words.
pub struct TriangulationsWithWidths {
    choices: Vec<Vec<Strip>>,
    index: Vec<usize>,
    done: bool,
}

impl TriangulationsWithWidths {
    pub fn new(widths: &[usize]) -> Result<Self> {
        if widths.is_empty() {
            return domain("at least one strip is required");
        }
        let n = widths.len();
        let choices = (0..n)
            .map(|i| enumerate_strips(widths[i], widths[(i + 1) % n]))
            .collect::<Result<Vec<_>>>()?;
        Ok(TriangulationsWithWidths {
            index: vec![0; n],
            choices,
            done: false,
        })
    }

    /// Exact number of triangulations in the stream: `Π binom(n^i + n^{i+1} - 1, n^i - 1)`.
    pub fn count(&self) -> usize {
        self.choices.iter().map(Vec::len).product()
    }
}

impl Iterator for TriangulationsWithWidths {
    type Item = CausalTriangulation;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let strips: Vec<Strip> = self
            .index
            .iter()
            .zip(&self.choices)
            .map(|(&k, c)| c[k].clone())
            .collect();
        // advance odometer, last strip fastest
        let mut i = self.index.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.index[i] += 1;
            if self.index[i] < self.choices[i].len() {
                break;
            }
            self.index[i] = 0;
        }
        Some(CausalTriangulation::build(strips).expect("enumerated strips are compatible"))
    }
}

/// Every rooted periodic causal triangulation with `n_strips` strips and all
/// widths at most `max_width`, ordered by width sequence then strip words.
pub fn enumerate_triangulations(
    n_strips: usize,
    max_width: usize,
) -> Result<impl Iterator<Item = CausalTriangulation>> {
    if n_strips == 0 || max_width == 0 {
        return domain(format!(
            "need N >= 1 and K >= 1, got N = {n_strips}, K = {max_width}"
        ));
    }
    Ok(width_sequences(n_strips, max_width)
        .flat_map(|w| TriangulationsWithWidths::new(&w).expect("positive widths")))
}

/// Number of triangulations per width sequence, without building graphs.
pub fn count_triangulations(n_strips: usize, max_width: usize) -> Result<u128> {
    if n_strips == 0 || max_width == 0 {
        return domain("need N >= 1 and K >= 1");
    }
    let mut total = 0u128;
    for w in width_sequences(n_strips, max_width) {
        let mut prod = 1u128;
        for i in 0..n_strips {
            let (a, b) = (w[i] as u64, w[(i + 1) % n_strips] as u64);
            let c = crate::numeric::binomial(a + b - 1, a - 1);
            prod *= u128::try_from(c).expect("binomial fits in u128");
        }
        total += prod;
    }
    Ok(total)
}
