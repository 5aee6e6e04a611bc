use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{domain, structural, Result};

/// Orientation of a triangle inside a strip.
///
/// An `Up` triangle has its base on the lower slice and apex on the upper
/// one; a `Down` triangle is the reverse. `Up < Down` fixes the enumeration
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Up,
    Down,
}

impl Orientation {
    pub fn as_char(self) -> char {
        match self {
            Orientation::Up => 'U',
            Orientation::Down => 'D',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'U' => Some(Orientation::Up),
            'D' => Some(Orientation::Down),
            _ => None,
        }
    }
}

/// One layer of a causal triangulation: a cyclic word of triangle
/// orientations with a distinguished `Up` triangle.
///
/// Two strips are equal when their words agree after rotating each mark to
/// the front; that rooted word is what the enumeration and the graph builder
/// consume. The marked triangle covers edge 0 of the lower slice, and its apex
/// is vertex 0 of the upper slice.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Strip {
    lower_width: usize,
    upper_width: usize,
    word: Vec<Orientation>,
    mark: usize,
}

impl Strip {
    pub fn new(word: Vec<Orientation>, mark: usize) -> Result<Self> {
        let lower = word.iter().filter(|&&o| o == Orientation::Up).count();
        let upper = word.len() - lower;
        if lower == 0 || upper == 0 {
            return structural(format!(
                "strip word must contain both U and D triangles (got {lower} U, {upper} D)"
            ));
        }
        match word.get(mark) {
            Some(Orientation::Up) => {}
            Some(Orientation::Down) => {
                return structural(format!("strip mark {mark} points at a D triangle"))
            }
            None => return structural(format!("strip mark {mark} out of range")),
        }
        Ok(Strip {
            lower_width: lower,
            upper_width: upper,
            word,
            mark,
        })
    }

    /// Parses a word over `{U, D}`.
    pub fn parse(word: &str, mark: usize) -> Result<Self> {
        let word = word
            .chars()
            .map(|c| {
                Orientation::from_char(c)
                    .ok_or_else(|| crate::Error::Structural(format!("invalid triangle letter {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Strip::new(word, mark)
    }

    pub fn lower_width(&self) -> usize {
        self.lower_width
    }

    pub fn upper_width(&self) -> usize {
        self.upper_width
    }

    pub fn word(&self) -> &[Orientation] {
        &self.word
    }

    pub fn mark(&self) -> usize {
        self.mark
    }

    pub fn num_triangles(&self) -> usize {
        self.word.len()
    }

    /// The word read cyclically starting at the mark.
    pub fn rooted_word(&self) -> impl Iterator<Item = Orientation> + '_ {
        self.word[self.mark..]
            .iter()
            .chain(&self.word[..self.mark])
            .copied()
    }

    /// Same strip with the mark rotated to index 0.
    pub fn canonical(&self) -> Strip {
        Strip {
            lower_width: self.lower_width,
            upper_width: self.upper_width,
            word: self.rooted_word().collect(),
            mark: 0,
        }
    }

    pub fn word_string(&self) -> String {
        self.word.iter().map(|o| o.as_char()).collect()
    }
}

impl PartialEq for Strip {
    fn eq(&self, other: &Self) -> bool {
        self.word.len() == other.word.len() && self.rooted_word().eq(other.rooted_word())
    }
}

impl Eq for Strip {}

impl Hash for Strip {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for o in self.rooted_word() {
            o.hash(state);
        }
    }
}

impl fmt::Display for Strip {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.lower_width,
            self.upper_width,
            self.word_string(),
            self.mark
        )
    }
}

/// All strips with `n` lower and `n_prime` upper edges, in canonical form and
/// lexicographic word order.
///
/// There are `binom(n + n' - 1, n - 1)` of them: the marked `Up` comes first,
/// followed by any arrangement of the remaining `n - 1` U and `n'` D letters.
pub fn enumerate_strips(n: usize, n_prime: usize) -> Result<Vec<Strip>> {
    if n == 0 || n_prime == 0 {
        return domain(format!("strip widths must be positive, got ({n}, {n_prime})"));
    }
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(n + n_prime);
    word.push(Orientation::Up);
    fill(&mut word, n - 1, n_prime, &mut out);
    Ok(out)
}

fn fill(word: &mut Vec<Orientation>, ups: usize, downs: usize, out: &mut Vec<Strip>) {
    if ups == 0 && downs == 0 {
        out.push(Strip {
            lower_width: word.iter().filter(|&&o| o == Orientation::Up).count(),
            upper_width: word.iter().filter(|&&o| o == Orientation::Down).count(),
            word: word.clone(),
            mark: 0,
        });
        return;
    }
    if ups > 0 {
        word.push(Orientation::Up);
        fill(word, ups - 1, downs, out);
        word.pop();
    }
    if downs > 0 {
        word.push(Orientation::Down);
        fill(word, ups, downs - 1, out);
        word.pop();
    }
}
