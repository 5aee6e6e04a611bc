use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, structural, Error, Result};
use crate::spin::{swendsen_wang_step, SpinConfig};
use crate::triangulation::{CausalTriangulation, Orientation, Strip};

const CHECKPOINT_VERSION: u32 = 1;

/// How often (in steps) the cached volume and energy are recomputed from
/// scratch and compared.
pub const CACHE_CHECK_INTERVAL: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    pub beta: f64,
    pub mu: f64,
    pub q: u32,
    /// Largest width any slice may reach.
    pub k_max: usize,
}

impl ChainParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return domain(format!("beta must be nonnegative and finite, got {}", self.beta));
        }
        if !self.mu.is_finite() {
            return domain(format!("mu must be finite, got {}", self.mu));
        }
        if self.q < 2 {
            return domain(format!("q must be at least 2, got {}", self.q));
        }
        if self.k_max == 0 {
            return domain("K_max must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveKind {
    Insert,
    Delete,
    Flip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MoveOutcome {
    Accepted(MoveKind),
    Rejected(MoveKind),
    /// The proposal did not correspond to a valid triangulation (width bound,
    /// vertex of wrong degree, equal letters); the state is unchanged.
    Illegal(MoveKind),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveCounts {
    pub proposed: u64,
    pub accepted: u64,
    pub illegal: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveStats {
    pub insert: MoveCounts,
    pub delete: MoveCounts,
    pub flip: MoveCounts,
}

impl MoveStats {
    fn slot(&mut self, kind: MoveKind) -> &mut MoveCounts {
        match kind {
            MoveKind::Insert => &mut self.insert,
            MoveKind::Delete => &mut self.delete,
            MoveKind::Flip => &mut self.flip,
        }
    }

    fn record(&mut self, outcome: MoveOutcome) {
        let (kind, acc, ill) = match outcome {
            MoveOutcome::Accepted(k) => (k, 1, 0),
            MoveOutcome::Rejected(k) => (k, 0, 0),
            MoveOutcome::Illegal(k) => (k, 0, 1),
        };
        let s = self.slot(kind);
        s.proposed += 1;
        s.accepted += acc;
        s.illegal += ill;
    }

    /// Accepted triangulation moves over proposed ones (illegal included).
    pub fn acceptance_rate(&self) -> f64 {
        let p = self.insert.proposed + self.delete.proposed + self.flip.proposed;
        let a = self.insert.accepted + self.delete.accepted + self.flip.accepted;
        if p == 0 {
            0.0
        } else {
            a as f64 / p as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepInfo {
    pub outcome: MoveOutcome,
    pub clusters: usize,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    version: u32,
    params: ChainParams,
    words: Vec<String>,
    spins: Vec<Vec<u32>>,
    rng: ChaCha8Rng,
    steps: u64,
    stats: MoveStats,
}

/// Joint Markov chain on (rooted triangulation, spin configuration) targeting
/// `e^{-μ n(t)} e^{β m(σ,t)}`, where `m` counts satisfied edges.
///
/// Slice `i` is the lower boundary of strip `i`; spins are stored per slice
/// in position order, which matches the vertex numbering of
/// [`CausalTriangulation`].
#[derive(Debug, Clone)]
pub struct ChainState {
    params: ChainParams,
    words: Vec<Vec<Orientation>>,
    spins: Vec<Vec<u32>>,
    rng: ChaCha8Rng,
    complex: CausalTriangulation,
    satisfied: usize,
    steps: u64,
    stats: MoveStats,
}

fn build(words: &[Vec<Orientation>]) -> Result<CausalTriangulation> {
    let strips = words
        .iter()
        .map(|w| Strip::new(w.clone(), 0))
        .collect::<Result<Vec<_>>>()?;
    CausalTriangulation::build(strips)
}

fn satisfied_edges(t: &CausalTriangulation, spins: &[Vec<u32>]) -> usize {
    let flat: Vec<u32> = spins.iter().flatten().copied().collect();
    t.graph()
        .edges()
        .iter()
        .filter(|e| flat[e.tail] == flat[e.head])
        .count()
}

fn positions(word: &[Orientation], o: Orientation) -> Vec<usize> {
    word.iter()
        .enumerate()
        .filter(|(_, &x)| x == o)
        .map(|(i, _)| i)
        .collect()
}

impl ChainState {
    /// Starts from the minimal triangulation (every width 1, words `UD`) with
    /// uniformly random spins.
    pub fn new(n_strips: usize, params: ChainParams, seed: u64) -> Result<Self> {
        params.validate()?;
        if n_strips == 0 {
            return domain("N must be positive");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let words = vec![vec![Orientation::Up, Orientation::Down]; n_strips];
        let spins = (0..n_strips)
            .map(|_| vec![rng.gen_range(0..params.q)])
            .collect();
        Self::assemble(params, words, spins, rng, 0, MoveStats::default())
    }

    /// Same as [`ChainState::new`] but with a specific RNG stream, so that
    /// independent chains can share a seed.
    pub fn with_stream(n_strips: usize, params: ChainParams, seed: u64, stream: u64) -> Result<Self> {
        let mut s = Self::new(n_strips, params, seed)?;
        s.rng.set_stream(stream);
        s.rng.set_word_pos(0);
        Ok(s)
    }

    fn assemble(
        params: ChainParams,
        words: Vec<Vec<Orientation>>,
        spins: Vec<Vec<u32>>,
        rng: ChaCha8Rng,
        steps: u64,
        stats: MoveStats,
    ) -> Result<Self> {
        let complex = build(&words)?;
        if let Some(w) = complex.widths().iter().find(|&&w| w > params.k_max) {
            return structural(format!("width {w} exceeds K_max = {}", params.k_max));
        }
        if spins.len() != words.len()
            || spins.iter().zip(complex.widths()).any(|(s, &w)| s.len() != w)
        {
            return structural("spin layout does not match the slice widths");
        }
        if spins.iter().flatten().any(|&s| s >= params.q) {
            return structural(format!("spin value out of range for q = {}", params.q));
        }
        let satisfied = satisfied_edges(&complex, &spins);
        Ok(ChainState {
            params,
            words,
            spins,
            rng,
            complex,
            satisfied,
            steps,
            stats,
        })
    }

    pub fn params(&self) -> &ChainParams {
        &self.params
    }

    pub fn n_strips(&self) -> usize {
        self.words.len()
    }

    pub fn triangulation(&self) -> &CausalTriangulation {
        &self.complex
    }

    pub fn volume(&self) -> usize {
        self.complex.volume()
    }

    pub fn satisfied(&self) -> usize {
        self.satisfied
    }

    /// Hamiltonian `-m(σ, t)`.
    pub fn energy(&self) -> i64 {
        -(self.satisfied as i64)
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn stats(&self) -> &MoveStats {
        &self.stats
    }

    pub fn spins(&self) -> SpinConfig {
        SpinConfig::new(self.params.q, self.spins.iter().flatten().copied().collect())
            .expect("spins are kept in range")
    }

    pub fn word_strings(&self) -> Vec<String> {
        self.words
            .iter()
            .map(|w| w.iter().map(|o| o.as_char()).collect())
            .collect()
    }

    /// Recomputes volume and energy from scratch and compares with the cache.
    pub fn verify_caches(&self) -> Result<()> {
        let fresh = build(&self.words)?;
        let m = satisfied_edges(&fresh, &self.spins);
        if fresh.volume() != self.complex.volume() || m != self.satisfied {
            return structural(format!(
                "cache drift after {} steps: volume {} vs {}, satisfied {} vs {}",
                self.steps,
                self.complex.volume(),
                fresh.volume(),
                self.satisfied,
                m
            ));
        }
        Ok(())
    }

    /// One Swendsen–Wang update of the spins on the current triangulation.
    pub fn sw_sweep(&mut self) -> usize {
        let mut spins = self.spins();
        let (_, k) = swendsen_wang_step(self.complex.graph(), self.params.beta, &mut spins, &mut self.rng);
        let mut it = spins.values().iter().copied();
        for slice in &mut self.spins {
            for s in slice.iter_mut() {
                *s = it.next().unwrap();
            }
        }
        self.satisfied = spins.satisfied_edges(self.complex.graph());
        k
    }

    /// Proposes one triangulation move (insert, delete or flip with equal
    /// probability) and applies the Metropolis–Hastings test.
    pub fn triangulation_move(&mut self) -> MoveOutcome {
        let n = self.n_strips();
        let slice = self.rng.gen_range(0..n);
        let outcome = match self.rng.gen_range(0..3u8) {
            0 => self.try_insert(slice),
            1 => self.try_delete(slice),
            _ => self.try_flip(slice),
        };
        self.stats.record(outcome);
        outcome
    }

    /// One step: a triangulation move followed by a Swendsen–Wang sweep.
    pub fn step(&mut self) -> Result<StepInfo> {
        let outcome = self.triangulation_move();
        let clusters = self.sw_sweep();
        self.steps += 1;
        if self.steps % CACHE_CHECK_INTERVAL == 0 {
            self.verify_caches()?;
        }
        Ok(StepInfo { outcome, clusters })
    }

    fn accept(&mut self, log_ratio: f64) -> bool {
        log_ratio >= 0.0 || self.rng.gen::<f64>().ln() < log_ratio
    }

    fn try_candidate(
        &mut self,
        kind: MoveKind,
        words: Vec<Vec<Orientation>>,
        spins: Vec<Vec<u32>>,
        log_prefactor: f64,
    ) -> MoveOutcome {
        let Ok(t) = build(&words) else {
            return MoveOutcome::Illegal(kind);
        };
        let m = satisfied_edges(&t, &spins);
        let dn = t.volume() as f64 - self.complex.volume() as f64;
        let dm = m as f64 - self.satisfied as f64;
        let log_ratio = log_prefactor - self.params.mu * dn + self.params.beta * dm;
        if self.accept(log_ratio) {
            self.words = words;
            self.spins = spins;
            self.complex = t;
            self.satisfied = m;
            MoveOutcome::Accepted(kind)
        } else {
            MoveOutcome::Rejected(kind)
        }
    }

    /// Splits horizontal edge `j` of `slice` with a new vertex of uniform spin.
    fn try_insert(&mut self, slice: usize) -> MoveOutcome {
        let kind = MoveKind::Insert;
        let width = self.spins[slice].len();
        let j = self.rng.gen_range(0..width);
        let s = self.rng.gen_range(0..self.params.q);
        if width + 1 > self.params.k_max {
            return MoveOutcome::Illegal(kind);
        }
        let n = self.n_strips();
        let above = slice;
        let below = (slice + n - 1) % n;
        let mut words = self.words.clone();
        let pu = positions(&words[above], Orientation::Up)[j];
        let pd = positions(&words[below], Orientation::Down)[j];
        if above == below {
            let w = &mut words[above];
            let (hi, lo) = if pu > pd { ((pu, Orientation::Up), (pd, Orientation::Down)) } else { ((pd, Orientation::Down), (pu, Orientation::Up)) };
            w.insert(hi.0, hi.1);
            w.insert(lo.0, lo.1);
        } else {
            words[above].insert(pu, Orientation::Up);
            words[below].insert(pd, Orientation::Down);
        }
        let mut spins = self.spins.clone();
        spins[slice].insert(j + 1, s);
        // q_rev / q_fwd = q: the reverse picks one of `width` positions, the
        // forward one of `width` edges and one of `q` spins.
        let prefactor = (self.params.q as f64).ln();
        self.try_candidate(kind, words, spins, prefactor)
    }

    /// Removes a degree-4 vertex at position `v >= 1` of `slice`.
    fn try_delete(&mut self, slice: usize) -> MoveOutcome {
        let kind = MoveKind::Delete;
        let width = self.spins[slice].len();
        if width < 2 {
            return MoveOutcome::Illegal(kind);
        }
        let v = self.rng.gen_range(1..width);
        let n = self.n_strips();
        let above = slice;
        let below = (slice + n - 1) % n;
        let ups = positions(&self.words[above], Orientation::Up);
        let downs = positions(&self.words[below], Orientation::Down);
        if ups[v] != ups[v - 1] + 1 || downs[v] != downs[v - 1] + 1 {
            return MoveOutcome::Illegal(kind);
        }
        let mut words = self.words.clone();
        if above == below {
            let (hi, lo) = (ups[v].max(downs[v]), ups[v].min(downs[v]));
            words[above].remove(hi);
            words[above].remove(lo);
        } else {
            words[above].remove(ups[v]);
            words[below].remove(downs[v]);
        }
        let mut spins = self.spins.clone();
        spins[slice].remove(v);
        let prefactor = -(self.params.q as f64).ln();
        self.try_candidate(kind, words, spins, prefactor)
    }

    /// Swaps letters `k, k+1` of strip `slice` for `1 <= k <= L-2`, keeping
    /// the root letter and hence all vertex labels in place.
    fn try_flip(&mut self, slice: usize) -> MoveOutcome {
        let kind = MoveKind::Flip;
        let len = self.words[slice].len();
        if len < 3 {
            return MoveOutcome::Illegal(kind);
        }
        let k = self.rng.gen_range(1..len - 1);
        if self.words[slice][k] == self.words[slice][k + 1] {
            return MoveOutcome::Illegal(kind);
        }
        let mut words = self.words.clone();
        words[slice].swap(k, k + 1);
        let spins = self.spins.clone();
        self.try_candidate(kind, words, spins, 0.0)
    }

    /// Serializes the full state, RNG included, so a resumed run continues
    /// the same stream.
    pub fn to_checkpoint(&self) -> Result<String> {
        let cp = Checkpoint {
            version: CHECKPOINT_VERSION,
            params: self.params,
            words: self.word_strings(),
            spins: self.spins.clone(),
            rng: self.rng.clone(),
            steps: self.steps,
            stats: self.stats.clone(),
        };
        Ok(serde_json::to_string(&cp)?)
    }

    pub fn from_checkpoint(text: &str) -> Result<Self> {
        let cp: Checkpoint = serde_json::from_str(text)?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::Structural(format!(
                "unsupported checkpoint version {}",
                cp.version
            )));
        }
        cp.params.validate()?;
        let words = cp
            .words
            .iter()
            .map(|w| {
                w.chars()
                    .map(|c| {
                        Orientation::from_char(c)
                            .ok_or_else(|| Error::Structural(format!("bad letter {c:?} in checkpoint")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if words.iter().any(|w| w.first() != Some(&Orientation::Up)) {
            return structural("checkpoint words must be rooted (start with U)");
        }
        Self::assemble(cp.params, words, cp.spins, cp.rng, cp.steps, cp.stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ChainParams {
        ChainParams { beta: 0.5, mu: 1.0, q: 3, k_max: 4 }
    }

    #[test]
    fn caches_stay_consistent() {
        for n in 1..=3 {
            let mut s = ChainState::new(n, params(), 7).unwrap();
            for _ in 0..3000 {
                s.step().unwrap();
                s.triangulation().check_invariants().unwrap();
            }
            s.verify_caches().unwrap();
            assert!(s.triangulation().widths().iter().all(|&w| (1..=4).contains(&w)));
            assert!(s.stats().insert.accepted > 0 && s.stats().delete.accepted > 0);
        }
    }

    #[test]
    fn inserted_vertex_has_degree_four() {
        let p = ChainParams { mu: -5.0, beta: 0.0, ..params() };
        for n in 1..=3 {
            let mut s = ChainState::new(n, p, 1).unwrap();
            for _ in 0..50 {
                let before = s.volume();
                if let MoveOutcome::Accepted(MoveKind::Insert) = s.try_insert(0) {
                    assert_eq!(s.volume(), before + 2);
                    let t = s.triangulation();
                    let w = t.widths()[0];
                    let degree_ok = (1..w).any(|v| {
                        let x = t.vertex_index(0, v);
                        t.graph().edges().iter().map(|e| (e.tail == x) as usize + (e.head == x) as usize).sum::<usize>() == 4
                    });
                    assert!(degree_ok);
                }
            }
        }
    }

    #[test]
    fn checkpoint_resumes_identically() {
        let mut a = ChainState::new(2, params(), 11).unwrap();
        for _ in 0..500 {
            a.step().unwrap();
        }
        let text = a.to_checkpoint().unwrap();
        let mut b = ChainState::from_checkpoint(&text).unwrap();
        for _ in 0..500 {
            let x = a.step().unwrap();
            let y = b.step().unwrap();
            assert_eq!(x, y);
        }
        assert_eq!(a.word_strings(), b.word_strings());
        assert_eq!(a.spins(), b.spins());
        assert_eq!(a.stats(), b.stats());
    }

    #[test]
    fn checkpoint_rejects_garbage() {
        assert!(ChainState::from_checkpoint("{}").is_err());
        let a = ChainState::new(1, params(), 0).unwrap();
        let text = a.to_checkpoint().unwrap().replace("\"UD\"", "\"DU\"");
        assert!(ChainState::from_checkpoint(&text).is_err());
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ChainState::new(2, ChainParams { q: 1, ..params() }, 0).is_err());
        assert!(ChainState::new(0, params(), 0).is_err());
        assert!(ChainState::new(2, ChainParams { beta: f64::NAN, ..params() }, 0).is_err());
    }
}
