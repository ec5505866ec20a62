//! Exact simulation of spacey random walks and surfers.
//!
//! At step `n` the walker sits at `X(n)`, draws `m − 2` history states i.i.d.
//! from the occupation vector `w(n) = s(n)/(N + n)`, where `s_k(n)` is one
//! plus the number of visits to `k` among `X(1), ..., X(n)`, and moves to
//! `X(n+1)` following the column of the flattening selected by the drawn
//! history and `X(n)`. The starting state `X(0)` is not counted.
//!
//! Randomness comes from ChaCha8 with a fixed draw order (history states
//! first, `k_1` first, then the transition), so a seed determines the
//! trajectory on every platform. States are 0-based in memory and 1-based in
//! files.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hypermatrix::TransitionHypermatrix;
use crate::vector::StochasticVector;
use crate::{Error, Result};

/// A finite state sequence `X(0), X(1), ..., X(Q)` (0-based states).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    states: Vec<usize>,
    dim: usize,
}

impl Trajectory {
    pub fn new(states: Vec<usize>, dim: usize) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidConfig("trajectory must not be empty".into()));
        }
        if let Some(&s) = states.iter().find(|&&s| s >= dim) {
            return Err(Error::StateOutOfRange { state: s + 1, dim });
        }
        Ok(Self { states, dim })
    }

    /// Builds from 1-based states as they appear in trajectory files.
    pub fn from_one_based(states: &[usize], dim: usize) -> Result<Self> {
        if let Some(&s) = states.iter().find(|&&s| s == 0 || s > dim) {
            return Err(Error::StateOutOfRange { state: s, dim });
        }
        Self::new(states.iter().map(|s| s - 1).collect(), dim)
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored states, `Q + 1`.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Relabels every state `s` as `perm[s]`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        Self {
            states: self.states.iter().map(|&s| perm[s]).collect(),
            dim: self.dim,
        }
    }
}

/// Occupation vectors `w(0), ..., w(Q)` stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupationTrace {
    dim: usize,
    data: Vec<f64>,
}

impl OccupationTrace {
    fn with_capacity(dim: usize, rows: usize) -> Self {
        Self {
            dim,
            data: Vec::with_capacity(dim * rows),
        }
    }

    fn push(&mut self, st: &WalkState) {
        let total = st.total() as f64;
        self.data
            .extend(st.counts.iter().map(|&c| c as f64 / total));
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.data[n * self.dim..(n + 1) * self.dim]
    }

    pub fn last(&self) -> StochasticVector {
        StochasticVector::from_raw(self.row(self.len() - 1).to_vec())
    }
}

/// Live state of a walk: current state, visit counts with pseudocounts, step
/// count and random generator.
#[derive(Debug, Clone)]
pub struct WalkState {
    current: usize,
    counts: Vec<u64>,
    step: u64,
    rng: ChaCha8Rng,
}

impl WalkState {
    /// A fresh walk at `start` (0-based) with one pseudocount per state.
    pub fn new(dim: usize, start: usize, seed: u64) -> Result<Self> {
        Self::with_counts(start, vec![1; dim], 0, seed)
    }

    /// A walk resumed at step `step` with visit counts `counts`, which must
    /// include the pseudocounts and sum to `N + step`.
    pub fn with_counts(current: usize, counts: Vec<u64>, step: u64, seed: u64) -> Result<Self> {
        let dim = counts.len();
        if dim == 0 {
            return Err(Error::InvalidConfig("walk needs at least one state".into()));
        }
        if current >= dim {
            return Err(Error::StateOutOfRange {
                state: current + 1,
                dim,
            });
        }
        if counts.contains(&0) || counts.iter().sum::<u64>() != dim as u64 + step {
            return Err(Error::InvalidConfig(
                "counts must be positive and sum to N + n".into(),
            ));
        }
        Ok(Self {
            current,
            counts,
            step,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn current(&self) -> usize {
        self.current
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    fn total(&self) -> u64 {
        self.counts.len() as u64 + self.step
    }

    pub fn occupation(&self) -> StochasticVector {
        let total = self.total() as f64;
        StochasticVector::from_raw(self.counts.iter().map(|&c| c as f64 / total).collect())
    }

    fn draw_from_counts(&mut self) -> usize {
        let mut r = self.rng.random_range(0..self.total());
        for (k, &c) in self.counts.iter().enumerate() {
            if r < c {
                return k;
            }
            r -= c;
        }
        unreachable!("counts sum to the drawn range")
    }

    fn draw_from(&mut self, probs: &[f64]) -> usize {
        let u: f64 = self.rng.random();
        let mut acc = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        // Rounding left u above the final cumulative sum.
        probs
            .iter()
            .rposition(|&p| p > 0.0)
            .unwrap_or(probs.len() - 1)
    }

    fn advance(&mut self, next: usize) {
        self.current = next;
        self.counts[next] += 1;
        self.step += 1;
    }
}

/// One step of the walk. Returns the drawn history tuple `(k_1, ..., k_{m-2})`.
pub fn step(h: &TransitionHypermatrix, st: &mut WalkState) -> Vec<usize> {
    debug_assert_eq!(h.dim(), st.counts.len());
    let history: Vec<usize> = (0..h.order() - 2).map(|_| st.draw_from_counts()).collect();
    let column = h.column(h.column_index(&history, st.current));
    let next = st.draw_from(column);
    st.advance(next);
    history
}

fn check_start(h: &TransitionHypermatrix, start: usize) -> Result<()> {
    if start >= h.dim() {
        return Err(Error::StateOutOfRange {
            state: start + 1,
            dim: h.dim(),
        });
    }
    Ok(())
}

/// Runs `steps` transitions from `start` (0-based).
///
/// Row `n` of the returned trace is `w(n)`; row 0 is uniform.
pub fn simulate(
    h: &TransitionHypermatrix,
    start: usize,
    steps: usize,
    seed: u64,
) -> Result<(Trajectory, OccupationTrace)> {
    check_start(h, start)?;
    let mut st = WalkState::new(h.dim(), start, seed)?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut trace = OccupationTrace::with_capacity(h.dim(), steps + 1);
    states.push(start);
    trace.push(&st);
    for _ in 0..steps {
        step(h, &mut st);
        states.push(st.current);
        trace.push(&st);
    }
    Ok((
        Trajectory {
            states,
            dim: h.dim(),
        },
        trace,
    ))
}

/// Simulates the surfer on `h`: with probability `alpha` a walk step, else a
/// jump to a state drawn from `v`.
///
/// Same law as [`simulate`] on `h.make_surfer(alpha, v)`, but the coin flip
/// is drawn explicitly so the surfer hypermatrix is never formed.
pub fn simulate_surfer(
    h: &TransitionHypermatrix,
    alpha: f64,
    v: &StochasticVector,
    start: usize,
    steps: usize,
    seed: u64,
) -> Result<(Trajectory, OccupationTrace)> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidAlpha(alpha));
    }
    if v.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: v.len(),
        });
    }
    check_start(h, start)?;
    let mut st = WalkState::new(h.dim(), start, seed)?;
    let mut states = Vec::with_capacity(steps + 1);
    let mut trace = OccupationTrace::with_capacity(h.dim(), steps + 1);
    states.push(start);
    trace.push(&st);
    for _ in 0..steps {
        let u: f64 = st.rng.random();
        if u < alpha {
            step(h, &mut st);
        } else {
            let next = st.draw_from(v.as_slice());
            st.advance(next);
        }
        states.push(st.current);
        trace.push(&st);
    }
    Ok((
        Trajectory {
            states,
            dim: h.dim(),
        },
        trace,
    ))
}

/// Seed for the `index`-th trajectory of a batch, a splitmix64 mix of the
/// batch seed and the index.
pub fn trajectory_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
