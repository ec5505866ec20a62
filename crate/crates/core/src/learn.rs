//! Maximum-likelihood fitting of order-3 hypermatrices from trajectories.
//!
//! The negative log-likelihood of the data under `P` is
//! `−Σ log Σ_k w_k(q−1) P[X(q), X(q−1), k]`, summed over transitions
//! `X(q−1) → X(q)` for `q ≥ 2`. The occupation vectors `w` depend only on
//! the data, so the objective is convex in `P`. It is minimized by projected
//! gradient descent, projecting every column of the flattening onto the
//! simplex and choosing steps by Armijo backtracking along the projection arc.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::hypermatrix::{random_simplex_point, TransitionHypermatrix};
use crate::simulate::Trajectory;
use crate::vector::StochasticVector;
use crate::{Error, Result};

/// Occupation vector `w(n)` of a trajectory, with one pseudocount per state
/// and `X(0)` excluded.
pub fn occupation_at(traj: &Trajectory, n: usize) -> Result<StochasticVector> {
    if n >= traj.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: traj.len(),
        });
    }
    let dim = traj.dim();
    let mut counts = vec![1.0; dim];
    for &s in &traj.states()[1..=n] {
        counts[s] += 1.0;
    }
    let total = (dim + n) as f64;
    Ok(StochasticVector::from_raw(
        counts.into_iter().map(|c| c / total).collect(),
    ))
}

/// The scored transitions of a data set with their occupation vectors,
/// precomputed once so the objective and gradient are cheap to evaluate.
#[derive(Debug, Clone)]
pub struct ScoredData {
    dim: usize,
    prev: Vec<usize>,
    next: Vec<usize>,
    w: Vec<f64>,
}

impl ScoredData {
    pub fn new(trajectories: &[Trajectory], dim: usize) -> Result<Self> {
        let mut data = Self {
            dim,
            prev: Vec::new(),
            next: Vec::new(),
            w: Vec::new(),
        };
        for traj in trajectories {
            if traj.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: traj.dim(),
                });
            }
            let states = traj.states();
            let mut counts = vec![1.0; dim];
            // w(q−1) is built incrementally from X(1), ..., X(q−1).
            for q in 2..states.len() {
                counts[states[q - 1]] += 1.0;
                let total = (dim + q - 1) as f64;
                data.prev.push(states[q - 1]);
                data.next.push(states[q]);
                data.w.extend(counts.iter().map(|c| c / total));
            }
        }
        Ok(data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of scored transitions.
    pub fn len(&self) -> usize {
        self.prev.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prev.is_empty()
    }

    /// Iterates `(previous state, next state, w(q−1))`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &[f64])> {
        self.prev
            .iter()
            .zip(&self.next)
            .zip(self.w.chunks_exact(self.dim))
            .map(|((&j, &i), w)| (j, i, w))
    }

    fn check_len(&self, p: &[f64]) {
        assert_eq!(p.len(), self.dim.pow(3), "flattening must have N³ entries");
    }

    fn mass(&self, p: &[f64], i: usize, j: usize, w: &[f64]) -> f64 {
        let n = self.dim;
        w.iter()
            .enumerate()
            .map(|(k, wk)| wk * p[(k * n + j) * n + i])
            .sum()
    }

    /// Objective at a column-major order-3 flattening `p`. Entries need not
    /// be stochastic, which makes finite-difference checks possible. A
    /// transition with zero mass makes the result `+∞`.
    pub fn nll(&self, p: &[f64]) -> f64 {
        self.check_len(p);
        let mut total = 0.0;
        for (j, i, w) in self.iter() {
            let s = self.mass(p, i, j, w);
            if s <= 0.0 {
                return f64::INFINITY;
            }
            total -= s.ln();
        }
        total
    }

    /// Gradient of [`ScoredData::nll`], laid out like `p`.
    pub fn gradient(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_len(p);
        let n = self.dim;
        let mut grad = vec![0.0; p.len()];
        for (j, i, w) in self.iter() {
            let s = self.mass(p, i, j, w);
            if s <= 0.0 {
                return Err(Error::InfiniteNll);
            }
            for (k, wk) in w.iter().enumerate() {
                grad[(k * n + j) * n + i] -= wk / s;
            }
        }
        Ok(grad)
    }
}

fn order_three(h: &TransitionHypermatrix) -> Result<()> {
    if h.order() != 3 {
        return Err(Error::ShapeMismatch(format!(
            "likelihood is defined for order 3, got order {}",
            h.order()
        )));
    }
    Ok(())
}

/// Negative log-likelihood of `trajectories` under `h` (order 3). Returns
/// `+∞` when some scored transition has zero probability.
pub fn nll(h: &TransitionHypermatrix, trajectories: &[Trajectory]) -> Result<f64> {
    order_three(h)?;
    Ok(ScoredData::new(trajectories, h.dim())?.nll(h.as_column_major()))
}

/// Gradient of [`nll`] with respect to the flattening entries.
pub fn nll_gradient(h: &TransitionHypermatrix, trajectories: &[Trajectory]) -> Result<Vec<f64>> {
    order_three(h)?;
    ScoredData::new(trajectories, h.dim())?.gradient(h.as_column_major())
}

/// Euclidean projection onto the probability simplex, by sorting and
/// thresholding.
pub fn project_simplex(v: &[f64]) -> StochasticVector {
    let mut out = v.to_vec();
    project_in_place(&mut out);
    StochasticVector::from_raw(out)
}

fn project_in_place(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    // Points already on the simplex up to rounding are left alone, which
    // makes the projection exactly idempotent.
    let sum: f64 = v.iter().sum();
    if v.iter().all(|&x| x >= 0.0) && (sum - 1.0).abs() <= 4.0 * f64::EPSILON * v.len() as f64 {
        return;
    }
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (r, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (r + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Optimizer settings for [`fit_srw`].
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub max_iters: usize,
    pub step0: f64,
    pub armijo_c: f64,
    pub armijo_shrink: f64,
    /// Stop once the 1-norm of the gradient mapping `P − Π(P − ∇)` is below this.
    pub tol: f64,
    /// Start from uniform columns (default) or from random columns drawn with `seed`.
    pub random_init: bool,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            step0: 1.0,
            armijo_c: 1e-4,
            armijo_shrink: 0.5,
            tol: 1e-6,
            random_init: false,
            seed: 0,
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<()> {
        let positive = |x: f64| x > 0.0;
        let open_unit = |x: f64| x > 0.0 && x < 1.0;
        if self.max_iters == 0
            || !positive(self.step0)
            || !positive(self.tol)
            || !open_unit(self.armijo_c)
            || !open_unit(self.armijo_shrink)
        {
            return Err(Error::InvalidConfig(format!("{self:?}")));
        }
        Ok(())
    }
}

/// A fitted hypermatrix with the objective value after every accepted step
/// (the first entry is the starting value).
#[derive(Debug, Clone)]
pub struct FitResult {
    pub hypermatrix: TransitionHypermatrix,
    pub nll_trace: Vec<f64>,
    pub converged: bool,
}

fn project_columns(p: &mut [f64], dim: usize) {
    for col in p.chunks_exact_mut(dim) {
        project_in_place(col);
    }
}

fn gradient_mapping_norm(p: &[f64], grad: &[f64], dim: usize) -> f64 {
    let mut q: Vec<f64> = p.iter().zip(grad).map(|(a, g)| a - g).collect();
    project_columns(&mut q, dim);
    p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum()
}

/// Fits an order-3 hypermatrix on `dim` states to `trajectories`.
///
/// Columns of contexts that never occur keep their starting value.
pub fn fit_srw(trajectories: &[Trajectory], dim: usize, config: &FitConfig) -> Result<FitResult> {
    config.validate()?;
    if trajectories.is_empty() || dim == 0 {
        return Err(Error::InvalidConfig(
            "fitting needs data and at least one state".into(),
        ));
    }
    let data = ScoredData::new(trajectories, dim)?;
    let ncols = dim * dim;
    let mut p = if config.random_init {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        (0..ncols)
            .flat_map(|_| random_simplex_point(dim, &mut rng).into_vec())
            .collect()
    } else {
        vec![1.0 / dim as f64; ncols * dim]
    };
    let mut f = data.nll(&p);
    if !f.is_finite() {
        return Err(Error::AllTransitionsUnobservable);
    }
    let mut trace = vec![f];
    let mut converged = false;
    let mut eta = config.step0;
    for _ in 0..config.max_iters {
        let grad = data.gradient(&p)?;
        if gradient_mapping_norm(&p, &grad, dim) <= config.tol {
            converged = true;
            break;
        }
        let mut accepted = None;
        while eta > 1e-30 {
            let mut cand: Vec<f64> = p.iter().zip(&grad).map(|(a, g)| a - eta * g).collect();
            project_columns(&mut cand, dim);
            let decrease: f64 = grad
                .iter()
                .zip(cand.iter().zip(&p))
                .map(|(g, (c, a))| g * (c - a))
                .sum();
            let fc = data.nll(&cand);
            if fc.is_finite() && fc <= f + config.armijo_c * decrease {
                accepted = Some((cand, fc));
                break;
            }
            eta *= config.armijo_shrink;
        }
        let Some((cand, fc)) = accepted else {
            // No representable step decreases the objective.
            converged = true;
            break;
        };
        p = cand;
        f = fc;
        trace.push(f);
        eta = (eta / config.armijo_shrink).min(config.step0);
    }
    let hypermatrix = TransitionHypermatrix::from_columns(3, dim, p)?;
    Ok(FitResult {
        hypermatrix,
        nll_trace: trace,
        converged,
    })
}
