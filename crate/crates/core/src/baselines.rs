//! Markov-chain baselines, the pair-space stationary distribution of a
//! second-order chain, and RMSE evaluation of predictive models.
//!
//! Every model is trained and scored on the same transitions as the
//! likelihood in [`crate::learn`]: `X(q−1) → X(q)` for `q ≥ 2`, so each
//! scored transition has a second-to-last state and an occupation vector.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::dynamics::perron_vector;
use crate::hypermatrix::TransitionHypermatrix;
use crate::simulate::Trajectory;
use crate::vector::StochasticVector;
use crate::{Error, Result};

/// A scored transition: the two preceding states, the realized next state
/// and the occupation vector before the move.
#[derive(Debug, Clone, Copy)]
pub struct Context<'a> {
    pub prev2: usize,
    pub prev: usize,
    pub occupation: &'a [f64],
}

fn for_each_scored(
    trajectories: &[Trajectory],
    dim: usize,
    mut visit: impl FnMut(Context<'_>, usize),
) -> Result<()> {
    let mut w = vec![0.0; dim];
    for traj in trajectories {
        if traj.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: traj.dim(),
            });
        }
        let states = traj.states();
        let mut counts = vec![1.0; dim];
        for q in 2..states.len() {
            counts[states[q - 1]] += 1.0;
            let total = (dim + q - 1) as f64;
            for (wk, c) in w.iter_mut().zip(&counts) {
                *wk = c / total;
            }
            let ctx = Context {
                prev2: states[q - 2],
                prev: states[q - 1],
                occupation: &w,
            };
            visit(ctx, states[q]);
        }
    }
    Ok(())
}

/// State frequencies over the targets of scored transitions, with add-one
/// smoothing.
pub fn fit_zeroth(trajectories: &[Trajectory], dim: usize) -> Result<StochasticVector> {
    let mut counts = vec![1.0; dim];
    for_each_scored(trajectories, dim, |_, next| counts[next] += 1.0)?;
    Ok(StochasticVector::normalized_unchecked(counts))
}

fn normalize_counts(counts: &mut [f64], fallback: &[f64]) {
    let total: f64 = counts.iter().sum();
    if total > 0.0 {
        counts.iter_mut().for_each(|c| *c /= total);
    } else {
        counts.copy_from_slice(fallback);
    }
}

/// First-order transition matrix, column-stochastic: `P[i, j]` estimates
/// the probability of `j → i`. Unseen source states use the zeroth-order fit.
pub fn fit_first(trajectories: &[Trajectory], dim: usize) -> Result<DMatrix<f64>> {
    let zeroth = fit_zeroth(trajectories, dim)?;
    let mut p = DMatrix::zeros(dim, dim);
    for_each_scored(trajectories, dim, |ctx, next| p[(next, ctx.prev)] += 1.0)?;
    for mut col in p.column_iter_mut() {
        normalize_counts(col.as_mut_slice(), zeroth.as_slice());
    }
    Ok(p)
}

/// Second-order chain as an order-3 hypermatrix whose column `(j, k)` holds
/// the distribution of the next state after `k, j`. Unseen contexts back off
/// to the first-order column of `j`.
pub fn fit_second(trajectories: &[Trajectory], dim: usize) -> Result<TransitionHypermatrix> {
    let first = fit_first(trajectories, dim)?;
    let mut p = vec![0.0; dim * dim * dim];
    for_each_scored(trajectories, dim, |ctx, next| {
        p[(ctx.prev2 * dim + ctx.prev) * dim + next] += 1.0;
    })?;
    for (c, col) in p.chunks_exact_mut(dim).enumerate() {
        let j = c % dim;
        normalize_counts(col, first.column(j).as_slice());
    }
    TransitionHypermatrix::from_columns(3, dim, p)
}

/// Stationary distribution of a second-order chain on pairs of states.
#[derive(Debug, Clone, PartialEq)]
pub struct PairStationary {
    /// `x[(i, j)]` is the long-run probability that the last two states are
    /// `j` then `i`.
    pub x: DMatrix<f64>,
}

impl PairStationary {
    /// Row sums: the distribution of the most recent state.
    pub fn marginal(&self) -> StochasticVector {
        StochasticVector::normalized_unchecked(self.x.row_iter().map(|r| r.sum()).collect())
    }

    /// Column sums: the distribution of the second most recent state.
    pub fn column_marginal(&self) -> StochasticVector {
        StochasticVector::normalized_unchecked(self.x.column_iter().map(|c| c.sum()).collect())
    }

    /// Largest violation of `X_ij = Σ_k P_ijk X_jk`.
    pub fn residual(&self, h: &TransitionHypermatrix) -> f64 {
        let n = self.x.nrows();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let rhs: f64 = (0..n)
                    .map(|k| h.entry(i, h.column_index(&[k], j)) * self.x[(j, k)])
                    .sum();
                worst = worst.max((self.x[(i, j)] - rhs).abs());
            }
        }
        worst
    }
}

/// Transition matrix of the chain on pairs: pair `(a, b)` (most recent
/// first) has index `a + b·N`, and `(j, k)` moves to `(i, j)` with
/// probability `P[i, j, k]`.
pub fn lifted_chain(h: &TransitionHypermatrix) -> Result<DMatrix<f64>> {
    if h.order() != 3 {
        return Err(Error::ShapeMismatch(format!(
            "pair chain needs order 3, got {}",
            h.order()
        )));
    }
    let n = h.dim();
    let mut l = DMatrix::zeros(n * n, n * n);
    for j in 0..n {
        for k in 0..n {
            let col = h.column(h.column_index(&[k], j));
            for (i, &p) in col.iter().enumerate() {
                l[(i + j * n, j + k * n)] = p;
            }
        }
    }
    Ok(l)
}

/// Solves for the pair-space stationary distribution of an order-3 chain.
pub fn pair_stationary(h: &TransitionHypermatrix) -> Result<PairStationary> {
    let n = h.dim();
    let pi = perron_vector(&lifted_chain(h)?, 1e-10)?;
    Ok(PairStationary {
        x: DMatrix::from_column_slice(n, n, pi.as_slice()),
    })
}

/// Model families compared in evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Zeroth,
    First,
    Second,
    Srw,
    TrueSrw,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Zeroth,
        ModelKind::First,
        ModelKind::Second,
        ModelKind::Srw,
        ModelKind::TrueSrw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Zeroth => "zeroth",
            ModelKind::First => "first",
            ModelKind::Second => "second",
            ModelKind::Srw => "srw",
            ModelKind::TrueSrw => "true-srw",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zeroth" | "zomc" => Ok(ModelKind::Zeroth),
            "first" | "fomc" => Ok(ModelKind::First),
            "second" | "somc" => Ok(ModelKind::Second),
            "srw" => Ok(ModelKind::Srw),
            "true-srw" | "true" => Ok(ModelKind::TrueSrw),
            other => Err(Error::InvalidConfig(format!("unknown model '{other}'"))),
        }
    }
}

/// A fitted model that predicts the distribution of the next state.
#[derive(Debug, Clone)]
pub enum PredictiveModel {
    Zeroth(StochasticVector),
    First(DMatrix<f64>),
    Second(TransitionHypermatrix),
    /// A learned spacey random walk.
    Srw(TransitionHypermatrix),
    /// The spacey random walk that generated the data.
    TrueSrw(TransitionHypermatrix),
}

impl PredictiveModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            PredictiveModel::Zeroth(_) => ModelKind::Zeroth,
            PredictiveModel::First(_) => ModelKind::First,
            PredictiveModel::Second(_) => ModelKind::Second,
            PredictiveModel::Srw(_) => ModelKind::Srw,
            PredictiveModel::TrueSrw(_) => ModelKind::TrueSrw,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            PredictiveModel::Zeroth(v) => v.len(),
            PredictiveModel::First(p) => p.nrows(),
            PredictiveModel::Second(h) | PredictiveModel::Srw(h) | PredictiveModel::TrueSrw(h) => {
                h.dim()
            }
        }
    }

    /// Probability of moving to `next` in the given context.
    pub fn probability(&self, ctx: Context<'_>, next: usize) -> f64 {
        match self {
            PredictiveModel::Zeroth(v) => v[next],
            PredictiveModel::First(p) => p[(next, ctx.prev)],
            PredictiveModel::Second(h) => h.entry(next, h.column_index(&[ctx.prev2], ctx.prev)),
            PredictiveModel::Srw(h) | PredictiveModel::TrueSrw(h) => srw_column(h, ctx)[next],
        }
    }

    /// Predicted distribution of the next state.
    pub fn predict(&self, ctx: Context<'_>) -> StochasticVector {
        let values = match self {
            PredictiveModel::Zeroth(v) => v.as_slice().to_vec(),
            PredictiveModel::First(p) => p.column(ctx.prev).iter().copied().collect(),
            PredictiveModel::Second(h) => h.column(h.column_index(&[ctx.prev2], ctx.prev)).to_vec(),
            PredictiveModel::Srw(h) | PredictiveModel::TrueSrw(h) => srw_column(h, ctx),
        };
        StochasticVector::from_raw(values)
    }
}

fn srw_column(h: &TransitionHypermatrix, ctx: Context<'_>) -> Vec<f64> {
    let n = h.dim();
    if h.order() == 3 {
        let mut out = vec![0.0; n];
        for (k, &wk) in ctx.occupation.iter().enumerate() {
            if wk == 0.0 {
                continue;
            }
            for (o, p) in out.iter_mut().zip(h.column(k * n + ctx.prev)) {
                *o += wk * p;
            }
        }
        out
    } else {
        h.build_mw_unchecked(ctx.occupation)
            .column(ctx.prev)
            .iter()
            .copied()
            .collect()
    }
}

/// Fits a baseline of the given kind. Spacey random walk kinds need a
/// hypermatrix and are built directly from it instead.
pub fn fit_baseline(
    kind: ModelKind,
    trajectories: &[Trajectory],
    dim: usize,
) -> Result<PredictiveModel> {
    match kind {
        ModelKind::Zeroth => Ok(PredictiveModel::Zeroth(fit_zeroth(trajectories, dim)?)),
        ModelKind::First => Ok(PredictiveModel::First(fit_first(trajectories, dim)?)),
        ModelKind::Second => Ok(PredictiveModel::Second(fit_second(trajectories, dim)?)),
        ModelKind::Srw | ModelKind::TrueSrw => Err(Error::InvalidConfig(format!(
            "'{kind}' is not a Markov-chain baseline"
        ))),
    }
}

/// Root mean square of `1 − p` over all scored test transitions, pooled
/// across trajectories, where `p` is the probability the model gave to the
/// realized next state.
pub fn rmse(model: &PredictiveModel, trajectories: &[Trajectory]) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for_each_scored(trajectories, model.dim(), |ctx, next| {
        let e = 1.0 - model.probability(ctx, next);
        sum += e * e;
        count += 1;
    })?;
    if count == 0 {
        return Err(Error::InvalidConfig(
            "no scored transitions in the test data".into(),
        ));
    }
    Ok((sum / count as f64).sqrt())
}
