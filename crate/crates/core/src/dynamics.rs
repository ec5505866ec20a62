//! Stationary distributions of spacey random walks.
//!
//! The stationary vectors are the stochastic z eigenvectors `x = R·x^⊗(m-1)`,
//! which are exactly the zeros of the forcing function
//! `f(x) = π(M(x)) − x` of the continuous dynamics `dx/dt = f(x)`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{column_stochastic_edges, count_terminal_components};
use crate::hypermatrix::{random_simplex_point, TransitionHypermatrix};
use crate::vector::{l1_distance, l1_norm, StochasticVector};
use crate::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 100_000;
/// Euler step used for walks without a surfer structure.
pub const DEFAULT_STEP: f64 = 0.5;
/// Column sums accepted by [`perron_vector`].
const STOCHASTIC_TOL: f64 = 1e-10;
/// Fixed points closer than this in 1-norm are merged.
pub const DEDUP_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Power,
    Euler,
    Perron,
}

/// Outcome of an iterative stationary-distribution solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub result: StochasticVector,
    /// Number of updates performed.
    pub iterations: usize,
    /// 1-norm residual after each update.
    pub residual_history: Vec<f64>,
    pub converged: bool,
    pub method: Method,
}

impl SolveReport {
    pub fn final_residual(&self) -> Option<f64> {
        self.residual_history.last().copied()
    }
}

/// Stationary distribution of a column-stochastic matrix with a single
/// recurrent class.
///
/// Solves `(I − M)x = 0` with the last equation replaced by `Σx = 1`. That
/// system is nonsingular exactly when there is one recurrent class, and the
/// solve handles periodic chains where power iteration would oscillate.
pub fn perron_vector(m: &DMatrix<f64>, tol: f64) -> Result<StochasticVector> {
    let n = m.nrows();
    if n == 0 || m.ncols() != n {
        return Err(Error::NotStochastic(format!(
            "shape {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    for (j, col) in m.column_iter().enumerate() {
        if col.iter().any(|&v| !v.is_finite() || v < 0.0) {
            return Err(Error::NotStochastic(format!(
                "column {j} has a negative entry"
            )));
        }
        let s = col.sum();
        if (s - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::NotStochastic(format!("column {j} sums to {s}")));
        }
    }
    let classes = count_terminal_components(n, column_stochastic_edges(n, m.as_slice()));
    if classes != 1 {
        return Err(Error::MultipleRecurrentClasses(classes));
    }
    if n == 1 {
        return Ok(StochasticVector::unit(1, 0));
    }

    let mut a = DMatrix::<f64>::identity(n, n) - m;
    a.row_mut(n - 1).fill(1.0);
    let mut rhs = DVector::<f64>::zeros(n);
    rhs[n - 1] = 1.0;
    let lu = a.clone().lu();
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::SolveFailed("singular stationary system".into()))?;
    // One step of iterative refinement.
    let r = &rhs - &a * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }

    let x = StochasticVector::normalized_unchecked(x.data.into());
    let mx = m * DVector::from_column_slice(x.as_slice());
    let residual = l1_distance(mx.as_slice(), x.as_slice());
    if residual > tol {
        return Err(Error::SolveFailed(format!(
            "residual {residual:e} above {tol:e}"
        )));
    }
    Ok(x)
}

/// `π(M(x)) − x`.
pub fn forcing(h: &TransitionHypermatrix, x: &StochasticVector) -> Result<Vec<f64>> {
    if x.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: x.len(),
        });
    }
    forcing_raw(h, x.as_slice())
}

fn forcing_raw(h: &TransitionHypermatrix, x: &[f64]) -> Result<Vec<f64>> {
    let pi = perron_vector(&h.build_mw_unchecked(x), DEFAULT_TOL)?;
    Ok(pi.as_slice().iter().zip(x).map(|(p, xi)| p - xi).collect())
}

/// Euler step `min(1, (1−α)/(1−(m−1)α))` for a surfer with parameter `alpha`;
/// the cap keeps iterates on the simplex.
pub fn surfer_step(alpha: f64, order: usize) -> f64 {
    let denom = 1.0 - (order as f64 - 1.0) * alpha;
    if denom <= 0.0 {
        return 1.0;
    }
    ((1.0 - alpha) / denom).min(1.0)
}

/// Forward Euler on `dx/dt = π(M(x)) − x`: `x(n+1) = x(n) + h·f(x(n))`.
///
/// Stops once `‖f(x(n))‖₁ ≤ tol` or after `max_steps` updates. Because
/// `h ≤ 1`, every iterate is a convex combination of two stochastic vectors.
pub fn euler_integrate(
    h: &TransitionHypermatrix,
    x0: &StochasticVector,
    step: f64,
    max_steps: usize,
    tol: f64,
) -> Result<SolveReport> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::StepOutOfRange(step));
    }
    let mut x = x0.clone();
    let mut f = forcing(h, &x)?;
    let mut history = Vec::new();
    let mut converged = l1_norm(&f) <= tol;
    while !converged && history.len() < max_steps {
        let next: Vec<f64> = x
            .as_slice()
            .iter()
            .zip(&f)
            .map(|(xi, fi)| xi + step * fi)
            .collect();
        x = StochasticVector::normalized_unchecked(next);
        f = forcing_raw(h, x.as_slice())?;
        let r = l1_norm(&f);
        history.push(r);
        converged = r <= tol;
    }
    Ok(SolveReport {
        result: x,
        iterations: history.len(),
        residual_history: history,
        converged,
        method: Method::Euler,
    })
}

/// Iterates `x(n+1) = R·x(n)^⊗(m-1)`, yielding `x(1), x(2), ...`.
///
/// Each iterate is renormalized to sum to one; without it the rounding error
/// in the sum compounds geometrically over non-convergent runs.
#[derive(Debug, Clone)]
pub struct PowerIterates<'a> {
    h: &'a TransitionHypermatrix,
    x: Vec<f64>,
}

impl<'a> PowerIterates<'a> {
    pub fn new(h: &'a TransitionHypermatrix, x0: &StochasticVector) -> Result<Self> {
        if x0.len() != h.dim() {
            return Err(Error::DimensionMismatch {
                expected: h.dim(),
                got: x0.len(),
            });
        }
        Ok(Self {
            h,
            x: x0.as_slice().to_vec(),
        })
    }
}

impl Iterator for PowerIterates<'_> {
    type Item = StochasticVector;

    fn next(&mut self) -> Option<StochasticVector> {
        let next = StochasticVector::normalized_unchecked(self.h.apply_raw(&self.x));
        self.x.clear();
        self.x.extend_from_slice(next.as_slice());
        Some(next)
    }
}

/// Tensor power method. Non-convergence is a normal outcome, reported with
/// `converged = false`.
pub fn tensor_power_method(
    h: &TransitionHypermatrix,
    x0: &StochasticVector,
    tol: f64,
    max_iters: usize,
) -> Result<SolveReport> {
    let mut prev = x0.clone();
    let mut history = Vec::new();
    let mut converged = false;
    for next in PowerIterates::new(h, x0)?.take(max_iters) {
        let r = next.l1_distance(prev.as_slice());
        history.push(r);
        prev = next;
        if r <= tol {
            converged = true;
            break;
        }
    }
    Ok(SolveReport {
        result: prev,
        iterations: history.len(),
        residual_history: history,
        converged,
        method: Method::Power,
    })
}

/// Bound `2·(α(m−1))ⁿ` on the power-method error for a surfer started at its
/// teleportation vector.
pub fn surfer_residual_bound(alpha: f64, order: usize, n: u32) -> Result<f64> {
    let rate = alpha * (order as f64 - 1.0);
    if alpha.is_nan() || alpha < 0.0 || rate >= 1.0 {
        return Err(Error::InvalidAlpha(alpha));
    }
    Ok(2.0 * rate.powi(n as i32))
}

/// Residual `‖R·x^⊗(m-1) − x‖₁` of the z-eigenvector equation.
pub fn z_residual(h: &TransitionHypermatrix, x: &StochasticVector) -> Result<f64> {
    Ok(h.apply(x)?.l1_distance(x.as_slice()))
}

const SEARCH_EULER_STEPS: usize = 20_000;
const SEARCH_POWER_ITERS: usize = 10_000;

/// Multi-start search for stochastic z eigenvectors.
///
/// Runs Euler (`h = 0.5`) and the power method from every unit vector and
/// from `n_starts` uniform random simplex points, keeps results with
/// `‖R·x^⊗(m-1) − x‖₁ ≤ tol`, merges points within [`DEDUP_RADIUS`], and
/// returns them in lexicographic order.
pub fn find_fixed_points(
    h: &TransitionHypermatrix,
    n_starts: usize,
    tol: f64,
    seed: u64,
) -> Vec<StochasticVector> {
    let n = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut starts: Vec<StochasticVector> = (0..n).map(|k| StochasticVector::unit(n, k)).collect();
    starts.extend((0..n_starts).map(|_| random_simplex_point(n, &mut rng)));

    let inner_tol = tol / 10.0;
    let mut found: Vec<(StochasticVector, f64)> = Vec::new();
    for x0 in &starts {
        let euler = euler_integrate(h, x0, DEFAULT_STEP, SEARCH_EULER_STEPS, inner_tol).ok();
        let power = tensor_power_method(h, x0, inner_tol, SEARCH_POWER_ITERS).ok();
        for report in euler.into_iter().chain(power).filter(|r| r.converged) {
            let x = report.result;
            let Ok(res) = z_residual(h, &x) else { continue };
            if res > tol {
                continue;
            }
            match found
                .iter_mut()
                .find(|(y, _)| y.l1_distance(x.as_slice()) <= DEDUP_RADIUS)
            {
                Some(slot) if res < slot.1 => *slot = (x, res),
                Some(_) => {}
                None => found.push((x, res)),
            }
        }
    }
    let mut points: Vec<StochasticVector> = found.into_iter().map(|(x, _)| x).collect();
    points.sort_by(|a, b| {
        a.as_slice()
            .partial_cmp(b.as_slice())
            .expect("finite entries")
    });
    points
}
