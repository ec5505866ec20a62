//! Two-state spacey random walks.
//!
//! With two states a distribution is a single number `x = Pr(state 1)`, and
//! the dynamics reduce to the scalar ODE `dx/dt = f(x)` with
//! `f(x) = [π(R·(z(x)^⊗(m-2) ⊗ I))]₁ − x`. Every trajectory from the open
//! interval converges to a stable point, and for order 3 both the equilibria
//! and the trajectories have closed forms.

use nalgebra::DMatrix;

use crate::hypermatrix::TransitionHypermatrix;
use crate::vector::StochasticVector;
use crate::{Error, Result};

/// Half-width of the sign probe used by [`classify_stability`].
pub const PROBE_RADIUS: f64 = 1e-4;
/// `|f| ≤ ZERO` counts as no sign.
const ZERO: f64 = 1e-12;
/// Coefficients this small are treated as zero in the closed forms.
const COEF_EPS: f64 = 1e-14;

/// `x ↦ (x, 1 − x)`.
pub fn z_map(x: f64) -> Result<StochasticVector> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(x));
    }
    Ok(StochasticVector::from_raw(vec![x, 1.0 - x]))
}

/// First coordinate of the stationary vector of `[[p, 1−q], [1−p, q]]`.
pub fn pi_2x2(p: f64, q: f64) -> Result<f64> {
    if p == 1.0 && q == 1.0 {
        return Err(Error::IdentityMatrix);
    }
    Ok((1.0 - q) / (2.0 - p - q))
}

fn check_two_state(h: &TransitionHypermatrix) -> Result<()> {
    if h.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: h.dim(),
        });
    }
    Ok(())
}

/// Limit of `π₁(M(z(x)))` as `x` tends to `boundary` (0 or 1) when the
/// boundary panel is the identity.
///
/// Near the boundary the panels drawing `r` history states away from it
/// carry weight of order `εʳ`, so the limit is decided by the smallest `r`
/// whose panels have a nonzero off-diagonal entry.
fn boundary_limit(h: &TransitionHypermatrix, boundary: f64) -> Option<f64> {
    let away = if boundary == 0.0 { 0 } else { 1 };
    let mut best: Option<(usize, f64, f64)> = None;
    for kappa in 0..h.num_panels() {
        let mut rest = kappa;
        let mut r = 0;
        for _ in 0..h.order() - 2 {
            if rest % 2 == away {
                r += 1;
            }
            rest /= 2;
        }
        let upper = h.entry(0, 2 * kappa + 1);
        let lower = h.entry(1, 2 * kappa);
        if upper + lower == 0.0 {
            continue;
        }
        match &mut best {
            Some((br, u, l)) if *br == r => {
                *u += upper;
                *l += lower;
            }
            Some((br, _, _)) if *br < r => {}
            _ => best = Some((r, upper, lower)),
        }
    }
    best.map(|(_, u, l)| u / (u + l))
}

/// The scalar forcing function `f(x)` on `[0, 1]`.
///
/// At an endpoint where the boundary panel is the identity, `f` is extended
/// by its one-sided limit, which makes it continuous on `[0, 1]` under
/// Property B.
pub fn f_two_state(h: &TransitionHypermatrix, x: f64) -> Result<f64> {
    check_two_state(h)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange(x));
    }
    if !h.check_property_b() {
        return Err(Error::PropertyBViolation(x));
    }
    let m = h.build_mw_unchecked(&[x, 1.0 - x]);
    let (upper, lower) = (m[(0, 1)], m[(1, 0)]);
    let pi1 = if upper + lower > 0.0 {
        upper / (upper + lower)
    } else if x == 0.0 || x == 1.0 {
        boundary_limit(h, x).ok_or(Error::PropertyBViolation(x))?
    } else {
        return Err(Error::PropertyBViolation(x));
    };
    Ok(pi1 - x)
}

/// `(x, f(x))` on `points` evenly spaced abscissae covering `[0, 1]`.
pub fn sample_forcing(h: &TransitionHypermatrix, points: usize) -> Result<Vec<(f64, f64)>> {
    let denom = points.saturating_sub(1).max(1) as f64;
    (0..points)
        .map(|i| {
            let x = i as f64 / denom;
            Ok((x, f_two_state(h, x)?))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    /// Neither: includes neighborhoods where `f ≡ 0` and half-stable points.
    Marginal,
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stability::Stable => "stable",
            Stability::Unstable => "unstable",
            Stability::Marginal => "marginal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub x: f64,
    pub stability: Stability,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Equilibria {
    /// Isolated equilibria in increasing order.
    Points(Vec<Equilibrium>),
    /// `f ≡ 0`: every point of `[0, 1]` is an equilibrium.
    AllPoints,
}

fn sign(v: f64) -> i8 {
    if v > ZERO {
        1
    } else if v < -ZERO {
        -1
    } else {
        0
    }
}

/// Classifies an equilibrium by the sign of `f` at `x* ± δ`
/// (`δ = PROBE_RADIUS`, one-sided at the endpoints).
pub fn classify_stability(h: &TransitionHypermatrix, x_star: f64, tol: f64) -> Result<Stability> {
    let residual = f_two_state(h, x_star)?.abs();
    if residual > tol {
        return Err(Error::NotAnEquilibrium {
            x: x_star,
            residual,
        });
    }
    let left = if x_star - PROBE_RADIUS >= 0.0 {
        Some(sign(f_two_state(h, x_star - PROBE_RADIUS)?))
    } else {
        None
    };
    let right = if x_star + PROBE_RADIUS <= 1.0 {
        Some(sign(f_two_state(h, x_star + PROBE_RADIUS)?))
    } else {
        None
    };
    Ok(match (left, right) {
        (Some(1), Some(-1)) | (None, Some(-1)) | (Some(1), None) => Stability::Stable,
        (Some(-1), Some(1)) | (None, Some(1)) | (Some(-1), None) => Stability::Unstable,
        _ => Stability::Marginal,
    })
}

fn detect_identically_zero(h: &TransitionHypermatrix) -> Result<bool> {
    for i in 0..=100 {
        if f_two_state(h, i as f64 / 100.0)?.abs() > ZERO {
            return Ok(false);
        }
    }
    Ok(true)
}

fn finish(h: &TransitionHypermatrix, mut roots: Vec<f64>, tol: f64) -> Result<Equilibria> {
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    let mut points = Vec::with_capacity(roots.len());
    for x in roots {
        match f_two_state(h, x) {
            Ok(fx) if fx.abs() <= tol => {
                points.push(Equilibrium {
                    x,
                    stability: classify_stability(h, x, tol)?,
                });
            }
            _ => {}
        }
    }
    Ok(Equilibria::Points(points))
}

// Dense polynomials in the power basis, lowest degree first.

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add_scaled(acc: &mut Vec<f64>, p: &[f64], s: f64) {
    if acc.len() < p.len() {
        acc.resize(p.len(), 0.0);
    }
    for (a, &c) in acc.iter_mut().zip(p) {
        *a += s * c;
    }
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_derivative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}

/// Numerator of `f`: `M₁₂(x)(1 − x) − x·M₂₁(x)` as a polynomial in `x`.
fn forcing_numerator(h: &TransitionHypermatrix) -> Vec<f64> {
    let mut upper = vec![0.0];
    let mut lower = vec![0.0];
    for kappa in 0..h.num_panels() {
        // weight = x^(#state-1 draws) (1 − x)^(#state-2 draws)
        let mut weight = vec![1.0];
        let mut rest = kappa;
        for _ in 0..h.order() - 2 {
            let factor: &[f64] = if rest % 2 == 0 {
                &[0.0, 1.0]
            } else {
                &[1.0, -1.0]
            };
            weight = poly_mul(&weight, factor);
            rest /= 2;
        }
        poly_add_scaled(&mut upper, &weight, h.entry(0, 2 * kappa + 1));
        poly_add_scaled(&mut lower, &weight, h.entry(1, 2 * kappa));
    }
    let mut num = poly_mul(&upper, &[1.0, -1.0]);
    poly_add_scaled(&mut num, &poly_mul(&lower, &[0.0, 1.0]), -1.0);
    num
}

/// Real roots of `p` in `[0, 1]` from the eigenvalues of its companion
/// matrix, polished by Newton's method.
fn unit_interval_roots(p: &[f64]) -> Vec<f64> {
    let scale = p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut p = p.to_vec();
    while p.len() > 1
        && p.last()
            .is_some_and(|c| c.abs() <= COEF_EPS * scale.max(1.0))
    {
        p.pop();
    }
    let degree = p.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let lead = p[degree];
    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -p[i] / lead;
    }
    let dp = poly_derivative(&p);
    companion
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() <= 1e-6 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .filter(|&r| (-1e-7..=1.0 + 1e-7).contains(&r))
        .map(|mut r| {
            for _ in 0..50 {
                let d = poly_eval(&dp, r);
                if d == 0.0 {
                    break;
                }
                let next = r - poly_eval(&p, r) / d;
                if !next.is_finite() || (next - r).abs() <= 1e-16 {
                    break;
                }
                r = next;
            }
            r.clamp(0.0, 1.0)
        })
        .collect()
}

/// Equilibria of any order-`m` two-state hypermatrix.
///
/// `f ≡ 0` is detected on a 101-point grid first. Otherwise the equilibria
/// are the roots in `[0, 1]` of the numerator of `f`, a polynomial of
/// degree at most `m − 1`.
pub fn equilibria(h: &TransitionHypermatrix, tol: f64) -> Result<Equilibria> {
    check_two_state(h)?;
    if detect_identically_zero(h)? {
        return Ok(Equilibria::AllPoints);
    }
    finish(h, unit_interval_roots(&forcing_numerator(h)), tol)
}

/// An order-3 two-state hypermatrix with flattening
/// `[[a, b | c, d], [1−a, 1−b | 1−c, 1−d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoByTwoByTwo {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Coefficients of `1/f(x) = (δx + ε) / (αx² + βx + γ)`.
///
/// The quadratic is the numerator of `f` and `δx + ε` its denominator
/// `M₁₂(x) + M₂₁(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralCoefficients {
    pub alpha_c: f64,
    pub beta_c: f64,
    pub gamma_c: f64,
    pub delta_c: f64,
    pub epsilon_c: f64,
}

impl TwoByTwoByTwo {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        for v in [a, b, c, d] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange(v));
            }
        }
        Ok(Self { a, b, c, d })
    }

    pub fn to_hypermatrix(&self) -> TransitionHypermatrix {
        let Self { a, b, c, d } = *self;
        TransitionHypermatrix::from_columns(
            3,
            2,
            vec![a, 1.0 - a, b, 1.0 - b, c, 1.0 - c, d, 1.0 - d],
        )
        .expect("entries in [0, 1] give stochastic columns")
    }

    pub fn coefficients(&self) -> IntegralCoefficients {
        let Self { a, b, c, d } = *self;
        IntegralCoefficients {
            alpha_c: a - c + d - b,
            beta_c: b + c - 2.0 * d - 1.0,
            gamma_c: d,
            delta_c: c - a + b - d,
            epsilon_c: 1.0 - c + d,
        }
    }

    /// `f(x)` from its rational closed form; undefined where the chain is the
    /// identity.
    pub fn rate(&self, x: f64) -> f64 {
        let Self { a, b, c, d } = *self;
        (d - x * (d - b)) / (1.0 - c + d + x * (c - a + b - d)) - x
    }
}

/// Equilibria of the order-3 two-state dynamics from the quadratic formula.
///
/// Roots of `αx² + βx + γ` in `[0, 1]` with `|f(x)| ≤ tol`; the linear root
/// `d / (1 + 2d − b − c)` when `a + d = b + c`; and
/// [`Equilibria::AllPoints`] when additionally `b + c = 1 + 2d`.
pub fn equilibria_222(t: &TwoByTwoByTwo, tol: f64) -> Result<Equilibria> {
    let IntegralCoefficients {
        alpha_c: alpha,
        beta_c: beta,
        gamma_c: gamma,
        ..
    } = t.coefficients();
    let h = t.to_hypermatrix();
    let mut roots = Vec::with_capacity(2);
    if alpha.abs() <= COEF_EPS {
        if beta.abs() <= COEF_EPS {
            return Ok(Equilibria::AllPoints);
        }
        roots.push(-gamma / beta);
    } else {
        let disc = beta * beta - 4.0 * alpha * gamma;
        if disc >= 0.0 {
            let q = -0.5 * (beta + beta.signum() * disc.sqrt());
            roots.push(q / alpha);
            if q != 0.0 {
                roots.push(gamma / q);
            }
        }
    }
    let roots = roots
        .into_iter()
        .filter(|r| (-1e-12..=1.0 + 1e-12).contains(r))
        .map(|r| r.clamp(0.0, 1.0))
        .collect();
    finish(&h, roots, tol)
}

/// Time for the order-3 two-state dynamics to travel from `x0` to `x`,
/// `t = F(x) − F(x0)` with `F` an antiderivative of `1/f`.
///
/// The branch follows the sign of `4αγ − β²` (arctangent, hyperbolic
/// arctangent written as a log-ratio, or rational). When `α = 0` the
/// integrand is a ratio of linear functions and a logarithmic
/// antiderivative is used instead.
pub fn implicit_time_222(t: &TwoByTwoByTwo, x0: f64, x: f64) -> Result<f64> {
    for v in [x0, x] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::OutOfRange(v));
        }
    }
    let k = t.coefficients();
    let (alpha, beta, gamma, delta, eps) = (k.alpha_c, k.beta_c, k.gamma_c, k.delta_c, k.epsilon_c);
    if alpha.abs() <= COEF_EPS && beta.abs() <= COEF_EPS && gamma.abs() <= COEF_EPS {
        return Err(Error::NotApplicable("every point is an equilibrium".into()));
    }
    if x == x0 {
        return Ok(0.0);
    }

    let (lo, hi) = if x0 < x { (x0, x) } else { (x, x0) };
    let equilibria: Vec<f64> = if alpha.abs() > COEF_EPS {
        let disc = beta * beta - 4.0 * alpha * gamma;
        if disc >= 0.0 {
            let s = disc.sqrt();
            vec![(-beta - s) / (2.0 * alpha), (-beta + s) / (2.0 * alpha)]
        } else {
            Vec::new()
        }
    } else if beta.abs() > COEF_EPS {
        vec![-gamma / beta]
    } else {
        Vec::new()
    };
    if let Some(&r) = equilibria.iter().find(|&&r| r >= lo && r <= hi) {
        return Err(Error::EquilibriumCrossed(r));
    }

    let antiderivative = |x: f64| -> f64 {
        if alpha.abs() > COEF_EPS {
            let quad = alpha * x * x + beta * x + gamma;
            let log_part = delta / (2.0 * alpha) * quad.abs().ln();
            let d4 = 4.0 * alpha * gamma - beta * beta;
            let lin = 2.0 * alpha * x + beta;
            let k = 2.0 * alpha * eps - beta * delta;
            if d4.abs() <= COEF_EPS * (1.0 + beta * beta) {
                log_part - k / (alpha * lin)
            } else if d4 > 0.0 {
                let s = d4.sqrt();
                log_part + k / (alpha * s) * (lin / s).atan()
            } else {
                // −k/(α s) · artanh(lin/s), extended past |lin| = s via the
                // absolute log-ratio.
                let s = (-d4).sqrt();
                log_part - k / (alpha * s) * 0.5 * ((s + lin) / (s - lin)).abs().ln()
            }
        } else if beta.abs() > COEF_EPS {
            delta / beta * x + (eps - delta * gamma / beta) / beta * (beta * x + gamma).abs().ln()
        } else {
            (0.5 * delta * x * x + eps * x) / gamma
        }
    };
    Ok(antiderivative(x) - antiderivative(x0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::forcing;
    use crate::fixtures;

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    #[test]
    fn z_map_examples() {
        assert_eq!(z_map(0.0).unwrap().as_slice(), &[0.0, 1.0]);
        assert_eq!(z_map(1.0).unwrap().as_slice(), &[1.0, 0.0]);
        assert_eq!(z_map(0.25).unwrap().as_slice(), &[0.25, 0.75]);
        assert_eq!(z_map(1.5), Err(Error::OutOfRange(1.5)));
    }

    #[test]
    fn pi_2x2_examples() {
        assert_eq!(pi_2x2(0.0, 0.0).unwrap(), 0.5);
        assert_eq!(pi_2x2(1.0, 0.0).unwrap(), 1.0);
        assert!((pi_2x2(0.5, 0.0).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(pi_2x2(1.0, 1.0), Err(Error::IdentityMatrix));

        let m = DMatrix::from_row_slice(2, 2, &[0.5, 1.0, 0.5, 0.0]);
        let x = crate::dynamics::perron_vector(&m, 1e-12).unwrap();
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn f_examples() {
        assert!((f_two_state(&fixtures::bistable_order4(), 0.0).unwrap() - 0.075).abs() < 1e-15);
        let polya = fixtures::polya_urn();
        for i in 0..=10 {
            assert_eq!(f_two_state(&polya, i as f64 / 10.0).unwrap(), 0.0);
        }
        assert!(
            f_two_state(&fixtures::power_divergent(), golden())
                .unwrap()
                .abs()
                < 1e-15
        );
    }

    #[test]
    fn f_matches_general_forcing() {
        let h = fixtures::bistable_order4();
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            let general = forcing(&h, &z_map(x).unwrap()).unwrap()[0];
            assert!((f_two_state(&h, x).unwrap() - general).abs() < 1e-12);
        }
    }

    #[test]
    fn f_boundary_limit_with_identity_panel() {
        // Last panel is the identity; the first panel is [[a, b], [1−a, 1−b]].
        let (a, b) = (0.3, 0.6);
        let t = TwoByTwoByTwo::new(a, b, 1.0, 0.0).unwrap();
        let h = t.to_hypermatrix();
        let expected = b / (1.0 - a + b);
        assert!((f_two_state(&h, 0.0).unwrap() - expected).abs() < 1e-15);
        // Continuity from the right.
        assert!((f_two_state(&h, 1e-9).unwrap() - expected).abs() < 1e-8);
    }

    #[test]
    fn f_boundary_limit_order4_second_order_term() {
        // Panels with exactly one state-1 draw are identity too, so the limit
        // comes from the panel with two state-1 draws (κ = 0).
        let id = [1.0, 0.0, 0.0, 1.0];
        let mut data = vec![0.2, 0.8, 0.7, 0.3];
        data.extend(id);
        data.extend(id);
        data.extend(id);
        let h = TransitionHypermatrix::from_columns(4, 2, data).unwrap();
        let expected = 0.7 / (0.7 + 0.8);
        assert!((f_two_state(&h, 0.0).unwrap() - expected).abs() < 1e-15);
        assert!((f_two_state(&h, 1e-6).unwrap() - expected).abs() < 1e-5);
    }

    #[test]
    fn f_rejects_property_b_violation() {
        let id =
            TransitionHypermatrix::from_columns(3, 2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0])
                .unwrap();
        assert!(matches!(
            f_two_state(&id, 0.5),
            Err(Error::PropertyBViolation(_))
        ));
    }

    #[test]
    fn equilibria_222_examples() {
        let t = TwoByTwoByTwo::new(0.0, 1.0, 1.0, 1.0).unwrap();
        match equilibria_222(&t, 1e-12).unwrap() {
            Equilibria::Points(p) => {
                assert_eq!(p.len(), 1);
                assert!((p[0].x - golden()).abs() < 1e-12);
                assert_eq!(p[0].stability, Stability::Stable);
            }
            other => panic!("{other:?}"),
        }

        let polya = TwoByTwoByTwo::new(1.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(
            equilibria_222(&polya, 1e-12).unwrap(),
            Equilibria::AllPoints
        );

        let half = TwoByTwoByTwo::new(0.5, 0.5, 0.5, 0.5).unwrap();
        match equilibria_222(&half, 1e-12).unwrap() {
            Equilibria::Points(p) => {
                assert_eq!(p.len(), 1);
                assert!((p[0].x - 0.5).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn stability_examples() {
        let polya = fixtures::polya_urn();
        assert_eq!(
            classify_stability(&polya, 0.3, 1e-12).unwrap(),
            Stability::Marginal
        );

        let h = fixtures::power_divergent();
        assert_eq!(
            classify_stability(&h, golden(), 1e-12).unwrap(),
            Stability::Stable
        );
        assert!(matches!(
            classify_stability(&h, 0.5, 1e-12),
            Err(Error::NotAnEquilibrium { .. })
        ));
    }

    #[test]
    fn order4_has_three_equilibria() {
        let h = fixtures::bistable_order4();
        let Equilibria::Points(p) = equilibria(&h, 1e-12).unwrap() else {
            panic!()
        };
        let pattern: Vec<_> = p.iter().map(|e| e.stability).collect();
        assert_eq!(
            pattern,
            [Stability::Stable, Stability::Unstable, Stability::Stable]
        );
        // Symmetric under swapping the two states.
        assert!((p[1].x - 0.5).abs() < 1e-12);
        assert!((p[0].x + p[2].x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn general_equilibria_agree_with_closed_form() {
        let t = TwoByTwoByTwo::new(0.9, 0.2, 0.05, 0.6).unwrap();
        let a = equilibria(&t.to_hypermatrix(), 1e-12).unwrap();
        let b = equilibria_222(&t, 1e-12).unwrap();
        let (Equilibria::Points(a), Equilibria::Points(b)) = (a, b) else {
            panic!()
        };
        assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            assert!((p.x - q.x).abs() < 1e-12);
            assert_eq!(p.stability, q.stability);
        }
    }

    #[test]
    fn rate_matches_f() {
        let t = TwoByTwoByTwo::new(0.1, 0.7, 0.4, 0.35).unwrap();
        let h = t.to_hypermatrix();
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            assert!((t.rate(x) - f_two_state(&h, x).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn implicit_time_examples() {
        let t = TwoByTwoByTwo::new(0.0, 1.0, 1.0, 1.0).unwrap();
        let k = t.coefficients();
        assert_eq!((k.alpha_c, k.beta_c, k.gamma_c), (-1.0, -1.0, 1.0));
        assert_eq!(implicit_time_222(&t, 0.3, 0.3).unwrap(), 0.0);
        let t1 = implicit_time_222(&t, 0.5, 0.55).unwrap();
        let t2 = implicit_time_222(&t, 0.5, 0.6).unwrap();
        assert!(t1 > 0.0 && t2 > t1);
        assert!(matches!(
            implicit_time_222(&t, 0.5, 0.7),
            Err(Error::EquilibriumCrossed(_))
        ));
        assert!(matches!(
            implicit_time_222(&t, 0.0, 0.5),
            Err(Error::OutOfRange(_))
        ));

        let polya = TwoByTwoByTwo::new(1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            implicit_time_222(&polya, 0.2, 0.4),
            Err(Error::NotApplicable(_))
        ));
    }
}
