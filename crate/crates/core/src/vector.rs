//! Probability vectors on `N` states.

use std::ops::Index;

use crate::{Error, Result};

/// Tolerance on `|sum - 1|` for a vector to count as stochastic.
pub const SUM_TOL: f64 = 1e-12;

/// A nonnegative vector whose entries sum to one.
///
/// Used for occupation vectors, stationary vectors and teleportation vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticVector(Vec<f64>);

impl StochasticVector {
    /// Validates `values`; entries within [`SUM_TOL`] of summing to one are
    /// rescaled so the sum is one up to rounding.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::NotStochasticVector("empty vector".into()));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::NotStochasticVector(format!("entry {i} is {v}")));
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::NotStochasticVector(format!("entries sum to {sum}")));
        }
        Ok(Self::normalized_unchecked(values))
    }

    /// The uniform distribution `(1/N, ..., 1/N)`.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform vector needs at least one state");
        Self(vec![1.0 / n as f64; n])
    }

    /// The unit vector `e_k` (0-based `k`).
    pub fn unit(n: usize, k: usize) -> Self {
        assert!(k < n, "unit index out of range");
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        Self(v)
    }

    /// Clamps tiny negative round-off to zero and divides by the sum.
    ///
    /// For internal use on vectors that are stochastic up to rounding.
    pub(crate) fn normalized_unchecked(mut values: Vec<f64>) -> Self {
        for v in values.iter_mut() {
            // Also turns -0.0 into 0.0.
            if *v <= 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = values.iter().sum();
        if sum != 1.0 && sum > 0.0 {
            for v in values.iter_mut() {
                *v /= sum;
            }
        }
        Self(values)
    }

    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `‖self − other‖₁`.
    pub fn l1_distance(&self, other: &[f64]) -> f64 {
        l1_distance(&self.0, other)
    }

    /// True when every entry is strictly positive.
    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&v| v > 0.0)
    }
}

impl Index<usize> for StochasticVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AsRef<[f64]> for StochasticVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub(crate) fn l1_norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_vectors() {
        assert!(StochasticVector::new(vec![]).is_err());
        assert!(StochasticVector::new(vec![0.5, 0.6]).is_err());
        assert!(StochasticVector::new(vec![1.5, -0.5]).is_err());
        assert!(StochasticVector::new(vec![f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn renormalizes_within_tolerance() {
        let v = StochasticVector::new(vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!((v.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_and_uniform() {
        assert_eq!(StochasticVector::unit(3, 1).as_slice(), &[0.0, 1.0, 0.0]);
        assert_eq!(StochasticVector::uniform(4).as_slice(), &[0.25; 4]);
    }
}
