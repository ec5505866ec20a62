//! Transition probability hypermatrices and their flattenings.
//!
//! An order-`m`, dimension-`N` hypermatrix is stored as its flattening `R`
//! along the first index: an `N × N^(m-1)` column-stochastic matrix, held
//! column-major. Column `c` encodes a history tuple `κ` and the last state
//! `j` as `c = κ·N + j` (all 0-based), so the last state varies fastest and
//! the `N × N` block for a fixed `κ` is panel `κ`. For `m > 3` the history
//! digits are `κ = Σ_t k_t·N^(t-1)`, i.e. `k_1` is the least significant.
//!
//! For `m = 3`, panel `k` holds `P[i, j, k]` at `(i, j)`: the probability of
//! moving to `i` when the last state is `j` and the drawn history state is
//! `k`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::graph::count_terminal_components;
use crate::vector::StochasticVector;
use crate::{Error, Result};

/// Column sums must be within this distance of one.
pub const COLUMN_TOL: f64 = 1e-12;

/// Default cap on the number of stored entries `N^m`.
pub const DEFAULT_MAX_ENTRIES: usize = 10_000_000;

/// Column-stochastic flattening of an order-`m` transition hypermatrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionHypermatrix {
    order: usize,
    dim: usize,
    /// Column-major `dim × dim^(order-1)`.
    data: Vec<f64>,
}

fn num_columns(order: usize, dim: usize) -> Option<usize> {
    dim.checked_pow(u32::try_from(order.checked_sub(1)?).ok()?)
}

/// Checks the shape and stochasticity of a column-major flattening.
///
/// Reports the first offending entry or column in storage order.
pub fn validate(order: usize, dim: usize, column_major: &[f64]) -> Result<()> {
    if order < 2 {
        return Err(Error::ShapeMismatch(format!(
            "order must be at least 2, got {order}"
        )));
    }
    if dim == 0 {
        return Err(Error::ShapeMismatch("dimension must be at least 1".into()));
    }
    let cols = num_columns(order, dim)
        .ok_or_else(|| Error::ShapeMismatch("flattening width overflows".into()))?;
    let expected = cols
        .checked_mul(dim)
        .ok_or_else(|| Error::ShapeMismatch("flattening size overflows".into()))?;
    if column_major.len() != expected {
        return Err(Error::ShapeMismatch(format!(
            "expected {dim} x {cols} = {expected} entries, got {}",
            column_major.len()
        )));
    }
    for (c, col) in column_major.chunks_exact(dim).enumerate() {
        for (i, &v) in col.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteEntry { row: i, column: c });
            }
            if v < 0.0 {
                return Err(Error::NegativeEntry {
                    row: i,
                    column: c,
                    value: v,
                });
            }
        }
        let sum: f64 = col.iter().sum();
        if (sum - 1.0).abs() > COLUMN_TOL {
            return Err(Error::ColumnSumMismatch { column: c, sum });
        }
    }
    Ok(())
}

impl TransitionHypermatrix {
    /// Builds from a column-major flattening, refusing more than
    /// [`DEFAULT_MAX_ENTRIES`] entries.
    pub fn from_columns(order: usize, dim: usize, column_major: Vec<f64>) -> Result<Self> {
        Self::from_columns_with_limit(order, dim, column_major, DEFAULT_MAX_ENTRIES)
    }

    /// Like [`from_columns`](Self::from_columns) with an explicit size cap.
    ///
    /// Columns within [`COLUMN_TOL`] of summing to one are rescaled.
    pub fn from_columns_with_limit(
        order: usize,
        dim: usize,
        mut column_major: Vec<f64>,
        max_entries: usize,
    ) -> Result<Self> {
        if let Some(entries) = num_columns(order, dim).and_then(|c| c.checked_mul(dim)) {
            if entries > max_entries {
                return Err(Error::TooLarge {
                    entries,
                    limit: max_entries,
                });
            }
        }
        validate(order, dim, &column_major)?;
        for col in column_major.chunks_exact_mut(dim) {
            let sum: f64 = col.iter().sum();
            if sum != 1.0 {
                col.iter_mut().for_each(|v| *v /= sum);
            }
        }
        Ok(Self {
            order,
            dim,
            data: column_major,
        })
    }

    /// Builds from the `N` rows of the flattening (the on-disk layout).
    pub fn from_rows(order: usize, dim: usize, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != dim {
            return Err(Error::ShapeMismatch(format!(
                "expected {dim} rows, got {}",
                rows.len()
            )));
        }
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch(format!(
                "row {bad} has {} entries, row 0 has {cols}",
                rows[bad].len()
            )));
        }
        let mut data = Vec::with_capacity(dim * cols);
        for c in 0..cols {
            data.extend(rows.iter().map(|r| r[c]));
        }
        Self::from_columns(order, dim, data)
    }

    /// Hypermatrix whose every column equals `u`.
    pub fn rank_one(order: usize, u: &StochasticVector) -> Result<Self> {
        let dim = u.len();
        let cols = num_columns(order, dim)
            .ok_or_else(|| Error::ShapeMismatch("flattening width overflows".into()))?;
        let data = (0..cols)
            .flat_map(|_| u.as_slice().iter().copied())
            .collect();
        Self::from_columns(order, dim, data)
    }

    /// Random hypermatrix with each column drawn uniformly from the simplex.
    pub fn random<R: Rng + ?Sized>(order: usize, dim: usize, rng: &mut R) -> Result<Self> {
        let cols = num_columns(order, dim)
            .ok_or_else(|| Error::ShapeMismatch("flattening width overflows".into()))?;
        let mut data = Vec::with_capacity(cols * dim);
        for _ in 0..cols {
            data.extend(random_simplex_point(dim, rng).into_vec());
        }
        Self::from_columns(order, dim, data)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of columns of the flattening, `N^(m-1)`.
    pub fn num_columns(&self) -> usize {
        self.data.len() / self.dim
    }

    /// Number of `N × N` panels, `N^(m-2)`.
    pub fn num_panels(&self) -> usize {
        self.num_columns() / self.dim
    }

    /// Raw column-major flattening.
    pub fn as_column_major(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> &[f64] {
        &self.data[c * self.dim..(c + 1) * self.dim]
    }

    /// Entry `R[i, c]` of the flattening.
    pub fn entry(&self, i: usize, c: usize) -> f64 {
        self.data[c * self.dim + i]
    }

    /// Column index for 0-based history states `history = (k_1, ..., k_{m-2})`
    /// and last state `last`.
    pub fn column_index(&self, history: &[usize], last: usize) -> usize {
        debug_assert_eq!(history.len(), self.order - 2);
        let mut kappa = 0;
        let mut scale = 1;
        for &k in history {
            kappa += k * scale;
            scale *= self.dim;
        }
        kappa * self.dim + last
    }

    /// The `κ`-th panel as a dense matrix.
    pub fn panel(&self, kappa: usize) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_column_slice(n, n, &self.data[kappa * n * n..(kappa + 1) * n * n])
    }

    /// Rows of the flattening, for serialization.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.num_columns()).map(|c| self.entry(i, c)).collect())
            .collect()
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: len,
            });
        }
        Ok(())
    }

    /// Weights of the product measure `w^⊗(m-2)` indexed by panel.
    fn history_weights(&self, w: &[f64]) -> Vec<f64> {
        let mut weights = vec![1.0];
        for _ in 0..self.order - 2 {
            // Appending a new most-significant digit.
            let mut next = Vec::with_capacity(weights.len() * self.dim);
            for &wk in w {
                next.extend(weights.iter().map(|&p| p * wk));
            }
            weights = next;
        }
        weights
    }

    /// The vertex-reinforced transition matrix `M(w) = R·(w^⊗(m-2) ⊗ I)`,
    /// the mixture of panels under the product measure of `w`.
    pub fn build_mw(&self, w: &StochasticVector) -> Result<DMatrix<f64>> {
        self.check_len(w.len())?;
        Ok(self.build_mw_unchecked(w.as_slice()))
    }

    pub(crate) fn build_mw_unchecked(&self, w: &[f64]) -> DMatrix<f64> {
        let n = self.dim;
        let weights = self.history_weights(w);
        let mut out = vec![0.0; n * n];
        for (kappa, &p) in weights.iter().enumerate() {
            let panel = &self.data[kappa * n * n..(kappa + 1) * n * n];
            for (o, &r) in out.iter_mut().zip(panel) {
                *o += p * r;
            }
        }
        DMatrix::from_vec(n, n, out)
    }

    /// `R·x^⊗(m-1)`, computed as `M(x)·x`.
    pub fn apply(&self, x: &StochasticVector) -> Result<StochasticVector> {
        self.check_len(x.len())?;
        Ok(StochasticVector::from_raw(self.apply_raw(x.as_slice())))
    }

    pub(crate) fn apply_raw(&self, x: &[f64]) -> Vec<f64> {
        let m = self.build_mw_unchecked(x);
        (m * DVector::from_column_slice(x)).data.into()
    }

    /// The surfer modification `α·P + (1 − α)·v` applied to every column.
    pub fn make_surfer(&self, alpha: f64, v: &StochasticVector) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidAlpha(alpha));
        }
        self.check_len(v.len())?;
        if alpha == 1.0 {
            return Ok(self.clone());
        }
        let data = self
            .data
            .chunks_exact(self.dim)
            .flat_map(|col| {
                col.iter()
                    .zip(v.as_slice())
                    .map(|(&p, &vi)| alpha * p + (1.0 - alpha) * vi)
            })
            .collect();
        Self::from_columns_with_limit(self.order, self.dim, data, usize::MAX)
    }

    /// Union over panels of the nonzero patterns, as `(from, to)` edges.
    fn union_edges(&self) -> Vec<(usize, usize)> {
        let n = self.dim;
        let mut adjacent = vec![false; n * n];
        for (c, col) in self.data.chunks_exact(n).enumerate() {
            let from = c % n;
            for (to, &p) in col.iter().enumerate() {
                if p > 0.0 {
                    adjacent[from * n + to] = true;
                }
            }
        }
        (0..n * n)
            .filter(|&e| adjacent[e])
            .map(|e| (e / n, e % n))
            .collect()
    }

    /// Number of recurrent classes of `M(w)` for strictly positive `w`.
    pub fn recurrent_classes(&self) -> usize {
        count_terminal_components(self.dim, self.union_edges())
    }

    /// Property B: `M(w)` has a unique stationary distribution for every
    /// interior `w`, i.e. the panel-union graph has one closed class.
    pub fn check_property_b(&self) -> bool {
        self.recurrent_classes() == 1
    }
}

/// A point drawn uniformly from the probability simplex.
pub fn random_simplex_point<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> StochasticVector {
    loop {
        let e: Vec<f64> = (0..dim)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .collect();
        let s: f64 = e.iter().sum();
        if s > 0.0 {
            return StochasticVector::normalized_unchecked(e.into_iter().map(|x| x / s).collect());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validate_examples() {
        let ok = fixtures::power_divergent();
        assert!(validate(3, 2, ok.as_column_major()).is_ok());
        assert!(validate(3, 1, &[1.0]).is_ok());

        let mut bad = ok.as_column_major().to_vec();
        bad[2] = 0.9; // column 1 becomes (0.9, 0)
        match validate(3, 2, &bad) {
            Err(Error::ColumnSumMismatch { column, sum }) => {
                assert_eq!(column, 1);
                assert!((sum - 0.9).abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            validate(3, 2, &[1.0, 0.0]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            validate(2, 2, &[1.5, -0.5, 0.0, 1.0]),
            Err(Error::NegativeEntry {
                row: 1,
                column: 0,
                ..
            })
        ));
    }

    #[test]
    fn size_cap() {
        let err = TransitionHypermatrix::from_columns_with_limit(3, 2, vec![0.5; 8], 4);
        assert!(matches!(
            err,
            Err(Error::TooLarge {
                entries: 8,
                limit: 4
            })
        ));
    }

    #[test]
    fn renormalizes_near_stochastic_columns() {
        let third = 0.333_333_333_333_333_3;
        let h = TransitionHypermatrix::from_columns(2, 3, [third; 9].to_vec()).unwrap();
        for c in 0..3 {
            assert!((h.column(c).iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rows_round_trip() {
        let h = fixtures::second_order_example();
        let back = TransitionHypermatrix::from_rows(3, 3, &h.rows()).unwrap();
        assert_eq!(h, back);
    }

    #[test]
    fn build_mw_second_order_table() {
        let h = fixtures::second_order_example();
        let w = StochasticVector::new(vec![4.0 / 9.0, 2.0 / 9.0, 3.0 / 9.0]).unwrap();
        let m = h.build_mw(&w).unwrap();
        let col = m.column(1);
        assert_eq!(col[0], 0.0);
        assert!((col[1] - 25.0 / 54.0).abs() <= 1e-15);
        assert!((col[2] - 29.0 / 54.0).abs() <= 1e-15);
    }

    #[test]
    fn build_mw_unit_vector_selects_panel() {
        let h = fixtures::second_order_example();
        for k in 0..3 {
            let m = h.build_mw(&StochasticVector::unit(3, k)).unwrap();
            assert_eq!(m, h.panel(k));
        }
    }

    #[test]
    fn build_mw_order_four_last_panel() {
        let h = fixtures::bistable_order4();
        let m = h.build_mw(&StochasticVector::unit(2, 1)).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.075, 0.075, 0.925, 0.925]);
        assert!((m - expected).abs().max() < 1e-15);
    }

    #[test]
    fn build_mw_dimension_mismatch() {
        let h = fixtures::power_divergent();
        assert!(matches!(
            h.build_mw(&StochasticVector::uniform(3)),
            Err(Error::DimensionMismatch {
                expected: 2,
                got: 3
            })
        ));
    }

    #[test]
    fn apply_examples() {
        let h = fixtures::power_divergent();
        let s5 = 5f64.sqrt();
        let x = StochasticVector::new(vec![(s5 - 1.0) / 2.0, (3.0 - s5) / 2.0]).unwrap();
        assert!(h.apply(&x).unwrap().l1_distance(x.as_slice()) < 1e-15);

        let u = StochasticVector::new(vec![0.2, 0.3, 0.5]).unwrap();
        let r = TransitionHypermatrix::rank_one(3, &u).unwrap();
        let y = r
            .apply(&StochasticVector::new(vec![0.1, 0.1, 0.8]).unwrap())
            .unwrap();
        assert!(y.l1_distance(u.as_slice()) < 1e-15);

        let r1 = fixtures::four_state_r1();
        let e2 = StochasticVector::unit(4, 1);
        assert_eq!(r1.apply(&e2).unwrap(), e2);
    }

    #[test]
    fn surfer_examples() {
        let h = fixtures::second_order_example();
        let uniform = StochasticVector::uniform(3);
        let flat = h.make_surfer(0.0, &uniform).unwrap();
        assert!(flat
            .as_column_major()
            .iter()
            .all(|&p| (p - 1.0 / 3.0).abs() < 1e-15));
        assert_eq!(h.make_surfer(1.0, &uniform).unwrap(), h);

        let id = TransitionHypermatrix::from_columns(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let s = id.make_surfer(0.5, &StochasticVector::uniform(2)).unwrap();
        assert_eq!(s.column(0), &[0.75, 0.25]);

        assert!(matches!(
            h.make_surfer(1.5, &uniform),
            Err(Error::InvalidAlpha(_))
        ));
    }

    #[test]
    fn property_b_examples() {
        assert!(fixtures::four_state_r1().check_property_b());
        assert!(fixtures::four_state_r2().check_property_b());
        let id =
            TransitionHypermatrix::from_columns(3, 2, vec![1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0])
                .unwrap();
        assert!(!id.check_property_b());

        // Two disjoint 2-state blocks {0,1} and {2,3} in both panels of each history.
        let block = [0.5, 0.5, 0.0, 0.0];
        let block2 = [0.0, 0.0, 0.5, 0.5];
        let mut data = Vec::new();
        for _ in 0..4 {
            data.extend(block);
            data.extend(block);
            data.extend(block2);
            data.extend(block2);
        }
        let h = TransitionHypermatrix::from_columns(3, 4, data).unwrap();
        assert!(!h.check_property_b());
        assert_eq!(h.recurrent_classes(), 2);
    }

    #[test]
    fn random_columns_are_stochastic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = TransitionHypermatrix::random(4, 3, &mut rng).unwrap();
        assert_eq!(h.num_columns(), 27);
        assert!(h.check_property_b());
    }

    #[test]
    fn column_index_last_state_fastest() {
        let h = fixtures::bistable_order4();
        assert_eq!(h.column_index(&[0, 0], 1), 1);
        assert_eq!(h.column_index(&[1, 0], 0), 2);
        assert_eq!(h.column_index(&[0, 1], 0), 4);
        assert_eq!(h.column_index(&[1, 1], 1), 7);
    }
}
