//! Small hypermatrices with known behavior, shared by tests, examples and
//! the command line.

use nalgebra::DMatrix;

use crate::hypermatrix::TransitionHypermatrix;

fn build(order: usize, rows: &[&[f64]]) -> TransitionHypermatrix {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
    TransitionHypermatrix::from_rows(order, rows.len(), &rows).expect("fixture is stochastic")
}

/// A three-state first-order chain (column-stochastic).
pub fn three_state_chain() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[
            1.0 / 2.0,
            0.0,
            3.0 / 5.0, //
            1.0 / 4.0,
            2.0 / 3.0,
            1.0 / 5.0, //
            1.0 / 4.0,
            1.0 / 3.0,
            1.0 / 5.0,
        ],
    )
}

/// Second-order chain on three states; panel `k` is the second-last state.
pub fn second_order_example() -> TransitionHypermatrix {
    build(
        3,
        &[
            &[
                0.0,
                0.0,
                0.0,
                1.0 / 4.0,
                0.0,
                0.0,
                1.0 / 4.0,
                0.0,
                3.0 / 4.0,
            ],
            &[
                3.0 / 5.0,
                2.0 / 3.0,
                0.0,
                1.0 / 2.0,
                0.0,
                1.0 / 2.0,
                0.0,
                1.0 / 2.0,
                0.0,
            ],
            &[
                2.0 / 5.0,
                1.0 / 3.0,
                1.0,
                1.0 / 4.0,
                1.0,
                1.0 / 2.0,
                3.0 / 4.0,
                1.0 / 2.0,
                1.0 / 4.0,
            ],
        ],
    )
}

/// Two-state hypermatrix on which the tensor power method oscillates while
/// the continuous dynamics converge to `((√5−1)/2, (3−√5)/2)`.
pub fn power_divergent() -> TransitionHypermatrix {
    build(3, &[&[0.0, 1.0, 1.0, 1.0], &[1.0, 0.0, 0.0, 0.0]])
}

/// Two-color Pólya urn: the next state copies the drawn history state.
pub fn polya_urn() -> TransitionHypermatrix {
    build(3, &[&[1.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 1.0]])
}

/// Order-4 two-state hypermatrix with three equilibria, two of them stable.
pub fn bistable_order4() -> TransitionHypermatrix {
    build(
        4,
        &[
            &[0.925, 0.925, 0.925, 0.075, 0.925, 0.075, 0.075, 0.075],
            &[0.075, 0.075, 0.075, 0.925, 0.075, 0.925, 0.925, 0.925],
        ],
    )
}

/// Four-state order-3 hypermatrix with fixed points at `e₂` and `e₃`.
pub fn four_state_r1() -> TransitionHypermatrix {
    build(
        3,
        &[
            &[
                0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0.5, 0., 0., 1.,
            ],
            &[
                0., 0., 0., 0., 0., 1., 0., 1., 0., 0.5, 0., 0., 0., 1., 0., 0.,
            ],
            &[
                0., 0., 0., 0., 0., 0., 1., 0., 0., 0.5, 1., 0., 0., 0., 0., 0.,
            ],
            &[
                1., 1., 1., 1., 1., 0., 0., 0., 1., 0., 0., 1., 0.5, 0., 1., 0.,
            ],
        ],
    )
}

/// Second four-state hypermatrix sharing the `e₂`, `e₃` fixed points.
pub fn four_state_r2() -> TransitionHypermatrix {
    build(
        3,
        &[
            &[
                0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 0., 1., 1., 0., 1., 0.,
            ],
            &[
                0., 0., 0., 0., 0., 1., 0., 1., 0., 0.5, 0., 0., 0., 1., 0., 0.,
            ],
            &[
                0., 0., 0., 0., 0., 0., 1., 0., 0., 0.5, 1., 0., 0., 0., 0., 0.,
            ],
            &[
                1., 1., 1., 1., 1., 0., 0., 0., 1., 0., 0., 0., 0., 0., 0., 1.,
            ],
        ],
    )
}
