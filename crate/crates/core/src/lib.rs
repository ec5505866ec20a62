//! Spacey random walks.
//!
//! A spacey random walk moves like a higher-order Markov chain, except that
//! the forgotten history states are redrawn from the walk's own occupation
//! vector. This crate simulates the process, computes its stationary
//! distributions (stochastic z eigenvectors of the transition hypermatrix),
//! analyzes the two-state dynamics in closed form, and fits hypermatrices to
//! trajectory data by maximum likelihood.

pub mod baselines;
pub mod dynamics;
mod error;
pub mod fixtures;
mod graph;
pub mod hypermatrix;
pub mod io;
pub mod learn;
pub mod simulate;
pub mod two_state;
mod vector;

pub use error::{Error, Result};
pub use hypermatrix::TransitionHypermatrix;
pub use simulate::Trajectory;

pub use vector::StochasticVector;
