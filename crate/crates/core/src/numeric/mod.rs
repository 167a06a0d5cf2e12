//! Numerics for one-dimensional bases: normal-form compilation, RK4, and
//! Jacobi fields with their finite-difference oracle.

use thiserror::Error;

use crate::variational::VariationalError;

mod program;

pub mod compile;
pub mod jacobi;
pub mod rk4;

pub use compile::{compile, FirstOrderSystem, NormalForm, Variable, MAX_ORDER};
pub use jacobi::{
    deviation_state_names, finite_difference_jacobi, log_log_slope, max_distance,
    perturbation_residual, solve_jacobi, JacobiProblem, ResidualRow, ResidualTable,
};
pub use rk4::{integrate, time_grid, Trajectory};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("numerics need a one-dimensional base, found {0} base coordinates")]
    NotOneDimensional(usize),
    #[error("parameter `{0}` has no numeric value")]
    UnboundParameter(String),
    #[error("not in solvable normal form{}: {reason}", equation.map(|k| format!(" (equation {})", k + 1)).unwrap_or_default())]
    NotNormalForm {
        equation: Option<usize>,
        reason: String,
    },
    #[error("`{variable}` has order {order}; at most 4 is supported")]
    OrderTooHigh { variable: String, order: usize },
    #[error("equation {} is singular in its highest derivative", equation + 1)]
    Singular { equation: usize },
    #[error("unknown symbol `{0}` in a right-hand side")]
    UnknownSymbol(String),
    #[error("expected {expected} components, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("integration aborted: non-finite state after t = {t}")]
    NonFinite { t: f64 },
    #[error("initial data: {0}")]
    InitialData(String),
    #[error("perturbation size {0} must be positive and finite")]
    InvalidEpsilon(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("expected a deviation system, found a plain one")]
    NotDeviation,
    #[error(transparent)]
    Variational(#[from] VariationalError),
}
