//! Matrix-free solvers for the quadratic ℓ1-regularized problem
//!
//! ```text
//! minimize F(x) = ½ xᵀAx − bᵀx + τ‖x‖₁,   A symmetric positive semi-definite
//! ```
//!
//! The main solvers interleave first-order active-set identification steps
//! (ISTA, or ISTA restricted to the current nonzeros) with conjugate gradient
//! steps on the current orthant. Which kind of step to take is decided by the
//! gradient balance test between the zero-variable and free-variable parts of
//! the minimum-norm subgradient. FISTA and a pure Barzilai-Borwein ISTA are
//! included as baselines.
//!
//! Work is measured in operator applications: every solver runs against a
//! [`CountingOperator`] and reports the number of matrix-vector products it
//! used. The [`bench`] module turns run traces into accuracy tables,
//! Dolan-Moré profiles, Pareto frontiers and CG phase histograms.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cg;
mod error;
pub mod linalg;
pub mod probgen;
pub mod problem;
pub mod solver;
pub mod steps;
pub mod subgrad;

pub use error::{Error, Result};
pub use problem::{CountingOperator, Operator, QuadraticProblem};
pub use solver::{
    accuracy, estimate_lipschitz, solve, AlphaPolicy, Algorithm, RunStatus, RunTrace,
    SolverConfig, StepKind, Termination, TraceRecord,
};
