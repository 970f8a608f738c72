//! Independent reference implementations the rest of the crate is tested
//! against: an exact rational simplex for the linearized problem, a
//! BFS-augmenting-path max-flow, and a brute-force univariate minimizer.
//!
//! None of these share logic with the code they check. The simplex works on
//! the linearized inequality form of the objective in exact arithmetic; the
//! brute-force minimizer reconstructs segment slopes purely from function
//! evaluations.

mod brute;
mod maxflow;
mod simplex;

pub use brute::{brute_force_univariate, BruteForceResult};
pub use maxflow::maxflow_reference;
pub use simplex::{lp_solve_exact, ExactLpSolution, LpOracleError};
