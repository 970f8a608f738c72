//! Coordinate-wise minimization for a class of piecewise-affine convex
//! programs, the linear programs they linearize to, and constructive dual
//! certificates for the solutions found.
//!
//! The problems handled here minimize
//!
//! ```text
//!   sum_i max(w[i] - phi[i], 0) + a'phi + b'lam
//!     + sum_j max(v[j] + A[:,j]'phi + B[:,j]'lam, 0)
//! ```
//!
//! over box constraints on `phi` and `lam`. Each univariate restriction of
//! this objective is convex piecewise-affine, so coordinate updates reduce to
//! exact minimization of a small hinge sum ([`univariate`]). The solver
//! ([`solver`]) sweeps coordinates cyclically and places each one in the
//! relative interior of its restricted minimizer set. When the instance data
//! satisfies the structural conditions checked by
//! [`model::ProblemSpec::check_guarantee`], every fixed point of that rule is
//! a global optimum, and [`duality`] builds an explicit dual-feasible
//! certificate with zero gap from the primal point alone. The per-coordinate
//! case analysis behind that construction is replayed exhaustively in exact
//! integer arithmetic by [`caseproof`].
//!
//! [`encoders`] maps weighted Max-SAT, weighted vertex cover, max-flow
//! (minimum st-cut), and two-label Potts MAP relaxations onto this form.
//! [`oracle`] holds the independent reference implementations (exact rational
//! simplex, augmenting-path max-flow, brute-force univariate minimization)
//! that the tests check everything against.

pub mod caseproof;
pub mod duality;
pub mod encoders;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod univariate;

pub use model::ProblemSpec;
pub use solver::{solve, SolveResult, SolverConfig, Termination};
