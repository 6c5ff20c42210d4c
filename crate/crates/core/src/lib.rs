//! Solver suite for the competition-for-risk game: two players (or more)
//! pick failure probabilities in `[0, 1]`, survivors compare risk levels and
//! the boldest survivor collects the reward, failed players pay a penalty.
//!
//! The crate provides
//!
//! * [`model`] — expected-utility formulas, including market frictions
//!   (a scaled sigmoid replacing the hard winner comparison) and correlated
//!   failure events (Gaussian copula, Genz bivariate normal CDF),
//! * [`analytic`] — closed-form and numerically solved symmetric mixed
//!   equilibria, asymptotics and efficiency,
//! * [`discrete`] — action grids and dense payoff matrices,
//! * [`solvers`] — regret matching, its deterministic expected-update
//!   variant, and stochastic fictitious play,
//! * [`metrics`] — NashConv and its quasi-random continuous-deviation
//!   variant,
//! * [`corr_eq`] — the correlated-equilibrium polytope, a dense simplex LP
//!   solver, a randomized diameter confidence bound, and a rank-1 check,
//! * [`oracle`] — Monte Carlo playout estimates used to validate every
//!   closed-form utility.

pub mod analytic;
pub mod corr_eq;
pub mod discrete;
pub mod metrics;
pub mod model;
pub mod oracle;
pub mod quad;
pub mod solvers;

pub use model::{Action, GameSpec, TieRule};
