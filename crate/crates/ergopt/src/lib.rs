//! Numerical toolkit for ergodic optimization on one-dimensional expanding
//! systems.
//!
//! The central object is the calibrated subaction `V` of a potential `A`:
//! a continuous function satisfying
//!
//! ```text
//! V(x) = max over T(y)=x of [ A(y) + V(y) - m(A) ]
//! ```
//!
//! where `m(A)` is the maximal ergodic value (the best time-average of `A`
//! over invariant probabilities). The solver in [`solver`] computes `V` by
//! iterating the averaged Bellman map
//!
//! ```text
//! G(f) = ( Bf + f ) / 2  -  sup( ( Bf + f ) / 2 ),      Bf(x) = max_j [ A(tau_j x) + f(tau_j x) ]
//! ```
//!
//! whose fixed points are sup-normalized subactions, with `m(A)` recovered
//! from the subtracted constant. Around the solver sit:
//!
//! * [`grid`] — sampled functions on `[0,1]` (or a subinterval) with linear
//!   interpolation, the state space of the iteration;
//! * [`systems`] — forward maps and their contracting inverse branches
//!   (doubling map, a Farey-like weakly expanding map, Moebius branch pairs
//!   induced by 2x2 matrices);
//! * [`potentials`] — the catalog of potentials with their known optimal
//!   values and orbits where available;
//! * [`reference`] — closed-form and series subactions used to validate the
//!   iteration;
//! * [`oracle`] — brute-force periodic-orbit certificates giving rigorous
//!   lower bounds for `m(A)`;
//! * [`ruelle`] — the log-domain variant of the iteration for the principal
//!   eigenpair of the transfer operator;
//! * [`jsr`] — joint-spectral-radius estimation for a pair of 2x2 matrices
//!   via the induced Moebius system;
//! * [`io`] — CSV / JSON emission of plot data and run summaries.

pub mod error;
pub mod grid;
pub mod io;
pub mod jsr;
pub mod oracle;
pub mod potentials;
pub mod reference;
pub mod ruelle;
pub mod solver;
pub mod systems;

pub use error::{Error, Result};
pub use grid::{GridFunction, GridMode};
pub use potentials::Potential;
pub use solver::{SolverConfig, SubactionResult};
pub use systems::{BranchSystem, Matrix2};
