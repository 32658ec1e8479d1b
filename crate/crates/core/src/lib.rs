//! Quantitative wave-particle duality for multibeam interferometers fitted
//! with a which-way detector.
//!
//! The crate evaluates the generalized fringe visibility `V`, the a-priori
//! predictability `P`, the which-way knowledge `K(W)` delivered by a detector
//! observable `W`, and the distinguishability `D = max_W K(W)`. The
//! [`coplanar`] module carries the closed forms of the three-beam family in
//! which `V` and `D` grow together once `θ > 2π/3`.
//!
//! Module map:
//!
//! - [`qcore`]: detector states, Bloch vectors, populations, reduced beam density.
//! - [`measures`]: `V`, `P`, Bayes sorting and `K(W)`.
//! - [`distinguishability`]: qubit observables and the search for `D`.
//! - [`coplanar`]: closed forms, sweeps and co-movement detection.
//! - [`sampling`] and [`checks`]: seeded random configurations and the
//!   randomized property suites driven by the CLI.

#![forbid(unsafe_code)]

pub mod checks;
pub mod coplanar;
pub mod distinguishability;
pub mod error;
pub mod measures;
pub mod qcore;
pub mod sampling;

pub use error::{DualityError, Result};

/// Numerical tolerances shared by validation and identity checks.
pub mod tol {
    /// Unit-norm and simplex validation.
    pub const VALIDATION: f64 = 1e-9;
    /// Algebraic identities between closed forms and general paths.
    pub const IDENTITY: f64 = 1e-12;
    /// Outcomes below this probability are dropped from Bayes sorting.
    pub const ZERO_PROBABILITY: f64 = 1e-12;
}
