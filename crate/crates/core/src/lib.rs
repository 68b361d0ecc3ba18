//! Fractional calculus with the Mittag-Leffler (Atangana–Baleanu) kernel.
//!
//! * [`special`]: Γ, E_{α,β} and the spectral density of E_α(−t^α).
//! * [`operators`]: ABC/ABR derivatives, AB and Riemann–Liouville integrals
//!   on uniform grids.
//! * [`solver`]: closed-form solution of the linear ABC initial value
//!   problem and the comparison norm bound.
//! * [`certify`]: executable checks of the extremum estimates, comparison
//!   principles, uniqueness and envelope bounds.
//! * [`oracles`]: slow, independent reference computations.
//! * [`cli`]: the `fracml` command-line front end.

pub mod certify;
pub mod cli;
pub mod error;
pub mod functions;
pub mod operators;
pub mod oracles;
pub mod problems;
pub mod solver;
pub mod special;

pub use error::{FracError, Result};
