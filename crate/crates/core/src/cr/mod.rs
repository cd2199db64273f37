//! Constrained Runs lifting.
//!
//! The CR map `C_m` advances a state `m + 1` micro steps, extrapolates the
//! trajectory back to `t = 0` with backward-difference weights (so that the
//! `(m+1)`-th time derivative of the unconserved components vanishes), and
//! then resets the conserved moments to their targets. Lifting is the search
//! for a fixed point of `C_m`, either by plain iteration or by Newton-GMRES
//! on `g(s) = s - P C_m(s + (I - P) f0)`.

mod config;
mod error_norms;
mod lift;
mod map;
mod solve;

pub use config::{cr_weights, CRConfig, SolverKind, MAX_ORDER};
pub use error_norms::{restrict_lift_error, LiftError};
pub use lift::{equilibrium_field, lift, lift_newton, lift_picard, moment_drift};
pub use map::{cr_map, cr_map_into};
pub use solve::{solve_newton, solve_picard, IterationRecord, LiftReport};
