//! Numeric thresholds shared across the crate.
//!
//! Ordering of the stack: `EQ < DERIVATIVE_STABLE <= ... < RESIDUAL_PASS`.
//! Arithmetic noise is classified by [`EQ`]; everything a solver decides
//! sits at least an order of magnitude above it.

/// Absolute tolerance used when classifying atoms into `<`, `=`, `>`.
pub const EQ: f64 = 1e-9;

/// Atoms with `|x|` below this are treated as non-invertible.
pub const INV: f64 = 1e-12;

/// Successive Richardson estimates must agree to this (sup norm).
pub const DERIVATIVE_STABLE: f64 = 1e-9;

/// First central-difference step.
pub const DERIVATIVE_H0: f64 = 1e-3;

/// Maximum number of step halvings in derivative estimation.
pub const DERIVATIVE_HALVINGS: u32 = 8;

/// Scaled remainder must fall below this for a differentiability pass.
pub const RESIDUAL_PASS: f64 = 1e-4;

/// Default solver tolerance on atomic models.
pub const SOLVER_TOL_ATOMIC: f64 = 1e-8;

/// Default solver tolerance on dyadic step models.
pub const SOLVER_TOL_DYADIC: f64 = 1e-6;

/// Default angular resolution for the grid form of the complex modulus.
pub const MODULUS_GRID: usize = 4096;
