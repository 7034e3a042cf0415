//! Order calculus on finite Dedekind complete Φ-algebra models.
//!
//! The crate provides two executable models (ℝ^n and dyadic step functions on
//! `[0, 1)`), band projections and the band decompositions induced by
//! inequalities, the complexified modulus, an expression language for
//! lattice-valued functions, a numeric order-differentiation engine, and
//! band-wise solvers for the intermediate value, extreme value, Rolle and
//! mean value problems of locally band preserving functions.

pub mod algebra;
pub mod band;
pub mod calculus;
pub mod complex;
pub mod dsl;
pub mod error;
pub mod problem;
pub mod sample;
pub mod solvers;
pub mod tolerance;

pub use algebra::{CombineOp, DyadicCell, Element, ModelSpec, Piece, Scalar};
pub use band::{Band, BandOp};
pub use complex::ComplexElement;
pub use dsl::{FuncExpr, FunctionHandle, LatticeMap};
pub use error::{Error, Result};
