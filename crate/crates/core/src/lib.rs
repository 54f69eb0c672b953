//! Numerical laboratory for the semilinear wave equation
//! □u + ∇W(u)/ε² = 0 with the quartic potential W(u) = (1 − |u|²)²/4,
//! for scalar (k = 1) and complex (k = 2) fields in up to three space
//! dimensions.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the common `f64` case.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod diagnostics;
pub mod exact;
pub mod field;
pub mod minimal;
pub mod minkowski;
pub mod real;
pub mod reduce;
pub mod solver;

pub use real::Real;

pub type Grid64 = field::Grid<f64>;
pub type FieldState64 = field::FieldState<f64>;
pub type SolverConfig64 = solver::SolverConfig<f64>;
pub type Leapfrog64 = solver::Leapfrog<f64>;
pub type SymTensor64 = minkowski::SymTensor<f64>;
pub type MinkVector64 = minkowski::MinkVector<f64>;
pub type DensityFields64 = diagnostics::DensityFields<f64>;
pub type SymTensorField64 = diagnostics::SymTensorField<f64>;
pub type InterfaceSet64 = diagnostics::InterfaceSet<f64>;

pub type Grid32 = field::Grid<f32>;
pub type FieldState32 = field::FieldState<f32>;
