//! Variational discretization of Tikhonov-regularized parabolic optimal
//! control problems with box constraints on a located control.
//!
//! The heat equation on the unit square is discretized by P1 finite elements
//! in space and Petrov–Galerkin schemes in time (piecewise constant states,
//! piecewise linear adjoints). The control is recovered from the adjoint by a
//! pointwise projection and never meshed. See `examples/` for one runnable
//! program per capability.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod benchmark;
pub mod cli;
pub mod error;
pub mod mesh_fem;
pub mod optimizer;
pub mod petrov_galerkin;
pub mod quadrature;
pub mod time;

pub use error::{Error, Result};
