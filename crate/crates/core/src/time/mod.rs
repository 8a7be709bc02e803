//! Time partitions, space-time fields and the two time interpolation
//! operators.

mod fields;
mod grid;
mod profile;

pub use fields::{
    dual_weights, interp_dual, interp_dual_scalar, project_yk_field, project_yk_scalar,
    scalar_pl_sup_norm, DualInterpolant, PCField, PLField, ScalarPL,
};
pub use grid::{build_time_grid, TimeGrid};
pub use profile::{
    hat_integrals, interval_moments, IntervalMoments, Piece, PiecewiseLinear, SmoothCoefficient,
    TimeCoefficient,
};
