//! Uncontrolled heat equation with the manufactured solution
//! `y = cos(8πt) sin(πx₁) sin(πx₂)`: errors of the piecewise constant state
//! and of its dual-grid reconstruction as `k` and `h` halve together.
//!
//! ```text
//! cargo run --release --example heat_equation
//! ```

use std::f64::consts::PI;
use std::sync::Arc;

use bangbang_pg::benchmark::{field_error_norms, g1, FieldView, Separable};
use bangbang_pg::mesh_fem::{build_uniform_mesh, FemSpace};
use bangbang_pg::petrov_galerkin::{solve_state, SeparableForcing, SpatialSource};
use bangbang_pg::time::{build_time_grid, interp_dual, SmoothCoefficient};

const OMEGA: f64 = 8.0 * PI;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let exact = Separable { time: |t: f64| (OMEGA * t).cos(), space: g1 };
    // ∂_t y − Δy = (−ω sin ωt + 2π² cos ωt) g1
    let rhs = SmoothCoefficient::new(|t| -OMEGA * (OMEGA * t).sin() + 2.0 * PI * PI * (OMEGA * t).cos(), vec![]);
    let forcing = SeparableForcing::new().with_term(Arc::new(rhs), SpatialSource::Function(Arc::new(g1)), 1.0);

    println!("level  M     |y - y_kh|     eoc    |y - pi y_kh|  eoc");
    let mut prev: Option<(f64, f64)> = None;
    for level in 2..=6u32 {
        let steps = 8 << (level - 2);
        let space = FemSpace::new(build_uniform_mesh(level)?);
        let grid = build_time_grid(steps, 0.5)?;
        let y0 = space.interpolate_nodal(g1, true)?;
        let y = solve_state(&space, &grid, &forcing, &y0)?;
        let raw = field_error_norms(&space, FieldView::PiecewiseConstant(&y), &exact).l2;
        let rec = field_error_norms(&space, FieldView::Dual(interp_dual(&y)?), &exact).l2;
        let (e1, e2) = match prev {
            Some((a, b)) => (format!("{:.2}", (a / raw).log2()), format!("{:.2}", (b / rec).log2())),
            None => ("/".into(), "/".into()),
        };
        println!("{level:<6} {steps:<5} {raw:.4e}   {e1:<6} {rec:.4e}     {e2}");
        prev = Some((raw, rec));
    }
    Ok(())
}
