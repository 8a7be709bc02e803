//! Discrete duality `∫(h, y_kh) = ∫(f, p_kh) + (g, p_kh(0))` for a state and
//! adjoint driven by unrelated data.
//!
//! ```text
//! cargo run --release --example duality_check
//! ```

use std::sync::Arc;

use bangbang_pg::mesh_fem::{build_uniform_mesh, FemSpace};
use bangbang_pg::petrov_galerkin::{duality_residual, AdjointSource, SeparableForcing, SpatialSource};
use bangbang_pg::time::{build_time_grid, SmoothCoefficient};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = FemSpace::new(build_uniform_mesh(3)?);
    let grid = build_time_grid(12, 1.0)?;

    let f = SeparableForcing::new()
        .with_term(
            Arc::new(SmoothCoefficient::new(|t| (3.0 * t).sin() + 1.0, vec![])),
            SpatialSource::Function(Arc::new(|x: [f64; 2]| x[0] * (1.0 - x[0]) * x[1])),
            1.0,
        )
        .with_term(
            Arc::new(SmoothCoefficient::new(|t| if t < 0.4 { 1.0 } else { -0.5 }, vec![0.4])),
            SpatialSource::Function(Arc::new(|x: [f64; 2]| x[1] * x[1])),
            2.0,
        );
    let g = space.interpolate_nodal(|x| (x[0] - x[1]).cos(), true)?;
    let h_forcing = SeparableForcing::new().with_term(
        Arc::new(SmoothCoefficient::new(|t| t * t - 0.3, vec![])),
        SpatialSource::Function(Arc::new(|x: [f64; 2]| (x[0] + 2.0 * x[1]).exp())),
        1.0,
    );
    let h = AdjointSource { tracking: None, forcing: &h_forcing };

    let defect = duality_residual(&space, &grid, &f, &g, h)?;
    println!("relative duality defect: {defect:.3e}");
    Ok(())
}
