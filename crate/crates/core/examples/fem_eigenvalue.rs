//! Smallest eigenvalue of `K x = λ M x` on the unit square by inverse
//! iteration; the continuous value is `2π²`.
//!
//! ```text
//! cargo run --release --example fem_eigenvalue
//! ```

use bangbang_pg::mesh_fem::{build_uniform_mesh, solve_spd, FemSpace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let target = 2.0 * std::f64::consts::PI.powi(2);
    for level in 1..=6u32 {
        let space = FemSpace::new(build_uniform_mesh(level)?);
        let m = &space.mass.interior;
        let mut x = vec![1.0; space.num_dofs()];
        let mut lambda = 0.0;
        for _ in 0..50 {
            let y = solve_spd(&space.stiffness, &m.mul(&x))?;
            let norm = m.bilinear(&y, &y).sqrt();
            x = y.iter().map(|v| v / norm).collect();
            lambda = space.stiffness.interior.bilinear(&x, &x);
        }
        println!(
            "level {level}: lambda_h = {lambda:.6}  relative error {:.3e}",
            (lambda - target).abs() / target
        );
    }
    Ok(())
}
