//! Solves the bang-bang benchmark on one level and compares with the exact
//! solution.
//!
//! ```text
//! cargo run --release --example solve_benchmark -- 4
//! ```

use bangbang_pg::benchmark::{control_error_norms, coupled_alpha, coupled_time_steps, BenchmarkProblem};
use bangbang_pg::mesh_fem::{build_uniform_mesh, FemSpace};
use bangbang_pg::optimizer::{DiscreteProblem, FixedPointOptions};
use bangbang_pg::time::build_time_grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let level: u32 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4);
    let bench = BenchmarkProblem::default();
    let space = FemSpace::new(build_uniform_mesh(level)?);
    let grid = build_time_grid(coupled_time_steps(level), bench.horizon)?;
    let alpha = coupled_alpha(level);
    let data = bench.control_problem(&space)?;

    let report = DiscreteProblem::new(&data, &space, &grid).fixed_point_solve(alpha, FixedPointOptions::default())?;
    println!("level {level}: h = {:.4}, M = {}, alpha = {alpha}", space.mesh.mesh_size(), grid.steps());
    for (i, r) in report.residual_history.iter().enumerate() {
        println!("  iteration {}: sup |B*(p_i - p_i-1)| = {r:.3e}", i + 1);
    }
    println!("  objective J = {:.8}", report.objective_value);

    let err = control_error_norms(&report.control.profile, &bench.ubar_profile());
    println!("  |u - ubar|: L1 {:.3e}  L2 {:.3e}", err.l1, err.l2);

    println!("\n  t        u_kh(t)   ubar(t)");
    for i in 0..=16 {
        let t = bench.horizon * i as f64 / 16.0;
        println!("  {t:.5}  {:.5}   {:.1}", report.control.eval(t), bench.ubar(t));
    }
    Ok(())
}
