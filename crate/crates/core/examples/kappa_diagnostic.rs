//! Measure condition `meas{αa < −B*p < αb} ≤ C α^κ`, fitted for the exact
//! `B*p̄` and for the discrete `B*p_kh` of a level-5 solve.
//!
//! ```text
//! cargo run --release --example kappa_diagnostic
//! ```

use bangbang_pg::benchmark::{
    analytic_bstar_pbar, coupled_alpha, coupled_time_steps, default_alphas, measure_diagnostic, BenchmarkProblem,
};
use bangbang_pg::mesh_fem::{build_uniform_mesh, FemSpace};
use bangbang_pg::optimizer::{DiscreteProblem, FixedPointOptions};
use bangbang_pg::time::build_time_grid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bench = BenchmarkProblem::default();
    let alphas = default_alphas();

    let exact = measure_diagnostic(&analytic_bstar_pbar(&bench, 1 << 16)?, &alphas, bench.bounds)?;

    let level = 5;
    let space = FemSpace::new(build_uniform_mesh(level)?);
    let grid = build_time_grid(coupled_time_steps(level), bench.horizon)?;
    let data = bench.control_problem(&space)?;
    let report = DiscreteProblem::new(&data, &space, &grid)
        .fixed_point_solve(coupled_alpha(level), FixedPointOptions::default())?;
    let discrete = measure_diagnostic(&report.bstar_adjoint, &alphas, bench.bounds)?;

    println!("alpha           meas (exact)    meas (level {level})");
    for ((a, e), d) in alphas.iter().zip(&exact.measures).zip(&discrete.measures) {
        println!("{a:<14.6e}  {e:<14.6e}  {d:.6e}");
    }
    println!("kappa_hat       {:<14.4}  {:.4}", exact.kappa_hat, discrete.kappa_hat);
    Ok(())
}
