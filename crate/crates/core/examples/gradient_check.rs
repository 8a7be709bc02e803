//! Central differences of the reduced objective against `(αu + B*p, δ)`.
//!
//! ```text
//! cargo run --release --example gradient_check
//! ```

use bangbang_pg::benchmark::{coupled_time_steps, BenchmarkProblem};
use bangbang_pg::mesh_fem::{build_uniform_mesh, FemSpace};
use bangbang_pg::optimizer::DiscreteProblem;
use bangbang_pg::time::{build_time_grid, PiecewiseLinear};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bench = BenchmarkProblem::default();
    let level = 2;
    let alpha = 0.1;
    let space = FemSpace::new(build_uniform_mesh(level)?);
    let grid = build_time_grid(coupled_time_steps(level), bench.horizon)?;
    let data = bench.control_problem(&space)?;
    let mut problem = DiscreteProblem::new(&data, &space, &grid);

    let u = PiecewiseLinear::from_nodes(grid.nodes(), &grid.nodes().iter().map(|t| 0.3 + 0.1 * (20.0 * t).sin()).collect::<Vec<_>>());
    let eval = problem.evaluate(&u, alpha)?;
    let gradient = u.linear_combination(alpha, &eval.bstar_adjoint.to_profile(), 1.0);

    for (name, delta) in [
        ("constant", PiecewiseLinear::constant(0.0, bench.horizon, 1.0)),
        ("ramp", PiecewiseLinear::from_nodes(&[0.0, bench.horizon], &[0.0, 1.0])),
        ("step", PiecewiseLinear::step(&[0.0, 0.2, bench.horizon], &[1.0, -1.0])),
    ] {
        let eps = 0.5;
        let plus = u.linear_combination(1.0, &delta, eps);
        let minus = u.linear_combination(1.0, &delta, -eps);
        let jp = problem.evaluate(&plus, alpha)?.objective;
        let jm = problem.evaluate(&minus, alpha)?.objective;
        let fd = (jp - jm) / (2.0 * eps);
        let exact = gradient.inner(&delta);
        println!("{name:<9} fd {fd:+.12e}  adjoint {exact:+.12e}  rel {:.2e}", (fd - exact).abs() / exact.abs());
    }
    Ok(())
}
