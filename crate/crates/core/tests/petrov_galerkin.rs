mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use bangbang_pg::benchmark::{field_error_norms, g1, FieldView, Separable};
use bangbang_pg::mesh_fem::{build_uniform_mesh, FemSpace, SpatialField};
use bangbang_pg::petrov_galerkin::{solve_adjoint, solve_state, AdjointSource, SeparableForcing, SpatialSource};
use bangbang_pg::time::{build_time_grid, PCField, SmoothCoefficient, TimeGrid};
use common::{dense_dot, simpson};
use proptest::prelude::*;
use rand::Rng;

fn random_interior(space: &FemSpace, rng: &mut impl Rng) -> SpatialField {
    let v: Vec<f64> = (0..space.num_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    space.dofs.extend(&v)
}

/// `c(t) s(x)` with a random trigonometric `c` and a random interior P1 field `s`.
type Term = (Arc<dyn Fn(f64) -> f64 + Send + Sync>, SpatialField);

fn random_term(space: &FemSpace, rng: &mut impl Rng) -> Term {
    let (a, b, f) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(0.5..8.0));
    (Arc::new(move |t: f64| a + b * (f * t).sin()), random_interior(space, rng))
}

fn forcing_of(terms: &[Term]) -> SeparableForcing {
    terms.iter().fold(SeparableForcing::new(), |acc, (c, s)| {
        let c = c.clone();
        acc.with_term(Arc::new(SmoothCoefficient::new(move |t| c(t), vec![])), SpatialSource::Field(s.clone()), 1.0)
    })
}

fn hat(grid: &TimeGrid, n: usize, t: f64) -> f64 {
    let tn = grid.node(n);
    if n > 0 && t >= grid.node(n - 1) && t <= tn {
        (t - grid.node(n - 1)) / grid.step(n)
    } else if n < grid.steps() && t >= tn && t <= grid.node(n + 1) {
        (grid.node(n + 1) - t) / grid.step(n + 1)
    } else {
        0.0
    }
}

/// `A(w, v) = Σ_m −(v_m − v_{m−1}, w_m) + k_m a(w_m, (v_{m−1} + v_m)/2) + (w_T, v_M)`.
fn space_time_form(space: &FemSpace, grid: &TimeGrid, w: &[SpatialField], w_t: &SpatialField, v: &[SpatialField]) -> f64 {
    let (mass, stiff) = (&space.mass.full, &space.stiffness.full);
    let mut s = 0.0;
    for m in 1..=grid.steps() {
        let dv: Vec<f64> = v[m].values().iter().zip(v[m - 1].values()).map(|(a, b)| a - b).collect();
        let av: Vec<f64> = v[m].values().iter().zip(v[m - 1].values()).map(|(a, b)| 0.5 * (a + b)).collect();
        s += -mass.bilinear(&dv, w[m - 1].values()) + grid.step(m) * stiff.bilinear(w[m - 1].values(), &av);
    }
    s + mass.bilinear(w_t.values(), v[grid.steps()].values())
}

fn nonuniform_grid(steps: usize, horizon: f64) -> TimeGrid {
    let nodes: Vec<f64> = (0..=steps)
        .map(|i| {
            let s = i as f64 / steps as f64;
            horizon * (s + 0.1 * (PI * s).sin() * s)
        })
        .collect();
    TimeGrid::from_nodes(nodes).unwrap()
}

#[test]
fn state_satisfies_space_time_weak_form() {
    let mut rng = common::rng(7);
    let space = FemSpace::new(build_uniform_mesh(2).unwrap());
    let grid = nonuniform_grid(7, 0.8);
    let terms = vec![random_term(&space, &mut rng), random_term(&space, &mut rng)];
    let f = forcing_of(&terms);
    let g = random_interior(&space, &mut rng);
    let y = solve_state(&space, &grid, &f, &g).unwrap();
    let y_t = y.terminal_value.clone().unwrap();

    for trial in 0..5 {
        let v: Vec<SpatialField> = (0..=grid.steps()).map(|_| random_interior(&space, &mut rng)).collect();
        let lhs = space_time_form(&space, &grid, &y.interval_values, &y_t, &v);
        // ∫ (f, v) dt with v = Σ_n hat_n(t) v_n
        let mut rhs = space.l2_inner(&g, &v[0]);
        for (c, s) in &terms {
            let ms = space.mass_times(s);
            for (n, vn) in v.iter().enumerate() {
                let pair = dense_dot(ms.values(), vn.values());
                let lo = grid.node(n.saturating_sub(1));
                let hi = grid.node((n + 1).min(grid.steps()));
                let mid = grid.node(n);
                let integrand = |t: f64| c(t) * hat(&grid, n, t);
                let integral = simpson(integrand, lo, mid, 2000) + simpson(integrand, mid, hi, 2000);
                rhs += pair * integral;
            }
        }
        assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0), "trial {trial}: {lhs} vs {rhs}");
    }
}

#[test]
fn adjoint_satisfies_space_time_weak_form() {
    let mut rng = common::rng(11);
    let space = FemSpace::new(build_uniform_mesh(2).unwrap());
    let grid = nonuniform_grid(6, 1.0);
    let tracking = PCField {
        grid: grid.clone(),
        interval_values: (0..grid.steps()).map(|_| random_interior(&space, &mut rng)).collect(),
        terminal_value: None,
    };
    let terms = vec![random_term(&space, &mut rng)];
    let h = forcing_of(&terms);
    let p = solve_adjoint(&space, &grid, AdjointSource { tracking: Some(&tracking), forcing: &h }).unwrap();
    assert!(p.node_values[grid.steps()].values().iter().all(|&v| v == 0.0));

    for trial in 0..5 {
        let w: Vec<SpatialField> = (0..grid.steps()).map(|_| random_interior(&space, &mut rng)).collect();
        let w_t = random_interior(&space, &mut rng);
        let lhs = space_time_form(&space, &grid, &w, &w_t, &p.node_values);
        let mut rhs = 0.0;
        for m in 1..=grid.steps() {
            rhs += grid.step(m) * space.l2_inner(tracking.on_interval(m), &w[m - 1]);
            for (c, s) in &terms {
                let pair = space.l2_inner(s, &w[m - 1]);
                rhs += pair * simpson(|t| c(t), grid.node(m - 1), grid.node(m), 2000);
            }
        }
        assert!((lhs - rhs).abs() < 1e-10 * rhs.abs().max(1.0), "trial {trial}: {lhs} vs {rhs}");
    }
}

#[test]
fn homogeneous_state_decays_monotonically() {
    let mut rng = common::rng(3);
    let space = FemSpace::new(build_uniform_mesh(4).unwrap());
    let grid = build_time_grid(20, 1.0).unwrap();
    let g = random_interior(&space, &mut rng);
    let y = solve_state(&space, &grid, &SeparableForcing::new(), &g).unwrap();
    let norm = |v: &SpatialField| space.l2_inner(v, v).sqrt();
    let mut prev = norm(&g);
    for m in 1..=grid.steps() {
        let cur = norm(y.on_interval(m));
        assert!(cur <= prev * (1.0 + 1e-10), "interval {m}: {cur} > {prev}");
        prev = cur;
    }
}

#[test]
fn manufactured_heat_solution_converges_in_time_and_space() {
    let omega = 8.0 * PI;
    let exact = Separable { time: move |t: f64| (omega * t).cos(), space: g1 };
    let rhs = SmoothCoefficient::new(move |t| -omega * (omega * t).sin() + 2.0 * PI * PI * (omega * t).cos(), vec![]);
    let f = SeparableForcing::new().with_term(Arc::new(rhs), SpatialSource::Function(Arc::new(g1)), 1.0);
    let errors: Vec<f64> = (3..=5u32)
        .map(|level| {
            let space = FemSpace::new(build_uniform_mesh(level).unwrap());
            let grid = build_time_grid(4 << level, 0.5).unwrap();
            let y0 = space.interpolate_nodal(g1, true).unwrap();
            let y = solve_state(&space, &grid, &f, &y0).unwrap();
            field_error_norms(&space, FieldView::PiecewiseConstant(&y), &exact).l2
        })
        .collect();
    for (i, o) in common::orders(&errors).iter().enumerate() {
        assert!(*o > 0.9, "refinement {i}: order {o}, errors {errors:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn state_is_linear_in_data(seed in any::<u64>(), s in -2.0f64..2.0) {
        let mut rng = common::rng(seed);
        let space = FemSpace::new(build_uniform_mesh(2).unwrap());
        let grid = build_time_grid(5, 1.0).unwrap();
        let t1 = vec![random_term(&space, &mut rng)];
        let g1v = random_interior(&space, &mut rng);
        let g2v = random_interior(&space, &mut rng);
        let f = forcing_of(&t1);
        let none = SeparableForcing::new();
        let ya = solve_state(&space, &grid, &f, &g1v).unwrap();
        let yb = solve_state(&space, &grid, &none, &g2v).unwrap();
        let mut combined = g1v.clone();
        combined.axpy(s, &g2v);
        let yc = solve_state(&space, &grid, &f, &combined).unwrap();
        for m in 1..=grid.steps() {
            for ((a, b), c) in ya.on_interval(m).values().iter().zip(yb.on_interval(m).values()).zip(yc.on_interval(m).values()) {
                prop_assert!((a + s * b - c).abs() < 1e-9);
            }
        }
    }
}
