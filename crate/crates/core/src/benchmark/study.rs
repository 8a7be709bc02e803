//! Coupled convergence study `α = h² = k^{4/3}` on the benchmark.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh_fem::{build_uniform_mesh, ErrorNorms, FemSpace};
use crate::optimizer::{DiscreteProblem, FixedPointOptions, DEFAULT_MAX_ITER, DEFAULT_T0};
use crate::time::{build_time_grid, interp_dual, PiecewiseLinear};

use super::norms::{control_error_norms, field_error_norms, FieldView, Separable};
use super::problem::{g1, BenchmarkProblem};

/// Column names of the twelve error columns, in table order.
pub const ERROR_COLUMNS: [&str; 12] = [
    "err_u_L1", "err_u_L2", "err_u_Linf",
    "err_y_L1", "err_y_L2", "err_y_Linf",
    "err_ypi_L1", "err_ypi_L2", "err_ypi_Linf",
    "err_p_L1", "err_p_L2", "err_p_Linf",
];

/// Regularization `α = 2^{-2ℓ}`.
pub fn coupled_alpha(level: u32) -> f64 {
    2f64.powi(-2 * level as i32)
}

/// Number of time intervals `M = round(2^{3ℓ/2 + 1})`.
pub fn coupled_time_steps(level: u32) -> usize {
    2f64.powf(1.5 * level as f64 + 1.0).round() as usize
}

#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub levels: Vec<u32>,
    /// Replaces the coupled `α` on every level when set.
    pub alpha_override: Option<f64>,
    pub t0: f64,
    pub max_iter: usize,
    pub parallel: bool,
}

impl StudyConfig {
    pub fn new(levels: impl IntoIterator<Item = u32>) -> Self {
        StudyConfig {
            levels: levels.into_iter().collect(),
            alpha_override: None,
            t0: DEFAULT_T0,
            max_iter: DEFAULT_MAX_ITER,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct LevelErrors {
    pub control: ErrorNorms,
    pub state: ErrorNorms,
    pub projected_state: ErrorNorms,
    pub adjoint: ErrorNorms,
}

impl LevelErrors {
    pub fn columns(&self) -> [f64; 12] {
        let n = [self.control, self.state, self.projected_state, self.adjoint];
        std::array::from_fn(|i| {
            let e = n[i / 3];
            [e.l1, e.l2, e.linf][i % 3]
        })
    }

    pub fn from_columns(c: [f64; 12]) -> Self {
        let n = |i: usize| ErrorNorms { l1: c[3 * i], l2: c[3 * i + 1], linf: c[3 * i + 2] };
        LevelErrors { control: n(0), state: n(1), projected_state: n(2), adjoint: n(3) }
    }
}

/// Everything computed on one level.
#[derive(Debug, Clone)]
pub struct LevelOutcome {
    pub level: u32,
    pub alpha: f64,
    pub h: f64,
    pub steps: usize,
    pub errors: LevelErrors,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub objective_value: f64,
    pub control: PiecewiseLinear,
}

/// Solves the benchmark on one level and measures all errors.
pub fn run_level(
    problem: &BenchmarkProblem,
    level: u32,
    alpha: f64,
    steps: usize,
    options: FixedPointOptions,
) -> Result<LevelOutcome> {
    let space = FemSpace::new(build_uniform_mesh(level)?);
    let grid = build_time_grid(steps, problem.horizon)?;
    let data = problem.control_problem(&space)?;
    let report = DiscreteProblem::new(&data, &space, &grid).fixed_point_solve(alpha, options)?;

    let ybar = Separable { time: |t| problem.state_time(t), space: g1 };
    let pbar = Separable { time: |t| problem.adjoint_time(t), space: g1 };
    let errors = LevelErrors {
        control: control_error_norms(&report.control.profile, &problem.ubar_profile()),
        state: field_error_norms(&space, FieldView::PiecewiseConstant(&report.state), &ybar),
        projected_state: field_error_norms(&space, FieldView::Dual(interp_dual(&report.state)?), &ybar),
        adjoint: field_error_norms(&space, FieldView::PiecewiseLinear(&report.adjoint), &pbar),
    };
    Ok(LevelOutcome {
        level,
        alpha,
        h: space.mesh.mesh_size(),
        steps,
        errors,
        iterations: report.iterations,
        residual_history: report.residual_history,
        objective_value: report.objective_value,
        control: report.control.profile,
    })
}

/// Runs every configured level; results are ordered by level.
pub fn run_study(problem: &BenchmarkProblem, config: &StudyConfig) -> Result<Vec<LevelOutcome>> {
    let options = FixedPointOptions { t0: config.t0, max_iter: config.max_iter };
    let one = |&level: &u32| {
        let alpha = config.alpha_override.unwrap_or_else(|| coupled_alpha(level));
        run_level(problem, level, alpha, coupled_time_steps(level), options)
            .map_err(|e| Error::Level { level, source: Box::new(e) })
    };
    let mut levels = config.levels.clone();
    levels.sort_unstable();
    levels.dedup();
    if config.parallel {
        levels.par_iter().map(one).collect()
    } else {
        levels.iter().map(one).collect()
    }
}

/// One row of the convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct EocRow {
    pub level: u32,
    pub alpha: f64,
    pub h: f64,
    pub steps: usize,
    pub errors: [f64; 12],
    /// `None` on the first row.
    pub eoc: [Option<f64>; 12],
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EocTable {
    pub rows: Vec<EocRow>,
}

impl EocTable {
    /// Builds rows and experimental orders `log(e_prev/e) / log(h_prev/h)`
    /// (`log2` of the error ratio when `h` halves).
    pub fn from_outcomes(outcomes: &[LevelOutcome]) -> Self {
        let mut rows: Vec<EocRow> = Vec::with_capacity(outcomes.len());
        for o in outcomes {
            let errors = o.errors.columns();
            let eoc = match rows.last() {
                None => [None; 12],
                Some(prev) => std::array::from_fn(|i| Some(eoc(prev.errors[i], errors[i], prev.h, o.h))),
            };
            rows.push(EocRow {
                level: o.level,
                alpha: o.alpha,
                h: o.h,
                steps: o.steps,
                errors,
                eoc,
                iterations: o.iterations,
            });
        }
        EocTable { rows }
    }

    pub fn row(&self, level: u32) -> Option<&EocRow> {
        self.rows.iter().find(|r| r.level == level)
    }

    pub fn column_index(name: &str) -> Option<usize> {
        ERROR_COLUMNS.iter().position(|c| *c == name)
    }
}

pub fn eoc(e_prev: f64, e: f64, h_prev: f64, h: f64) -> f64 {
    (e_prev / e).ln() / (h_prev / h).ln()
}

/// Runs the study and assembles the table.
pub fn run_convergence_study(problem: &BenchmarkProblem, config: &StudyConfig) -> Result<EocTable> {
    Ok(EocTable::from_outcomes(&run_study(problem, config)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_rule() {
        let steps: Vec<usize> = (1..=6).map(coupled_time_steps).collect();
        assert_eq!(steps, vec![6, 16, 45, 128, 362, 1024]);
        assert_eq!(coupled_alpha(3), 1.0 / 64.0);
        assert!((1..=6).all(|l| coupled_time_steps(l) >= 3));
    }

    #[test]
    fn eoc_of_halving() {
        assert!((eoc(4.0, 1.0, 0.5, 0.25) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn columns_round_trip() {
        let c: [f64; 12] = std::array::from_fn(|i| i as f64);
        assert_eq!(LevelErrors::from_columns(c).columns(), c);
    }
}
