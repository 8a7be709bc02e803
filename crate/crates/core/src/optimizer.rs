//! Variational discretization of the box-constrained control problem.
//!
//! The control is never meshed: it is recovered from the discrete adjoint as
//! `u = clamp(−B*p / α, a, b)`, which is piecewise linear on the time grid
//! with extra breakpoints where `−B*p/α` crosses a bound. The optimality
//! system is solved by plain fixed-point iteration on this relation.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh_fem::{dot, FemSpace, SpatialField};
use crate::petrov_galerkin::{
    adjoint_dofs, state_dofs, DiscreteForcing, DiscreteTerm, SeparableForcing, SpatialSource, Stepper,
};
use crate::quadrature::{gauss5, simpson};
use crate::time::{
    scalar_pl_sup_norm, IntervalMoments, PCField, PLField, Piece, PiecewiseLinear, ScalarPL,
    TimeCoefficient, TimeGrid,
};

/// Stopping threshold on `sup |B*(p⁽ⁱ⁾ − p⁽ⁱ⁻¹⁾)|`.
pub const DEFAULT_T0: f64 = 1e-5;
pub const DEFAULT_MAX_ITER: usize = 500;

/// Constant control bounds `lower ≤ u ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower <= upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::Config(format!("invalid control bounds [{lower}, {upper}]")));
        }
        Ok(Bounds { lower, upper })
    }

    pub fn clamp(&self, x: f64) -> f64 {
        self.lower.max(x.min(self.upper))
    }
}

/// `u(t) = clamp(−q(t)/α, a, b)` stored exactly as linear segments.
#[derive(Debug, Clone)]
pub struct ClampedControl {
    pub q: ScalarPL,
    pub alpha: f64,
    pub bounds: Bounds,
    pub profile: PiecewiseLinear,
}

impl ClampedControl {
    pub fn eval(&self, t: f64) -> f64 {
        self.profile.eval(t)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Config(format!("alpha must be positive, got {alpha}")));
    }
    Ok(())
}

/// Pointwise projection of `−q/α` onto the bounds, with the crossing points
/// computed in closed form on every interval.
pub fn project_control(q: &ScalarPL, alpha: f64, bounds: Bounds) -> Result<ClampedControl> {
    check_alpha(alpha)?;
    let grid = &q.grid;
    let mut pieces = Vec::with_capacity(grid.steps() + 8);
    for m in 1..=grid.steps() {
        let (t0, t1) = (grid.node(m - 1), grid.node(m));
        let (w0, w1) = (-q.node_values[m - 1] / alpha, -q.node_values[m] / alpha);
        let mut cuts = [0.0, 1.0, 1.0, 1.0];
        let mut nc = 1;
        if w0 != w1 {
            let mut s: Vec<f64> = [bounds.lower, bounds.upper]
                .iter()
                .map(|&c| (c - w0) / (w1 - w0))
                .filter(|&s| s > 0.0 && s < 1.0)
                .collect();
            s.sort_by(f64::total_cmp);
            s.dedup();
            for v in s {
                cuts[nc] = v;
                nc += 1;
            }
        }
        cuts[nc] = 1.0;
        for w in cuts[..=nc].windows(2) {
            let (s0, s1) = (w[0], w[1]);
            let ta = if s0 == 0.0 { t0 } else { t0 + s0 * (t1 - t0) };
            let tb = if s1 == 1.0 { t1 } else { t0 + s1 * (t1 - t0) };
            if tb <= ta {
                continue;
            }
            pieces.push(Piece {
                t0: ta,
                t1: tb,
                v0: bounds.clamp(w0 + s0 * (w1 - w0)),
                v1: bounds.clamp(w0 + s1 * (w1 - w0)),
            });
        }
    }
    Ok(ClampedControl {
        q: q.clone(),
        alpha,
        bounds,
        profile: PiecewiseLinear::new(pieces),
    })
}

/// Exact moments of a piecewise-linear profile against the time basis
/// (Simpson per segment; the integrands are quadratic).
pub fn profile_moments(u: &PiecewiseLinear, grid: &TimeGrid) -> Vec<IntervalMoments> {
    let mut out = vec![IntervalMoments::default(); grid.steps()];
    let mut m = 1;
    for piece in u.pieces() {
        let mut s0 = piece.t0;
        while s0 < piece.t1 && m <= grid.steps() {
            let (a, b) = (grid.node(m - 1), grid.node(m));
            if s0 >= b {
                m += 1;
                continue;
            }
            let s1 = piece.t1.min(b);
            let k = b - a;
            let sm = 0.5 * (s0 + s1);
            let (u0, um, u1) = (piece.at(s0), piece.at(sm), piece.at(s1));
            let desc = |t: f64| (b - t) / k;
            let asc = |t: f64| (t - a) / k;
            let o = &mut out[m - 1];
            o.mean += simpson(s0, s1, u0, um, u1);
            o.descending += simpson(s0, s1, u0 * desc(s0), um * desc(sm), u1 * desc(s1));
            o.ascending += simpson(s0, s1, u0 * asc(s0), um * asc(sm), u1 * asc(s1));
            if s1 >= b {
                m += 1;
            }
            s0 = s1;
        }
    }
    out
}

/// `∫ u(t) v_n(t) dt` for every nodal hat `v_0..v_M`.
pub fn control_forcing_integrals(u: &ClampedControl, grid: &TimeGrid) -> Vec<f64> {
    crate::time::hat_integrals(&profile_moments(&u.profile, grid))
}

/// `(g1, p(t))` at every time node, i.e. `g1ᵀ M p_m`.
pub fn apply_bstar(p: &PLField, g1: &SpatialField, space: &FemSpace) -> ScalarPL {
    let mg = space.mass_times(g1);
    ScalarPL::new(
        &p.grid,
        p.node_values.iter().map(|pm| dot(mg.values(), pm.values())).collect(),
    )
}

/// `sup |u − clamp(−q/α, a, b)|`, exact over the merged breakpoints.
pub fn optimality_residual(u: &PiecewiseLinear, q: &ScalarPL, alpha: f64, bounds: Bounds) -> Result<f64> {
    let target = project_control(q, alpha, bounds)?;
    Ok(u.difference_norms(&target.profile).linf)
}

/// `(αu + q, v − u)_{L²(I)}`; nonnegative for all feasible `v` at the optimum.
pub fn variational_inequality(u: &PiecewiseLinear, q: &ScalarPL, alpha: f64, v: &PiecewiseLinear) -> f64 {
    let grad = u.linear_combination(alpha, &q.to_profile(), 1.0);
    let dir = v.linear_combination(1.0, u, -1.0);
    grad.inner(&dir)
}

/// Data of a located-control problem `min ½‖y − y_d‖² + α/2 ‖u‖²`
/// with state forcing `g0 + u(t) g1`.
#[derive(Debug, Clone)]
pub struct ControlProblem {
    pub horizon: f64,
    /// `g1`, the spatial profile of the control.
    pub control_profile: SpatialSource,
    pub initial_state: SpatialSource,
    /// Affine part `g0` of the control operator.
    pub affine_forcing: SeparableForcing,
    pub desired_state: SeparableForcing,
    pub bounds: Bounds,
}

/// A control problem fixed on a mesh and time grid, with all data reduced to
/// interior dual vectors.
pub struct DiscreteProblem<'a> {
    pub space: &'a FemSpace,
    pub grid: TimeGrid,
    pub bounds: Bounds,
    stepper: Stepper<'a>,
    g1_dual: Vec<f64>,
    initial_dual: Vec<f64>,
    affine: DiscreteForcing,
    desired_neg: DiscreteForcing,
    desired_norm_sq: f64,
}

/// State, adjoint and objective for one control.
pub struct Evaluation {
    pub state: PCField,
    pub adjoint: PLField,
    pub bstar_adjoint: ScalarPL,
    pub objective: f64,
}

impl<'a> DiscreteProblem<'a> {
    pub fn new(problem: &ControlProblem, space: &'a FemSpace, grid: &TimeGrid) -> Self {
        let g1_dual = problem.control_profile.dual_vector(space);
        let initial_dual = problem.initial_state.dual_vector(space);
        let affine = problem.affine_forcing.discretize(space, grid);
        let mut desired_neg = problem.desired_state.discretize(space, grid);
        for t in &mut desired_neg.terms {
            t.scale = -t.scale;
        }
        let desired_norm_sq = separable_norm_sq(&problem.desired_state, space, grid);
        DiscreteProblem {
            space,
            grid: grid.clone(),
            bounds: problem.bounds,
            stepper: Stepper::new(space),
            g1_dual,
            initial_dual,
            affine,
            desired_neg,
            desired_norm_sq,
        }
    }

    fn state_dofs(&mut self, u: &PiecewiseLinear) -> Result<Vec<Vec<f64>>> {
        let control = DiscreteTerm {
            dual: self.g1_dual.clone(),
            moments: profile_moments(u, &self.grid),
            scale: 1.0,
        };
        self.affine.terms.push(control);
        let out = state_dofs(&mut self.stepper, &self.grid, &self.affine, &self.initial_dual);
        self.affine.terms.pop();
        Ok(out?.intervals)
    }

    fn adjoint_dofs(&mut self, y: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        adjoint_dofs(&mut self.stepper, &self.grid, Some(y), &self.desired_neg)
    }

    fn bstar_dofs(&self, p: &[Vec<f64>]) -> ScalarPL {
        ScalarPL::new(&self.grid, p.iter().map(|pm| dot(&self.g1_dual, pm)).collect())
    }

    fn objective_dofs(&self, u: &PiecewiseLinear, y: &[Vec<f64>], alpha: f64) -> f64 {
        let mass = &self.space.mass.interior;
        let mut tracking = self.desired_norm_sq;
        for m in 1..=self.grid.steps() {
            let ym = &y[m - 1];
            tracking += self.grid.step(m) * mass.bilinear(ym, ym);
            // desired_neg carries −y_d, so this adds −2 ∫(y_d, y)
            tracking += 2.0 * self.desired_neg.pair_interval(m, ym);
        }
        0.5 * tracking + 0.5 * alpha * u.norm_sq()
    }

    fn to_pc(&self, y: &[Vec<f64>]) -> PCField {
        PCField {
            grid: self.grid.clone(),
            interval_values: y.iter().map(|v| self.space.dofs.extend(v)).collect(),
            terminal_value: None,
        }
    }

    fn to_pl(&self, p: &[Vec<f64>]) -> PLField {
        PLField {
            grid: self.grid.clone(),
            node_values: p.iter().map(|v| self.space.dofs.extend(v)).collect(),
        }
    }

    /// `y_kh = S_kh(g0 + B u, y0)` for an arbitrary piecewise-linear control.
    pub fn solve_state(&mut self, u: &PiecewiseLinear) -> Result<PCField> {
        let y = self.state_dofs(u)?;
        Ok(self.to_pc(&y))
    }

    /// `p_kh` for the right-hand side `y − y_d`.
    pub fn solve_adjoint(&mut self, y: &PCField) -> Result<PLField> {
        let y: Vec<Vec<f64>> = y
            .interval_values
            .iter()
            .map(|v| self.space.dofs.restrict(v.values()))
            .collect();
        let p = self.adjoint_dofs(&y)?;
        Ok(self.to_pl(&p))
    }

    /// `(g1, p(t))` with the same pairing the state equation uses for `B`.
    pub fn apply_bstar(&self, p: &PLField) -> ScalarPL {
        ScalarPL::new(
            &self.grid,
            p.node_values
                .iter()
                .map(|pm| dot(&self.g1_dual, &self.space.dofs.restrict(pm.values())))
                .collect(),
        )
    }

    /// `½‖y − y_d‖²_{L²(I,L²)} + α/2 ‖u‖²_{L²(I)}`
    pub fn objective(&self, u: &PiecewiseLinear, state: &PCField, alpha: f64) -> f64 {
        let y: Vec<Vec<f64>> = state
            .interval_values
            .iter()
            .map(|v| self.space.dofs.restrict(v.values()))
            .collect();
        self.objective_dofs(u, &y, alpha)
    }

    /// Full forward/backward evaluation of one control.
    pub fn evaluate(&mut self, u: &PiecewiseLinear, alpha: f64) -> Result<Evaluation> {
        let y = self.state_dofs(u)?;
        let p = self.adjoint_dofs(&y)?;
        Ok(Evaluation {
            objective: self.objective_dofs(u, &y, alpha),
            bstar_adjoint: self.bstar_dofs(&p),
            state: self.to_pc(&y),
            adjoint: self.to_pl(&p),
        })
    }

    /// Fixed-point iteration `u⁽ⁱ⁺¹⁾ = clamp(−B*p(u⁽ⁱ⁾)/α, a, b)` from the
    /// lower bound. Each iteration performs one state and one adjoint solve.
    pub fn fixed_point_solve(&mut self, alpha: f64, options: FixedPointOptions) -> Result<SolveReport> {
        check_alpha(alpha)?;
        if !(options.t0 > 0.0) {
            return Err(Error::Config(format!("threshold t0 must be positive, got {}", options.t0)));
        }
        let (t_start, t_end) = (0.0, self.grid.horizon());
        let u0 = PiecewiseLinear::constant(t_start, t_end, self.bounds.lower);
        let y0 = self.state_dofs(&u0)?;
        let p0 = self.adjoint_dofs(&y0)?;
        let mut q_prev = self.bstar_dofs(&p0);
        let mut history = Vec::new();
        for iteration in 1..=options.max_iter {
            let control = project_control(&q_prev, alpha, self.bounds)?;
            let y = self.state_dofs(&control.profile)?;
            let p = self.adjoint_dofs(&y)?;
            let q = self.bstar_dofs(&p);
            let residual = scalar_pl_sup_norm(&q.sub(&q_prev));
            history.push(residual);
            if residual < options.t0 {
                return Ok(SolveReport {
                    objective_value: self.objective_dofs(&control.profile, &y, alpha),
                    state: self.to_pc(&y),
                    adjoint: self.to_pl(&p),
                    bstar_adjoint: q,
                    control,
                    iterations: iteration,
                    residual_history: history,
                });
            }
            q_prev = q;
        }
        Err(Error::NonConvergence {
            iterations: options.max_iter,
            last_residual: history.last().copied().unwrap_or(f64::NAN),
            residual_history: history,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FixedPointOptions {
    pub t0: f64,
    pub max_iter: usize,
}

impl Default for FixedPointOptions {
    fn default() -> Self {
        FixedPointOptions { t0: DEFAULT_T0, max_iter: DEFAULT_MAX_ITER }
    }
}

/// Converged optimality system. `control` is `u⁽ⁱ⁾`; `state`, `adjoint` and
/// `bstar_adjoint` belong to that control.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub control: ClampedControl,
    pub state: PCField,
    pub adjoint: PLField,
    pub bstar_adjoint: ScalarPL,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub objective_value: f64,
}

/// Convenience wrapper around [`DiscreteProblem::fixed_point_solve`].
pub fn fixed_point_solve(
    problem: &ControlProblem,
    space: &FemSpace,
    grid: &TimeGrid,
    alpha: f64,
    options: FixedPointOptions,
) -> Result<SolveReport> {
    DiscreteProblem::new(problem, space, grid).fixed_point_solve(alpha, options)
}

/// `‖Σ s_i c_i(t) G_i(x)‖²_{L²(I,L²)}` by Gauss-5 in time (split at all
/// breakpoints) and the 7-point rule in space.
fn separable_norm_sq(f: &SeparableForcing, space: &FemSpace, grid: &TimeGrid) -> f64 {
    let weights = space.quadrature_weights();
    let spatial: Vec<Vec<f64>> = f.terms.iter().map(|t| t.spatial.at_quadrature(space)).collect();
    let mut total = 0.0;
    for (i, ti) in f.terms.iter().enumerate() {
        for (j, tj) in f.terms.iter().enumerate() {
            let space_part: f64 = spatial[i]
                .iter()
                .zip(&spatial[j])
                .zip(weights)
                .map(|((a, b), w)| a * b * w)
                .sum();
            let time_part = product_integral(ti.coef.as_ref(), tj.coef.as_ref(), grid);
            total += ti.scale * tj.scale * space_part * time_part;
        }
    }
    total
}

fn product_integral(a: &dyn TimeCoefficient, b: &dyn TimeCoefficient, grid: &TimeGrid) -> f64 {
    let mut cuts: Vec<f64> = grid.nodes().to_vec();
    cuts.extend(a.breakpoints());
    cuts.extend(b.breakpoints());
    cuts.retain(|&t| t >= 0.0 && t <= grid.horizon());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .flat_map(|w| gauss5(w[0], w[1]))
        .map(|(t, w)| w * a.eval(t) * b.eval(t))
        .sum()
}

/// Shared handle for a time coefficient.
pub fn coefficient(c: impl TimeCoefficient + 'static) -> Arc<dyn TimeCoefficient> {
    Arc::new(c)
}
