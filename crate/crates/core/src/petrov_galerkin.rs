//! Fully discrete state and adjoint solvers.
//!
//! Testing the space-time form `A(y, v) = ∫ −(v_t, y) + a(y, v) dt + (y(T), v(T))`
//! with nodal hats (state) and interval indicators (adjoint) gives a
//! Crank–Nicolson-like stepping with `β_m = k_m / 2`:
//!
//! ```text
//! state    (M + β_1 K) y_1     = M g + F_0
//!          (M + β_{m+1} K) y_{m+1} = (M − β_m K) y_m + F_m,   m = 1..M−1
//!          M y_T               = (M − β_M K) y_M + F_M
//! adjoint  p_M = 0
//!          (M + β_m K) p_{m−1} = (M − β_m K) p_m + H_m,       m = M..1
//! ```
//!
//! `F_n = ∫ (f, v_n φ_j) dt` with `v_n` the hat at `t_n`, and
//! `H_m = ∫_{I_m} (h, φ_j) dt`. The state is piecewise constant in time, the
//! adjoint continuous piecewise linear.

use std::sync::Arc;

use crate::error::Result;
use crate::mesh_fem::{dot, pcg, FemSpace, OperatorMatrix, SpatialField, PCG_TOLERANCE};
use crate::mesh_fem::sparse::CsrMatrix;
use crate::time::{hat_integrals, interval_moments, IntervalMoments, PCField, PLField, TimeCoefficient, TimeGrid};

/// Spatial profile of a separable forcing term.
#[derive(Clone)]
pub enum SpatialSource {
    /// P1 field; paired through the mass matrix.
    Field(SpatialField),
    /// Pointwise function; paired through the 7-point load vector.
    Function(Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for SpatialSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpatialSource::Field(v) => f.debug_tuple("Field").field(&v.len()).finish(),
            SpatialSource::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl SpatialSource {
    /// `(G, φ_j)` over all nodes.
    pub fn dual_full(&self, space: &FemSpace) -> SpatialField {
        match self {
            SpatialSource::Field(g) => space.mass_times(g),
            SpatialSource::Function(f) => space.load_vector(|p| f(p)),
        }
    }

    /// `(G, φ_j)` on interior dofs.
    pub fn dual_vector(&self, space: &FemSpace) -> Vec<f64> {
        space.dofs.restrict(self.dual_full(space).values())
    }

    /// Values at the triangle quadrature points.
    pub fn at_quadrature(&self, space: &FemSpace) -> Vec<f64> {
        match self {
            SpatialSource::Field(g) => {
                let mut out = Vec::new();
                space.eval_at_quadrature(g.values(), &mut out);
                out
            }
            SpatialSource::Function(f) => space.quadrature_points().iter().map(|&p| f(p)).collect(),
        }
    }
}

/// `scale · c(t) · G(x)`
#[derive(Clone)]
pub struct ForcingTerm {
    pub coef: Arc<dyn TimeCoefficient>,
    pub spatial: SpatialSource,
    pub scale: f64,
}

impl std::fmt::Debug for ForcingTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ForcingTerm")
            .field("spatial", &self.spatial)
            .field("scale", &self.scale)
            .finish_non_exhaustive()
    }
}

/// Sum of separable space-time terms.
#[derive(Debug, Clone, Default)]
pub struct SeparableForcing {
    pub terms: Vec<ForcingTerm>,
}

impl SeparableForcing {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_term(mut self, coef: Arc<dyn TimeCoefficient>, spatial: SpatialSource, scale: f64) -> Self {
        self.terms.push(ForcingTerm { coef, spatial, scale });
        self
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn discretize(&self, space: &FemSpace, grid: &TimeGrid) -> DiscreteForcing {
        DiscreteForcing {
            terms: self
                .terms
                .iter()
                .map(|t| DiscreteTerm {
                    dual: t.spatial.dual_vector(space),
                    moments: interval_moments(t.coef.as_ref(), grid),
                    scale: t.scale,
                })
                .collect(),
        }
    }
}

pub(crate) struct DiscreteTerm {
    pub dual: Vec<f64>,
    pub moments: Vec<IntervalMoments>,
    pub scale: f64,
}

/// Forcing reduced to interior dual vectors and time moments.
pub(crate) struct DiscreteForcing {
    pub terms: Vec<DiscreteTerm>,
}

impl DiscreteForcing {
    /// Adds `F_n` (hat-weighted) to `out`.
    fn add_hat(&self, n: usize, out: &mut [f64]) {
        let steps = self.terms.first().map_or(0, |t| t.moments.len());
        for t in &self.terms {
            let mut w = 0.0;
            if n >= 1 {
                w += t.moments[n - 1].ascending;
            }
            if n < steps {
                w += t.moments[n].descending;
            }
            axpy(t.scale * w, &t.dual, out);
        }
    }

    /// Adds `∫_{I_m} (f, φ_j) dt` to `out`.
    fn add_interval(&self, m: usize, out: &mut [f64]) {
        for t in &self.terms {
            axpy(t.scale * t.moments[m - 1].mean, &t.dual, out);
        }
    }

    /// `∫_{I_m} (f, v) dt` for `v` constant on `I_m`, given on interior dofs.
    pub fn pair_interval(&self, m: usize, v: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.scale * t.moments[m - 1].mean * dot(&t.dual, v))
            .sum()
    }

    /// `∫ (f, p) dt` for `p` piecewise linear with interior nodal values.
    pub fn pair_pl(&self, nodes: &[Vec<f64>]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let w = hat_integrals(&t.moments);
                t.scale * w.iter().zip(nodes).map(|(wi, p)| wi * dot(&t.dual, p)).sum::<f64>()
            })
            .sum()
    }
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    if a != 0.0 {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += a * xi;
        }
    }
}

/// Cached `M ± (k/2) K` for each distinct step length.
pub(crate) struct Stepper<'a> {
    space: &'a FemSpace,
    cache: Vec<(f64, CsrMatrix, CsrMatrix)>,
}

impl<'a> Stepper<'a> {
    pub fn new(space: &'a FemSpace) -> Self {
        Stepper { space, cache: Vec::new() }
    }

    fn matrices(&mut self, k: f64) -> usize {
        if let Some(i) = self.cache.iter().position(|(kk, _, _)| (kk - k).abs() <= 1e-14 * k) {
            return i;
        }
        let s = self.space;
        let plus = OperatorMatrix::combination(1.0, &s.mass, 0.5 * k, &s.stiffness).interior;
        let minus = OperatorMatrix::combination(1.0, &s.mass, -0.5 * k, &s.stiffness).interior;
        self.cache.push((k, plus, minus));
        self.cache.len() - 1
    }

    /// Solves `(M + k/2 K) x = rhs`, warm-started from `x`.
    fn implicit(&mut self, k: f64, rhs: &[f64], x: &mut [f64]) -> Result<()> {
        let i = self.matrices(k);
        pcg(&self.cache[i].1, rhs, x, PCG_TOLERANCE)?;
        Ok(())
    }

    /// `(M − k/2 K) x`
    fn explicit(&mut self, k: f64, x: &[f64]) -> Vec<f64> {
        let i = self.matrices(k);
        self.cache[i].2.mul(x)
    }
}

/// Interior-dof trajectory of the state: `y_1..y_M` and `y_T`.
pub(crate) struct StateDofs {
    pub intervals: Vec<Vec<f64>>,
    pub terminal: Vec<f64>,
}

pub(crate) fn state_dofs(
    stepper: &mut Stepper<'_>,
    grid: &TimeGrid,
    forcing: &DiscreteForcing,
    initial_dual: &[f64],
) -> Result<StateDofs> {
    let big_m = grid.steps();
    let n = initial_dual.len();
    let mut intervals: Vec<Vec<f64>> = Vec::with_capacity(big_m);

    let mut rhs = initial_dual.to_vec();
    forcing.add_hat(0, &mut rhs);
    let mut y = vec![0.0; n];
    stepper.implicit(grid.step(1), &rhs, &mut y)?;
    intervals.push(y);

    for m in 1..big_m {
        let prev = &intervals[m - 1];
        let mut rhs = stepper.explicit(grid.step(m), prev);
        forcing.add_hat(m, &mut rhs);
        let mut y = prev.clone();
        stepper.implicit(grid.step(m + 1), &rhs, &mut y)?;
        intervals.push(y);
    }

    let mut rhs = stepper.explicit(grid.step(big_m), &intervals[big_m - 1]);
    forcing.add_hat(big_m, &mut rhs);
    let mut terminal = intervals[big_m - 1].clone();
    pcg(&stepper.space.mass.interior, &rhs, &mut terminal, PCG_TOLERANCE)?;
    Ok(StateDofs { intervals, terminal })
}

/// Backward sweep; returns interior nodal values `p_0..p_M`.
pub(crate) fn adjoint_dofs(
    stepper: &mut Stepper<'_>,
    grid: &TimeGrid,
    tracking: Option<&[Vec<f64>]>,
    forcing: &DiscreteForcing,
) -> Result<Vec<Vec<f64>>> {
    let big_m = grid.steps();
    let n = stepper.space.num_dofs();
    let mass = &stepper.space.mass.interior;
    let mut nodes = vec![vec![0.0; n]; big_m + 1];
    for m in (1..=big_m).rev() {
        let k = grid.step(m);
        let mut rhs = stepper.explicit(k, &nodes[m]);
        if let Some(y) = tracking {
            let my = mass.mul(&y[m - 1]);
            axpy(k, &my, &mut rhs);
        }
        forcing.add_interval(m, &mut rhs);
        let mut p = nodes[m].clone();
        stepper.implicit(k, &rhs, &mut p)?;
        nodes[m - 1] = p;
    }
    Ok(nodes)
}

/// Right-hand side of the discrete adjoint equation: an optional piecewise
/// constant part (typically `y_kh`) plus separable terms (typically `−y_d`).
#[derive(Debug, Clone, Copy)]
pub struct AdjointSource<'a> {
    pub tracking: Option<&'a PCField>,
    pub forcing: &'a SeparableForcing,
}

/// Fully discrete state `y_kh ∈ Y_kh` for forcing `f` and initial value `g`.
pub fn solve_state(space: &FemSpace, grid: &TimeGrid, f: &SeparableForcing, g: &SpatialField) -> Result<PCField> {
    let mut stepper = Stepper::new(space);
    let forcing = f.discretize(space, grid);
    let initial = space.dofs.restrict(space.mass_times(g).values());
    let dofs = state_dofs(&mut stepper, grid, &forcing, &initial)?;
    Ok(PCField {
        grid: grid.clone(),
        interval_values: dofs.intervals.iter().map(|v| space.dofs.extend(v)).collect(),
        terminal_value: Some(space.dofs.extend(&dofs.terminal)),
    })
}

/// Fully discrete adjoint `p_kh ∈ P_kh`.
pub fn solve_adjoint(space: &FemSpace, grid: &TimeGrid, h: AdjointSource<'_>) -> Result<PLField> {
    let mut stepper = Stepper::new(space);
    let forcing = h.forcing.discretize(space, grid);
    let tracking: Option<Vec<Vec<f64>>> = h
        .tracking
        .map(|y| y.interval_values.iter().map(|v| space.dofs.restrict(v.values())).collect());
    let nodes = adjoint_dofs(&mut stepper, grid, tracking.as_deref(), &forcing)?;
    Ok(PLField {
        grid: grid.clone(),
        node_values: nodes.iter().map(|v| space.dofs.extend(v)).collect(),
    })
}

/// Relative defect of the identity `∫(h, y_kh) = ∫(f, p_kh) + (g, p_kh(0))`,
/// which holds exactly (up to solver tolerance) because both sides equal
/// `A(y_kh, p_kh)`.
pub fn duality_residual(
    space: &FemSpace,
    grid: &TimeGrid,
    f: &SeparableForcing,
    g: &SpatialField,
    h: AdjointSource<'_>,
) -> Result<f64> {
    let y = solve_state(space, grid, f, g)?;
    let p = solve_adjoint(space, grid, h)?;
    let restrict = |v: &SpatialField| space.dofs.restrict(v.values());
    let mass = &space.mass.interior;

    let y_dofs: Vec<Vec<f64>> = y.interval_values.iter().map(restrict).collect();
    let h_forcing = h.forcing.discretize(space, grid);
    let mut lhs = 0.0;
    for m in 1..=grid.steps() {
        let ym = &y_dofs[m - 1];
        if let Some(track) = h.tracking {
            lhs += grid.step(m) * mass.bilinear(&restrict(track.on_interval(m)), ym);
        }
        lhs += h_forcing.pair_interval(m, ym);
    }

    let p_dofs: Vec<Vec<f64>> = p.node_values.iter().map(restrict).collect();
    let f_part = f.discretize(space, grid).pair_pl(&p_dofs);
    let g_part = space.l2_inner(g, &p.node_values[0]);
    let defect = lhs - f_part - g_part;
    let scale = lhs.abs().max(f_part.abs()).max(g_part.abs());
    Ok(if scale == 0.0 { 0.0 } else { defect.abs() / scale })
}
