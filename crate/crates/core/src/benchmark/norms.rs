//! Space-time error norms against analytic solutions.

use crate::mesh_fem::{ErrorAccum, ErrorNorms, FemSpace};
use crate::quadrature::gauss5;
use crate::time::{DualInterpolant, PCField, PLField, PiecewiseLinear};

/// Exact `L¹`, `L²`, `L∞` norms of `u_kh − ū` over `I`.
pub fn control_error_norms(u_kh: &PiecewiseLinear, exact: &PiecewiseLinear) -> ErrorNorms {
    u_kh.difference_norms(exact)
}

/// Time and space factors of a separable function.
pub type Factors<'a> = (&'a (dyn Fn(f64) -> f64 + Sync), &'a (dyn Fn([f64; 2]) -> f64 + Sync));

/// A function of `(t, x)`.
pub trait SpaceTimeFunction: Sync {
    fn eval(&self, t: f64, x: [f64; 2]) -> f64;

    /// `(c, s)` with `f(t, x) = c(t) s(x)`, when available; lets the norm
    /// sample the spatial factor only once.
    fn separable(&self) -> Option<Factors<'_>> {
        None
    }
}

/// Product `c(t) · s(x)`.
pub struct Separable<C, S> {
    pub time: C,
    pub space: S,
}

impl<C, S> SpaceTimeFunction for Separable<C, S>
where
    C: Fn(f64) -> f64 + Sync,
    S: Fn([f64; 2]) -> f64 + Sync,
{
    fn eval(&self, t: f64, x: [f64; 2]) -> f64 {
        (self.time)(t) * (self.space)(x)
    }

    fn separable(&self) -> Option<Factors<'_>> {
        Some((&self.time, &self.space))
    }
}

/// General closure of `(t, x)`.
pub struct Pointwise<F>(pub F);

impl<F: Fn(f64, [f64; 2]) -> f64 + Sync> SpaceTimeFunction for Pointwise<F> {
    fn eval(&self, t: f64, x: [f64; 2]) -> f64 {
        (self.0)(t, x)
    }
}

/// The discrete space-time fields whose errors are reported.
#[derive(Clone, Copy)]
pub enum FieldView<'a> {
    /// Piecewise constant state `y_kh`.
    PiecewiseConstant(&'a PCField),
    /// Dual-grid reconstruction `π y_kh`.
    Dual(DualInterpolant<'a>),
    /// Adjoint `p_kh`.
    PiecewiseLinear(&'a PLField),
}

impl FieldView<'_> {
    fn grid(&self) -> &crate::time::TimeGrid {
        match self {
            FieldView::PiecewiseConstant(f) => &f.grid,
            FieldView::Dual(d) => &d.field.grid,
            FieldView::PiecewiseLinear(f) => &f.grid,
        }
    }

    /// Nodal values at `t ∈ I_m` into `out`.
    fn sample(&self, m: usize, t: f64, out: &mut Vec<f64>) {
        match self {
            FieldView::PiecewiseConstant(f) => {
                out.clear();
                out.extend_from_slice(f.on_interval(m).values());
            }
            FieldView::Dual(d) => d.eval_into(t, out),
            FieldView::PiecewiseLinear(f) => f.eval_into(t, out),
        }
    }
}

/// `L^p(I, L^p(Ω))` norms of `field − exact` for `p = 1, 2, ∞`: Gauss-5 per
/// primal interval (split at the dual nodes for the reconstruction, where it
/// kinks) times the 7-point rule per triangle. `L∞` is sampled at the
/// space-time quadrature points and mesh nodes.
pub fn field_error_norms(space: &FemSpace, field: FieldView<'_>, exact: &dyn SpaceTimeFunction) -> ErrorNorms {
    let grid = field.grid();
    let separable = exact.separable();
    let (mut exact_q, mut exact_n) = match separable {
        Some((_, s)) => (
            space.quadrature_points().iter().map(|&p| s(p)).collect::<Vec<_>>(),
            space.mesh.nodes().iter().map(|&p| s(p)).collect::<Vec<_>>(),
        ),
        None => (Vec::new(), Vec::new()),
    };
    let mut buf = Vec::new();
    let mut scratch = Vec::new();
    let mut l1 = 0.0;
    let mut l2_sq = 0.0;
    let mut linf: f64 = 0.0;

    let mut sample = |m: usize, t: f64, w: f64, exact_q: &mut Vec<f64>, exact_n: &mut Vec<f64>| {
        field.sample(m, t, &mut buf);
        let scale = match separable {
            Some((c, _)) => c(t),
            None => {
                exact_q.clear();
                exact_q.extend(space.quadrature_points().iter().map(|&p| exact.eval(t, p)));
                exact_n.clear();
                exact_n.extend(space.mesh.nodes().iter().map(|&p| exact.eval(t, p)));
                1.0
            }
        };
        let acc: ErrorAccum = space.accumulate_error(&buf, scale, exact_q, exact_n, &mut scratch);
        l1 += w * acc.l1;
        l2_sq += w * acc.l2_sq;
        linf = linf.max(acc.linf);
    };

    for m in 1..=grid.steps() {
        let (a, b) = (grid.node(m - 1), grid.node(m));
        let cuts: &[f64] = match field {
            FieldView::Dual(_) => &[a, 0.5 * (a + b), b],
            _ => &[a, b],
        };
        for w in cuts.windows(2) {
            for (t, wt) in gauss5(w[0], w[1]) {
                sample(m, t, wt, &mut exact_q, &mut exact_n);
            }
        }
    }
    ErrorNorms { l1, l2: l2_sq.sqrt(), linf }
}
