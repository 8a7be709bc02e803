//! Scalar functions of time: exact piecewise-linear profiles (possibly
//! discontinuous) and the coefficient trait used by the forcing terms.

use super::grid::TimeGrid;
use crate::mesh_fem::ErrorNorms;
use crate::quadrature::gauss5;

/// Linear piece on `[t0, t1]` running from `v0` to `v1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub t0: f64,
    pub t1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Piece {
    pub fn at(&self, t: f64) -> f64 {
        let len = self.t1 - self.t0;
        if len == 0.0 {
            return self.v0;
        }
        let s = (t - self.t0) / len;
        self.v0 + s * (self.v1 - self.v0)
    }

    pub fn len(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0.0
    }
}

/// Piecewise linear function on a contiguous sequence of pieces. Jumps are
/// allowed between pieces; evaluation is right-continuous.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    pieces: Vec<Piece>,
}

impl PiecewiseLinear {
    /// Panics if pieces are empty or not contiguous.
    pub fn new(pieces: Vec<Piece>) -> Self {
        assert!(!pieces.is_empty(), "empty piecewise-linear function");
        for w in pieces.windows(2) {
            assert!(w[0].t1 == w[1].t0, "pieces not contiguous at {}", w[0].t1);
        }
        PiecewiseLinear { pieces }
    }

    pub fn constant(t0: f64, t1: f64, value: f64) -> Self {
        Self::new(vec![Piece { t0, t1, v0: value, v1: value }])
    }

    /// Continuous interpolant of `values` at `nodes`.
    pub fn from_nodes(nodes: &[f64], values: &[f64]) -> Self {
        assert_eq!(nodes.len(), values.len());
        Self::new(
            nodes
                .windows(2)
                .zip(values.windows(2))
                .map(|(t, v)| Piece { t0: t[0], t1: t[1], v0: v[0], v1: v[1] })
                .collect(),
        )
    }

    /// Step function with `values[i]` on `[breaks[i], breaks[i+1])`.
    pub fn step(breaks: &[f64], values: &[f64]) -> Self {
        assert_eq!(breaks.len(), values.len() + 1);
        Self::new(
            breaks
                .windows(2)
                .zip(values)
                .map(|(t, &v)| Piece { t0: t[0], t1: t[1], v0: v, v1: v })
                .collect(),
        )
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn start(&self) -> f64 {
        self.pieces[0].t0
    }

    pub fn end(&self) -> f64 {
        self.pieces.last().unwrap().t1
    }

    fn piece_index(&self, t: f64) -> usize {
        let idx = self.pieces.partition_point(|p| p.t0 <= t);
        idx.saturating_sub(1)
    }

    /// Right-continuous evaluation (left limit at the final endpoint).
    pub fn eval(&self, t: f64) -> f64 {
        self.pieces[self.piece_index(t)].at(t)
    }

    /// Left limit at `t` (value at the start for `t = start`).
    pub fn eval_left(&self, t: f64) -> f64 {
        let idx = self.pieces.partition_point(|p| p.t0 < t).saturating_sub(1);
        self.pieces[idx].at(t)
    }

    /// Interior piece boundaries.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces[1..].iter().map(|p| p.t0).collect()
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.pieces.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.v0).min(p.v1), hi.max(p.v0).max(p.v1))
        })
    }

    pub fn integral(&self) -> f64 {
        self.pieces.iter().map(|p| 0.5 * p.len() * (p.v0 + p.v1)).sum()
    }

    /// Common refinement of both partitions; yields each sub-piece of `self`
    /// and `other`.
    fn merged(&self, other: &PiecewiseLinear) -> Vec<(Piece, Piece)> {
        let mut cuts: Vec<f64> = self
            .pieces
            .iter()
            .chain(&other.pieces)
            .flat_map(|p| [p.t0, p.t1])
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let (lo, hi) = (self.start().max(other.start()), self.end().min(other.end()));
        let mut out = Vec::with_capacity(cuts.len());
        for w in cuts.windows(2) {
            let (s0, s1) = (w[0], w[1]);
            if s0 < lo || s1 > hi || s1 <= s0 {
                continue;
            }
            let mid = 0.5 * (s0 + s1);
            let a = self.pieces[self.piece_index(mid)];
            let b = other.pieces[other.piece_index(mid)];
            out.push((
                Piece { t0: s0, t1: s1, v0: a.at(s0), v1: a.at(s1) },
                Piece { t0: s0, t1: s1, v0: b.at(s0), v1: b.at(s1) },
            ));
        }
        out
    }

    /// `a·self + b·other` on the merged partition.
    pub fn linear_combination(&self, a: f64, other: &PiecewiseLinear, b: f64) -> PiecewiseLinear {
        PiecewiseLinear::new(
            self.merged(other)
                .into_iter()
                .map(|(x, y)| Piece {
                    t0: x.t0,
                    t1: x.t1,
                    v0: a * x.v0 + b * y.v0,
                    v1: a * x.v1 + b * y.v1,
                })
                .collect(),
        )
    }

    /// `∫ self · other dt`, exact.
    pub fn inner(&self, other: &PiecewiseLinear) -> f64 {
        self.merged(other)
            .iter()
            .map(|(x, y)| {
                x.len() / 6.0 * (2.0 * x.v0 * y.v0 + x.v0 * y.v1 + x.v1 * y.v0 + 2.0 * x.v1 * y.v1)
            })
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self)
    }

    /// Exact `L¹`, `L²`, `L∞` norms of `self − other`.
    pub fn difference_norms(&self, other: &PiecewiseLinear) -> ErrorNorms {
        let mut n = ErrorNorms::default();
        let mut l2_sq = 0.0;
        for (x, y) in self.merged(other) {
            let (d0, d1) = (x.v0 - y.v0, x.v1 - y.v1);
            let h = x.len();
            n.l1 += abs_linear_integral(h, d0, d1);
            l2_sq += h / 3.0 * (d0 * d0 + d0 * d1 + d1 * d1);
            n.linf = n.linf.max(d0.abs()).max(d1.abs());
        }
        n.l2 = l2_sq.sqrt();
        n
    }
}

/// `∫_0^h |d0 + (d1 − d0) s/h| ds`
fn abs_linear_integral(h: f64, d0: f64, d1: f64) -> f64 {
    if d0 * d1 >= 0.0 {
        0.5 * h * (d0.abs() + d1.abs())
    } else {
        0.5 * h * (d0 * d0 + d1 * d1) / (d0.abs() + d1.abs())
    }
}

/// Scalar time coefficient of a separable forcing term. `breakpoints` lists
/// the points where the function may fail to be smooth; quadrature is split
/// there.
pub trait TimeCoefficient: Send + Sync {
    fn eval(&self, t: f64) -> f64;
    fn breakpoints(&self) -> Vec<f64>;
}

impl TimeCoefficient for PiecewiseLinear {
    fn eval(&self, t: f64) -> f64 {
        PiecewiseLinear::eval(self, t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        PiecewiseLinear::breakpoints(self)
    }
}

/// Closure-backed coefficient with declared breakpoints.
pub struct SmoothCoefficient {
    f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    breaks: Vec<f64>,
}

impl SmoothCoefficient {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, mut breaks: Vec<f64>) -> Self {
        breaks.sort_by(f64::total_cmp);
        SmoothCoefficient { f: Box::new(f), breaks }
    }
}

impl std::fmt::Debug for SmoothCoefficient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothCoefficient").field("breaks", &self.breaks).finish()
    }
}

impl TimeCoefficient for SmoothCoefficient {
    fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breaks.clone()
    }
}

/// Per-interval moments of a coefficient against the time basis of `I_m`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IntervalMoments {
    /// `∫_{I_m} c dt`
    pub mean: f64,
    /// `∫_{I_m} c · (t_m − t)/k_m dt`, the descending hat of `t_{m−1}`
    pub descending: f64,
    /// `∫_{I_m} c · (t − t_{m−1})/k_m dt`, the ascending hat of `t_m`
    pub ascending: f64,
}

/// Gauss-5 moments on every interval, split at the coefficient's breakpoints.
/// Entry `m − 1` belongs to `I_m`.
pub fn interval_moments(coef: &dyn TimeCoefficient, grid: &TimeGrid) -> Vec<IntervalMoments> {
    let mut breaks = coef.breakpoints();
    breaks.sort_by(f64::total_cmp);
    let mut j = 0;
    let mut out = Vec::with_capacity(grid.steps());
    let mut cuts = Vec::new();
    for m in 1..=grid.steps() {
        let (a, b) = (grid.node(m - 1), grid.node(m));
        let k = b - a;
        while j < breaks.len() && breaks[j] <= a {
            j += 1;
        }
        cuts.clear();
        cuts.push(a);
        let mut jj = j;
        while jj < breaks.len() && breaks[jj] < b {
            cuts.push(breaks[jj]);
            jj += 1;
        }
        cuts.push(b);
        let mut mom = IntervalMoments::default();
        for w in cuts.windows(2) {
            for (t, wt) in gauss5(w[0], w[1]) {
                let c = wt * coef.eval(t);
                mom.mean += c;
                mom.descending += c * (b - t) / k;
                mom.ascending += c * (t - a) / k;
            }
        }
        out.push(mom);
    }
    out
}

/// Folds interval moments into integrals against the nodal hats `v_0..v_M`.
pub fn hat_integrals(moments: &[IntervalMoments]) -> Vec<f64> {
    let mut w = vec![0.0; moments.len() + 1];
    for (i, mom) in moments.iter().enumerate() {
        w[i] += mom.descending;
        w[i + 1] += mom.ascending;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::build_time_grid;

    #[test]
    fn right_continuous_evaluation() {
        let f = PiecewiseLinear::step(&[0.0, 0.5, 1.0], &[1.0, 2.0]);
        assert_eq!(f.eval(0.5), 2.0);
        assert_eq!(f.eval_left(0.5), 1.0);
        assert_eq!(f.eval(1.0), 2.0);
        assert_eq!(f.breakpoints(), vec![0.5]);
    }

    #[test]
    fn constant_difference_norms() {
        let u = PiecewiseLinear::constant(0.0, 0.5, 0.4);
        let v = PiecewiseLinear::constant(0.0, 0.5, 0.2);
        let n = u.difference_norms(&v);
        assert!((n.l1 - 0.1).abs() < 1e-15);
        assert!((n.linf - 0.2).abs() < 1e-15);
        assert!((n.l2 - (0.04f64 * 0.5).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sign_changing_difference() {
        // |t − 1/2| on [0, 1] integrates to 1/4
        let u = PiecewiseLinear::from_nodes(&[0.0, 1.0], &[-0.5, 0.5]);
        let z = PiecewiseLinear::constant(0.0, 1.0, 0.0);
        let n = u.difference_norms(&z);
        assert!((n.l1 - 0.25).abs() < 1e-15);
        assert!((n.l2 * n.l2 - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn inner_product_on_merged_partition() {
        let u = PiecewiseLinear::from_nodes(&[0.0, 0.3, 1.0], &[0.0, 0.3, 1.0]);
        let v = PiecewiseLinear::step(&[0.0, 0.5, 1.0], &[1.0, 2.0]);
        // ∫_0^.5 t + ∫_.5^1 2t = 0.125 + 0.75
        assert!((u.inner(&v) - 0.875).abs() < 1e-14);
        let w = u.linear_combination(2.0, &v, -1.0);
        assert!((w.eval(0.75) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn moments_of_polynomials_are_exact() {
        let grid = build_time_grid(4, 1.0).unwrap();
        let c = SmoothCoefficient::new(|t| t * t, vec![]);
        let mom = interval_moments(&c, &grid);
        let total: f64 = mom.iter().map(|m| m.mean).sum();
        assert!((total - 1.0 / 3.0).abs() < 1e-15);
        let hats = hat_integrals(&mom);
        let one = SmoothCoefficient::new(|_| 1.0, vec![0.3]);
        let h1 = hat_integrals(&interval_moments(&one, &grid));
        assert!((h1[0] - 0.125).abs() < 1e-15 && (h1[2] - 0.25).abs() < 1e-15);
        assert!((hats.iter().sum::<f64>() - 1.0 / 3.0).abs() < 1e-15);
    }
}
