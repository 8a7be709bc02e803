use super::grid::TimeGrid;
use super::profile::PiecewiseLinear;
use crate::error::{Error, Result};
use crate::mesh_fem::SpatialField;
use crate::quadrature::gauss5;

/// Piecewise constant in time: one spatial field per interval `I_m`, plus the
/// separate terminal degree of freedom `y(T)`.
#[derive(Debug, Clone)]
pub struct PCField {
    pub grid: TimeGrid,
    pub interval_values: Vec<SpatialField>,
    pub terminal_value: Option<SpatialField>,
}

impl PCField {
    pub fn zeros(grid: &TimeGrid, nodes: usize) -> Self {
        PCField {
            grid: grid.clone(),
            interval_values: vec![SpatialField::zeros(nodes); grid.steps()],
            terminal_value: None,
        }
    }

    /// Value on `I_m`, `m = 1..=M`.
    pub fn on_interval(&self, m: usize) -> &SpatialField {
        &self.interval_values[m - 1]
    }
}

/// Continuous, piecewise linear in time with nodal values at `t_0..t_M`.
#[derive(Debug, Clone)]
pub struct PLField {
    pub grid: TimeGrid,
    pub node_values: Vec<SpatialField>,
}

impl PLField {
    pub fn zeros(grid: &TimeGrid, nodes: usize) -> Self {
        PLField {
            grid: grid.clone(),
            node_values: vec![SpatialField::zeros(nodes); grid.steps() + 1],
        }
    }

    pub fn eval_into(&self, t: f64, out: &mut Vec<f64>) {
        let m = self.grid.interval_of(t);
        let (a, b) = (self.grid.node(m - 1), self.grid.node(m));
        let s = (t - a) / (b - a);
        let (va, vb) = (self.node_values[m - 1].values(), self.node_values[m].values());
        out.clear();
        out.extend(va.iter().zip(vb).map(|(x, y)| (1.0 - s) * x + s * y));
    }

    pub fn eval(&self, t: f64) -> SpatialField {
        let mut v = Vec::new();
        self.eval_into(t, &mut v);
        SpatialField(v)
    }
}

/// Scalar continuous piecewise linear function on the primal grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPL {
    pub grid: TimeGrid,
    pub node_values: Vec<f64>,
}

impl ScalarPL {
    pub fn new(grid: &TimeGrid, node_values: Vec<f64>) -> Self {
        assert_eq!(node_values.len(), grid.steps() + 1);
        ScalarPL { grid: grid.clone(), node_values }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let m = self.grid.interval_of(t);
        let (a, b) = (self.grid.node(m - 1), self.grid.node(m));
        let s = (t - a) / (b - a);
        (1.0 - s) * self.node_values[m - 1] + s * self.node_values[m]
    }

    pub fn to_profile(&self) -> PiecewiseLinear {
        PiecewiseLinear::from_nodes(self.grid.nodes(), &self.node_values)
    }

    pub fn sub(&self, other: &ScalarPL) -> ScalarPL {
        ScalarPL::new(
            &self.grid,
            self.node_values.iter().zip(&other.node_values).map(|(a, b)| a - b).collect(),
        )
    }
}

/// Exact `sup_t |q(t)|`, attained at a node.
pub fn scalar_pl_sup_norm(q: &ScalarPL) -> f64 {
    q.node_values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Interval averages `(1/k_m) ∫_{I_m} f dt` by Gauss-5.
pub fn project_yk_scalar(grid: &TimeGrid, f: impl Fn(f64) -> f64) -> Vec<f64> {
    (1..=grid.steps())
        .map(|m| {
            let (a, b) = (grid.node(m - 1), grid.node(m));
            gauss5(a, b).iter().map(|&(t, w)| w * f(t)).sum::<f64>() / (b - a)
        })
        .collect()
}

/// Orthogonal projection onto piecewise constants in time; the terminal
/// value is set to zero.
pub fn project_yk_field(grid: &TimeGrid, f: impl Fn(f64) -> SpatialField) -> PCField {
    let mut interval_values = Vec::with_capacity(grid.steps());
    for m in 1..=grid.steps() {
        let (a, b) = (grid.node(m - 1), grid.node(m));
        let mut acc: Option<SpatialField> = None;
        for (t, w) in gauss5(a, b) {
            let v = f(t);
            match acc.as_mut() {
                Some(s) => s.axpy(w / (b - a), &v),
                None => acc = Some(v.scaled(w / (b - a))),
            }
        }
        interval_values.push(acc.unwrap());
    }
    let n = interval_values[0].len();
    PCField {
        grid: grid.clone(),
        interval_values,
        terminal_value: Some(SpatialField::zeros(n)),
    }
}

/// The two interval indices (1-based) and weights whose combination gives the
/// dual-grid piecewise linear interpolant at `t`. The first and last two
/// dual intervals use the neighbouring line, extrapolated to `0` and `T`.
pub fn dual_weights(grid: &TimeGrid, t: f64) -> [(usize, f64); 2] {
    let big_m = grid.steps();
    // line through (t*_j, v_j), (t*_{j+1}, v_{j+1}) with j ∈ 1..=M−1
    let mut j = 1;
    while j < big_m - 1 && t >= grid.dual_node(j + 1) {
        j += 1;
    }
    let (a, b) = (grid.dual_node(j), grid.dual_node(j + 1));
    let s = (t - a) / (b - a);
    [(j, 1.0 - s), (j + 1, s)]
}

fn check_dual(grid: &TimeGrid) -> Result<()> {
    if grid.steps() < 3 {
        return Err(Error::Config(format!(
            "dual-grid interpolation needs at least 3 intervals, got {}",
            grid.steps()
        )));
    }
    Ok(())
}

/// Scalar dual-grid interpolant of interval values.
pub fn interp_dual_scalar(grid: &TimeGrid, values: &[f64], t: f64) -> Result<f64> {
    check_dual(grid)?;
    let [(i, wi), (j, wj)] = dual_weights(grid, t);
    Ok(wi * values[i - 1] + wj * values[j - 1])
}

/// Continuous reconstruction of a piecewise constant field on the dual grid.
#[derive(Debug, Clone, Copy)]
pub struct DualInterpolant<'a> {
    pub field: &'a PCField,
}

pub fn interp_dual(y: &PCField) -> Result<DualInterpolant<'_>> {
    check_dual(&y.grid)?;
    Ok(DualInterpolant { field: y })
}

impl DualInterpolant<'_> {
    pub fn eval_into(&self, t: f64, out: &mut Vec<f64>) {
        let [(i, wi), (j, wj)] = dual_weights(&self.field.grid, t);
        let (vi, vj) = (self.field.on_interval(i).values(), self.field.on_interval(j).values());
        out.clear();
        out.extend(vi.iter().zip(vj).map(|(a, b)| wi * a + wj * b));
    }

    pub fn eval(&self, t: f64) -> SpatialField {
        let mut v = Vec::new();
        self.eval_into(t, &mut v);
        SpatialField(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::time::build_time_grid;

    #[test]
    fn interval_averages() {
        let g = build_time_grid(2, 1.0).unwrap();
        let v = project_yk_scalar(&g, |t| t);
        assert!((v[0] - 0.25).abs() < 1e-15 && (v[1] - 0.75).abs() < 1e-15);
        assert!(project_yk_scalar(&g, |_| 3.0).iter().all(|&x| (x - 3.0).abs() < 1e-15));
        // single interval through a non-uniform grid is not allowed; use two
        // halves and average for ∫ t² = 1/3
        let sq = project_yk_scalar(&g, |t| t * t);
        assert!((0.5 * (sq[0] + sq[1]) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn projection_is_idempotent() {
        let g = build_time_grid(5, 0.5).unwrap();
        let v = project_yk_scalar(&g, |t| (3.0 * t).sin());
        let again = project_yk_scalar(&g, |t| v[g.interval_of(t) - 1]);
        for (a, b) in v.iter().zip(&again) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn dual_interpolation_minimal_grid() {
        let g = build_time_grid(3, 1.0).unwrap();
        let vals = [0.0, 1.0, 2.0];
        // line through (1/6, 0) and (1/2, 1) evaluated at 0
        assert!((interp_dual_scalar(&g, &vals, 0.0).unwrap() + 0.5).abs() < 1e-14);
        assert!((interp_dual_scalar(&g, &vals, 1.0).unwrap() - 2.5).abs() < 1e-14);
        let short = build_time_grid(2, 1.0).unwrap();
        assert!(matches!(interp_dual_scalar(&short, &[0.0, 1.0], 0.3), Err(Error::Config(_))));
    }

    #[test]
    fn dual_interpolation_reproduces_constants() {
        let g = build_time_grid(6, 0.5).unwrap();
        for i in 0..=20 {
            let t = 0.5 * i as f64 / 20.0;
            assert!((interp_dual_scalar(&g, &[2.0; 6], t).unwrap() - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sup_norm_examples() {
        let g = build_time_grid(2, 1.0).unwrap();
        assert_eq!(scalar_pl_sup_norm(&ScalarPL::new(&g, vec![0.0; 3])), 0.0);
        let q = ScalarPL::new(&g, vec![-3.0, 1.0, 2.0]);
        assert_eq!(scalar_pl_sup_norm(&q), 3.0);
        assert_eq!(scalar_pl_sup_norm(&q.sub(&q)), 0.0);
    }
}
