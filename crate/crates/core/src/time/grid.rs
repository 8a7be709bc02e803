use crate::error::{Error, Result};

/// Primal time partition `0 = t_0 < … < t_M = T` and its dual partition of
/// interval midpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    nodes: Vec<f64>,
}

/// Uniform grid with `steps` intervals on `[0, horizon]`.
pub fn build_time_grid(steps: usize, horizon: f64) -> Result<TimeGrid> {
    if steps < 2 {
        return Err(Error::Config(format!("need at least 2 time steps, got {steps}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Config(format!("time horizon must be positive, got {horizon}")));
    }
    let k = horizon / steps as f64;
    let mut nodes: Vec<f64> = (0..=steps).map(|m| m as f64 * k).collect();
    nodes[steps] = horizon;
    Ok(TimeGrid { nodes })
}

impl TimeGrid {
    /// Arbitrary strictly increasing nodes starting at zero.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 || nodes[0] != 0.0 {
            return Err(Error::Config("time nodes must start at 0 and span at least 2 intervals".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("time nodes must be strictly increasing".into()));
        }
        Ok(TimeGrid { nodes })
    }

    /// Number of intervals `M`.
    pub fn steps(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// `t_m`
    pub fn node(&self, m: usize) -> f64 {
        self.nodes[m]
    }

    /// Length `k_m` of interval `I_m = [t_{m-1}, t_m)`, `m = 1..=M`.
    pub fn step(&self, m: usize) -> f64 {
        self.nodes[m] - self.nodes[m - 1]
    }

    pub fn max_step(&self) -> f64 {
        (1..=self.steps()).map(|m| self.step(m)).fold(0.0, f64::max)
    }

    /// `t*_m` for `m = 0..=M+1`: zero, the interval midpoints, then `T`.
    pub fn dual_node(&self, m: usize) -> f64 {
        let big_m = self.steps();
        match m {
            0 => 0.0,
            m if m == big_m + 1 => self.horizon(),
            m => 0.5 * (self.nodes[m - 1] + self.nodes[m]),
        }
    }

    pub fn dual_nodes(&self) -> Vec<f64> {
        (0..=self.steps() + 1).map(|m| self.dual_node(m)).collect()
    }

    /// Bounds `(κ1, κ2)` of the neighbor ratios `k_m / k_{m+1}`.
    pub fn neighbor_ratio_bounds(&self) -> (f64, f64) {
        (1..self.steps())
            .map(|m| self.step(m) / self.step(m + 1))
            .fold((f64::INFINITY, 0.0), |(lo, hi), r| (lo.min(r), hi.max(r)))
    }

    /// Interval index `m ∈ 1..=M` with `t ∈ I_m`; `t = T` maps to `M`.
    pub fn interval_of(&self, t: f64) -> usize {
        let idx = self.nodes.partition_point(|&n| n <= t);
        idx.clamp(1, self.steps())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_step_grid() {
        let g = build_time_grid(2, 1.0).unwrap();
        assert_eq!(g.nodes(), &[0.0, 0.5, 1.0]);
        assert_eq!(g.dual_nodes(), vec![0.0, 0.25, 0.75, 1.0]);
        assert_eq!(g.neighbor_ratio_bounds(), (1.0, 1.0));
    }

    #[test]
    fn step_length() {
        let g = build_time_grid(4, 0.5).unwrap();
        assert_eq!(g.max_step(), 0.125);
        let total: f64 = (1..=4).map(|m| g.step(m)).sum();
        assert!((total - 0.5).abs() < 1e-15);
        assert_eq!(g.interval_of(0.0), 1);
        assert_eq!(g.interval_of(0.125), 2);
        assert_eq!(g.interval_of(0.5), 4);
    }

    #[test]
    fn invalid_grids() {
        assert!(matches!(build_time_grid(1, 1.0), Err(Error::Config(_))));
        assert!(build_time_grid(3, 0.0).is_err());
        assert!(TimeGrid::from_nodes(vec![0.0, 0.5, 0.5]).is_err());
    }

    #[test]
    fn nonuniform_ratios() {
        let g = TimeGrid::from_nodes(vec![0.0, 0.1, 0.3, 0.4]).unwrap();
        let (lo, hi) = g.neighbor_ratio_bounds();
        assert!((lo - 0.5).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
    }
}
