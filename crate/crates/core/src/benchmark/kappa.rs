//! Numerical check of the measure condition `meas(I_α) ≤ C α^κ` with
//! `I_α = {t : α a < −q(t) < α b}`.

use crate::error::{Error, Result};
use crate::optimizer::Bounds;
use crate::time::{build_time_grid, ScalarPL};

use super::problem::BenchmarkProblem;

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct KappaReport {
    pub alphas: Vec<f64>,
    pub measures: Vec<f64>,
    /// Least-squares slope of `ln meas` over `ln α`; `+∞` when every set is
    /// empty.
    pub kappa_hat: f64,
}

/// Exact `meas{t : lo < w(t) < hi}` for the linear `w` from `w0` to `w1` on an
/// interval of length `len`.
fn linear_band_measure(len: f64, w0: f64, w1: f64, lo: f64, hi: f64) -> f64 {
    if w0 == w1 {
        return if lo < w0 && w0 < hi { len } else { 0.0 };
    }
    let s_lo = (lo - w0) / (w1 - w0);
    let s_hi = (hi - w0) / (w1 - w0);
    let (a, b) = if s_lo < s_hi { (s_lo, s_hi) } else { (s_hi, s_lo) };
    let (a, b) = (a.max(0.0), b.min(1.0));
    if b > a {
        (b - a) * len
    } else {
        0.0
    }
}

/// `meas(I_α)` for a piecewise linear `q`, exact per linear piece.
pub fn inactive_set_measure(q: &ScalarPL, alpha: f64, bounds: Bounds) -> f64 {
    let (lo, hi) = (alpha * bounds.lower, alpha * bounds.upper);
    (1..=q.grid.steps())
        .map(|m| {
            linear_band_measure(
                q.grid.step(m),
                -q.node_values[m - 1],
                -q.node_values[m],
                lo,
                hi,
            )
        })
        .sum()
}

pub fn measure_diagnostic(q: &ScalarPL, alphas: &[f64], bounds: Bounds) -> Result<KappaReport> {
    if alphas.is_empty() || alphas.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::Config("alpha values must be positive".into()));
    }
    if alphas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Config("alpha values must be strictly decreasing".into()));
    }
    let measures: Vec<f64> = alphas.iter().map(|&a| inactive_set_measure(q, a, bounds)).collect();
    let pts: Vec<(f64, f64)> = alphas
        .iter()
        .zip(&measures)
        .filter(|(_, &m)| m > 0.0)
        .map(|(&a, &m)| (a.ln(), m.ln()))
        .collect();
    let kappa_hat = if pts.len() < 2 {
        f64::INFINITY
    } else {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    };
    Ok(KappaReport { alphas: alphas.to_vec(), measures, kappa_hat })
}

/// `B*p̄` of the benchmark sampled on a uniform grid with `samples` intervals.
pub fn analytic_bstar_pbar(problem: &BenchmarkProblem, samples: usize) -> Result<ScalarPL> {
    let grid = build_time_grid(samples, problem.horizon)?;
    let values = grid.nodes().iter().map(|&t| problem.bstar_pbar(t)).collect();
    Ok(ScalarPL::new(&grid, values))
}

/// `2^-6, …, 2^-12`
pub fn default_alphas() -> Vec<f64> {
    (6..=12).map(|e| 2f64.powi(-e)).collect()
}
