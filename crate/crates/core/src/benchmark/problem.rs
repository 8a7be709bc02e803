use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::Result;
use crate::mesh_fem::FemSpace;
use crate::optimizer::{Bounds, ControlProblem};
use crate::petrov_galerkin::{SeparableForcing, SpatialSource};
use crate::time::{PiecewiseLinear, SmoothCoefficient};

/// Manufactured bang-bang problem on `(0,1)² × (0, T)` with a located control
/// acting through `g1(x) = sin(πx1) sin(πx2)`.
///
/// With `ω = 2πa/T` the optimal triple is
/// `ȳ = cos(ωt) g1`, `p̄ = −(T/(2πa)) sin(ωt) g1` and
/// `ū = a1` where `B*p̄ > 0`, `ū = b1` where `B*p̄ < 0`.
/// How `g1` enters the discrete equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataPairing {
    /// `(g1, φ_j)` by the 7-point rule.
    LoadVector,
    /// `M · I_h g1`.
    Interpolant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkProblem {
    pub horizon: f64,
    /// Frequency constant `a`; sets the number of switching points.
    pub frequency: f64,
    pub bounds: Bounds,
}

impl Default for BenchmarkProblem {
    fn default() -> Self {
        BenchmarkProblem {
            horizon: 0.5,
            frequency: 2.0,
            bounds: Bounds { lower: 0.2, upper: 0.4 },
        }
    }
}

pub fn g1(x: [f64; 2]) -> f64 {
    (PI * x[0]).sin() * (PI * x[1]).sin()
}

/// `(g1, g1)_{L²(Ω)}`
pub const G1_NORM_SQ: f64 = 0.25;

impl BenchmarkProblem {
    fn omega(&self) -> f64 {
        2.0 * PI * self.frequency / self.horizon
    }

    /// Time factor of `ȳ`.
    pub fn state_time(&self, t: f64) -> f64 {
        (self.omega() * t).cos()
    }

    /// Time factor of `p̄`.
    pub fn adjoint_time(&self, t: f64) -> f64 {
        -self.horizon / (2.0 * PI * self.frequency) * (self.omega() * t).sin()
    }

    /// Time factor of `y_d`, fixed by `−∂_t p̄ − Δp̄ = ȳ − y_d`.
    pub fn desired_time(&self, t: f64) -> f64 {
        self.horizon * PI / self.frequency * (self.omega() * t).sin()
    }

    pub fn ybar(&self, t: f64, x: [f64; 2]) -> f64 {
        self.state_time(t) * g1(x)
    }

    pub fn pbar(&self, t: f64, x: [f64; 2]) -> f64 {
        self.adjoint_time(t) * g1(x)
    }

    pub fn desired_state(&self, t: f64, x: [f64; 2]) -> f64 {
        self.desired_time(t) * g1(x)
    }

    /// `B*p̄(t) = (g1, p̄(t))`
    pub fn bstar_pbar(&self, t: f64) -> f64 {
        G1_NORM_SQ * self.adjoint_time(t)
    }

    /// Zeros of `sin(ωt)` in `(0, T)`.
    pub fn switching_points(&self) -> Vec<f64> {
        let n = (2.0 * self.frequency).round() as usize;
        (1..n).map(|j| j as f64 * self.horizon / n as f64).collect()
    }

    /// `ū` as an exact step function.
    pub fn ubar_profile(&self) -> PiecewiseLinear {
        let mut breaks = vec![0.0];
        breaks.extend(self.switching_points());
        breaks.push(self.horizon);
        let values: Vec<f64> = breaks
            .windows(2)
            .map(|w| {
                if self.bstar_pbar(0.5 * (w[0] + w[1])) < 0.0 {
                    self.bounds.upper
                } else {
                    self.bounds.lower
                }
            })
            .collect();
        PiecewiseLinear::step(&breaks, &values)
    }

    pub fn ubar(&self, t: f64) -> f64 {
        self.ubar_profile().eval(t)
    }

    /// Time factor of `g0 = c0(t) g1`, so that `∂_t ȳ − Δȳ = (c0 + ū) g1`.
    pub fn g0_time(&self, t: f64, ubar: f64) -> f64 {
        let w = self.omega();
        2.0 * PI * (-(self.frequency / self.horizon) * (w * t).sin() + PI * (w * t).cos()) - ubar
    }

    /// Discrete control problem data on `space`.
    pub fn control_problem(&self, space: &FemSpace) -> Result<ControlProblem> {
        self.control_problem_with(space, DataPairing::LoadVector)
    }

    pub fn control_problem_with(&self, space: &FemSpace, pairing: DataPairing) -> Result<ControlProblem> {
        let g1_h = space.interpolate_nodal(g1, true)?;
        let source = match pairing {
            DataPairing::LoadVector => SpatialSource::Function(Arc::new(g1)),
            DataPairing::Interpolant => SpatialSource::Field(g1_h),
        };
        let ubar = self.ubar_profile();
        let me = *self;
        let c0 = SmoothCoefficient::new(move |t| me.g0_time(t, ubar.eval(t)), self.switching_points());
        let yd = SmoothCoefficient::new(move |t| me.desired_time(t), vec![]);
        Ok(ControlProblem {
            horizon: self.horizon,
            control_profile: source.clone(),
            initial_state: source.clone(),
            affine_forcing: SeparableForcing::new().with_term(Arc::new(c0), source.clone(), 1.0),
            desired_state: SeparableForcing::new().with_term(Arc::new(yd), source, 1.0),
            bounds: self.bounds,
        })
    }
}
