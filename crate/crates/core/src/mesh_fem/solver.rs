//! Jacobi-preconditioned conjugate gradients for the SPD systems
//! `c_M·M + c_K·K` on interior degrees of freedom.

use super::assembly::OperatorMatrix;
use super::sparse::CsrMatrix;
use crate::error::{Error, Result};

/// Relative residual tolerance used for every solve.
pub const PCG_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct PcgStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Solves `A x = rhs` on the interior dofs of `a`, starting from zero.
pub fn solve_spd(a: &OperatorMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let mut x = vec![0.0; rhs.len()];
    pcg(&a.interior, rhs, &mut x, PCG_TOLERANCE)?;
    Ok(x)
}

/// PCG with initial guess `x` (overwritten by the solution). The iteration cap
/// is `10·n`; the residual is measured relative to `‖rhs‖`.
pub fn pcg(a: &CsrMatrix, rhs: &[f64], x: &mut [f64], tol: f64) -> Result<PcgStats> {
    let n = a.dim();
    assert_eq!(rhs.len(), n);
    assert_eq!(x.len(), n);
    let b_norm = norm(rhs);
    if b_norm == 0.0 {
        x.fill(0.0);
        return Ok(PcgStats { iterations: 0, relative_residual: 0.0 });
    }
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| 1.0 / d).collect();

    let mut r = a.mul(x);
    for (ri, bi) in r.iter_mut().zip(rhs) {
        *ri = bi - *ri;
    }
    let mut res = norm(&r) / b_norm;
    if res <= tol {
        return Ok(PcgStats { iterations: 0, relative_residual: res });
    }
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let cap = 10 * n.max(1);

    for it in 1..=cap {
        a.mul_into(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = norm(&r) / b_norm;
        if res <= tol {
            return Ok(PcgStats { iterations: it, relative_residual: res });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::LinearSolver { iterations: cap, residual: res })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
