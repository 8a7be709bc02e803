use super::assembly::{assemble_mass, assemble_stiffness, OperatorMatrix};
use super::mesh::{DofMap, SpaceMesh, SpatialField};
use crate::error::{Error, Result};
use crate::quadrature::{triangle7, TriPoint};

/// `L¹`, `L²` and (sampled) `L∞` norms of an error.
#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// A mesh together with its assembled operators and quadrature cache.
#[derive(Debug, Clone)]
pub struct FemSpace {
    pub mesh: SpaceMesh,
    pub mass: OperatorMatrix,
    pub stiffness: OperatorMatrix,
    pub dofs: DofMap,
    rule: [TriPoint; 7],
    quad_points: Vec<[f64; 2]>,
    quad_weights: Vec<f64>,
}

impl FemSpace {
    pub fn new(mesh: SpaceMesh) -> Self {
        let mass = assemble_mass(&mesh);
        let stiffness = assemble_stiffness(&mesh);
        let dofs = mesh.dof_map();
        let rule = triangle7();
        let mut quad_points = Vec::with_capacity(7 * mesh.triangles().len());
        let mut quad_weights = Vec::with_capacity(quad_points.capacity());
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let area = mesh.triangle_area(t);
            let p = tri.map(|i| mesh.nodes()[i]);
            for q in &rule {
                let b = q.bary;
                quad_points.push([
                    b[0] * p[0][0] + b[1] * p[1][0] + b[2] * p[2][0],
                    b[0] * p[0][1] + b[1] * p[1][1] + b[2] * p[2][1],
                ]);
                quad_weights.push(q.weight * area);
            }
        }
        FemSpace { mesh, mass, stiffness, dofs, rule, quad_points, quad_weights }
    }

    pub fn num_nodes(&self) -> usize {
        self.mesh.num_nodes()
    }

    pub fn num_dofs(&self) -> usize {
        self.dofs.num_dofs()
    }

    /// Physical coordinates of all triangle quadrature points, 7 per triangle.
    pub fn quadrature_points(&self) -> &[[f64; 2]] {
        &self.quad_points
    }

    pub fn quadrature_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    /// Values of the P1 function with nodal `values` at every quadrature point.
    pub fn eval_at_quadrature(&self, values: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.reserve(self.quad_points.len());
        for tri in self.mesh.triangles() {
            let v = tri.map(|i| values[i]);
            for q in &self.rule {
                out.push(q.bary[0] * v[0] + q.bary[1] * v[1] + q.bary[2] * v[2]);
            }
        }
    }

    /// Nodal interpolant. With `dirichlet` set the boundary values are zeroed
    /// so the result lies in the homogeneous Dirichlet space.
    pub fn interpolate_nodal(&self, f: impl Fn([f64; 2]) -> f64, dirichlet: bool) -> Result<SpatialField> {
        let mut v = Vec::with_capacity(self.num_nodes());
        for (p, &b) in self.mesh.nodes().iter().zip(self.mesh.boundary_mask()) {
            let y = f(*p);
            if !y.is_finite() {
                return Err(Error::Data(format!("non-finite value {y} at node {p:?}")));
            }
            v.push(if dirichlet && b { 0.0 } else { y });
        }
        Ok(SpatialField(v))
    }

    /// `∫ f φ_j dx` for every node `j`, 7-point rule per triangle.
    pub fn load_vector(&self, f: impl Fn([f64; 2]) -> f64) -> SpatialField {
        let mut out = vec![0.0; self.num_nodes()];
        for (t, tri) in self.mesh.triangles().iter().enumerate() {
            for (k, q) in self.rule.iter().enumerate() {
                let idx = 7 * t + k;
                let fw = f(self.quad_points[idx]) * self.quad_weights[idx];
                for a in 0..3 {
                    out[tri[a]] += fw * q.bary[a];
                }
            }
        }
        SpatialField(out)
    }

    /// Full mass matrix times a nodal field.
    pub fn mass_times(&self, field: &SpatialField) -> SpatialField {
        SpatialField(self.mass.full.mul(field.values()))
    }

    /// `(f, g)_{L²(Ω)}` of two P1 fields.
    pub fn l2_inner(&self, f: &SpatialField, g: &SpatialField) -> f64 {
        self.mass.full.bilinear(f.values(), g.values())
    }

    /// Norms of `fe_field − exact`; `L∞` is the maximum over nodes and
    /// quadrature points.
    pub fn spatial_error_norms(&self, fe_field: &SpatialField, exact: impl Fn([f64; 2]) -> f64) -> ErrorNorms {
        let exact_q: Vec<f64> = self.quad_points.iter().map(|&p| exact(p)).collect();
        let exact_n: Vec<f64> = self.mesh.nodes().iter().map(|&p| exact(p)).collect();
        let mut scratch = Vec::new();
        let acc = self.accumulate_error(fe_field.values(), 1.0, &exact_q, &exact_n, &mut scratch);
        ErrorNorms { l1: acc.l1, l2: acc.l2_sq.sqrt(), linf: acc.linf }
    }

    /// Error integrals of `values − scale·exact` with `exact` pre-sampled at
    /// the quadrature points and nodes.
    pub(crate) fn accumulate_error(
        &self,
        values: &[f64],
        scale: f64,
        exact_q: &[f64],
        exact_n: &[f64],
        scratch: &mut Vec<f64>,
    ) -> ErrorAccum {
        self.eval_at_quadrature(values, scratch);
        let mut acc = ErrorAccum::default();
        for ((&u, &e), &w) in scratch.iter().zip(exact_q).zip(&self.quad_weights) {
            let d = (u - scale * e).abs();
            acc.l1 += w * d;
            acc.l2_sq += w * d * d;
            acc.linf = acc.linf.max(d);
        }
        for (&u, &e) in values.iter().zip(exact_n) {
            acc.linf = acc.linf.max((u - scale * e).abs());
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct ErrorAccum {
    pub l1: f64,
    pub l2_sq: f64,
    pub linf: f64,
}
