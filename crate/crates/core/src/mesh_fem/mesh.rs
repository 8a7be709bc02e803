use crate::error::{Error, Result};

/// Largest supported refinement level.
pub const MAX_LEVEL: u32 = 12;

/// Uniform right-triangle triangulation of the unit square.
///
/// Node `(i, j)` sits at `(i / n, j / n)` with index `i + j (n + 1)`, where
/// `n = 2^level`. Every cell is split along its lower-left to upper-right
/// diagonal.
#[derive(Debug, Clone)]
pub struct SpaceMesh {
    level: u32,
    cells_per_side: usize,
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary: Vec<bool>,
}

pub fn build_uniform_mesh(level: u32) -> Result<SpaceMesh> {
    if level > MAX_LEVEL {
        return Err(Error::Config(format!(
            "mesh level {level} outside 0..={MAX_LEVEL}"
        )));
    }
    let n = 1usize << level;
    let np = n + 1;
    let inv = 1.0 / n as f64;
    let mut nodes = Vec::with_capacity(np * np);
    let mut boundary = Vec::with_capacity(np * np);
    for j in 0..np {
        for i in 0..np {
            nodes.push([i as f64 * inv, j as f64 * inv]);
            boundary.push(i == 0 || j == 0 || i == n || j == n);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let ll = i + j * np;
            let lr = ll + 1;
            let ul = ll + np;
            let ur = ul + 1;
            triangles.push([ll, lr, ur]);
            triangles.push([ll, ur, ul]);
        }
    }
    Ok(SpaceMesh {
        level,
        cells_per_side: n,
        nodes,
        triangles,
        boundary,
    })
}

impl SpaceMesh {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn cells_per_side(&self) -> usize {
        self.cells_per_side
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_mask(&self) -> &[bool] {
        &self.boundary
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Diameter of the triangles, `√2 · 2^-level`.
    pub fn mesh_size(&self) -> f64 {
        std::f64::consts::SQRT_2 / self.cells_per_side as f64
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|i| self.nodes[i]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])).abs()
    }

    /// Maps each node to its interior degree-of-freedom index.
    pub fn dof_map(&self) -> DofMap {
        let mut to_dof = vec![None; self.nodes.len()];
        let mut to_node = Vec::new();
        for (i, &b) in self.boundary.iter().enumerate() {
            if !b {
                to_dof[i] = Some(to_node.len());
                to_node.push(i);
            }
        }
        DofMap { to_dof, to_node }
    }
}

/// Correspondence between mesh nodes and interior (Dirichlet-free) unknowns.
#[derive(Debug, Clone)]
pub struct DofMap {
    to_dof: Vec<Option<usize>>,
    to_node: Vec<usize>,
}

impl DofMap {
    pub fn num_dofs(&self) -> usize {
        self.to_node.len()
    }

    pub fn node_to_dof(&self) -> &[Option<usize>] {
        &self.to_dof
    }

    /// Interior values of a nodal vector.
    pub fn restrict(&self, nodal: &[f64]) -> Vec<f64> {
        self.to_node.iter().map(|&i| nodal[i]).collect()
    }

    /// Nodal vector with zero boundary values.
    pub fn extend(&self, dofs: &[f64]) -> SpatialField {
        let mut v = vec![0.0; self.to_dof.len()];
        for (&node, &x) in self.to_node.iter().zip(dofs) {
            v[node] = x;
        }
        SpatialField(v)
    }
}

/// Nodal P1 coefficients on the full node set.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialField(pub Vec<f64>);

impl SpatialField {
    pub fn zeros(n: usize) -> Self {
        SpatialField(vec![0.0; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        SpatialField(self.0.iter().map(|v| s * v).collect())
    }

    /// `self + s · other`
    pub fn axpy(&mut self, s: f64, other: &SpatialField) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }

    pub fn vanishes_on(&self, mask: &[bool]) -> bool {
        self.0.iter().zip(mask).all(|(&v, &b)| !b || v == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_and_triangle_counts() {
        for (level, nodes, tris) in [(0, 4, 2), (1, 9, 8), (3, 81, 128)] {
            let m = build_uniform_mesh(level).unwrap();
            assert_eq!(m.num_nodes(), nodes);
            assert_eq!(m.triangles().len(), tris);
        }
        let m0 = build_uniform_mesh(0).unwrap();
        assert!((m0.mesh_size() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn areas_are_uniform_and_sum_to_one() {
        let m = build_uniform_mesh(4).unwrap();
        let expected = 2f64.powi(-2 * 4 - 1);
        let mut total = 0.0;
        for t in 0..m.triangles().len() {
            let a = m.triangle_area(t);
            assert!((a - expected).abs() < 1e-17);
            total += a;
        }
        assert!((total - 1.0).abs() < 1e-14);
    }

    #[test]
    fn boundary_mask_matches_coordinates() {
        let m = build_uniform_mesh(3).unwrap();
        for (p, &b) in m.nodes().iter().zip(m.boundary_mask()) {
            let on = p[0] == 0.0 || p[0] == 1.0 || p[1] == 0.0 || p[1] == 1.0;
            assert_eq!(on, b);
        }
        assert_eq!(m.dof_map().num_dofs(), 49);
    }

    #[test]
    fn refinement_nests_nodes() {
        let coarse = build_uniform_mesh(2).unwrap();
        let fine = build_uniform_mesh(3).unwrap();
        for p in coarse.nodes() {
            assert!(fine.nodes().iter().any(|q| q == p));
        }
    }

    #[test]
    fn level_out_of_range_is_rejected() {
        assert!(matches!(build_uniform_mesh(13), Err(Error::Config(_))));
    }
}
