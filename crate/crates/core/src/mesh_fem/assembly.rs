use super::mesh::SpaceMesh;
use super::sparse::CsrMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatorRole {
    Mass,
    Stiffness,
    /// `c_mass · M + c_stiff · K`
    Combination { c_mass: f64, c_stiff: f64 },
}

/// An assembled P1 operator, kept both over all nodes and restricted to the
/// interior degrees of freedom.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub role: OperatorRole,
    pub full: CsrMatrix,
    pub interior: CsrMatrix,
}

fn assemble(mesh: &SpaceMesh, element: impl Fn(usize) -> [[f64; 3]; 3]) -> CsrMatrix {
    let mut triplets = Vec::with_capacity(9 * mesh.triangles().len());
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let e = element(t);
        for a in 0..3 {
            for b in 0..3 {
                triplets.push((tri[a], tri[b], e[a][b]));
            }
        }
    }
    CsrMatrix::from_triplets(mesh.num_nodes(), triplets)
}

fn finish(mesh: &SpaceMesh, role: OperatorRole, full: CsrMatrix) -> OperatorMatrix {
    let map = mesh.dof_map();
    let interior = full.restrict(map.node_to_dof(), map.num_dofs());
    OperatorMatrix { role, full, interior }
}

/// Consistent P1 mass matrix.
pub fn assemble_mass(mesh: &SpaceMesh) -> OperatorMatrix {
    let full = assemble(mesh, |t| {
        let a = mesh.triangle_area(t) / 12.0;
        [
            [2.0 * a, a, a],
            [a, 2.0 * a, a],
            [a, a, 2.0 * a],
        ]
    });
    finish(mesh, OperatorRole::Mass, full)
}

/// P1 stiffness matrix of `a(f, g) = ∫ ∇f·∇g`.
pub fn assemble_stiffness(mesh: &SpaceMesh) -> OperatorMatrix {
    let full = assemble(mesh, |t| {
        let p = mesh.triangles()[t].map(|i| mesh.nodes()[i]);
        let area = mesh.triangle_area(t);
        // ∇λ_i is the inward normal of the opposite edge scaled by 1/(2·area)
        let grads: [[f64; 2]; 3] = std::array::from_fn(|i| {
            let a = p[(i + 1) % 3];
            let b = p[(i + 2) % 3];
            [(a[1] - b[1]) / (2.0 * area), (b[0] - a[0]) / (2.0 * area)]
        });
        let mut e = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                e[i][j] = area * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
            }
        }
        e
    });
    finish(mesh, OperatorRole::Stiffness, full)
}

impl OperatorMatrix {
    /// `c_mass · mass + c_stiff · stiffness`
    pub fn combination(c_mass: f64, mass: &OperatorMatrix, c_stiff: f64, stiff: &OperatorMatrix) -> Self {
        OperatorMatrix {
            role: OperatorRole::Combination { c_mass, c_stiff },
            full: CsrMatrix::linear_combination(c_mass, &mass.full, c_stiff, &stiff.full),
            interior: CsrMatrix::linear_combination(c_mass, &mass.interior, c_stiff, &stiff.interior),
        }
    }
}
