//! Structured P1 finite elements on the unit square.

mod assembly;
mod mesh;
mod solver;
mod space;
pub mod sparse;

pub use assembly::{assemble_mass, assemble_stiffness, OperatorMatrix, OperatorRole};
pub use mesh::{build_uniform_mesh, DofMap, SpaceMesh, SpatialField, MAX_LEVEL};
pub use solver::{pcg, solve_spd, PcgStats, PCG_TOLERANCE};
pub use space::{ErrorNorms, FemSpace};
pub(crate) use solver::dot;
pub(crate) use space::ErrorAccum;
