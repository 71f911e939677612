//! Approximate convex decomposition of closed triangle meshes by recursive
//! plane cutting, with cutting planes chosen by Monte Carlo tree search and
//! termination driven by a collision-aware concavity measure.

pub mod cli;
pub mod concavity;
pub mod cutter;
pub mod geom;
pub mod hull;
pub mod io;
pub mod mesh;
pub mod pca;
pub mod pipeline;
pub mod planner;
pub mod primitives;
pub mod query;
pub mod sampling;

pub use geom::{Aabb, Plane, Transform, Vec3};
pub use mesh::{validate_manifold, MeshError, SolidMesh};
