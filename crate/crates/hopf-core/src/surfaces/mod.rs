//! Hypersurface representations: parametric charts, implicit level
//! sets and triangle meshes, with shared differentiation utilities.

pub mod chart;
pub mod implicit;
pub mod jet;
pub mod mesh;
pub mod quadrature;

pub use chart::{Chart, DiffBackend, GaussPoint, Jets, SurfaceMap};
pub use implicit::{ImplicitPoint, ImplicitSurface, LevelFn};
pub use jet::{Jet, Real};
pub use mesh::{ingest_mesh, TriMesh};
pub use quadrature::QuadGrid;
