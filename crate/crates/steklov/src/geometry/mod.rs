//! Domain descriptions, mesh generation for the annular computational region
//! between the obstacle and the truncation circle, boundary tagging, and
//! mesh I/O.

pub mod curve;
pub mod domain;
pub mod io;
pub mod mesh;
pub mod refine;

pub use domain::{Ambient, DomainSpec, Obstacle};
pub use io::{read_mesh, write_mesh};
pub use mesh::{BoundaryTag, BoundaryWalk, Mesh};
pub use refine::build_mesh;
