//! Polyhedra with `n` vertices of minimal isoperimetric quotient `A / V^(2/3)`.

pub mod convexitylab;
pub mod error;
pub mod families;
pub mod functionals;
pub mod geometry;
pub mod hull3d;
pub mod off;
pub mod optim;
pub mod poly;
pub mod search;

pub use error::{Error, Result};
pub use geometry::Point3;
pub use hull3d::{convex_hull, Configuration, HullMesh, ValencyVector};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
