//! Path stretch in planar Poisson-Delaunay triangulations.

pub mod geom;
pub mod delaunay;
pub mod sampling;
pub mod paths;
pub mod bounds;
pub mod harness;
pub mod pixels;
