//! Paths from `s` to `t`: straight walk, upper path, greedy path and
//! shortest path.

mod shortest;
mod walk;

pub use shortest::{shortest_path, shortest_path_in, shortest_path_pruned};
pub use walk::{greedy_path, greedy_path_in, straight_walk, straight_walk_in, upper_path, upper_path_in, upper_path_from_walk, greedy_path_from_walk};

use thiserror::Error;

use crate::delaunay::Mesh;
use crate::geom::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathError {
    #[error("segment [s,t] passes through vertex {0} or runs along a mesh edge")]
    Degenerate(u32),
    #[error("straight walk left the triangulation after triangle {0}")]
    WalkExitsHull(u32),
    #[error("greedy path revisited vertex {vertex} at corridor index {index}")]
    NoProgress { vertex: u32, index: usize },
    #[error("t is unreachable from s")]
    Unreachable,
    #[error("s and t must be distinct mesh vertices")]
    BadEndpoints,
}

/// Ordered vertex sequence from `s` to `t`; edges may repeat.
#[derive(Clone, Debug, PartialEq)]
pub struct PathResult {
    pub vertices: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
    pub length: f64,
    pub size: usize,
}

impl PathResult {
    pub fn from_vertices(mesh: &Mesh, vertices: Vec<u32>) -> PathResult {
        let edges: Vec<(u32, u32)> = vertices.windows(2).map(|w| (w[0], w[1])).collect();
        let length = edges.iter().map(|&(a, b)| mesh.vertex(a).dist(mesh.vertex(b))).sum();
        PathResult {
            size: edges.len(),
            vertices,
            edges,
            length,
        }
    }

    pub fn points(&self, mesh: &Mesh) -> Vec<Point> {
        self.vertices.iter().map(|&v| mesh.vertex(v)).collect()
    }

    /// Whether every step is a mesh edge.
    pub fn is_mesh_path(&self, mesh: &Mesh) -> bool {
        self.edges.iter().all(|&(a, b)| mesh.has_edge(a, b))
    }
}

/// Triangles whose interior meets `[s, t]`, ordered from `s` to `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkResult {
    pub triangles: Vec<u32>,
    pub crossed_edges: usize,
    /// Vertex above (left of `s → t`) on each crossed edge.
    pub upper: Vec<u32>,
    /// Vertex below on each crossed edge.
    pub lower: Vec<u32>,
}

/// Which path construction to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    Sw,
    Up,
    Gp,
    Sp,
}

impl PathKind {
    pub const ALL: [PathKind; 4] = [PathKind::Sw, PathKind::Up, PathKind::Gp, PathKind::Sp];

    pub fn name(self) -> &'static str {
        match self {
            PathKind::Sw => "sw",
            PathKind::Up => "up",
            PathKind::Gp => "gp",
            PathKind::Sp => "sp",
        }
    }

    pub fn parse(s: &str) -> Option<PathKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sw" => Some(PathKind::Sw),
            "up" => Some(PathKind::Up),
            "gp" => Some(PathKind::Gp),
            "sp" => Some(PathKind::Sp),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::{build, InsertionOrder};

    #[test]
    fn path_metrics() {
        let pts = [Point::new(0.0, 0.0), Point::new(3.0, 0.0), Point::new(3.0, 4.0)];
        let m = build(&pts, InsertionOrder::Input).unwrap();
        let p = PathResult::from_vertices(&m, vec![0, 2, 1, 2]);
        assert_eq!(p.size, 3);
        assert_eq!(p.length, 13.0);
        assert!(p.is_mesh_path(&m));
    }

    #[test]
    fn kind_names_round_trip() {
        for k in PathKind::ALL {
            assert_eq!(PathKind::parse(k.name()), Some(k));
        }
        assert_eq!(PathKind::parse(" SP "), Some(PathKind::Sp));
        assert_eq!(PathKind::parse("xx"), None);
    }
}
