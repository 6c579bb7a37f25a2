use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{PathError, PathResult};
use crate::delaunay::{Mesh, NONE};
use crate::sampling::Instance;

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    v: u32,
}

impl Eq for Entry {}

impl Ord for Entry {
    // Min-heap on (dist, v).
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.v.cmp(&self.v))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `s` with Euclidean weights, stopping at `t`. With `bound`,
/// vertices outside the ellipse `|v−s| + |v−t| ≤ bound` are skipped; any
/// bound at least the shortest length gives the same path.
pub fn shortest_path_pruned(mesh: &Mesh, s: u32, t: u32, bound: Option<f64>) -> Result<PathResult, PathError> {
    let n = mesh.num_vertices();
    if s == t || s as usize >= n || t as usize >= n {
        return Err(PathError::BadEndpoints);
    }
    let (ps, pt) = (mesh.vertex(s), mesh.vertex(t));
    let limit = bound.map(|b| b * (1.0 + 1e-9));
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NONE; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[s as usize] = 0.0;
    heap.push(Entry { dist: 0.0, v: s });
    while let Some(Entry { dist: d, v }) = heap.pop() {
        if done[v as usize] {
            continue;
        }
        done[v as usize] = true;
        if v == t {
            break;
        }
        let pv = mesh.vertex(v);
        mesh.for_each_neighbor(v, |w| {
            if done[w as usize] {
                return;
            }
            let pw = mesh.vertex(w);
            if let Some(lim) = limit {
                if pw.dist(ps) + pw.dist(pt) > lim {
                    return;
                }
            }
            let nd = d + pv.dist(pw);
            let wi = w as usize;
            if nd < dist[wi] || (nd == dist[wi] && v < pred[wi]) {
                dist[wi] = nd;
                pred[wi] = v;
                heap.push(Entry { dist: nd, v: w });
            }
        });
    }
    if !done[t as usize] {
        return Err(PathError::Unreachable);
    }
    let mut vs = vec![t];
    let mut v = t;
    while v != s {
        v = pred[v as usize];
        vs.push(v);
    }
    vs.reverse();
    Ok(PathResult::from_vertices(mesh, vs))
}

pub fn shortest_path_in(mesh: &Mesh, s: u32, t: u32) -> Result<PathResult, PathError> {
    shortest_path_pruned(mesh, s, t, None)
}

pub fn shortest_path(inst: &Instance) -> Result<PathResult, PathError> {
    shortest_path_in(&inst.mesh, inst.s, inst.t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::{build, InsertionOrder};
    use crate::geom::Point;

    #[test]
    fn direct_edge_is_shortest() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, 1.0), Point::new(0.5, -1.0)];
        let m = build(&pts, InsertionOrder::Input).unwrap();
        assert!(m.has_edge(0, 1));
        let sp = shortest_path_in(&m, 0, 1).unwrap();
        assert_eq!(sp.vertices, vec![0, 1]);
        assert_eq!(sp.length, 1.0);
    }

    #[test]
    fn detour_through_the_flatter_side() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, 0.1), Point::new(0.5, -0.3)];
        let m = build(&pts, InsertionOrder::Input).unwrap();
        let sp = shortest_path_in(&m, 0, 1).unwrap();
        assert_eq!(sp.vertices, vec![0, 2, 1]);
        let pruned = shortest_path_pruned(&m, 0, 1, Some(sp.length)).unwrap();
        assert_eq!(pruned, sp);
    }
}
