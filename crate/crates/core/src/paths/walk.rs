use std::collections::HashMap;

use super::{PathError, PathResult, WalkResult};
use crate::delaunay::{Mesh, NONE};
use crate::geom::{orient2d, Sign};
use crate::sampling::Instance;

fn check_endpoints(mesh: &Mesh, s: u32, t: u32) -> Result<(), PathError> {
    let n = mesh.num_vertices() as u32;
    if s == t || s >= n || t >= n || mesh.vertex(s) == mesh.vertex(t) {
        return Err(PathError::BadEndpoints);
    }
    Ok(())
}

/// Straight walk along `[s, t]`. Each step leaves the current triangle
/// through the edge whose endpoints lie on opposite sides of the line `st`.
pub fn straight_walk_in(mesh: &Mesh, s: u32, t: u32) -> Result<WalkResult, PathError> {
    check_endpoints(mesh, s, t)?;
    let (ps, pt) = (mesh.vertex(s), mesh.vertex(t));
    let side = |v: u32| orient2d(ps, pt, mesh.vertex(v));
    let ahead = |v: u32| {
        let p = mesh.vertex(v);
        (p.x - ps.x) * (pt.x - ps.x) + (p.y - ps.y) * (pt.y - ps.y) > 0.0
    };

    let mut start = None;
    let mut degenerate = None;
    mesh.for_each_around(s, |tri, i| {
        let vs = mesh.triangle(tri);
        let (a, b) = (vs[(i + 1) % 3], vs[(i + 2) % 3]);
        let (sa, sb) = (side(a), side(b));
        if sa == Sign::Negative && sb == Sign::Positive {
            start = Some((tri, a, b));
        }
        for (v, sv) in [(a, sa), (b, sb)] {
            if sv == Sign::Zero && ahead(v) {
                degenerate = Some(v);
            }
        }
    });
    if let Some(v) = degenerate {
        return Err(PathError::Degenerate(v));
    }
    let (t0, mut r, mut l) = start.ok_or(PathError::WalkExitsHull(mesh.vertex_triangle(s)))?;

    let mut triangles = vec![t0];
    let mut upper = vec![l];
    let mut lower = vec![r];
    let mut cur = t0;
    loop {
        let vs = mesh.triangle(cur);
        let k = (0..3).find(|&k| vs[k] != r && vs[k] != l).expect("triangle has a third vertex");
        let next = mesh.neighbors(cur)[k];
        if next == NONE {
            return Err(PathError::WalkExitsHull(cur));
        }
        triangles.push(next);
        let ns = mesh.triangle(next);
        let c = *ns.iter().find(|&&v| v != r && v != l).expect("triangle has a third vertex");
        if c == t {
            break;
        }
        match side(c) {
            Sign::Zero => return Err(PathError::Degenerate(c)),
            Sign::Positive => l = c,
            Sign::Negative => r = c,
        }
        upper.push(l);
        lower.push(r);
        cur = next;
    }
    Ok(WalkResult {
        crossed_edges: triangles.len() - 1,
        triangles,
        upper,
        lower,
    })
}

pub fn straight_walk(inst: &Instance) -> Result<WalkResult, PathError> {
    straight_walk_in(&inst.mesh, inst.s, inst.t)
}

/// Upper boundary of the corridor: `s`, the upper endpoint of every crossed
/// edge, then `t`. A vertex that leaves and later re-enters the boundary
/// makes the path run back over the same edge.
pub fn upper_path_from_walk(mesh: &Mesh, walk: &WalkResult, s: u32, t: u32) -> PathResult {
    let mut vs = Vec::with_capacity(walk.upper.len() + 2);
    vs.push(s);
    for &v in walk.upper.iter().chain(std::iter::once(&t)) {
        if *vs.last().expect("nonempty") != v {
            vs.push(v);
        }
    }
    PathResult::from_vertices(mesh, vs)
}

pub fn upper_path_in(mesh: &Mesh, s: u32, t: u32) -> Result<PathResult, PathError> {
    let w = straight_walk_in(mesh, s, t)?;
    Ok(upper_path_from_walk(mesh, &w, s, t))
}

pub fn upper_path(inst: &Instance) -> Result<PathResult, PathError> {
    upper_path_in(&inst.mesh, inst.s, inst.t)
}

/// Greedy path: from `w`, look at the last corridor triangle containing
/// `w` and take the edge at `w` whose direction `w → v` makes the smaller
/// angle `|atan2(dy, dx)|` with the positive x-axis. Equal angles go to the
/// smaller id.
///
/// The corridor index strictly increases until the last triangle, and in
/// the last triangle the two non-`t` vertices cannot point at each other,
/// so the revisit guard never fires on a valid walk.
pub fn greedy_path_from_walk(mesh: &Mesh, walk: &WalkResult, s: u32, t: u32) -> Result<PathResult, PathError> {
    let mut last: HashMap<u32, usize> = HashMap::with_capacity(2 * walk.triangles.len() + 2);
    for (i, &tri) in walk.triangles.iter().enumerate() {
        for v in mesh.triangle(tri) {
            last.insert(v, i);
        }
    }
    let angle = |a: u32, b: u32| {
        let (pa, pb) = (mesh.vertex(a), mesh.vertex(b));
        (pb.y - pa.y).atan2(pb.x - pa.x).abs()
    };
    let mut path = vec![s];
    let mut w = s;
    let mut seen = std::collections::HashSet::new();
    seen.insert(s);
    while w != t {
        let i = last[&w];
        let tri = mesh.triangle(walk.triangles[i]);
        let mut others = tri.iter().copied().filter(|&v| v != w);
        let (x, y) = (others.next().expect("vertex"), others.next().expect("vertex"));
        let (ax, ay) = (angle(w, x), angle(w, y));
        let next = if ax < ay || (ax == ay && x < y) { x } else { y };
        if !seen.insert(next) {
            return Err(PathError::NoProgress { vertex: next, index: i });
        }
        path.push(next);
        w = next;
    }
    Ok(PathResult::from_vertices(mesh, path))
}

pub fn greedy_path_in(mesh: &Mesh, s: u32, t: u32) -> Result<PathResult, PathError> {
    let w = straight_walk_in(mesh, s, t)?;
    greedy_path_from_walk(mesh, &w, s, t)
}

pub fn greedy_path(inst: &Instance) -> Result<PathResult, PathError> {
    greedy_path_in(&inst.mesh, inst.s, inst.t)
}
