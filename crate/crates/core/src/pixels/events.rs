use std::cell::Cell;
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use serde::Serialize;

use super::{eps_rho, Pixel, PixelError, PixelParams};
use crate::delaunay::{Location, Mesh, NONE};
use crate::geom::{circumcircle, edge_angle_and_hproj, Point, Rect, Segment};
use crate::sampling::{Instance, Window};

/// A mesh together with the window it was sampled in and, for `s`–`t`
/// instances, the two endpoints.
pub struct PixelContext<'a> {
    pub mesh: &'a Mesh,
    pub window: Window,
    pub endpoints: Option<(Point, Point)>,
    hint: Cell<u32>,
}

impl<'a> PixelContext<'a> {
    pub fn new(mesh: &'a Mesh, window: Window, endpoints: Option<(Point, Point)>) -> Self {
        PixelContext { mesh, window, endpoints, hint: Cell::new(0) }
    }

    pub fn from_instance(inst: &'a Instance) -> Self {
        Self::new(&inst.mesh, inst.window, Some((inst.s_point(), inst.t_point())))
    }

    /// `‖s−v‖ ≥ 2` and `‖t−v‖ ≥ 2`; vacuous without endpoints.
    pub fn away_from_endpoints(&self, v: Pixel) -> bool {
        match self.endpoints {
            Some((s, t)) => s.dist(v.center()) >= 2.0 && t.dist(v.center()) >= 2.0,
            None => true,
        }
    }

    fn require_inside(&self, v: Pixel, r: &Rect) -> Result<(), PixelError> {
        if self.window.contains_rect(r) {
            Ok(())
        } else {
            Err(PixelError::WindowTooSmall(v.x, v.y))
        }
    }

    /// Triangles whose closed region meets `region`, found by a breadth-first
    /// search over edge-adjacent triangles from the one containing `start`.
    /// The triangles meeting a convex set with nonempty interior are
    /// connected through shared edges, so the search is complete.
    fn triangles_meeting(&self, start: Point, region: &Rect) -> Vec<u32> {
        let t0 = match self.mesh.locate(start, Some(self.hint.get())) {
            Location::Triangle(t) => t,
            Location::Outside => return Vec::new(),
        };
        self.hint.set(t0);
        let mut seen = HashSet::from([t0]);
        let mut stack = vec![t0];
        let mut out = Vec::new();
        while let Some(t) = stack.pop() {
            if !region.meets_triangle(self.mesh.triangle_points(t)) {
                continue;
            }
            out.push(t);
            for n in self.mesh.neighbors(t) {
                if n != NONE && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        out.sort_unstable();
        out
    }

    // Distinct edges of the given triangles, smaller id first.
    fn edges_of(&self, tris: &[u32]) -> Vec<(u32, u32)> {
        let mut edges: Vec<(u32, u32)> = tris
            .iter()
            .flat_map(|&t| {
                let v = self.mesh.triangle(t);
                (0..3).map(move |i| {
                    let (a, b) = (v[i], v[(i + 1) % 3]);
                    (a.min(b), a.max(b))
                })
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
    }
}

fn check_eps(eps: f64) -> Result<(), PixelError> {
    if eps.is_finite() && eps >= 0.0 {
        Ok(())
    } else {
        Err(PixelError::BadEpsilon(eps))
    }
}

/// `I_ε(v)`: `v` is at distance at least 2 from `s` and `t`, and every
/// Delaunay triangle meeting `C^ε(v)` has its circumdisk inside `C_2(v)`.
pub fn independence_event(ctx: &PixelContext, v: Pixel, eps: f64) -> Result<bool, PixelError> {
    check_eps(eps)?;
    if !ctx.away_from_endpoints(v) {
        return Ok(false);
    }
    let big = v.square_scaled(2);
    ctx.require_inside(v, &big)?;
    let tris = ctx.triangles_meeting(v.center(), &v.square_eps(eps));
    Ok(tris.iter().all(|&t| {
        let [a, b, c] = ctx.mesh.triangle_points(t);
        circumcircle(a, b, c).map(|d| d.inside_rect(&big)).unwrap_or(false)
    }))
}

/// A crossing of the column `[x_v−½, x_v+½]` along Delaunay edges, with the
/// first and last edges clipped to the two vertical lines.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub points: Vec<Point>,
    pub edges: Vec<(u32, u32)>,
    pub length: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Node {
    Vertex(u32),
    // Crossing of edge `i` (index into the local edge list) with the left
    // or right line.
    Left(usize),
    Right(usize),
}

// (to, weight, touches C(v), mesh edge)
type Arc = (usize, f64, bool, (u32, u32));

/// `H_ρ(v)`: the shortest column crossing that meets `C(v)`, if its clipped
/// length is at most `1+ρ`.
///
/// Every crossing of length at most `1+ρ` that meets `C(v)` stays inside
/// `C^{ε_ρ}(v)`, so only edges of triangles meeting that square are searched.
/// The search is a Dijkstra over (node, touched `C(v)`) states whose nodes are
/// vertices inside the closed column and clipped crossing points on its two
/// lines.
pub fn strong_horizontality(ctx: &PixelContext, v: Pixel, rho: f64) -> Result<Option<Witness>, PixelError> {
    if !(rho.is_finite() && rho >= 0.0) {
        return Err(PixelError::BadRho(rho));
    }
    let limit = 1.0 + rho;
    let reach = eps_rho(rho) * (1.0 + 1e-9) + 1e-12;
    let region = v.square_eps(reach);
    ctx.require_inside(v, &region)?;
    let pixel = v.square();
    let (xl, xr) = (v.x as f64 - 0.5, v.x as f64 + 0.5);
    let mesh = ctx.mesh;
    let edges = ctx.edges_of(&ctx.triangles_meeting(v.center(), &region));

    let mut ids: HashMap<Node, usize> = HashMap::new();
    let mut nodes: Vec<(Node, Point)> = Vec::new();
    let mut id_of = |node: Node, p: Point, nodes: &mut Vec<(Node, Point)>| {
        *ids.entry(node).or_insert_with(|| {
            nodes.push((node, p));
            nodes.len() - 1
        })
    };
    let mut adj: Vec<Vec<Arc>> = Vec::new();
    for (i, &(a, b)) in edges.iter().enumerate() {
        let (pa, pb) = (mesh.vertex(a), mesh.vertex(b));
        let ((va, qa), (vb, qb)) = if pa.x <= pb.x { ((a, pa), (b, pb)) } else { ((b, pb), (a, pa)) };
        if qb.x < xl || qa.x > xr {
            continue;
        }
        let at_x = |x: f64| Point::new(x, qa.y + (qb.y - qa.y) * (x - qa.x) / (qb.x - qa.x));
        let (n0, p0) = if qa.x >= xl { (Node::Vertex(va), qa) } else { (Node::Left(i), at_x(xl)) };
        let (n1, p1) = if qb.x <= xr { (Node::Vertex(vb), qb) } else { (Node::Right(i), at_x(xr)) };
        let i0 = id_of(n0, p0, &mut nodes);
        let i1 = id_of(n1, p1, &mut nodes);
        if adj.len() < nodes.len() {
            adj.resize(nodes.len(), Vec::new());
        }
        let w = p0.dist(p1);
        let touch = pixel.meets_segment(pa, pb);
        adj[i0].push((i1, w, touch, (a, b)));
        adj[i1].push((i0, w, touch, (a, b)));
    }
    adj.resize(nodes.len(), Vec::new());

    let is_source = |k: usize| match nodes[k].0 {
        Node::Left(_) => true,
        Node::Vertex(_) => nodes[k].1.x == xl,
        Node::Right(_) => false,
    };
    let is_target = |k: usize| match nodes[k].0 {
        Node::Right(_) => true,
        Node::Vertex(_) => nodes[k].1.x == xr,
        Node::Left(_) => false,
    };

    // State index = 2 * node + touched.
    let m = nodes.len();
    let mut dist = vec![f64::INFINITY; 2 * m];
    let mut pred: Vec<Option<(usize, (u32, u32))>> = vec![None; 2 * m];
    let mut heap = BinaryHeap::new();
    for (k, node) in nodes.iter().enumerate() {
        if is_source(k) {
            // A clipped crossing point only counts as touching through its edge.
            let on_pixel = matches!(node.0, Node::Vertex(_)) && pixel.contains(node.1);
            let st = 2 * k + usize::from(on_pixel);
            dist[st] = 0.0;
            heap.push(Reverse((OrdF64(0.0), st)));
        }
    }
    let mut done = vec![false; 2 * m];
    while let Some(Reverse((OrdF64(d), st))) = heap.pop() {
        if done[st] {
            continue;
        }
        done[st] = true;
        if d > limit {
            break;
        }
        let (k, touched) = (st / 2, st % 2 == 1);
        if touched && is_target(k) {
            return Ok(Some(rebuild(&nodes, &pred, st, d)));
        }
        for &(to, w, touch, e) in &adj[k] {
            let ns = 2 * to + usize::from(touched || touch);
            let nd = d + w;
            if nd < dist[ns] {
                dist[ns] = nd;
                pred[ns] = Some((st, e));
                heap.push(Reverse((OrdF64(nd), ns)));
            }
        }
    }
    Ok(None)
}

fn rebuild(nodes: &[(Node, Point)], pred: &[Option<(usize, (u32, u32))>], end: usize, length: f64) -> Witness {
    let mut points = vec![nodes[end / 2].1];
    let mut edges = Vec::new();
    let mut st = end;
    while let Some((p, e)) = pred[st] {
        points.push(nodes[p / 2].1);
        edges.push(e);
        st = p;
    }
    points.reverse();
    edges.reverse();
    Witness { points, edges, length }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// `L_{ε,α}(v)`: total horizontal projection of the Delaunay edges that meet
/// `C^ε(v)` and make an angle at most `α` with the x-axis.
pub fn weak_horizontality_length(ctx: &PixelContext, v: Pixel, eps: f64, alpha: f64) -> Result<f64, PixelError> {
    check_eps(eps)?;
    let sq = v.square_eps(eps);
    let outer = if eps <= 0.5 { v.square_scaled(2) } else { sq };
    ctx.require_inside(v, &outer)?;
    let mesh = ctx.mesh;
    let mut total = 0.0;
    for (a, b) in ctx.edges_of(&ctx.triangles_meeting(v.center(), &sq)) {
        let (pa, pb) = (mesh.vertex(a), mesh.vertex(b));
        if !sq.meets_segment(pa, pb) {
            continue;
        }
        let (angle, h) = edge_angle_and_hproj(&Segment::new(pa, pb)).expect("mesh edges have positive length");
        if angle <= alpha {
            total += h;
        }
    }
    Ok(total)
}

/// Outcome of checking that a strong-horizontality witness implies the
/// weak property.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StrongWeak {
    /// The witness lies in `C^{ε_ρ}(v)`.
    pub inside: bool,
    /// `L_{ε_ρ, α_{ρ,κ}}(v)`.
    pub weak_length: f64,
    /// `L ≥ 1/κ`.
    pub weak: bool,
    pub ok: bool,
}

/// Checks a witness of `H_ρ(v)` against `C^{ε_ρ}(v)` and `H'`. Containment
/// allows `1e-9` of slack for the rounded clipping points.
pub fn strong_implies_weak_check(
    ctx: &PixelContext,
    v: Pixel,
    params: &PixelParams,
    witness: &Witness,
) -> Result<StrongWeak, PixelError> {
    let eps = params.eps();
    let sq = v.square_eps(eps + 1e-9);
    let inside = witness.points.iter().all(|&p| sq.contains(p));
    let weak_length = weak_horizontality_length(ctx, v, eps, params.alpha())?;
    let weak = weak_length >= 1.0 / params.kappa;
    Ok(StrongWeak { inside, weak_length, weak, ok: inside && weak })
}

/// Events at one pixel. The horizontality search only runs when `I_{ε_ρ}`
/// holds, since otherwise `H_ρ ∨ ¬I_{ε_ρ}` is already decided.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PixelClass {
    pub independent: bool,
    pub witness: Option<Witness>,
}

impl PixelClass {
    /// `H_ρ(v) ∨ ¬I_{ε_ρ}(v)`.
    pub fn bad(&self) -> bool {
        !self.independent || self.witness.is_some()
    }
}

pub fn classify_pixel(ctx: &PixelContext, v: Pixel, rho: f64) -> Result<PixelClass, PixelError> {
    let independent = independence_event(ctx, v, eps_rho(rho))?;
    let witness = if independent { strong_horizontality(ctx, v, rho)? } else { None };
    Ok(PixelClass { independent, witness })
}
