//! Incremental Delaunay triangulation and queries on the finished mesh.

mod builder;
mod hilbert;

pub use hilbert::hilbert_order;

use std::io::{self, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geom::{incircle_ccw, orient2d, Point, Sign};

/// Missing neighbor (hull edge) or missing triangle.
pub const NONE: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DelaunayError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("all points are collinear")]
    AllCollinear,
    #[error("points {0} and {1} coincide")]
    Duplicate(u32, u32),
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(u32),
    #[error("internal triangulation error: {0}")]
    Internal(&'static str),
    #[error("edge {0} of triangle {1} cannot be flipped")]
    NotFlippable(usize, u32),
}

/// Order in which points are fed to the incremental builder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InsertionOrder {
    /// As given.
    Input,
    /// Along a Hilbert curve over the bounding box.
    #[default]
    Hilbert,
    /// A seeded random permutation.
    Shuffled(u64),
}

/// Result of a point location query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    /// Lowest-id triangle whose closed region contains the point.
    Triangle(u32),
    /// The point lies outside the convex hull.
    Outside,
}

/// Finite Delaunay triangulation. Vertex ids are the input indices;
/// triangles are counterclockwise; `neighbors[t][i]` is across the edge
/// opposite corner `i`, or [`NONE`] on the hull.
#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[u32; 3]>,
    neighbors: Vec<[u32; 3]>,
    vertex_triangle: Vec<u32>,
}

/// Triangulates `points`.
pub fn build(points: &[Point], order: InsertionOrder) -> Result<Mesh, DelaunayError> {
    if points.len() < 3 {
        return Err(DelaunayError::TooFewPoints(points.len()));
    }
    if points.len() >= NONE as usize {
        return Err(DelaunayError::Internal("too many points"));
    }
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(DelaunayError::NonFinite(i as u32));
    }
    let ord: Vec<u32> = match order {
        InsertionOrder::Input => (0..points.len() as u32).collect(),
        InsertionOrder::Hilbert => hilbert_order(points),
        InsertionOrder::Shuffled(seed) => {
            let mut v: Vec<u32> = (0..points.len() as u32).collect();
            v.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            v
        }
    };
    builder::Builder::new(points).run(&ord)
}

impl Mesh {
    fn from_parts(vertices: Vec<Point>, triangles: Vec<[u32; 3]>, neighbors: Vec<[u32; 3]>) -> Mesh {
        let mut vertex_triangle = vec![NONE; vertices.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if vertex_triangle[v as usize] == NONE {
                    vertex_triangle[v as usize] = t as u32;
                }
            }
        }
        Mesh {
            vertices,
            triangles,
            neighbors,
            vertex_triangle,
        }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: u32) -> Point {
        self.vertices[v as usize]
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: u32) -> [u32; 3] {
        self.triangles[t as usize]
    }

    pub fn neighbors(&self, t: u32) -> [u32; 3] {
        self.neighbors[t as usize]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Some triangle incident to `v`.
    pub fn vertex_triangle(&self, v: u32) -> u32 {
        self.vertex_triangle[v as usize]
    }

    pub fn triangle_points(&self, t: u32) -> [Point; 3] {
        self.triangles[t as usize].map(|v| self.vertices[v as usize])
    }

    /// Position of `v` in triangle `t`.
    pub fn corner_of(&self, t: u32, v: u32) -> Option<usize> {
        self.triangles[t as usize].iter().position(|&w| w == v)
    }

    // First triangle of the counterclockwise sweep around `v`: the clockwise
    // extreme on the hull, or `vertex_triangle` for interior vertices.
    fn sweep_start(&self, v: u32) -> u32 {
        let t0 = self.vertex_triangle[v as usize];
        let mut t = t0;
        loop {
            let i = self.corner_of(t, v).expect("vertex in triangle");
            let n = self.neighbors[t as usize][(i + 2) % 3];
            if n == NONE {
                return t;
            }
            if n == t0 {
                return t0;
            }
            t = n;
        }
    }

    /// Calls `f(t, i)` for each triangle `t` around `v` in counterclockwise
    /// order, where `i` is the corner of `v` in `t`. Returns whether `v` is
    /// on the hull.
    pub fn for_each_around(&self, v: u32, mut f: impl FnMut(u32, usize)) -> bool {
        let start = self.sweep_start(v);
        let mut t = start;
        loop {
            let i = self.corner_of(t, v).expect("vertex in triangle");
            f(t, i);
            let n = self.neighbors[t as usize][(i + 1) % 3];
            if n == NONE {
                return true;
            }
            if n == start {
                return false;
            }
            t = n;
        }
    }

    /// Triangles incident to `v`, in counterclockwise order around it.
    pub fn triangles_around(&self, v: u32) -> Vec<u32> {
        let mut out = Vec::new();
        self.for_each_around(v, |t, _| out.push(t));
        out
    }

    /// Calls `f` on every vertex joined to `v` by an edge, counterclockwise.
    pub fn for_each_neighbor(&self, v: u32, mut f: impl FnMut(u32)) {
        let mut last = NONE;
        let hull = self.for_each_around(v, |t, i| {
            let tri = self.triangles[t as usize];
            f(tri[(i + 1) % 3]);
            last = tri[(i + 2) % 3];
        });
        if hull {
            f(last);
        }
    }

    /// Vertices joined to `v` by an edge.
    pub fn vertex_neighbors(&self, v: u32, out: &mut Vec<u32>) {
        out.clear();
        self.for_each_neighbor(v, |w| out.push(w));
    }

    /// Undirected edges `(a, b)` with each edge listed once.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.triangles.iter().enumerate().flat_map(move |(t, tri)| {
            (0..3).filter_map(move |i| {
                let n = self.neighbors[t][i];
                if n == NONE || (t as u32) < n {
                    Some((tri[(i + 1) % 3], tri[(i + 2) % 3]))
                } else {
                    None
                }
            })
        })
    }

    pub fn hull_edge_count(&self) -> usize {
        self.neighbors.iter().flatten().filter(|&&n| n == NONE).count()
    }

    /// Whether edge `(a, b)` is in the mesh.
    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        let mut found = false;
        self.for_each_neighbor(a, |w| found |= w == b);
        found
    }

    fn contains_closed(&self, t: u32, p: Point) -> bool {
        let [a, b, c] = self.triangle_points(t);
        orient2d(a, b, p) != Sign::Negative && orient2d(b, c, p) != Sign::Negative && orient2d(c, a, p) != Sign::Negative
    }

    /// Finds a triangle containing `p` by walking from `hint`.
    pub fn locate(&self, p: Point, hint: Option<u32>) -> Location {
        if self.triangles.is_empty() {
            return Location::Outside;
        }
        let mut t = hint.filter(|&h| (h as usize) < self.triangles.len()).unwrap_or(0);
        let cap = 4 * self.triangles.len() + 64;
        let mut rot = 0usize;
        let mut found = None;
        'walk: for _ in 0..cap {
            let tri = self.triangle_points(t);
            rot = (rot + 1) % 3;
            for k in 0..3 {
                let i = (k + rot) % 3;
                if orient2d(tri[(i + 1) % 3], tri[(i + 2) % 3], p) == Sign::Negative {
                    let n = self.neighbors[t as usize][i];
                    if n == NONE {
                        return Location::Outside;
                    }
                    t = n;
                    continue 'walk;
                }
            }
            found = Some(t);
            break;
        }
        let t = match found {
            Some(t) => t,
            None => match (0..self.triangles.len() as u32).find(|&t| self.contains_closed(t, p)) {
                Some(t) => t,
                None => return Location::Outside,
            },
        };
        Location::Triangle(self.lowest_containing(t, p))
    }

    // On an edge or a vertex several triangles contain `p`; pick the lowest id.
    fn lowest_containing(&self, t: u32, p: Point) -> u32 {
        let tri = self.triangles[t as usize];
        if let Some(&v) = tri.iter().find(|&&v| self.vertex(v) == p) {
            return *self.triangles_around(v).iter().min().expect("nonempty star");
        }
        let pts = self.triangle_points(t);
        let mut best = t;
        for i in 0..3 {
            if orient2d(pts[(i + 1) % 3], pts[(i + 2) % 3], p) == Sign::Zero {
                let n = self.neighbors[t as usize][i];
                if n != NONE {
                    best = best.min(n);
                }
            }
        }
        best
    }

    /// Brute-force check: every triangle is counterclockwise and its open
    /// circumdisk holds no vertex.
    pub fn verify_delaunay(&self) -> bool {
        self.triangles.iter().all(|tri| {
            let [a, b, c] = tri.map(|v| self.vertices[v as usize]);
            orient2d(a, b, c) == Sign::Positive
                && self
                    .vertices
                    .iter()
                    .enumerate()
                    .all(|(v, &d)| tri.contains(&(v as u32)) || incircle_ccw(a, b, c, d) != Sign::Positive)
        })
    }

    /// Checks adjacency symmetry, edge orientation and Euler's relation.
    pub fn check_topology(&self) -> Result<(), String> {
        for (t, tri) in self.triangles.iter().enumerate() {
            for i in 0..3 {
                let n = self.neighbors[t][i];
                if n == NONE {
                    continue;
                }
                let (u, v) = (tri[(i + 1) % 3], tri[(i + 2) % 3]);
                let nt = self.triangles[n as usize];
                let j = (0..3)
                    .find(|&j| nt[(j + 1) % 3] == v && nt[(j + 2) % 3] == u)
                    .ok_or_else(|| format!("triangle {n} does not share edge ({u},{v}) with {t}"))?;
                if self.neighbors[n as usize][j] != t as u32 {
                    return Err(format!("asymmetric adjacency between {t} and {n}"));
                }
            }
        }
        let h = self.hull_edge_count();
        let used = self.vertex_triangle.iter().filter(|&&t| t != NONE).count();
        if self.triangles.len() + h + 2 != 2 * used {
            return Err(format!(
                "Euler relation fails: T={} V={} H={}",
                self.triangles.len(),
                used,
                h
            ));
        }
        Ok(())
    }

    /// Set of triangles as sorted vertex triples, for order-free comparison.
    pub fn canonical_triangles(&self) -> Vec<[u32; 3]> {
        let mut out: Vec<[u32; 3]> = self
            .triangles
            .iter()
            .map(|t| {
                let mut s = *t;
                s.sort_unstable();
                s
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Flips the edge opposite corner `i` of triangle `t`. The result need
    /// not be Delaunay; this exists to build counterexamples.
    pub fn flip_edge(&mut self, t: u32, i: usize) -> Result<(), DelaunayError> {
        let n = self.neighbors[t as usize][i];
        if n == NONE {
            return Err(DelaunayError::NotFlippable(i, t));
        }
        let tri = self.triangles[t as usize];
        let (a, u, v) = (tri[i], tri[(i + 1) % 3], tri[(i + 2) % 3]);
        let nt = self.triangles[n as usize];
        let j = (0..3)
            .find(|&j| nt[(j + 1) % 3] == v && nt[(j + 2) % 3] == u)
            .ok_or(DelaunayError::Internal("inconsistent adjacency"))?;
        let b = nt[j];
        let (pa, pb, pu, pv) = (self.vertex(a), self.vertex(b), self.vertex(u), self.vertex(v));
        if orient2d(pa, pu, pb) != Sign::Positive || orient2d(pb, pv, pa) != Sign::Positive {
            return Err(DelaunayError::NotFlippable(i, t));
        }
        // Outer neighbors before the flip.
        let n_au = self.neighbors[t as usize][(i + 2) % 3]; // across (a,u)
        let n_va = self.neighbors[t as usize][(i + 1) % 3]; // across (v,a)
        let n_ub = self.neighbors[n as usize][(j + 1) % 3]; // across (b,u)... edge (u,b)
        let n_bv = self.neighbors[n as usize][(j + 2) % 3]; // across (v,b)
        // New triangles: t = (a, u, b), n = (b, v, a).
        self.triangles[t as usize] = [a, u, b];
        self.neighbors[t as usize] = [n_ub, n, n_au];
        self.triangles[n as usize] = [b, v, a];
        self.neighbors[n as usize] = [n_va, t, n_bv];
        for (outer, old, new) in [(n_ub, n, t), (n_va, t, n)] {
            if outer != NONE {
                for s in self.neighbors[outer as usize].iter_mut() {
                    if *s == old {
                        *s = new;
                    }
                }
            }
        }
        for &(w, tt) in &[(a, t), (u, t), (b, n), (v, n)] {
            self.vertex_triangle[w as usize] = tt;
        }
        Ok(())
    }

    /// Plain-text OFF listing (z = 0).
    pub fn write_off<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "OFF")?;
        writeln!(w, "{} {} 0", self.vertices.len(), self.triangles.len())?;
        for p in &self.vertices {
            writeln!(w, "{} {} 0", p.x, p.y)?;
        }
        for t in &self.triangles {
            writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn single_triangle() {
        let m = build(&[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)], InsertionOrder::Input).unwrap();
        assert_eq!(m.num_triangles(), 1);
        assert!(m.verify_delaunay());
        m.check_topology().unwrap();
    }

    #[test]
    fn unbuildable_inputs() {
        assert_eq!(build(&[p(0.0, 0.0), p(1.0, 0.0)], InsertionOrder::Input).unwrap_err(), DelaunayError::TooFewPoints(2));
        let line: Vec<Point> = (0..5).map(|i| p(i as f64, 2.0 * i as f64)).collect();
        assert_eq!(build(&line, InsertionOrder::Hilbert).unwrap_err(), DelaunayError::AllCollinear);
        let dup = [p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(1.0, 0.0)];
        assert_eq!(build(&dup, InsertionOrder::Input).unwrap_err(), DelaunayError::Duplicate(1, 3));
        let nan = [p(0.0, 0.0), p(f64::NAN, 0.0), p(0.0, 1.0)];
        assert_eq!(build(&nan, InsertionOrder::Input).unwrap_err(), DelaunayError::NonFinite(1));
    }

    #[test]
    fn quad_diagonal_follows_empty_circle() {
        let pts = [p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(0.9, 0.9)];
        let m = build(&pts, InsertionOrder::Input).unwrap();
        assert_eq!(m.num_triangles(), 2);
        // Oracle: diagonal (1,2) is legal iff 3 is outside circle(0,1,2).
        let d12_legal = incircle_ccw(pts[0], pts[1], pts[2], pts[3]) != Sign::Positive;
        assert!(!d12_legal);
        assert!(m.has_edge(0, 3));
        assert!(!m.has_edge(1, 2));
    }

    #[test]
    fn collinear_points_on_the_hull() {
        let pts = [p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0), p(3.0, 0.0), p(1.5, 1.0), p(1.5, -1.0)];
        for order in [InsertionOrder::Input, InsertionOrder::Hilbert, InsertionOrder::Shuffled(3)] {
            let m = build(&pts, order).unwrap();
            assert!(m.verify_delaunay());
            m.check_topology().unwrap();
        }
        // Outside points collinear with a hull edge, inserted in sequence.
        let pts: Vec<Point> = (0..8).map(|i| p(i as f64, 0.0)).chain([p(3.5, 2.0)]).collect();
        let m = build(&pts, InsertionOrder::Input).unwrap();
        assert_eq!(m.num_triangles(), 7);
        m.check_topology().unwrap();
    }

    #[test]
    fn cocircular_grid() {
        let pts: Vec<Point> = (0..6).flat_map(|i| (0..6).map(move |j| p(i as f64, j as f64))).collect();
        for order in [InsertionOrder::Input, InsertionOrder::Hilbert, InsertionOrder::Shuffled(9)] {
            let m = build(&pts, order).unwrap();
            assert_eq!(m.num_triangles(), 50);
            assert!(m.verify_delaunay());
            m.check_topology().unwrap();
        }
    }

    #[test]
    fn locate_ties_pick_lowest_triangle() {
        let pts = [p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(0.9, 0.9)];
        let m = build(&pts, InsertionOrder::Input).unwrap();
        // midpoint of the shared diagonal (0,3)
        assert_eq!(m.locate(p(0.45, 0.45), Some(1)), Location::Triangle(0));
        assert_eq!(m.locate(p(0.0, 0.0), Some(1)), Location::Triangle(0));
        assert_eq!(m.locate(p(5.0, 5.0), None), Location::Outside);
        for t in 0..m.num_triangles() as u32 {
            let [a, b, c] = m.triangle_points(t);
            let g = p((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0);
            assert_eq!(m.locate(g, None), Location::Triangle(t));
        }
    }

    #[test]
    fn flip_breaks_delaunay() {
        let pts = [p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0), p(0.9, 0.9), p(-1.0, -1.0)];
        let mut m = build(&pts, InsertionOrder::Input).unwrap();
        assert!(m.verify_delaunay());
        let (t, i) = (0..m.num_triangles() as u32)
            .flat_map(|t| (0..3).map(move |i| (t, i)))
            .find(|&(t, i)| {
                let tri = m.triangle(t);
                let e = [tri[(i + 1) % 3], tri[(i + 2) % 3]];
                e.contains(&0) && e.contains(&3)
            })
            .unwrap();
        m.flip_edge(t, i).unwrap();
        m.check_topology().unwrap();
        assert!(m.has_edge(1, 2));
        assert!(!m.verify_delaunay());
    }

    #[test]
    fn stars_are_counterclockwise() {
        let pts = [p(0.0, 0.0), p(2.0, 0.0), p(1.0, 2.0), p(1.0, 0.7), p(-1.0, 1.0)];
        let m = build(&pts, InsertionOrder::Input).unwrap();
        for v in 0..pts.len() as u32 {
            let mut nb = Vec::new();
            m.vertex_neighbors(v, &mut nb);
            let c = m.vertex(v);
            let ang: Vec<f64> = nb.iter().map(|&w| (m.vertex(w).y - c.y).atan2(m.vertex(w).x - c.x)).collect();
            // successive neighbors turn counterclockwise by less than π
            for w in ang.windows(2) {
                let d = (w[1] - w[0]).rem_euclid(2.0 * std::f64::consts::PI);
                assert!(d > 0.0 && d < std::f64::consts::PI);
            }
            let mut sorted = nb.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), nb.len());
        }
        // the interior vertex 3 sees all four others
        let mut nb = Vec::new();
        m.vertex_neighbors(3, &mut nb);
        assert_eq!(nb.len(), 4);
    }

    #[test]
    fn off_dump() {
        let m = build(&[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)], InsertionOrder::Input).unwrap();
        let mut buf = Vec::new();
        m.write_off(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("OFF\n3 1 0\n"));
        assert!(s.ends_with("3 0 1 2\n"));
    }
}
