//! Bowyer-Watson insertion over a triangulation closed by ghost triangles.
//!
//! Every hull edge `a -> b` (outside on its left) carries a ghost triangle
//! `[a, b, INF]`. Neighbor slot `i` of a triangle is the triangle across the
//! edge opposite vertex `i`.

use super::{DelaunayError, Mesh, NONE};
use crate::geom::{incircle_ccw, orient2d, Point, Sign};

const INF: u32 = u32::MAX;

pub(super) struct Builder<'a> {
    pts: &'a [Point],
    tri: Vec<[u32; 3]>,
    adj: Vec<[u32; 3]>,
    alive: Vec<bool>,
    mark: Vec<u32>,
    stamp: u32,
    free: Vec<u32>,
    last: u32,
    // Scratch for linking new fan triangles: indexed by vertex, INF at the end.
    start_of: Vec<u32>,
    end_of: Vec<u32>,
    cavity: Vec<u32>,
    stack: Vec<u32>,
    boundary: Vec<(u32, u32, u32)>,
    rot: u32,
}

#[inline]
fn is_ghost(t: &[u32; 3]) -> bool {
    t[2] == INF
}

impl<'a> Builder<'a> {
    pub(super) fn new(pts: &'a [Point]) -> Self {
        let cap = 2 * pts.len() + 8;
        Builder {
            pts,
            tri: Vec::with_capacity(cap),
            adj: Vec::with_capacity(cap),
            alive: Vec::with_capacity(cap),
            mark: Vec::with_capacity(cap),
            stamp: 0,
            free: Vec::new(),
            last: 0,
            start_of: vec![NONE; pts.len() + 1],
            end_of: vec![NONE; pts.len() + 1],
            cavity: Vec::new(),
            stack: Vec::new(),
            boundary: Vec::new(),
            rot: 0,
        }
    }

    #[inline]
    fn p(&self, v: u32) -> Point {
        self.pts[v as usize]
    }

    #[inline]
    fn slot(&self, v: u32) -> usize {
        if v == INF {
            self.pts.len()
        } else {
            v as usize
        }
    }

    /// Builds the triangulation inserting points in `order`.
    pub(super) fn run(mut self, order: &[u32]) -> Result<Mesh, DelaunayError> {
        let (seed, rest) = self.seed_triangle(order)?;
        self.init(seed);
        for &v in &rest {
            self.insert(v)?;
        }
        Ok(self.finish())
    }

    // First two distinct points plus the first point off their line; the
    // remaining points keep their relative order.
    fn seed_triangle(&self, order: &[u32]) -> Result<([u32; 3], Vec<u32>), DelaunayError> {
        let a = order[0];
        let pa = self.p(a);
        let ib = 1;
        let b = *order.get(ib).ok_or(DelaunayError::TooFewPoints(order.len()))?;
        if self.p(b) == pa {
            return Err(DelaunayError::Duplicate(a.min(b), a.max(b)));
        }
        let pb = self.p(b);
        let ic = order
            .iter()
            .enumerate()
            .skip(ib + 1)
            .find(|&(_, &v)| orient2d(pa, pb, self.p(v)) != Sign::Zero)
            .map(|(k, _)| k)
            .ok_or(DelaunayError::AllCollinear)?;
        let c = order[ic];
        let seed = if orient2d(pa, pb, self.p(c)) == Sign::Positive {
            [a, b, c]
        } else {
            [a, c, b]
        };
        let rest = order
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != 0 && k != ib && k != ic)
            .map(|(_, &v)| v)
            .collect();
        Ok((seed, rest))
    }

    fn init(&mut self, s: [u32; 3]) {
        let tris = [
            s,
            [s[1], s[0], INF],
            [s[2], s[1], INF],
            [s[0], s[2], INF],
        ];
        for t in tris {
            self.push(t, [NONE; 3]);
        }
        // Link by matching reversed directed edges.
        for t in 0..4 {
            for i in 0..3 {
                let (u, v) = (tris[t][(i + 1) % 3], tris[t][(i + 2) % 3]);
                for (o, ot) in tris.iter().enumerate() {
                    if o == t {
                        continue;
                    }
                    for j in 0..3 {
                        if ot[(j + 1) % 3] == v && ot[(j + 2) % 3] == u {
                            self.adj[t][i] = o as u32;
                        }
                    }
                }
            }
        }
        self.last = 0;
    }

    fn push(&mut self, t: [u32; 3], a: [u32; 3]) -> u32 {
        if let Some(id) = self.free.pop() {
            self.tri[id as usize] = t;
            self.adj[id as usize] = a;
            self.alive[id as usize] = true;
            id
        } else {
            self.tri.push(t);
            self.adj.push(a);
            self.alive.push(true);
            self.mark.push(0);
            (self.tri.len() - 1) as u32
        }
    }

    fn ghost_conflict(&self, t: &[u32; 3], p: Point) -> bool {
        let (a, b) = (self.p(t[0]), self.p(t[1]));
        match orient2d(a, b, p) {
            Sign::Positive => true,
            Sign::Negative => false,
            Sign::Zero => {
                // Strictly inside the segment.
                let (lo, hi) = if a.x != b.x { (a.x.min(b.x), a.x.max(b.x)) } else { (a.y.min(b.y), a.y.max(b.y)) };
                let c = if a.x != b.x { p.x } else { p.y };
                c > lo && c < hi
            }
        }
    }

    fn conflict(&self, id: u32, p: Point) -> bool {
        let t = &self.tri[id as usize];
        if is_ghost(t) {
            self.ghost_conflict(t, p)
        } else {
            incircle_ccw(self.p(t[0]), self.p(t[1]), self.p(t[2]), p) == Sign::Positive
        }
    }

    // Visibility walk to a triangle in conflict with `p`.
    fn locate(&mut self, v: u32) -> Result<u32, DelaunayError> {
        let p = self.p(v);
        let mut t = self.last;
        if is_ghost(&self.tri[t as usize]) {
            t = self.adj[t as usize][2];
        }
        let cap = 4 * self.tri.len() + 64;
        let mut steps = 0;
        'walk: loop {
            steps += 1;
            if steps > cap {
                return self.scan(v);
            }
            let tr = self.tri[t as usize];
            if is_ghost(&tr) {
                return Ok(t);
            }
            self.rot = (self.rot + 1) % 3;
            for k in 0..3 {
                let i = (k + self.rot as usize) % 3;
                let a = self.p(tr[(i + 1) % 3]);
                let b = self.p(tr[(i + 2) % 3]);
                if orient2d(a, b, p) == Sign::Negative {
                    t = self.adj[t as usize][i];
                    continue 'walk;
                }
            }
            self.check_duplicate(&tr, v)?;
            return Ok(t);
        }
    }

    fn check_duplicate(&self, tr: &[u32; 3], v: u32) -> Result<(), DelaunayError> {
        let p = self.p(v);
        for &w in tr {
            if w != INF && self.p(w) == p {
                return Err(DelaunayError::Duplicate(w.min(v), w.max(v)));
            }
        }
        Ok(())
    }

    // Fallback when the walk exceeds its step budget.
    fn scan(&self, v: u32) -> Result<u32, DelaunayError> {
        let p = self.p(v);
        for (id, tr) in self.tri.iter().enumerate() {
            if !self.alive[id] || is_ghost(tr) {
                continue;
            }
            let inside = (0..3).all(|i| orient2d(self.p(tr[(i + 1) % 3]), self.p(tr[(i + 2) % 3]), p) != Sign::Negative);
            if inside {
                self.check_duplicate(tr, v)?;
                return Ok(id as u32);
            }
        }
        (0..self.tri.len())
            .find(|&id| self.alive[id] && is_ghost(&self.tri[id]) && self.ghost_conflict(&self.tri[id], p))
            .map(|id| id as u32)
            .ok_or(DelaunayError::Internal("no conflict triangle found"))
    }

    fn insert(&mut self, v: u32) -> Result<(), DelaunayError> {
        let p = self.p(v);
        let seed = self.locate(v)?;
        self.stamp += 1;
        let stamp = self.stamp;

        self.cavity.clear();
        self.stack.clear();
        self.mark[seed as usize] = stamp;
        self.stack.push(seed);
        while let Some(t) = self.stack.pop() {
            self.cavity.push(t);
            for i in 0..3 {
                let n = self.adj[t as usize][i];
                if self.mark[n as usize] != stamp && self.conflict(n, p) {
                    self.mark[n as usize] = stamp;
                    self.stack.push(n);
                }
            }
        }

        self.boundary.clear();
        for &t in &self.cavity {
            let tr = self.tri[t as usize];
            for i in 0..3 {
                let n = self.adj[t as usize][i];
                if self.mark[n as usize] != stamp {
                    self.boundary.push((tr[(i + 1) % 3], tr[(i + 2) % 3], n));
                }
            }
        }

        for &t in &self.cavity {
            self.alive[t as usize] = false;
            self.free.push(t);
        }

        let mut new_ids = Vec::with_capacity(self.boundary.len());
        for k in 0..self.boundary.len() {
            let (u, w, outside) = self.boundary[k];
            let id = self.push([u, w, v], [NONE, NONE, outside]);
            // Point the outside triangle back at the new one.
            let on = &mut self.adj[outside as usize];
            let ot = &self.tri[outside as usize];
            for j in 0..3 {
                if ot[(j + 1) % 3] == w && ot[(j + 2) % 3] == u {
                    on[j] = id;
                }
            }
            let su = self.slot(u);
            let sw = self.slot(w);
            self.start_of[su] = id;
            self.end_of[sw] = id;
            new_ids.push(id);
        }
        for &id in &new_ids {
            let [u, w, _] = self.tri[id as usize];
            let a0 = self.start_of[self.slot(w)];
            let a1 = self.end_of[self.slot(u)];
            self.adj[id as usize][0] = a0;
            self.adj[id as usize][1] = a1;
        }
        // Ghosts keep INF in slot 2.
        for &id in &new_ids {
            let t = self.tri[id as usize];
            let r = if t[0] == INF {
                1
            } else if t[1] == INF {
                2
            } else {
                0
            };
            if r != 0 {
                self.tri[id as usize].rotate_left(r);
                self.adj[id as usize].rotate_left(r);
            } else {
                self.last = id;
            }
        }
        Ok(())
    }

    fn finish(self) -> Mesh {
        let mut remap = vec![NONE; self.tri.len()];
        let mut triangles = Vec::with_capacity(self.tri.len() / 2);
        for (id, t) in self.tri.iter().enumerate() {
            if self.alive[id] && !is_ghost(t) {
                remap[id] = triangles.len() as u32;
                triangles.push(*t);
            }
        }
        let mut neighbors = Vec::with_capacity(triangles.len());
        for (id, t) in self.tri.iter().enumerate() {
            if self.alive[id] && !is_ghost(t) {
                neighbors.push(self.adj[id].map(|n| remap[n as usize]));
            }
        }
        Mesh::from_parts(self.pts.to_vec(), triangles, neighbors)
    }
}
