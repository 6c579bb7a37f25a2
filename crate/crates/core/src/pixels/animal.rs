use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use super::{GridSpec, Pixel};
use crate::delaunay::Mesh;
use crate::geom::Point;
use crate::paths::PathResult;

/// Slope of the animal size bound, `3√2/2`.
pub const ANIMAL_SLOPE: f64 = 2.121_320_343_559_642_4;

/// Grid nodes whose closed square meets the polyline. Candidates come from
/// a float column sweep with one cell of slack; membership is decided by
/// the exact segment/square test.
pub fn extract_animal(poly: &[Point], grid: GridSpec) -> BTreeSet<Pixel> {
    let mut out = BTreeSet::new();
    if poly.len() == 1 {
        add_segment(poly[0], poly[0], grid, &mut out);
    }
    for w in poly.windows(2) {
        add_segment(w[0], w[1], grid, &mut out);
    }
    out
}

fn add_segment(a: Point, b: Point, grid: GridSpec, out: &mut BTreeSet<Pixel>) {
    let (ox, oy) = grid.color.offset();
    let l = f64::from(grid.scale);
    // Grid-index coordinates.
    let to_idx = |p: Point| ((p.x - ox as f64) / l, (p.y - oy as f64) / l);
    let (ua, ub) = (to_idx(a), to_idx(b));
    let (lo, hi) = if ua.0 <= ub.0 { (ua, ub) } else { (ub, ua) };
    let i0 = (lo.0 + 0.5).floor() as i64 - 1;
    let i1 = (hi.0 - 0.5).ceil() as i64 + 1;
    for i in i0..=i1 {
        let (x0, x1) = (i as f64 - 0.5, i as f64 + 0.5);
        let (y0, y1) = if hi.0 > lo.0 {
            let y_at = |x: f64| {
                let t = ((x - lo.0) / (hi.0 - lo.0)).clamp(0.0, 1.0);
                lo.1 + t * (hi.1 - lo.1)
            };
            let (ya, yb) = (y_at(x0), y_at(x1));
            (ya.min(yb), ya.max(yb))
        } else {
            (lo.1.min(hi.1), lo.1.max(hi.1))
        };
        let j0 = (y0 + 0.5).floor() as i64 - 1;
        let j1 = (y1 - 0.5).ceil() as i64 + 1;
        for j in j0..=j1 {
            let v = grid.node(i, j);
            if grid.square(v).meets_segment(a, b) {
                out.insert(v);
            }
        }
    }
}

/// `A(P)` and its colored variants for a mesh path.
pub fn path_animal(mesh: &Mesh, path: &PathResult, grid: GridSpec) -> BTreeSet<Pixel> {
    extract_animal(&path.points(mesh), grid)
}

pub fn polyline_length(poly: &[Point]) -> f64 {
    poly.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// Whether the nodes form one 4-connected component of the grid graph.
pub fn is_four_connected(animal: &BTreeSet<Pixel>, grid: GridSpec) -> bool {
    let Some(&first) = animal.iter().next() else {
        return true;
    };
    let l = i64::from(grid.scale);
    let mut seen = HashSet::from([first]);
    let mut queue = VecDeque::from([first]);
    while let Some(v) = queue.pop_front() {
        for (dx, dy) in [(l, 0), (-l, 0), (0, l), (0, -l)] {
            let w = Pixel::new(v.x + dx, v.y + dy);
            if animal.contains(&w) && seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen.len() == animal.len()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnimalBound {
    pub size: usize,
    pub length: f64,
    pub bound: f64,
    pub ok: bool,
}

/// `(3√2/2)·ℓ + 1`.
pub fn animal_bound(length: f64) -> f64 {
    ANIMAL_SLOPE * length + 1.0
}

/// Size of the unit-grid animal against `(3√2/2)·ℓ(P) + 1`. The comparison
/// allows a relative `1e-12` for rounding in the length.
pub fn check_animal_bound(poly: &[Point]) -> AnimalBound {
    let size = extract_animal(poly, GridSpec::unit()).len();
    let length = polyline_length(poly);
    let bound = animal_bound(length);
    AnimalBound {
        size,
        length,
        bound,
        ok: size as f64 <= bound * (1.0 + 1e-12),
    }
}
