//! Planar primitives with exact decisions.

mod predicates;

pub use predicates::{incircle_ccw, incircle_exact, orient2d, orient2d_exact};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("non-finite coordinate in {0:?}")]
    NonFinite(Point),
    #[error("points are collinear")]
    Collinear,
    #[error("triangle is not counterclockwise")]
    NotCounterclockwise,
    #[error("zero-length segment at {0:?}")]
    ZeroLength(Point),
    #[error("empty rectangle [{xmin}, {xmax}] x [{ymin}, {ymax}]")]
    EmptyRect { xmin: f64, xmax: f64, ymin: f64, ymax: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    /// Point at parameter `t` on the segment from `self` to `other`.
    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }
}

/// Result of a sign predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative = -1,
    Zero = 0,
    Positive = 1,
}

impl Sign {
    pub fn of(v: f64) -> Sign {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_i8(self) -> i8 {
        self as i8
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// Exact in-circle test with an orientation check on `abc`.
pub fn incircle(a: Point, b: Point, c: Point, d: Point) -> Result<Sign, GeomError> {
    match orient2d(a, b, c) {
        Sign::Positive => Ok(incircle_ccw(a, b, c, d)),
        Sign::Zero => Err(GeomError::Collinear),
        Sign::Negative => Err(GeomError::NotCounterclockwise),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    /// Whether the open disk lies inside the closed rectangle.
    pub fn inside_rect(&self, r: &Rect) -> bool {
        self.center.x - self.radius >= r.xmin
            && self.center.x + self.radius <= r.xmax
            && self.center.y - self.radius >= r.ymin
            && self.center.y + self.radius <= r.ymax
    }
}

/// Circumscribed circle of a non-degenerate triangle.
pub fn circumcircle(a: Point, b: Point, c: Point) -> Result<Circle, GeomError> {
    if orient2d(a, b, c) == Sign::Zero {
        return Err(GeomError::Collinear);
    }
    // Solve relative to `a` to limit cancellation.
    let bx = b.x - a.x;
    let by = b.y - a.y;
    let cx = c.x - a.x;
    let cy = c.y - a.y;
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    let center = Point::new(a.x + ux, a.y + uy);
    Ok(Circle {
        center,
        radius: ux.hypot(uy),
    })
}

/// Whether two closed segments share at least one point.
pub fn segment_crosses_segment(s1: &Segment, s2: &Segment) -> bool {
    let o1 = orient2d(s1.a, s1.b, s2.a);
    let o2 = orient2d(s1.a, s1.b, s2.b);
    let o3 = orient2d(s2.a, s2.b, s1.a);
    let o4 = orient2d(s2.a, s2.b, s1.b);
    if o1 == o2.flip() && o1 != Sign::Zero && o3 == o4.flip() && o3 != Sign::Zero {
        return true;
    }
    (o1 == Sign::Zero && on_closed_box(s1.a, s1.b, s2.a))
        || (o2 == Sign::Zero && on_closed_box(s1.a, s1.b, s2.b))
        || (o3 == Sign::Zero && on_closed_box(s2.a, s2.b, s1.a))
        || (o4 == Sign::Zero && on_closed_box(s2.a, s2.b, s1.b))
}

// `p` collinear with `ab`: is it within the bounding box of the segment?
fn on_closed_box(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Absolute angle with the x-axis folded to `[0, π/2]`, and the length of
/// the horizontal projection.
pub fn edge_angle_and_hproj(e: &Segment) -> Result<(f64, f64), GeomError> {
    let dx = (e.b.x - e.a.x).abs();
    let dy = (e.b.y - e.a.y).abs();
    if dx == 0.0 && dy == 0.0 {
        return Err(GeomError::ZeroLength(e.a));
    }
    Ok((dy.atan2(dx), dx))
}

/// Closed axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> Result<Self, GeomError> {
        if !(xmax > xmin && ymax > ymin) || ![xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite()) {
            return Err(GeomError::EmptyRect { xmin, xmax, ymin, ymax });
        }
        Ok(Rect { xmin, xmax, ymin, ymax })
    }

    /// Square `center ⊕ [-half, half]²`.
    pub fn square(center: Point, half: f64) -> Rect {
        Rect {
            xmin: center.x - half,
            xmax: center.x + half,
            ymin: center.y - half,
            ymax: center.y + half,
        }
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.xmin + self.xmax), 0.5 * (self.ymin + self.ymax))
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.xmin && p.x <= self.xmax && p.y >= self.ymin && p.y <= self.ymax
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.xmin >= self.xmin && other.xmax <= self.xmax && other.ymin >= self.ymin && other.ymax <= self.ymax
    }

    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.xmin, self.ymin),
            Point::new(self.xmax, self.ymin),
            Point::new(self.xmax, self.ymax),
            Point::new(self.xmin, self.ymax),
        ]
    }

    fn overlaps_bbox(&self, xmin: f64, xmax: f64, ymin: f64, ymax: f64) -> bool {
        xmax >= self.xmin && xmin <= self.xmax && ymax >= self.ymin && ymin <= self.ymax
    }

    /// Exact closed segment / closed rectangle intersection.
    pub fn meets_segment(&self, a: Point, b: Point) -> bool {
        if !self.overlaps_bbox(a.x.min(b.x), a.x.max(b.x), a.y.min(b.y), a.y.max(b.y)) {
            return false;
        }
        // Separating axis along the segment normal.
        let mut pos = false;
        let mut neg = false;
        for c in self.corners() {
            match orient2d(a, b, c) {
                Sign::Positive => pos = true,
                Sign::Negative => neg = true,
                Sign::Zero => return true,
            }
        }
        pos && neg || (a == b)
    }

    /// Exact closed triangle / closed rectangle intersection; `tri` is
    /// counterclockwise.
    pub fn meets_triangle(&self, tri: [Point; 3]) -> bool {
        let xmin = tri[0].x.min(tri[1].x).min(tri[2].x);
        let xmax = tri[0].x.max(tri[1].x).max(tri[2].x);
        let ymin = tri[0].y.min(tri[1].y).min(tri[2].y);
        let ymax = tri[0].y.max(tri[1].y).max(tri[2].y);
        if !self.overlaps_bbox(xmin, xmax, ymin, ymax) {
            return false;
        }
        let corners = self.corners();
        for i in 0..3 {
            let a = tri[i];
            let b = tri[(i + 1) % 3];
            if corners.iter().all(|&c| orient2d(a, b, c) == Sign::Negative) {
                return false;
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn orient_examples() {
        assert_eq!(orient2d(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)), Sign::Positive);
        assert_eq!(orient2d(p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0)), Sign::Zero);
    }

    #[test]
    fn orient_large_coordinates() {
        // 1e17 - 1 is not representable; the nearest double below 1e17 is
        // 1e17 - 16. Exact integer oracle: 1e17 * (1e17 - 16) - 1e17 * 1e17 < 0.
        let big = 1e17_f64;
        let below = f64::from_bits(big.to_bits() - 1);
        assert_eq!(below, 1e17 - 16.0);
        let oracle = {
            let b = 100_000_000_000_000_000i128;
            b * (b - 16) - b * b
        };
        assert!(oracle < 0);
        assert_eq!(orient2d(p(0.0, 0.0), p(big, big), p(big, below)), Sign::Negative);
        assert_eq!(orient2d_exact(p(0.0, 0.0), p(big, big), p(big, below)), Sign::Negative);
    }

    #[test]
    fn incircle_examples() {
        let (a, b, c) = (p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0));
        // (0.5, 0.5) is the circumcenter, hence strictly inside; (1, 1) is on
        // the circle.
        assert_eq!(incircle(a, b, c, p(0.5, 0.5)), Ok(Sign::Positive));
        assert_eq!(incircle(a, b, c, p(1.0, 1.0)), Ok(Sign::Zero));
        assert_eq!(incircle(a, b, c, p(0.4, 0.4)), Ok(Sign::Positive));
        assert_eq!(incircle(a, b, c, p(2.0, 2.0)), Ok(Sign::Negative));
        assert_eq!(incircle(a, c, b, p(0.4, 0.4)), Err(GeomError::NotCounterclockwise));
        assert_eq!(incircle(a, b, p(2.0, 0.0), p(0.4, 0.4)), Err(GeomError::Collinear));
    }

    #[test]
    fn circumcircle_examples() {
        let c = circumcircle(p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)).unwrap();
        assert!((c.center.x - 0.5).abs() < 1e-15 && (c.center.y - 0.5).abs() < 1e-15);
        assert!((c.radius - SQRT_2 / 2.0).abs() < 1e-15);

        let c = circumcircle(p(-1.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)).unwrap();
        assert!(c.center.x.abs() < 1e-15 && c.center.y.abs() < 1e-15);
        assert!((c.radius - 1.0).abs() < 1e-15);

        // Rational solve of |z-a|=|z-b|=|z-c| for (0,0),(4,0),(1,3):
        // x = 2 from the first pair; 2x + 6y = 10 from the second gives y = 1,
        // radius² = 5.
        let c = circumcircle(p(0.0, 0.0), p(4.0, 0.0), p(1.0, 3.0)).unwrap();
        assert!((c.center.x - 2.0).abs() < 1e-14 && (c.center.y - 1.0).abs() < 1e-14);
        assert!((c.radius - 5f64.sqrt()).abs() < 1e-14);

        assert_eq!(
            circumcircle(p(0.0, 0.0), p(1.0, 1.0), p(3.0, 3.0)),
            Err(GeomError::Collinear)
        );
    }

    #[test]
    fn segment_crossing_examples() {
        let s = |ax, ay, bx, by| Segment::new(p(ax, ay), p(bx, by));
        assert!(segment_crosses_segment(&s(0.0, 0.0, 1.0, 1.0), &s(0.0, 1.0, 1.0, 0.0)));
        assert!(!segment_crosses_segment(&s(0.0, 0.0, 1.0, 0.0), &s(0.0, 1.0, 1.0, 1.0)));
        assert!(segment_crosses_segment(&s(0.0, 0.0, 1.0, 0.0), &s(1.0, 0.0, 2.0, 5.0)));
        // collinear overlapping and collinear disjoint
        assert!(segment_crosses_segment(&s(0.0, 0.0, 2.0, 0.0), &s(1.0, 0.0, 3.0, 0.0)));
        assert!(!segment_crosses_segment(&s(0.0, 0.0, 1.0, 0.0), &s(2.0, 0.0, 3.0, 0.0)));
        // T-junction
        assert!(segment_crosses_segment(&s(0.0, 0.0, 2.0, 0.0), &s(1.0, 0.0, 1.0, 3.0)));
    }

    #[test]
    fn edge_angle_examples() {
        let e = |ax, ay, bx, by| Segment::new(p(ax, ay), p(bx, by));
        assert_eq!(edge_angle_and_hproj(&e(0.0, 0.0, 1.0, 0.0)), Ok((0.0, 1.0)));
        assert_eq!(edge_angle_and_hproj(&e(0.0, 0.0, 0.0, 1.0)), Ok((FRAC_PI_2, 0.0)));
        let (a, h) = edge_angle_and_hproj(&e(0.0, 0.0, 1.0, 1.0)).unwrap();
        assert!((a - FRAC_PI_4).abs() < 1e-15 && h == 1.0);
        // orientation does not matter
        let (a, h) = edge_angle_and_hproj(&e(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert!((a - FRAC_PI_4).abs() < 1e-15 && h == 1.0);
        assert!(edge_angle_and_hproj(&e(1.0, 1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn rect_segment_and_triangle() {
        let r = Rect::square(p(0.0, 0.0), 0.5);
        assert!(r.meets_segment(p(-2.0, 0.5), p(2.0, 0.5)));
        assert!(r.meets_segment(p(0.5, 0.5), p(3.0, 3.0)));
        assert!(!r.meets_segment(p(0.6, 0.0), p(3.0, 3.0)));
        // diagonal passing just outside the corner
        assert!(!r.meets_segment(p(0.0, 1.1), p(1.1, 0.0)));
        assert!(r.meets_segment(p(0.0, 1.0), p(1.0, 0.0)));
        assert!(r.meets_segment(p(0.1, 0.1), p(0.1, 0.1)));
        assert!(!r.meets_segment(p(0.6, 0.1), p(0.6, 0.1)));

        assert!(r.meets_triangle([p(0.4, 0.4), p(2.0, 0.4), p(2.0, 2.0)]));
        assert!(!r.meets_triangle([p(0.6, -2.0), p(2.0, 0.0), p(0.6, 2.0)]));
        // triangle hugging the corner without touching
        assert!(!r.meets_triangle([p(0.0, 1.2), p(1.2, 0.0), p(2.0, 2.0)]));
        // triangle containing the rectangle
        assert!(r.meets_triangle([p(-10.0, -10.0), p(10.0, -10.0), p(0.0, 10.0)]));
    }
}
