use crate::geom::Point;

const ORDER: u32 = 16;

/// Distance along a Hilbert curve of side `2^ORDER` for cell `(x, y)`.
fn hilbert_key(mut x: u32, mut y: u32) -> u64 {
    let n: u32 = 1 << ORDER;
    let mut d: u64 = 0;
    let mut s = n / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += u64::from(s) * u64::from(s) * u64::from((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = n - 1 - x;
                y = n - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

/// Indices of `points` sorted along a Hilbert curve over their bounding box.
/// Ties keep input order.
pub fn hilbert_order(points: &[Point]) -> Vec<u32> {
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in points {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    let side = (xmax - xmin).max(ymax - ymin);
    let cells = f64::from((1u32 << ORDER) - 1);
    let scale = if side > 0.0 { cells / side } else { 0.0 };
    let mut keyed: Vec<(u64, u32)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let cx = ((p.x - xmin) * scale) as u32;
            let cy = ((p.y - ymin) * scale) as u32;
            (hilbert_key(cx, cy), i as u32)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}
