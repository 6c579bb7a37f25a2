//! Orientation and in-circle predicates.
//!
//! Each predicate first evaluates the determinant in `f64` and accepts the
//! sign when it clears a forward error bound (the stage-A bounds of
//! Shewchuk's adaptive predicates). Otherwise the determinant is recomputed
//! exactly: every coordinate is a dyadic rational `m * 2^e`, so after scaling
//! all inputs by a common power of two the whole determinant is an integer
//! polynomial evaluated in `BigInt`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{Point, Sign};

const EPSILON: f64 = f64::EPSILON * 0.5;
const CCW_ERRBOUND_A: f64 = (3.0 + 16.0 * EPSILON) * EPSILON;
const ICC_ERRBOUND_A: f64 = (10.0 + 96.0 * EPSILON) * EPSILON;

// Below this magnitude products may underflow and the error bound is void.
const TINY: f64 = 1e-150;

/// Sign of the signed area of `abc`; positive when counterclockwise.
pub fn orient2d(a: Point, b: Point, c: Point) -> Sign {
    let detleft = (a.x - c.x) * (b.y - c.y);
    let detright = (a.y - c.y) * (b.x - c.x);
    let det = detleft - detright;
    let detsum = detleft.abs() + detright.abs();
    if detsum > TINY && det.abs() > CCW_ERRBOUND_A * detsum {
        return Sign::of(det);
    }
    if detsum == 0.0 && det == 0.0 && exact_zero_products(a, b, c) {
        return Sign::Zero;
    }
    orient2d_exact(a, b, c)
}

// Both products are zero only if one factor of each is exactly zero; the
// subtraction of coordinates is exact when it yields zero, so this is safe.
fn exact_zero_products(a: Point, b: Point, c: Point) -> bool {
    ((a.x - c.x) == 0.0 || (b.y - c.y) == 0.0) && ((a.y - c.y) == 0.0 || (b.x - c.x) == 0.0)
}

/// In-circle test for a counterclockwise triangle `abc`.
///
/// Positive when `d` lies strictly inside the circumcircle, zero on it,
/// negative outside. The orientation of `abc` is not checked.
pub fn incircle_ccw(a: Point, b: Point, c: Point, d: Point) -> Sign {
    let adx = a.x - d.x;
    let bdx = b.x - d.x;
    let cdx = c.x - d.x;
    let ady = a.y - d.y;
    let bdy = b.y - d.y;
    let cdy = c.y - d.y;

    let bdxcdy = bdx * cdy;
    let cdxbdy = cdx * bdy;
    let alift = adx * adx + ady * ady;

    let cdxady = cdx * ady;
    let adxcdy = adx * cdy;
    let blift = bdx * bdx + bdy * bdy;

    let adxbdy = adx * bdy;
    let bdxady = bdx * ady;
    let clift = cdx * cdx + cdy * cdy;

    let det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    let permanent = (bdxcdy.abs() + cdxbdy.abs()) * alift
        + (cdxady.abs() + adxcdy.abs()) * blift
        + (adxbdy.abs() + bdxady.abs()) * clift;
    if permanent > TINY && det.abs() > ICC_ERRBOUND_A * permanent {
        return Sign::of(det);
    }
    incircle_exact(a, b, c, d)
}

/// Exact orientation, bypassing the floating-point filter.
pub fn orient2d_exact(a: Point, b: Point, c: Point) -> Sign {
    let coords = [a.x, a.y, b.x, b.y, c.x, c.y];
    let [ax, ay, bx, by, cx, cy] = to_common_scale(&coords);
    let det = (&ax - &cx) * (&by - &cy) - (&ay - &cy) * (&bx - &cx);
    sign_of_big(&det)
}

/// Exact in-circle determinant, bypassing the floating-point filter.
pub fn incircle_exact(a: Point, b: Point, c: Point, d: Point) -> Sign {
    let coords = [a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y];
    let [ax, ay, bx, by, cx, cy, dx, dy] = to_common_scale(&coords);
    let adx = &ax - &dx;
    let ady = &ay - &dy;
    let bdx = &bx - &dx;
    let bdy = &by - &dy;
    let cdx = &cx - &dx;
    let cdy = &cy - &dy;
    let alift = &adx * &adx + &ady * &ady;
    let blift = &bdx * &bdx + &bdy * &bdy;
    let clift = &cdx * &cdx + &cdy * &cdy;
    let det = alift * (&bdx * &cdy - &cdx * &bdy)
        + blift * (&cdx * &ady - &adx * &cdy)
        + clift * (&adx * &bdy - &bdx * &ady);
    sign_of_big(&det)
}

fn sign_of_big(v: &BigInt) -> Sign {
    if v.is_zero() {
        Sign::Zero
    } else if v.is_positive() {
        Sign::Positive
    } else {
        Sign::Negative
    }
}

/// Splits a finite double into `(mantissa, exponent)` with `v = m * 2^e`.
fn decompose(v: f64) -> (i64, i32) {
    if v == 0.0 {
        return (0, 0);
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 0 { 1 } else { -1 };
    let raw_exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & 0x000f_ffff_ffff_ffff) as i64;
    let (mant, exp) = if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1 << 52), raw_exp - 1075)
    };
    (sign * mant, exp)
}

fn to_common_scale<const N: usize>(values: &[f64; N]) -> [BigInt; N] {
    let parts = values.map(decompose);
    let min_exp = parts
        .iter()
        .filter(|(m, _)| *m != 0)
        .map(|&(_, e)| e)
        .min()
        .unwrap_or(0);
    parts.map(|(m, e)| BigInt::from(m) << ((e - min_exp) as usize))
}
