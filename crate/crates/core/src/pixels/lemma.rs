use serde::Serialize;

use super::{classify_pixel, extract_animal, Color, GridSpec, Pixel, PixelContext, PixelError};
use crate::geom::Point;

/// Outcome of the length/animal inequality
/// `ℓ(P) ≥ k + ρ(k − 4·max_c #_H(A_(c)(P)))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LengthAnimal {
    pub lhs: f64,
    pub rhs: f64,
    /// Pixels of `A_(c)(P)` with `H_ρ ∨ ¬I_{ε_ρ}`, per color.
    pub counts: [usize; 4],
    /// Sizes of the colored animals.
    pub sizes: [usize; 4],
    /// Pixels where `H_ρ` was detected (with `I_{ε_ρ}` holding).
    pub horizontal: Vec<Pixel>,
    pub ok: bool,
}

/// Classifies every pixel of the four colored animals of `poly` and compares
/// its length with the right-hand side. `k` is `‖s−t‖`.
pub fn length_animal_check(ctx: &PixelContext, k: f64, rho: f64, poly: &[Point]) -> Result<LengthAnimal, PixelError> {
    let mut counts = [0usize; 4];
    let mut sizes = [0usize; 4];
    let mut horizontal = Vec::new();
    for (ci, c) in Color::ALL.into_iter().enumerate() {
        let animal = extract_animal(poly, GridSpec::colored(c));
        sizes[ci] = animal.len();
        for v in animal {
            let class = classify_pixel(ctx, v, rho)?;
            if class.bad() {
                counts[ci] += 1;
            }
            if class.witness.is_some() {
                horizontal.push(v);
            }
        }
    }
    let max = *counts.iter().max().expect("four colors");
    let lhs = super::polyline_length(poly);
    let rhs = k + rho * (k - 4.0 * max as f64);
    Ok(LengthAnimal { lhs, rhs, counts, sizes, horizontal, ok: lhs >= rhs })
}

/// `4.24·k/λ + 1`, the size bound for an animal of a path shorter than
/// `1.998·k` on a grid of scale `λ`.
pub fn colored_size_bound(k: f64, scale: u32) -> f64 {
    4.24 * k / f64::from(scale) + 1.0
}

/// For `v ∈ G_c` and `w ∈ λG + O_c`: if `C_2(v)` and `C_λ(w)` share interior
/// points then `C_2(v) ⊂ C_λ(w)`. With closed squares that only touch along
/// a side the implication is not required.
pub fn scale_nests(v: Pixel, w: Pixel, lambda: u32) -> bool {
    let (a, b) = (v.square_scaled(2), w.square_scaled(lambda));
    let overlap = a.xmax.min(b.xmax) > a.xmin.max(b.xmin) && a.ymax.min(b.ymax) > a.ymin.max(b.ymin);
    !overlap || b.contains_rect(&a)
}
