//! Pixel grids, color subgrids, lattice animals and the three pixel events.

mod animal;
mod events;
mod lemma;

pub use animal::{
    animal_bound, check_animal_bound, extract_animal, is_four_connected, path_animal, polyline_length, AnimalBound,
    ANIMAL_SLOPE,
};
pub use events::{
    classify_pixel, independence_event, strong_horizontality, strong_implies_weak_check, weak_horizontality_length,
    PixelClass, PixelContext, StrongWeak, Witness,
};
pub use lemma::{colored_size_bound, length_animal_check, scale_nests, LengthAnimal};

use std::f64::consts::PI;

use serde::Serialize;
use thiserror::Error;

use crate::geom::{Point, Rect};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PixelError {
    #[error("grid scale must be at least 1, got {0}")]
    BadScale(u32),
    #[error("rho must be finite and nonnegative, got {0}")]
    BadRho(f64),
    #[error("epsilon must be finite and nonnegative, got {0}")]
    BadEpsilon(f64),
    #[error("kappa must be greater than 1, got {0}")]
    BadKappa(f64),
    #[error("kappa/(kappa-1)*rho = {0} is not below pi^2/8")]
    AngleTooWide(f64),
    #[error("square around pixel ({0}, {1}) leaves the sampling window")]
    WindowTooSmall(i64, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Color {
    Green,
    Pink,
    Blue,
    Yellow,
}

impl Color {
    pub const ALL: [Color; 4] = [Color::Green, Color::Pink, Color::Blue, Color::Yellow];

    pub fn offset(self) -> (i64, i64) {
        match self {
            Color::Green => (0, 0),
            Color::Pink => (1, 0),
            Color::Blue => (0, 1),
            Color::Yellow => (1, 1),
        }
    }

    /// Color of the subgrid `2ℤ² + O_c` containing `v`.
    pub fn of(v: Pixel) -> Color {
        match (v.x.rem_euclid(2), v.y.rem_euclid(2)) {
            (0, 0) => Color::Green,
            (1, 0) => Color::Pink,
            (0, _) => Color::Blue,
            _ => Color::Yellow,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Green => "green",
            Color::Pink => "pink",
            Color::Blue => "blue",
            Color::Yellow => "yellow",
        }
    }
}

/// Lattice point of ℤ².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Pixel {
    pub x: i64,
    pub y: i64,
}

impl Pixel {
    pub const fn new(x: i64, y: i64) -> Self {
        Pixel { x, y }
    }

    pub fn center(self) -> Point {
        Point::new(self.x as f64, self.y as f64)
    }

    /// `C(v)`.
    pub fn square(self) -> Rect {
        Rect::square(self.center(), 0.5)
    }

    /// `C^ε(v)`.
    pub fn square_eps(self, eps: f64) -> Rect {
        Rect::square(self.center(), 0.5 + eps)
    }

    /// `C_λ(v)`.
    pub fn square_scaled(self, lambda: u32) -> Rect {
        Rect::square(self.center(), 0.5 * f64::from(lambda))
    }
}

/// The grid `λG + O_c` with squares `C_λ(v)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridSpec {
    pub scale: u32,
    pub color: Color,
}

impl GridSpec {
    pub fn new(scale: u32, color: Color) -> Result<Self, PixelError> {
        if scale == 0 {
            return Err(PixelError::BadScale(scale));
        }
        Ok(GridSpec { scale, color })
    }

    /// The unit grid `G` with pixels `C(v)`.
    pub fn unit() -> Self {
        GridSpec { scale: 1, color: Color::Green }
    }

    /// The color subgrid `G_c = 2G + O_c` with squares `C_2(v)`.
    pub fn colored(color: Color) -> Self {
        GridSpec { scale: 2, color }
    }

    /// Scales usable in the percolation argument.
    pub fn is_percolation_scale(&self) -> bool {
        self.scale % 4 == 2
    }

    /// Lattice point with grid indices `(i, j)`.
    pub fn node(&self, i: i64, j: i64) -> Pixel {
        let (ox, oy) = self.color.offset();
        let l = i64::from(self.scale);
        Pixel::new(l * i + ox, l * j + oy)
    }

    pub fn contains(&self, v: Pixel) -> bool {
        let (ox, oy) = self.color.offset();
        let l = i64::from(self.scale);
        (v.x - ox).rem_euclid(l) == 0 && (v.y - oy).rem_euclid(l) == 0
    }

    pub fn square(&self, v: Pixel) -> Rect {
        v.square_scaled(self.scale)
    }
}

/// `(ρ, κ)` with the derived `ε_ρ = √ρ √(2+ρ)` and `α = √(2κρ/(κ−1))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PixelParams {
    pub rho: f64,
    pub kappa: f64,
}

impl PixelParams {
    pub const DEFAULT_KAPPA: f64 = 1.5;

    pub fn new(rho: f64, kappa: f64) -> Result<Self, PixelError> {
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(PixelError::BadRho(rho));
        }
        if !(kappa.is_finite() && kappa > 1.0) {
            return Err(PixelError::BadKappa(kappa));
        }
        let q = kappa / (kappa - 1.0) * rho;
        if q >= PI * PI / 8.0 {
            return Err(PixelError::AngleTooWide(q));
        }
        Ok(PixelParams { rho, kappa })
    }

    pub fn with_rho(rho: f64) -> Result<Self, PixelError> {
        Self::new(rho, Self::DEFAULT_KAPPA)
    }

    pub fn eps(&self) -> f64 {
        eps_rho(self.rho)
    }

    pub fn alpha(&self) -> f64 {
        (2.0 * self.kappa / (self.kappa - 1.0) * self.rho).sqrt()
    }
}

/// `ε_ρ = √ρ √(2+ρ)`, the height gain of a segment of length `1+ρ` across a
/// unit column.
pub fn eps_rho(rho: f64) -> f64 {
    rho.sqrt() * (2.0 + rho).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn colors_partition_the_lattice() {
        for x in -3..4 {
            for y in -3..4 {
                let v = Pixel::new(x, y);
                let hits: Vec<Color> = Color::ALL.into_iter().filter(|&c| GridSpec::colored(c).contains(v)).collect();
                assert_eq!(hits, vec![Color::of(v)]);
            }
        }
        assert_eq!(Color::of(Pixel::new(-1, 0)), Color::Pink);
        assert_eq!(Color::of(Pixel::new(-1, -1)), Color::Yellow);
    }

    #[test]
    fn same_color_squares_have_disjoint_interiors() {
        for c in Color::ALL {
            let g = GridSpec::colored(c);
            let a = g.square(g.node(0, 0));
            for (i, j) in [(1, 0), (0, 1), (1, 1), (-1, 1)] {
                let b = g.square(g.node(i, j));
                let w = a.xmax.min(b.xmax) - a.xmin.max(b.xmin);
                let h = a.ymax.min(b.ymax) - a.ymin.max(b.ymin);
                assert!(w <= 0.0 || h <= 0.0);
            }
        }
    }

    #[test]
    fn params_follow_their_formulas() {
        let p = PixelParams::with_rho(1e-4).unwrap();
        assert!((p.alpha() - (6e-4f64).sqrt()).abs() < 1e-15);
        assert!((p.alpha() - 0.0245).abs() < 1e-4);
        // A segment of length 1+ρ across the unit column rises by ε_ρ.
        assert!(((1.0 + p.eps() * p.eps()).sqrt() - 1.0001).abs() < 1e-14);
        assert!(PixelParams::new(1e-4, 1.0).is_err());
        assert!(PixelParams::new(-1.0, 1.5).is_err());
        assert!(PixelParams::new(0.42, 1.5).is_err());
        assert!(PixelParams::new(0.4, 1.5).is_ok());
    }

    #[test]
    fn squares() {
        let v = Pixel::new(2, -1);
        assert_eq!(v.square(), Rect { xmin: 1.5, xmax: 2.5, ymin: -1.5, ymax: -0.5 });
        assert_eq!(v.square_scaled(2), Rect { xmin: 1.0, xmax: 3.0, ymin: -2.0, ymax: 0.0 });
        assert_eq!(v.square_eps(0.25).xmax, 2.75);
        assert_eq!(GridSpec::new(6, Color::Pink).unwrap().node(1, -1), Pixel::new(7, -6));
        assert!(GridSpec::new(0, Color::Green).is_err());
    }
}
