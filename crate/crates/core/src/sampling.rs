//! Seeded Poisson samples and the `X_n ∪ {s, t}` experiment instance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

use crate::delaunay::{build, DelaunayError, InsertionOrder, Mesh, NONE};
use crate::geom::{Point, Rect};

/// Axis-aligned sampling window.
pub type Window = Rect;

/// Resampling attempts before giving up on a degenerate sample.
pub const MAX_ATTEMPTS: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("intensity must be positive and finite, got {0}")]
    BadIntensity(f64),
    #[error("distance k must be positive and finite, got {0}")]
    BadDistance(f64),
    #[error("margin must be positive and finite, got {0}")]
    BadMargin(f64),
    #[error("expected point count {0} is too large")]
    TooManyPoints(f64),
    #[error("degenerate sample after {attempts} attempts (seed {seed}): {last}")]
    Degenerate { seed: u64, attempts: u32, last: String },
}

/// SplitMix64 step applied to `master + (index + 1) * golden`; used for all
/// per-trial and per-block sub-seeds.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Homogeneous Poisson process of the given intensity restricted to `window`.
pub fn sample_ppp(intensity: f64, window: &Window, seed: u64) -> Result<Vec<Point>, SamplingError> {
    if !(intensity > 0.0 && intensity.is_finite()) {
        return Err(SamplingError::BadIntensity(intensity));
    }
    let mean = intensity * window.area();
    if mean.is_nan() || mean >= 1e9 {
        return Err(SamplingError::TooManyPoints(mean));
    }
    let mut rng = rng_from_seed(seed);
    let count = Poisson::new(mean).map(|d| d.sample(&mut rng) as usize).unwrap_or(0);
    let (w, h) = (window.width(), window.height());
    Ok((0..count)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            Point::new(window.xmin + u * w, window.ymin + v * h)
        })
        .collect())
}

/// Gaussian-tail radius with `exp(-n π δ²) = 1e-12`.
pub fn default_margin(intensity: f64) -> f64 {
    (12.0 * std::f64::consts::LN_10 / (std::f64::consts::PI * intensity)).sqrt()
}

/// How far the sampling window extends around the segment `[s, t]`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum MarginPolicy {
    /// `[−δ, k+δ] × [−(0.87k+δ), 0.87k+δ]` with `δ` from [`default_margin`].
    #[default]
    Default,
    /// Same shape with a caller-chosen `δ`.
    Fixed(f64),
    /// `[−δ, k+δ] × [−2δ, 2δ]` with the default `δ`. Only triangles whose
    /// closed region meets `[s, t]` are reliable, which suffices for the
    /// straight walk, the upper path and the greedy path but not the
    /// shortest path.
    Corridor,
}

impl MarginPolicy {
    /// The window and its margin for intensity `n` and distance `k`.
    pub fn window(&self, intensity: f64, k: f64) -> Result<(Window, f64), SamplingError> {
        if !(intensity > 0.0 && intensity.is_finite()) {
            return Err(SamplingError::BadIntensity(intensity));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(SamplingError::BadDistance(k));
        }
        let (delta, half) = match *self {
            MarginPolicy::Default => {
                let d = default_margin(intensity);
                (d, 0.87 * k + d)
            }
            MarginPolicy::Fixed(d) => {
                if !(d > 0.0 && d.is_finite()) {
                    return Err(SamplingError::BadMargin(d));
                }
                (d, 0.87 * k + d)
            }
            MarginPolicy::Corridor => {
                let d = default_margin(intensity);
                (d, 2.0 * d)
            }
        };
        let w = Rect { xmin: -delta, xmax: k + delta, ymin: -half, ymax: half };
        Ok((w, delta))
    }

    /// Whether the shortest path is meaningful in this window.
    pub fn supports_shortest_path(&self) -> bool {
        !matches!(self, MarginPolicy::Corridor)
    }
}

/// `X_n ∪ {s, t}` with `s = (0, 0)`, `t = (k, 0)`, triangulated.
#[derive(Clone, Debug)]
pub struct Instance {
    pub mesh: Mesh,
    pub s: u32,
    pub t: u32,
    pub intensity: f64,
    pub k: f64,
    /// Seed the sample was actually drawn from (after any resampling).
    pub seed: u64,
    pub window: Window,
    pub margin: f64,
}

impl Instance {
    pub fn s_point(&self) -> Point {
        self.mesh.vertex(self.s)
    }

    pub fn t_point(&self) -> Point {
        self.mesh.vertex(self.t)
    }
}

/// Whether `v` lies on the hull of `mesh`.
pub fn on_hull(mesh: &Mesh, v: u32) -> bool {
    mesh.triangles_around(v).iter().any(|&t| {
        let tri = mesh.triangle(t);
        let nb = mesh.neighbors(t);
        (0..3).any(|i| nb[i] == NONE && tri[i] != v)
    })
}

// Seed used on resampling attempt `attempt` (attempt 0 is the seed itself).
fn attempt_seed(seed: u64, attempt: u32) -> u64 {
    if attempt == 0 {
        seed
    } else {
        mix_seed(seed, u64::from(attempt))
    }
}

/// Samples and triangulates an instance, with `points` appended by the
/// caller-specified extra vertices. Returns the mesh, the ids of the extras
/// and the seed that was used.
fn sample_with_extras(
    intensity: f64,
    window: &Window,
    extras: &[Point],
    seed: u64,
) -> Result<(Mesh, Vec<u32>, u64), SamplingError> {
    let mut last = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let sd = attempt_seed(seed, attempt);
        let mut pts = sample_ppp(intensity, window, sd)?;
        let base = pts.len() as u32;
        pts.extend_from_slice(extras);
        let ids: Vec<u32> = (0..extras.len() as u32).map(|i| base + i).collect();
        match build(&pts, InsertionOrder::Hilbert) {
            Ok(mesh) => {
                if let Some(&v) = ids.iter().find(|&&v| on_hull(&mesh, v)) {
                    last = format!("extra vertex {v} on the hull");
                    continue;
                }
                return Ok((mesh, ids, sd));
            }
            Err(e @ (DelaunayError::TooFewPoints(_) | DelaunayError::AllCollinear | DelaunayError::Duplicate(..))) => {
                last = e.to_string();
            }
            Err(e) => {
                last = e.to_string();
                break;
            }
        }
    }
    Err(SamplingError::Degenerate { seed, attempts: MAX_ATTEMPTS, last })
}

/// Builds the instance for intensity `n`, distance `k` and margin policy.
pub fn make_instance(intensity: f64, k: f64, margin: MarginPolicy, seed: u64) -> Result<Instance, SamplingError> {
    let (window, delta) = margin.window(intensity, k)?;
    let (mesh, ids, used) = sample_with_extras(intensity, &window, &[Point::new(0.0, 0.0), Point::new(k, 0.0)], seed)?;
    Ok(Instance {
        mesh,
        s: ids[0],
        t: ids[1],
        intensity,
        k,
        seed: used,
        window,
        margin: delta,
    })
}

/// `X_n ∪ {O}` in the square `[−half, half]²`. Returns the mesh and the id
/// of the origin.
pub fn make_origin_instance(intensity: f64, half: f64, seed: u64) -> Result<(Mesh, u32), SamplingError> {
    if !(half > 0.0 && half.is_finite()) {
        return Err(SamplingError::BadMargin(half));
    }
    let window = Rect::square(Point::new(0.0, 0.0), half);
    let (mesh, ids, _) = sample_with_extras(intensity, &window, &[Point::new(0.0, 0.0)], seed)?;
    Ok((mesh, ids[0]))
}

/// Triangulated Poisson sample in `window` with no extra vertices.
pub fn make_free_field(intensity: f64, window: &Window, seed: u64) -> Result<Mesh, SamplingError> {
    sample_with_extras(intensity, window, &[], seed).map(|(m, _, _)| m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_is_deterministic_and_spreads() {
        assert_eq!(mix_seed(42, 7), mix_seed(42, 7));
        assert_ne!(mix_seed(42, 7), mix_seed(42, 8));
        assert_ne!(mix_seed(42, 7), mix_seed(43, 7));
    }

    #[test]
    fn default_window_at_1e5() {
        let (w, d) = MarginPolicy::Default.window(1e5, 1.0).unwrap();
        // δ = sqrt(12 ln 10 / (π 1e5))
        let oracle = (12.0 * 10f64.ln() / (std::f64::consts::PI * 1e5)).sqrt();
        assert!((d - oracle).abs() < 1e-15);
        assert!((d - 0.0093783).abs() < 1e-6);
        assert!((w.xmin + d).abs() < 1e-15 && (w.xmax - 1.0 - d).abs() < 1e-15);
        assert!((w.ymax - 0.87 - d).abs() < 1e-15);
        assert!((-1e5 * std::f64::consts::PI * d * d).exp() <= 1.0000001e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        let w = Rect::square(Point::new(0.0, 0.0), 1.0);
        assert_eq!(sample_ppp(0.0, &w, 1), Err(SamplingError::BadIntensity(0.0)));
        assert!(sample_ppp(-1.0, &w, 1).is_err());
        assert!(MarginPolicy::Fixed(-1.0).window(10.0, 1.0).is_err());
        assert!(MarginPolicy::Default.window(10.0, 0.0).is_err());
    }

    #[test]
    fn points_lie_in_window() {
        let w = Rect { xmin: -1.0, xmax: 2.0, ymin: 3.0, ymax: 4.0 };
        let pts = sample_ppp(50.0, &w, 9).unwrap();
        assert!(pts.iter().all(|p| w.contains(*p)));
    }
}
