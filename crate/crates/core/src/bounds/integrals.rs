//! Closed-form Gaussian moments and angular integrals, with independent
//! numeric checks.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::quad::{gauss_legendre, integrate, legendre_on};
use super::BoundsError;
use crate::sampling::{mix_seed, rng_from_seed};

/// Moments `(j, lower)` with a closed form: `∫_lower^∞ e^{−nπr²} r^j dr`.
pub const MOMENTS: [(u32, u32); 7] = [(4, 0), (5, 0), (5, 1), (6, 0), (8, 0), (10, 0), (12, 0)];

/// Closed form of `∫_lower^∞ e^{−nπr²} r^j dr`.
pub fn gaussian_moment(j: u32, n: f64, lower: u32) -> Result<f64, BoundsError> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(BoundsError::BadIntensity(n));
    }
    let (p, sq) = (PI, n.sqrt());
    Ok(match (j, lower) {
        (4, 0) => 3.0 / (8.0 * p * p * n * n * sq),
        (5, 0) => 1.0 / (p.powi(3) * n.powi(3)),
        (5, 1) => (-n * p).exp() * gaussian_tail_scaled(n),
        (6, 0) => 15.0 / (16.0 * p.powi(3) * n.powi(3) * sq),
        (8, 0) => 105.0 / (32.0 * p.powi(4) * n.powi(4) * sq),
        (10, 0) => 945.0 / (64.0 * p.powi(5) * n.powi(5) * sq),
        (12, 0) => 10395.0 / (128.0 * p.powi(6) * n.powi(6) * sq),
        _ => return Err(BoundsError::UnsupportedMoment(j, lower)),
    })
}

/// `e^{nπ} ∫_1^∞ e^{−nπr²} r^5 dr = 1/(2πn) + 1/(π²n²) + 1/(π³n³)`; finite
/// where the unscaled tail underflows.
pub fn gaussian_tail_scaled(n: f64) -> f64 {
    let a = PI * n;
    1.0 / (2.0 * a) + 1.0 / (a * a) + 1.0 / (a * a * a)
}

/// Adaptive quadrature of the same moment. The lower-limit-1 case is
/// integrated in the scaled form `∫_1^∞ e^{−nπ(r²−1)} r^5 dr` and compared
/// with [`gaussian_tail_scaled`].
pub fn moment_by_quadrature(j: u32, n: f64, lower: u32, rel_tol: f64) -> f64 {
    let a = PI * n;
    // Beyond this radius the integrand is below e^{−745}, i.e. zero in f64.
    let cut = (745.0 / a + if lower == 1 { 1.0 } else { 0.0 }).sqrt() + 1.0 / a.sqrt();
    let (lo, shift) = if lower == 1 { (1.0, 1.0) } else { (0.0, 0.0) };
    let f = move |r: f64| (-a * (r * r - shift)).exp() * r.powi(j as i32);
    integrate(f, lo, lo.max(cut), rel_tol, 0.0).0
}

/// `2·area` of the triangle on the unit circle at angles `b1, b2, b3`,
/// positive when counterclockwise.
pub fn det3(b1: f64, b2: f64, b3: f64) -> f64 {
    (b2 - b1).sin() + (b3 - b2).sin() + (b1 - b3).sin()
}

/// Closed-form value of the angular integral with the horizontal projection
/// factor at half-angle `α`.
pub fn projection_closed_form(alpha: f64) -> f64 {
    let (s, c) = alpha.sin_cos();
    64.0 / 9.0 * c.powi(3) * s + 32.0 / 3.0 * c * s + 32.0 / 3.0 * alpha
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum AngleIntegral {
    /// `∫_{[0,2π)³} |det| = 24π²`.
    Area,
    /// `∫_{h,β} |det|` over the arcsine domain `= 512/9`.
    AreaArcsin,
    /// `∫ det · 2 sin((β2−β1)/2)` over the arcsine domain with `β1 < β2`
    /// `= 35π/3`.
    AreaLengthArcsin,
    /// `∫ det · (cos β1 − cos β2)` over the cone domain of half-angle `α`.
    Projection(f64),
}

impl AngleIntegral {
    pub fn id(&self) -> String {
        match self {
            AngleIntegral::Area => "area".into(),
            AngleIntegral::AreaArcsin => "area_arcsin".into(),
            AngleIntegral::AreaLengthArcsin => "area_length_arcsin".into(),
            AngleIntegral::Projection(a) => format!("projection_alpha_{a:.6}"),
        }
    }

    pub fn closed_form(&self) -> f64 {
        match *self {
            AngleIntegral::Area => 24.0 * PI * PI,
            AngleIntegral::AreaArcsin => 512.0 / 9.0,
            AngleIntegral::AreaLengthArcsin => 35.0 * PI / 3.0,
            AngleIntegral::Projection(a) => projection_closed_form(a),
        }
    }

    /// One importance-weighted sample: parameters are drawn uniformly in
    /// their (nested) ranges and the integrand is multiplied by the product
    /// of range lengths.
    fn sample(&self, rng: &mut impl Rng) -> f64 {
        let mut u = || rng.random::<f64>();
        match *self {
            AngleIntegral::Area => {
                let tau = 2.0 * PI;
                let (b1, b2, b3) = (tau * u(), tau * u(), tau * u());
                tau.powi(3) * det3(b1, b2, b3).abs()
            }
            AngleIntegral::AreaArcsin | AngleIntegral::AreaLengthArcsin => {
                let h = 2.0 * u() - 1.0;
                let a = h.asin();
                let (l3, l12) = (PI - 2.0 * a, PI + 2.0 * a);
                let b3 = PI + a + l3 * u();
                let b2 = -a + l12 * u();
                let b1 = -a + l12 * u();
                let vol = 2.0 * l3 * l12 * l12;
                if matches!(self, AngleIntegral::AreaArcsin) {
                    vol * det3(b1, b2, b3).abs()
                } else if b1 < b2 {
                    vol * det3(b1, b2, b3) * 2.0 * (0.5 * (b2 - b1)).sin()
                } else {
                    0.0
                }
            }
            AngleIntegral::Projection(al) => {
                let b3 = FRAC_PI_2 + PI * u();
                let l2 = b3 - FRAC_PI_2;
                let b2 = PI - b3 + l2 * u();
                let b1 = PI - b2 - 2.0 * al + 4.0 * al * u();
                PI * l2 * 4.0 * al * det3(b1, b2, b3) * (b1.cos() - b2.cos())
            }
        }
    }

    /// Nested Gauss–Legendre quadrature with `m` nodes per dimension, on the
    /// ordered (sign-definite) form of each integral. The arcsine domains use
    /// `h = sin φ` to remove the endpoint singularity.
    pub fn nested_quadrature(&self, m: usize) -> f64 {
        let rule = gauss_legendre(m);
        let r = &rule;
        match *self {
            AngleIntegral::Area => {
                6.0 * legendre_on(r, 0.0, 2.0 * PI, |b3| {
                    legendre_on(r, 0.0, b3, |b2| legendre_on(r, 0.0, b2, |b1| det3(b1, b2, b3)))
                })
            }
            AngleIntegral::AreaArcsin | AngleIntegral::AreaLengthArcsin => {
                let length = matches!(self, AngleIntegral::AreaLengthArcsin);
                let factor = if length { 1.0 } else { 2.0 };
                factor
                    * legendre_on(r, -FRAC_PI_2, FRAC_PI_2, |phi| {
                        let a = phi;
                        phi.cos()
                            * legendre_on(r, PI + a, 2.0 * PI - a, |b3| {
                                legendre_on(r, -a, PI + a, |b2| {
                                    legendre_on(r, -a, b2, |b1| {
                                        let d = det3(b1, b2, b3);
                                        if length {
                                            d * 2.0 * (0.5 * (b2 - b1)).sin()
                                        } else {
                                            d
                                        }
                                    })
                                })
                            })
                    })
            }
            AngleIntegral::Projection(al) => legendre_on(r, FRAC_PI_2, 1.5 * PI, |b3| {
                legendre_on(r, PI - b3, FRAC_PI_2, |b2| {
                    legendre_on(r, PI - b2 - 2.0 * al, PI - b2 + 2.0 * al, |b1| det3(b1, b2, b3) * (b1.cos() - b2.cos()))
                })
            }),
        }
    }
}

/// Monte Carlo estimate and its standard error. Samples are split into
/// blocks of fixed size with sub-seeds `mix(seed, block)`, so the result does
/// not depend on the number of worker threads.
pub fn monte_carlo(which: AngleIntegral, samples: u64, seed: u64) -> (f64, f64) {
    const BLOCK: u64 = 1 << 16;
    let blocks = samples.div_ceil(BLOCK);
    let sums: Vec<(f64, f64, u64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_from_seed(mix_seed(seed, b));
            let count = BLOCK.min(samples - b * BLOCK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                let x = which.sample(&mut rng);
                s += x;
                s2 += x * x;
            }
            (s, s2, count)
        })
        .collect();
    let (s, s2, c) = sums.iter().fold((0.0, 0.0, 0u64), |acc, x| (acc.0 + x.0, acc.1 + x.1, acc.2 + x.2));
    let c = c as f64;
    let mean = s / c;
    let var = (s2 / c - mean * mean).max(0.0) * c / (c - 1.0).max(1.0);
    (mean, (var / c).sqrt())
}

/// One line of the verification report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralCheck {
    pub integral_id: String,
    pub estimate: f64,
    pub closed_form: f64,
    pub rel_err: f64,
    pub pass: bool,
}

impl IntegralCheck {
    fn new(integral_id: String, estimate: f64, closed_form: f64, tol: f64) -> Self {
        let rel_err = ((estimate - closed_form) / closed_form).abs();
        IntegralCheck { integral_id, estimate, closed_form, rel_err, pass: rel_err <= tol }
    }
}

/// Intensities at which the Gaussian moments are checked.
pub const MOMENT_INTENSITIES: [f64; 4] = [1.0, 10.0, 153.0, 1e4];
/// Half-angles at which the projection integral is checked.
pub const PROJECTION_ALPHAS: [f64; 3] = [0.01, 0.1, std::f64::consts::FRAC_PI_8];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyOptions {
    pub samples: u64,
    pub seed: u64,
    /// Tolerance for the Gaussian moments.
    pub moment_tol: f64,
    /// Tolerance for the Monte Carlo angular integrals.
    pub mc_tol: f64,
    /// Nodes per dimension for the nested quadrature cross-check; 0 skips it.
    pub nested_nodes: usize,
    /// Tolerance for the nested quadrature cross-check.
    pub nested_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 10_000_000, seed: 2024, moment_tol: 1e-9, mc_tol: 1e-2, nested_nodes: 24, nested_tol: 1e-6 }
    }
}

/// Every closed form against its numeric oracle.
pub fn verify_integrals(opts: &VerifyOptions) -> Vec<IntegralCheck> {
    let mut out = Vec::new();
    for &n in &MOMENT_INTENSITIES {
        for &(j, lower) in &MOMENTS {
            let id = format!("moment_r{j}_from{lower}_n{n}");
            if lower == 1 {
                let est = moment_by_quadrature(j, n, lower, 1e-13);
                out.push(IntegralCheck::new(format!("{id}_scaled"), est, gaussian_tail_scaled(n), opts.moment_tol));
            } else {
                let est = moment_by_quadrature(j, n, lower, 1e-13);
                let cf = gaussian_moment(j, n, lower).expect("supported moment");
                out.push(IntegralCheck::new(id, est, cf, opts.moment_tol));
            }
        }
    }
    let mut angles = vec![AngleIntegral::Area, AngleIntegral::AreaArcsin, AngleIntegral::AreaLengthArcsin];
    angles.extend(PROJECTION_ALPHAS.iter().map(|&a| AngleIntegral::Projection(a)));
    for (i, which) in angles.iter().enumerate() {
        let (est, _) = monte_carlo(*which, opts.samples, mix_seed(opts.seed, i as u64));
        out.push(IntegralCheck::new(format!("{}_mc", which.id()), est, which.closed_form(), opts.mc_tol));
        if opts.nested_nodes > 0 {
            let q = which.nested_quadrature(opts.nested_nodes);
            out.push(IntegralCheck::new(format!("{}_quad", which.id()), q, which.closed_form(), opts.nested_tol));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_spot_values() {
        assert!((gaussian_moment(4, 1.0, 0).unwrap() - 0.037_995_443_865_876_5).abs() < 1e-15);
        assert!((gaussian_moment(5, 1.0, 0).unwrap() - 1.0 / PI.powi(3)).abs() < 1e-16);
        let tail = (-PI).exp() * (1.0 / (2.0 * PI) + 1.0 / (PI * PI) + 1.0 / PI.powi(3));
        assert!((gaussian_moment(5, 1.0, 1).unwrap() - tail).abs() < 1e-16);
        assert_eq!(gaussian_moment(7, 1.0, 0), Err(BoundsError::UnsupportedMoment(7, 0)));
        assert_eq!(gaussian_moment(4, 1.0, 1), Err(BoundsError::UnsupportedMoment(4, 1)));
    }

    #[test]
    fn moments_match_quadrature() {
        for &n in &MOMENT_INTENSITIES {
            for &(j, lower) in &MOMENTS {
                let q = moment_by_quadrature(j, n, lower, 1e-13);
                let cf = if lower == 1 { gaussian_tail_scaled(n) } else { gaussian_moment(j, n, lower).unwrap() };
                assert!(((q - cf) / cf).abs() < 1e-11, "j={j} lower={lower} n={n}: {q} vs {cf}");
            }
        }
        // Unscaled tail where it does not underflow.
        let q = moment_by_quadrature(5, 1.0, 1, 1e-13) * (-PI).exp();
        assert!((q / gaussian_moment(5, 1.0, 1).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nested_quadrature_matches_closed_forms() {
        for which in [AngleIntegral::Area, AngleIntegral::AreaArcsin, AngleIntegral::AreaLengthArcsin, AngleIntegral::Projection(0.1)] {
            let q = which.nested_quadrature(20);
            assert!((q / which.closed_form() - 1.0).abs() < 1e-6, "{which:?}: {q}");
        }
    }

    #[test]
    fn monte_carlo_is_close_and_deterministic() {
        for which in [AngleIntegral::Area, AngleIntegral::AreaArcsin, AngleIntegral::AreaLengthArcsin, AngleIntegral::Projection(0.1)] {
            let (m, se) = monte_carlo(which, 200_000, 7);
            assert!((m - which.closed_form()).abs() < 5.0 * se, "{which:?}: {m} ± {se}");
            assert_eq!(monte_carlo(which, 200_000, 7), (m, se));
        }
    }
}
