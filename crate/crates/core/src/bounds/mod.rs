//! The bad-pixel probability bound `P(ρ, n)`, the lower-bound objective and
//! its optimizer, named constants, and closed-form integrals.

pub mod integrals;
pub mod quad;

use serde::Serialize;
use thiserror::Error;

pub use integrals::{
    gaussian_moment, gaussian_tail_scaled, moment_by_quadrature, monte_carlo, verify_integrals, AngleIntegral, IntegralCheck, VerifyOptions,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("rho must lie in (0, 4e-6), got {0}")]
    RhoOutOfDomain(f64),
    #[error("intensity must be positive and finite, got {0}")]
    BadIntensity(f64),
    #[error("no closed form for the moment r^{0} from {1}")]
    UnsupportedMoment(u32, u32),
    #[error("no feasible point in the search range")]
    EmptyFeasibleSet,
    #[error("probability must lie in (0, 1), got {0}")]
    BadProbability(f64),
    #[error("invalid search range: {0}")]
    BadRange(String),
}

/// Upper end (exclusive) of the admissible `ρ`.
pub const RHO_MAX: f64 = 4e-6;
/// The operating point used for the headline constant.
pub const PAPER_RHO: f64 = 1.25e-10;
pub const PAPER_N: f64 = 153.0;
/// Feasibility threshold on `P`.
pub const P_FEASIBLE: f64 = 0.01;

/// The three summands of `P(ρ, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PTerms {
    /// `95 n³ e^{−0.194n}`
    pub delaunay: f64,
    /// `(19n² + 13n + 4) e^{−nπ}`
    pub empty: f64,
    /// `31.76 (3/4 + √ρ√(ρ+2)/2)² √(ρn)`
    pub horizontal: f64,
}

impl PTerms {
    pub fn total(&self) -> f64 {
        self.delaunay + self.empty + self.horizontal
    }
}

/// Term-by-term evaluation with no domain check.
pub fn p_terms(rho: f64, n: f64) -> PTerms {
    let delaunay = 95.0 * n.powi(3) * (-0.194 * n).exp();
    let empty = (19.0 * n * n + 13.0 * n + 4.0) * (-n * std::f64::consts::PI).exp();
    let a = 0.75 + 0.5 * rho.sqrt() * (rho + 2.0).sqrt();
    let horizontal = 31.76 * a * a * (rho * n).sqrt();
    PTerms { delaunay, empty, horizontal }
}

/// `P(ρ, n)` for `ρ ∈ (0, 4·10⁻⁶)`, `n > 0`.
pub fn eval_p(rho: f64, n: f64) -> Result<f64, BoundsError> {
    if !(rho > 0.0 && rho < RHO_MAX) {
        return Err(BoundsError::RhoOutOfDomain(rho));
    }
    if !(n > 0.0 && n.is_finite()) {
        return Err(BoundsError::BadIntensity(n));
    }
    Ok(p_terms(rho, n).total())
}

/// The same formula outside the admissible range of `ρ`, where it is no
/// longer a proven bound.
pub fn eval_p_unchecked(rho: f64, n: f64) -> f64 {
    p_terms(rho, n).total()
}

/// `ρ·max(0, 1 − 16√P)`.
pub fn objective(rho: f64, n: f64) -> Result<f64, BoundsError> {
    let p = eval_p(rho, n)?;
    Ok(rho * (1.0 - 16.0 * p.sqrt()).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchRange {
    pub rho_min: f64,
    pub rho_max: f64,
    /// Log-grid points in `ρ`.
    pub rho_steps: usize,
    pub n_min: u32,
    pub n_max: u32,
}

impl Default for SearchRange {
    fn default() -> Self {
        SearchRange { rho_min: 1e-12, rho_max: RHO_MAX * (1.0 - 1e-9), rho_steps: 400, n_min: 50, n_max: 500 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub rho: f64,
    pub n: u32,
    pub p: f64,
    pub value: f64,
    /// Objective at the reference point `(1.25·10⁻¹⁰, 153)`.
    pub reference_value: f64,
    pub reference_p: f64,
}

/// Maximizes the objective over the log grid in `ρ` and the integers in
/// `[n_min, n_max]`, keeping only points with `P < 0.01`; the best grid
/// point is refined in `ρ` by golden-section search.
pub fn search(range: &SearchRange) -> Result<SearchResult, BoundsError> {
    let ok = range.rho_min > 0.0 && range.rho_min < range.rho_max && range.rho_max < RHO_MAX && range.rho_steps >= 2 && range.n_min >= 1 && range.n_min <= range.n_max;
    if !ok {
        return Err(BoundsError::BadRange(format!("{range:?}")));
    }
    let feasible = |rho: f64, n: f64| -> f64 {
        match eval_p(rho, n) {
            Ok(p) if p < P_FEASIBLE => rho * (1.0 - 16.0 * p.sqrt()).max(0.0),
            _ => f64::NEG_INFINITY,
        }
    };
    let (l0, l1) = (range.rho_min.ln(), range.rho_max.ln());
    let step = (l1 - l0) / (range.rho_steps - 1) as f64;
    let mut best: Option<(f64, f64, u32)> = None;
    for n in range.n_min..=range.n_max {
        let nf = f64::from(n);
        let f = |x: f64| feasible(x.exp(), nf);
        let Some((v, i)) = (0..range.rho_steps).map(|i| (f(l0 + step * i as f64), i)).filter(|p| p.0.is_finite()).max_by(|p, q| p.0.total_cmp(&q.0)) else {
            continue;
        };
        // Golden section in log ρ on the cells around the best grid point.
        let (a, b) = (l0 + step * (i.max(1) - 1) as f64, (l0 + step * (i + 1) as f64).min(l1));
        let x = golden_max(&f, a, b);
        let (v, x) = if f(x) > v { (f(x), x) } else { (v, l0 + step * i as f64) };
        if best.is_none_or(|b| v > b.0) {
            best = Some((v, x, n));
        }
    }
    let (value, x, n) = best.ok_or(BoundsError::EmptyFeasibleSet)?;
    let rho = x.exp();
    Ok(SearchResult {
        rho,
        n,
        p: eval_p(rho, f64::from(n))?,
        value,
        reference_value: objective(PAPER_RHO, PAPER_N)?,
        reference_p: eval_p(PAPER_RHO, PAPER_N)?,
    })
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - g * (b - a), a + g * (b - a));
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd { c } else { d }
}

/// A scale `λ ∈ [1.6/√p, 2/√p]` with `λ ≡ 2 (mod 4)`, or `None`.
pub fn lambda_witness(p: f64) -> Result<Option<u64>, BoundsError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(BoundsError::BadProbability(p));
    }
    let (lo, hi) = (1.6 / p.sqrt(), 2.0 / p.sqrt());
    let first = (lo.ceil() as u64).max(2);
    let lambda = first + (2 + 4 - first % 4) % 4;
    Ok((lambda as f64 <= hi).then_some(lambda))
}

/// `4e¹⁰·e^{−(x−3.98)k√p}`, the tail bound for the count of bad sites.
pub fn prop8_tail(x: f64, k: f64, p: f64) -> f64 {
    4.0 * (10.0 - (x - 3.98) * k * p.sqrt()).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedConstant {
    pub name: &'static str,
    pub value: f64,
    pub description: &'static str,
}

pub fn constants() -> Vec<NamedConstant> {
    use std::f64::consts::{PI, SQRT_2};
    let c = |name, value, description| NamedConstant { name, value, description };
    vec![
        c("walk_edges", 64.0 / (3.0 * PI * PI), "edges crossing [s,t] per unit length per sqrt(n)"),
        c("upper_path_stretch", 35.0 / (3.0 * PI * PI), "limit of the expected upper-path stretch"),
        c("worst_stretch_upper", 1.998, "worst-case Delaunay stretch upper bound"),
        c("worst_stretch_lower", 1.5932, "worst-case Delaunay stretch lower bound"),
        c("half_circle_stretch", PI / 2.0, "stretch of the cocircular configuration"),
        c("animal_slope", 3.0 * SQRT_2 / 2.0, "animal size per unit path length"),
        c("animal_per_k", 4.24, "animal size per unit of ||s-t|| for short paths"),
        c("animal_per_k_coarse", 2.55, "animal size per unit of ||s-t|| on coarse grids"),
        c("improvement", 2.47e-11, "additive constant in the stretch lower bound"),
        c("prior_upper_stretch", 4.0 / PI, "earlier expected-stretch upper bound"),
        c("l0_constant", 6.8, "experimental constant c in E[L0] = c/sqrt(n)"),
        c("upper_path_tail", 1.2, "upper-path length threshold per unit of ||s-t||"),
    ]
}

pub fn constant(name: &str) -> Option<f64> {
    constants().into_iter().find(|c| c.name == name).map(|c| c.value)
}
