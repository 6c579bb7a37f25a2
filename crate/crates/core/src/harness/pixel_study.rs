use rayon::prelude::*;
use serde::Serialize;

use super::{HarnessError, StatSummary};
use crate::bounds::{eval_p_unchecked, RHO_MAX};
use crate::geom::{Point, Rect};
use crate::pixels::{classify_pixel, eps_rho, strong_implies_weak_check, Pixel, PixelContext, PixelParams};
use crate::sampling::{make_free_field, mix_seed};

/// Free-field estimate of `P(H_ρ ∨ ¬I_{ε_ρ})`. Each window is the square
/// `[−half, half]²` and contributes the pixels whose `C_2` fits inside it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PixelStudyConfig {
    pub intensity: f64,
    pub rhos: Vec<f64>,
    pub windows: usize,
    pub half: i64,
    pub master_seed: u64,
}

impl PixelStudyConfig {
    pub fn pixels_per_window(&self) -> usize {
        let side = (2 * self.half - 1).max(0) as usize;
        side * side
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PixelStudyRow {
    pub rho: f64,
    pub eps: f64,
    pub windows: usize,
    pub pixels: usize,
    pub bad: usize,
    pub not_independent: usize,
    pub horizontal: usize,
    /// Witnesses of `H_ρ` that failed the strong-implies-weak check.
    pub strong_weak_failures: usize,
    pub estimate: f64,
    /// Standard error with windows as independent clusters.
    pub se: f64,
    /// The closed-form bound at `(ρ, n)`.
    pub bound: f64,
    /// Whether `ρ` lies in the range where the bound is proven.
    pub bound_in_domain: bool,
    /// `estimate ≤ bound + 3·se`.
    pub ok: bool,
}

#[derive(Clone, Copy, Default)]
struct Counts {
    bad: usize,
    not_independent: usize,
    horizontal: usize,
    failures: usize,
}

pub fn pixel_study(cfg: &PixelStudyConfig) -> Result<Vec<PixelStudyRow>, HarnessError> {
    if cfg.windows == 0 || cfg.half < 2 || cfg.rhos.is_empty() || cfg.intensity.is_nan() || cfg.intensity <= 0.0 {
        return Err(HarnessError::Config(format!("invalid pixel study {cfg:?}")));
    }
    let params: Vec<Option<PixelParams>> = cfg.rhos.iter().map(|&r| PixelParams::with_rho(r).ok()).collect();
    let window = Rect::square(Point::new(0.0, 0.0), cfg.half as f64);
    let r = cfg.half - 1;
    let per_window: Vec<Vec<Counts>> = (0..cfg.windows)
        .into_par_iter()
        .map(|w| {
            let seed = mix_seed(cfg.master_seed, w as u64);
            let mesh = make_free_field(cfg.intensity, &window, seed).map_err(|e| HarnessError::Trial { index: w, seed, message: e.to_string() })?;
            let ctx = PixelContext::new(&mesh, window, None);
            let mut out = vec![Counts::default(); cfg.rhos.len()];
            for (j, &rho) in cfg.rhos.iter().enumerate() {
                let c = &mut out[j];
                for x in -r..=r {
                    for y in -r..=r {
                        let v = Pixel::new(x, y);
                        let class = classify_pixel(&ctx, v, rho)?;
                        c.bad += usize::from(class.bad());
                        c.not_independent += usize::from(!class.independent);
                        if let Some(wt) = &class.witness {
                            c.horizontal += 1;
                            if let Some(p) = &params[j] {
                                c.failures += usize::from(!strong_implies_weak_check(&ctx, v, p, wt)?.ok);
                            }
                        }
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<_, HarnessError>>()?;
    let m = cfg.pixels_per_window();
    Ok(cfg
        .rhos
        .iter()
        .enumerate()
        .map(|(j, &rho)| {
            let fractions: Vec<f64> = per_window.iter().map(|w| w[j].bad as f64 / m as f64).collect();
            let s = StatSummary::from_samples(&fractions);
            let sum = |f: fn(&Counts) -> usize| per_window.iter().map(|w| f(&w[j])).sum::<usize>();
            let se = s.se.unwrap_or(0.0);
            let bound = eval_p_unchecked(rho, cfg.intensity);
            PixelStudyRow {
                rho,
                eps: eps_rho(rho),
                windows: cfg.windows,
                pixels: m * cfg.windows,
                bad: sum(|c| c.bad),
                not_independent: sum(|c| c.not_independent),
                horizontal: sum(|c| c.horizontal),
                strong_weak_failures: sum(|c| c.failures),
                estimate: s.mean,
                se,
                bound,
                bound_in_domain: rho > 0.0 && rho < RHO_MAX,
                ok: s.mean <= bound + 3.0 * se,
            }
        })
        .collect())
}
