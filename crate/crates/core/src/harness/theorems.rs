use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::HarnessError;
use crate::geom::Point;
use crate::paths::{greedy_path_from_walk, shortest_path, straight_walk, upper_path_from_walk};
use crate::pixels::{
    check_animal_bound, colored_size_bound, extract_animal, is_four_connected, length_animal_check, strong_horizontality,
    strong_implies_weak_check, Color, GridSpec, Pixel, PixelContext, PixelParams,
};
use crate::sampling::{make_instance, mix_seed, rng_from_seed, MarginPolicy};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremConfig {
    pub intensity: f64,
    /// Integer distance, so that `s` and `t` are lattice points.
    pub k: u32,
    pub instances: usize,
    pub master_seed: u64,
    /// `ρ` for the length/animal inequality.
    pub rho: f64,
    /// Further values of `ρ` at which horizontality witnesses are searched
    /// around `[s, t]` and checked against the weak property.
    pub witness_rhos: Vec<f64>,
    /// Random lattice-endpoint polylines for the animal bound.
    pub polylines: usize,
    /// Window margin around `[s, t]`.
    pub margin: f64,
}

impl Default for TheoremConfig {
    fn default() -> Self {
        TheoremConfig {
            intensity: 153.0,
            k: 5,
            instances: 100,
            master_seed: 2024,
            rho: 1e-4,
            witness_rhos: vec![1e-2, 3e-2],
            polylines: 10_000,
            margin: 4.0,
        }
    }
}

/// One line of the report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub check: String,
    pub instances: usize,
    pub passes: usize,
    pub failures: usize,
    pub first_failing_seed: Option<u64>,
}

impl CheckRow {
    fn new(check: &str) -> Self {
        CheckRow { check: check.into(), instances: 0, passes: 0, failures: 0, first_failing_seed: None }
    }

    fn record(&mut self, ok: bool, seed: u64) {
        self.instances += 1;
        if ok {
            self.passes += 1;
        } else {
            self.failures += 1;
            self.first_failing_seed.get_or_insert(seed);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremReport {
    pub rows: Vec<CheckRow>,
    /// Pixels with `H_ρ` found by the length/animal check at the configured `ρ`.
    pub horizontal_at_rho: usize,
}

impl TheoremReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.failures == 0)
    }

    pub fn row(&self, check: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.check == check)
    }
}

/// A polyline from a lattice point to a lattice point through up to eight
/// vertices, half of them on the half-integer lattice so that pixel sides
/// and corners are hit.
pub fn random_lattice_polyline(seed: u64) -> Vec<Point> {
    let mut rng = rng_from_seed(seed);
    let lattice = |rng: &mut rand_chacha::ChaCha8Rng| Point::new(rng.random_range(-5..=5) as f64, rng.random_range(-5..=5) as f64);
    let mut poly = vec![lattice(&mut rng)];
    for _ in 0..rng.random_range(0..=8) {
        let p = if rng.random_bool(0.5) {
            Point::new(rng.random_range(-8.0..8.0), rng.random_range(-8.0..8.0))
        } else {
            Point::new(rng.random_range(-16..=16) as f64 * 0.5, rng.random_range(-16..=16) as f64 * 0.5)
        };
        poly.push(p);
    }
    poly.push(lattice(&mut rng));
    poly
}

// Per-instance outcomes, in row order.
struct Outcome {
    seed: u64,
    checks: Vec<(&'static str, bool)>,
    witness_checks: Vec<bool>,
    horizontal: usize,
}

const INSTANCE_CHECKS: [&str; 12] = [
    "animal_bound_sp",
    "animal_bound_up",
    "animal_bound_gp",
    "animal_4_connected_sp",
    "size_bound_unit_sp",
    "size_bound_colored_sp",
    "length_animal",
    "sp_le_gp",
    "sp_le_up",
    "sp_lt_1998k",
    "sp_ge_k",
    "sp_is_mesh_path",
];

fn run_instance(cfg: &TheoremConfig, index: usize) -> Result<Outcome, HarnessError> {
    let seed = mix_seed(cfg.master_seed, index as u64);
    let fail = |m: String| HarnessError::Trial { index, seed, message: m };
    let k = f64::from(cfg.k);
    let inst = make_instance(cfg.intensity, k, MarginPolicy::Fixed(cfg.margin), seed).map_err(|e| fail(e.to_string()))?;
    let walk = straight_walk(&inst).map_err(|e| fail(e.to_string()))?;
    let up = upper_path_from_walk(&inst.mesh, &walk, inst.s, inst.t);
    let gp = greedy_path_from_walk(&inst.mesh, &walk, inst.s, inst.t).map_err(|e| fail(e.to_string()))?;
    let sp = shortest_path(&inst).map_err(|e| fail(e.to_string()))?;
    let sp_pts = sp.points(&inst.mesh);
    let unit = extract_animal(&sp_pts, GridSpec::unit());
    let colored_ok = Color::ALL
        .into_iter()
        .all(|c| (extract_animal(&sp_pts, GridSpec::colored(c)).len() as f64) < colored_size_bound(k, 2));
    let ctx = PixelContext::from_instance(&inst);
    let la = length_animal_check(&ctx, k, cfg.rho, &sp_pts)?;
    let tol = 1.0 + 1e-12;
    let checks = vec![
        ("animal_bound_sp", check_animal_bound(&sp_pts).ok),
        ("animal_bound_up", check_animal_bound(&up.points(&inst.mesh)).ok),
        ("animal_bound_gp", check_animal_bound(&gp.points(&inst.mesh)).ok),
        ("animal_4_connected_sp", is_four_connected(&unit, GridSpec::unit())),
        ("size_bound_unit_sp", (unit.len() as f64) < 4.24 * k + 1.0),
        ("size_bound_colored_sp", colored_ok),
        ("length_animal", la.ok),
        ("sp_le_gp", sp.length <= gp.length * tol),
        ("sp_le_up", sp.length <= up.length * tol),
        ("sp_lt_1998k", sp.length < 1.998 * k),
        ("sp_ge_k", sp.length >= k * (1.0 - 1e-12)),
        ("sp_is_mesh_path", sp.is_mesh_path(&inst.mesh)),
    ];
    debug_assert!(checks.iter().map(|c| c.0).eq(INSTANCE_CHECKS));

    let mut witness_checks = Vec::new();
    if let Ok(p) = PixelParams::with_rho(cfg.rho) {
        for &v in &la.horizontal {
            if let Some(w) = strong_horizontality(&ctx, v, cfg.rho)? {
                witness_checks.push(strong_implies_weak_check(&ctx, v, &p, &w)?.ok);
            }
        }
    }
    let kx = i64::from(cfg.k);
    for &rho in &cfg.witness_rhos {
        let p = PixelParams::with_rho(rho)?;
        for x in -2..=kx + 2 {
            for y in -3..=3 {
                let v = Pixel::new(x, y);
                if let Some(w) = strong_horizontality(&ctx, v, rho)? {
                    witness_checks.push(strong_implies_weak_check(&ctx, v, &p, &w)?.ok);
                }
            }
        }
    }
    Ok(Outcome { seed: inst.seed, checks, witness_checks, horizontal: la.horizontal.len() })
}

/// Runs the deterministic property suite. Every row is expected to have
/// zero failures.
pub fn theorem_checks(cfg: &TheoremConfig) -> Result<TheoremReport, HarnessError> {
    if cfg.instances == 0 || cfg.k == 0 || cfg.intensity.is_nan() || cfg.intensity <= 0.0 || cfg.margin.is_nan() || cfg.margin <= 0.0 {
        return Err(HarnessError::Config(format!("invalid theorem configuration {cfg:?}")));
    }
    let mut poly_row = CheckRow::new("animal_bound_random_polylines");
    let mut conn_row = CheckRow::new("animal_4_connected_random_polylines");
    let poly_results: Vec<(u64, bool, bool)> = (0..cfg.polylines)
        .into_par_iter()
        .map(|i| {
            let seed = mix_seed(mix_seed(cfg.master_seed, u64::MAX), i as u64);
            let poly = random_lattice_polyline(seed);
            let conn = is_four_connected(&extract_animal(&poly, GridSpec::unit()), GridSpec::unit());
            (seed, check_animal_bound(&poly).ok, conn)
        })
        .collect();
    for (seed, ok, conn) in poly_results {
        poly_row.record(ok, seed);
        conn_row.record(conn, seed);
    }

    let outcomes: Vec<Outcome> = (0..cfg.instances).into_par_iter().map(|i| run_instance(cfg, i)).collect::<Result<_, _>>()?;
    let mut rows = vec![poly_row, conn_row];
    rows.extend(INSTANCE_CHECKS.iter().map(|c| CheckRow::new(c)));
    let mut witness_row = CheckRow::new("strong_implies_weak");
    let mut horizontal_at_rho = 0;
    for o in &outcomes {
        for (row, &(_, ok)) in rows[2..].iter_mut().zip(&o.checks) {
            row.record(ok, o.seed);
        }
        for &ok in &o.witness_checks {
            witness_row.record(ok, o.seed);
        }
        horizontal_at_rho += o.horizontal;
    }
    rows.push(witness_row);
    Ok(TheoremReport { rows, horizontal_at_rho })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polylines_have_lattice_endpoints() {
        for i in 0..100 {
            let p = random_lattice_polyline(i);
            for q in [p[0], *p.last().unwrap()] {
                assert_eq!((q.x.fract(), q.y.fract()), (0.0, 0.0));
            }
        }
    }

    #[test]
    fn small_suite_passes() {
        let cfg = TheoremConfig { instances: 3, polylines: 200, witness_rhos: vec![3e-2], ..Default::default() };
        let r = theorem_checks(&cfg).unwrap();
        assert!(r.all_pass(), "{:#?}", r.rows);
        assert_eq!(r.row("sp_ge_k").unwrap().instances, 3);
    }
}
