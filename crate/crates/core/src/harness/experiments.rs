use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use super::{HarnessError, StatSummary};
use crate::delaunay::{Location, Mesh, NONE};
use crate::geom::{incircle_ccw, Point, Sign};
use crate::paths::{greedy_path_from_walk, shortest_path_pruned, straight_walk, upper_path_from_walk, PathKind};
use crate::pixels::PixelParams;
use crate::sampling::{default_margin, make_free_field, make_instance, make_origin_instance, mix_seed, MarginPolicy};

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub intensity: f64,
    pub k: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub paths: Vec<PathKind>,
    pub margin: MarginPolicy,
    pub pixel: Option<PixelParams>,
}

impl ExperimentConfig {
    /// All four paths under the default window.
    pub fn new(intensity: f64, k: f64, trials: usize, master_seed: u64) -> Result<Self, HarnessError> {
        let cfg = ExperimentConfig {
            intensity,
            k,
            trials,
            master_seed,
            paths: PathKind::ALL.to_vec(),
            margin: MarginPolicy::Default,
            pixel: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if !(self.intensity > 0.0 && self.intensity.is_finite()) {
            return bad(format!("intensity must be positive, got {}", self.intensity));
        }
        if !(self.k > 0.0 && self.k.is_finite()) {
            return bad(format!("k must be positive, got {}", self.k));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.paths.is_empty() {
            return bad("no paths requested".into());
        }
        if self.paths.contains(&PathKind::Sp) && !self.margin.supports_shortest_path() {
            return bad("the corridor window does not support the shortest path".into());
        }
        Ok(())
    }
}

/// One path in one trial. The straight walk has no length; its size is the
/// number of crossed edges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathMeasure {
    pub path: PathKind,
    pub length: Option<f64>,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    pub measures: Vec<PathMeasure>,
}

impl TrialRecord {
    pub fn length(&self, path: PathKind) -> Option<f64> {
        self.measures.iter().find(|m| m.path == path).and_then(|m| m.length)
    }

    /// `ℓ(SP) ≤ ℓ(GP)` and `ℓ(SP) ≤ ℓ(UP)` for the paths present.
    pub fn ordering_ok(&self) -> bool {
        let Some(sp) = self.length(PathKind::Sp) else {
            return true;
        };
        [PathKind::Gp, PathKind::Up].iter().all(|&p| self.length(p).is_none_or(|l| sp <= l * (1.0 + 1e-12)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathSummary {
    pub path: PathKind,
    pub length: Option<StatSummary>,
    pub size_over_sqrt_n: StatSummary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathExperiment {
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    pub summaries: Vec<PathSummary>,
}

impl PathExperiment {
    pub fn summary(&self, path: PathKind) -> Option<&PathSummary> {
        self.summaries.iter().find(|s| s.path == path)
    }

    /// Seeds of trials violating the path ordering.
    pub fn ordering_violations(&self) -> Vec<u64> {
        self.records.iter().filter(|r| !r.ordering_ok()).map(|r| r.seed).collect()
    }
}

fn run_trial(cfg: &ExperimentConfig, index: usize) -> Result<TrialRecord, HarnessError> {
    let seed = mix_seed(cfg.master_seed, index as u64);
    let fail = |m: String| HarnessError::Trial { index, seed, message: m };
    let inst = make_instance(cfg.intensity, cfg.k, cfg.margin, seed).map_err(|e| fail(e.to_string()))?;
    let walk = straight_walk(&inst).map_err(|e| fail(e.to_string()))?;
    let up = upper_path_from_walk(&inst.mesh, &walk, inst.s, inst.t);
    let mut measures = Vec::with_capacity(cfg.paths.len());
    for &path in &cfg.paths {
        let m = match path {
            PathKind::Sw => PathMeasure { path, length: None, size: walk.crossed_edges },
            PathKind::Up => PathMeasure { path, length: Some(up.length), size: up.size },
            PathKind::Gp => {
                let gp = greedy_path_from_walk(&inst.mesh, &walk, inst.s, inst.t).map_err(|e| fail(e.to_string()))?;
                PathMeasure { path, length: Some(gp.length), size: gp.size }
            }
            PathKind::Sp => {
                let sp = shortest_path_pruned(&inst.mesh, inst.s, inst.t, Some(up.length)).map_err(|e| fail(e.to_string()))?;
                PathMeasure { path, length: Some(sp.length), size: sp.size }
            }
        };
        measures.push(m);
    }
    Ok(TrialRecord { index, seed, measures })
}

/// Runs every trial and summarizes `ℓ(P)` and `|P|/√n` per path. A failed
/// trial aborts the run; the error carries its index and seed.
pub fn run_path_experiment(cfg: &ExperimentConfig) -> Result<PathExperiment, HarnessError> {
    cfg.validate()?;
    let records: Vec<TrialRecord> = (0..cfg.trials).into_par_iter().map(|i| run_trial(cfg, i)).collect::<Result<_, _>>()?;
    let sqrt_n = cfg.intensity.sqrt();
    let summaries = cfg
        .paths
        .iter()
        .map(|&path| {
            let ms: Vec<&PathMeasure> = records.iter().filter_map(|r| r.measures.iter().find(|m| m.path == path)).collect();
            let lengths: Vec<f64> = ms.iter().filter_map(|m| m.length).collect();
            let sizes: Vec<f64> = ms.iter().map(|m| m.size as f64 / sqrt_n).collect();
            PathSummary {
                path,
                length: (!lengths.is_empty()).then(|| StatSummary::from_samples(&lengths)),
                size_over_sqrt_n: StatSummary::from_samples(&sizes),
            }
        })
        .collect();
    Ok(PathExperiment { config: cfg.clone(), records, summaries })
}

/// Half-width of the square window around the origin: four default margins.
/// A triangle near the origin can only be affected by the window if an
/// empty disk of radius about one margin fits inside it.
pub fn origin_half_width(intensity: f64) -> f64 {
    4.0 * default_margin(intensity)
}

/// Number of triangles whose open circumdisk contains `p`. These triangles
/// form an edge-connected set around the triangle containing `p`.
pub fn circumdisks_containing(mesh: &Mesh, p: Point) -> usize {
    let Location::Triangle(t0) = mesh.locate(p, None) else {
        return 0;
    };
    let inside = |t: u32| {
        let [a, b, c] = mesh.triangle_points(t);
        incircle_ccw(a, b, c, p) == Sign::Positive
    };
    if !inside(t0) {
        return 0;
    }
    let mut seen = HashSet::from([t0]);
    let mut queue = VecDeque::from([t0]);
    while let Some(t) = queue.pop_front() {
        for n in mesh.neighbors(t) {
            if n != NONE && !seen.contains(&n) && inside(n) {
                seen.insert(n);
                queue.push_back(n);
            }
        }
    }
    seen.len()
}

fn origin_trials<T: Send>(
    trials: usize,
    seed: u64,
    f: impl Fn(usize, u64) -> Result<T, HarnessError> + Sync + Send,
) -> Result<Vec<T>, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::Config("trials must be at least 1".into()));
    }
    (0..trials).into_par_iter().map(|i| f(i, mix_seed(seed, i as u64))).collect()
}

/// `N₀`: triangles of `Del(X_n)` whose circumdisk contains the origin.
pub fn estimate_n0(intensity: f64, trials: usize, seed: u64) -> Result<StatSummary, HarnessError> {
    let half = origin_half_width(intensity);
    let window = crate::geom::Rect::square(Point::new(0.0, 0.0), half);
    let counts = origin_trials(trials, seed, |index, sd| {
        let mesh = make_free_field(intensity, &window, sd).map_err(|e| HarnessError::Trial { index, seed: sd, message: e.to_string() })?;
        Ok(circumdisks_containing(&mesh, Point::new(0.0, 0.0)) as f64)
    })?;
    Ok(StatSummary::from_samples(&counts))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct L0Estimate {
    pub intensity: f64,
    /// `L₀`
    pub length: StatSummary,
    /// `L₀·√n`
    pub scaled: StatSummary,
}

/// `L₀`: total length of the edges at the origin in `Del(X_n ∪ {O})`.
pub fn estimate_l0(intensity: f64, trials: usize, seed: u64) -> Result<L0Estimate, HarnessError> {
    let half = origin_half_width(intensity);
    let lengths = origin_trials(trials, seed, |index, sd| {
        let (mesh, o) = make_origin_instance(intensity, half, sd).map_err(|e| HarnessError::Trial { index, seed: sd, message: e.to_string() })?;
        let mut nb = Vec::new();
        mesh.vertex_neighbors(o, &mut nb);
        let po = mesh.vertex(o);
        Ok(nb.iter().map(|&w| po.dist(mesh.vertex(w))).sum::<f64>())
    })?;
    let scaled: Vec<f64> = lengths.iter().map(|l| l * intensity.sqrt()).collect();
    Ok(L0Estimate { intensity, length: StatSummary::from_samples(&lengths), scaled: StatSummary::from_samples(&scaled) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VarianceRow {
    pub intensity: f64,
    pub trials: usize,
    pub mean_length: f64,
    pub var_length: f64,
    /// `Var(ℓ(UP))·√n`
    pub var_sqrt_n: f64,
    /// Fraction of trials with `ℓ(UP) > 1.2k`.
    pub tail_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceStudy {
    pub rows: Vec<VarianceRow>,
    /// `Var(ℓ(UP))` strictly decreases along the intensities.
    pub decreasing: bool,
    /// `max/min` of `Var·√n` over the intensities.
    pub ratio_spread: f64,
}

/// `Var(ℓ(UP))` at each intensity, with `k = 1` on the corridor window.
pub fn variance_study(intensities: &[f64], trials: usize, seed: u64) -> Result<VarianceStudy, HarnessError> {
    if intensities.len() < 2 || trials < 2 {
        return Err(HarnessError::Config("need at least two intensities and two trials".into()));
    }
    let k = 1.0;
    let mut rows = Vec::new();
    for (j, &n) in intensities.iter().enumerate() {
        let cfg = ExperimentConfig {
            intensity: n,
            k,
            trials,
            master_seed: mix_seed(seed, j as u64),
            paths: vec![PathKind::Up],
            margin: MarginPolicy::Corridor,
            pixel: None,
        };
        let exp = run_path_experiment(&cfg)?;
        let lengths: Vec<f64> = exp.records.iter().filter_map(|r| r.length(PathKind::Up)).collect();
        let s = StatSummary::from_samples(&lengths);
        let var = s.variance().unwrap_or(0.0);
        let tail = lengths.iter().filter(|&&l| l > 1.2 * k).count() as f64 / lengths.len() as f64;
        rows.push(VarianceRow { intensity: n, trials, mean_length: s.mean, var_length: var, var_sqrt_n: var * n.sqrt(), tail_fraction: tail });
    }
    let decreasing = rows.windows(2).all(|w| w[1].var_length < w[0].var_length);
    let r: Vec<f64> = rows.iter().map(|r| r.var_sqrt_n).collect();
    let ratio_spread = r.iter().cloned().fold(f64::MIN, f64::max) / r.iter().cloned().fold(f64::MAX, f64::min);
    Ok(VarianceStudy { rows, decreasing, ratio_spread })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::{build, InsertionOrder};

    #[test]
    fn circumdisk_count_matches_scan() {
        let pts: Vec<Point> = (0..200u64)
            .map(|i| {
                let a = mix_seed(3, i);
                Point::new((a >> 11) as f64 / (1u64 << 53) as f64 - 0.5, (mix_seed(4, i) >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
            })
            .collect();
        let mesh = build(&pts, InsertionOrder::Hilbert).unwrap();
        for q in [Point::new(0.0, 0.0), Point::new(0.1, -0.2), Point::new(0.31, 0.05)] {
            let scan = (0..mesh.num_triangles() as u32)
                .filter(|&t| {
                    let [a, b, c] = mesh.triangle_points(t);
                    incircle_ccw(a, b, c, q) == Sign::Positive
                })
                .count();
            assert_eq!(circumdisks_containing(&mesh, q), scan);
        }
    }

    #[test]
    fn config_validation() {
        assert!(ExperimentConfig::new(100.0, 1.0, 0, 1).is_err());
        assert!(ExperimentConfig::new(0.0, 1.0, 1, 1).is_err());
        let mut c = ExperimentConfig::new(100.0, 1.0, 1, 1).unwrap();
        c.margin = MarginPolicy::Corridor;
        assert!(c.validate().is_err());
        c.paths = vec![PathKind::Up];
        assert!(c.validate().is_ok());
    }

    #[test]
    fn single_trial_has_no_spread() {
        let exp = run_path_experiment(&ExperimentConfig::new(500.0, 1.0, 1, 9).unwrap()).unwrap();
        for s in &exp.summaries {
            assert_eq!(s.size_over_sqrt_n.std, None);
        }
        assert!(exp.ordering_violations().is_empty());
    }
}
