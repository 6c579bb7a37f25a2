use std::path::{Path, PathBuf};

use anyhow::Context;
use pds_stretch::bounds::{
    eval_p, eval_p_unchecked, lambda_witness, p_terms, search, verify_integrals, BoundsError, SearchRange, VerifyOptions,
};
use pds_stretch::geom::Point;
use pds_stretch::harness::{
    band_plot_svg, estimate_l0, estimate_n0, integral_rows_csv, path_rows, paths_csv, pixel_study, run_path_experiment,
    theorem_checks, theorem_rows_csv, variance_study, write_file, BandPoint, ExperimentConfig, HarnessError, PixelStudyConfig,
    TheoremConfig,
};
use pds_stretch::paths::PathKind;
use pds_stretch::pixels::{check_animal_bound, extract_animal, is_four_connected, Color, GridSpec};
use pds_stretch::sampling::MarginPolicy;

use crate::config::{parse_color, parse_margin, parse_path, pick, FileConfig};
use crate::{
    AnimalArgs, BoundArgs, Command, IntegralsArgs, OriginArgs, PixelsArgs, SimulateArgs, TheoremsArgs, UsageError,
    VarianceArgs, Verdict, WalkCountArgs,
};

type Outcome = anyhow::Result<Verdict>;

pub fn dispatch(command: Command, file: &FileConfig) -> Outcome {
    match command {
        Command::Simulate(a) => simulate(a, file),
        Command::WalkCount(a) => walk_count(a, file),
        Command::N0(a) => n0(a, file),
        Command::L0(a) => l0(a, file),
        Command::Variance(a) => variance(a, file),
        Command::Pixels(a) => pixels(a, file),
        Command::Theorems(a) => theorems(a, file),
        Command::Integrals(a) => integrals(a, file),
        Command::Bound(a) => bound(a, file),
        Command::Animal(a) => animal(a, file),
    }
}

// Configuration errors from the library are usage errors.
fn harness(e: HarnessError) -> anyhow::Error {
    match e {
        HarnessError::Config(m) => UsageError(m).into(),
        other => other.into(),
    }
}

fn intensities(flag: Option<Vec<f64>>, file: &FileConfig, default: &[f64]) -> Vec<f64> {
    pick(flag, file.intensity.clone().map(Vec::from), default.to_vec())
}

fn first_of(v: Option<Vec<f64>>) -> Option<f64> {
    v.and_then(|v| v.first().copied())
}

fn to_usize(v: u64) -> usize {
    usize::try_from(v).unwrap_or(usize::MAX)
}

fn write_out(path: Option<&Path>, contents: &str) -> anyhow::Result<()> {
    if let Some(p) = path {
        write_file(p, contents)?;
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"))
}

fn simulate(a: SimulateArgs, f: &FileConfig) -> Outcome {
    let ns = intensities(a.n, f, &[1e5]);
    let k = pick(a.k, f.k, 1.0);
    let trials = to_usize(pick(a.trials, f.trials, 100));
    let seed = pick(a.seed, f.seed, 42);
    let paths = match (a.paths, &f.paths) {
        (Some(p), _) => p,
        (None, Some(v)) => v.iter().map(|s| parse_path(s)).collect::<Result<_, _>>().map_err(UsageError)?,
        (None, None) => PathKind::ALL.to_vec(),
    };
    let margin = match (a.margin, &f.margin) {
        (Some(m), _) => m,
        (None, Some(s)) => parse_margin(s).map_err(UsageError)?,
        (None, None) => MarginPolicy::Default,
    };
    let out = a.out.or_else(|| f.out.clone());
    let svg_dir = a.svg_dir.or_else(|| f.svg_dir.clone());

    let mut rows = Vec::new();
    let mut violations = 0;
    for &n in &ns {
        let cfg = ExperimentConfig { intensity: n, k, trials, master_seed: seed, paths: paths.clone(), margin, pixel: None };
        cfg.validate().map_err(harness)?;
        let exp = run_path_experiment(&cfg).map_err(harness)?;
        println!("n = {n}, k = {k}, trials = {trials}, seed = {seed}");
        println!("{:<4} {:>12} {:>12} {:>14} {:>14}", "path", "mean_len", "std_len", "mean_size/√n", "std_size/√n");
        for r in path_rows(&exp) {
            println!(
                "{:<4} {:>12} {:>12} {:>14.6} {:>14}",
                r.path,
                fmt_opt(r.mean_length),
                fmt_opt(r.std_length),
                r.mean_size_over_sqrt_n,
                fmt_opt(r.std_size_over_sqrt_n)
            );
            rows.push(r);
        }
        let bad = exp.ordering_violations();
        if !bad.is_empty() {
            println!("path ordering violated in {} trials, first seed {}", bad.len(), bad[0]);
        }
        violations += bad.len();
    }
    write_out(out.as_deref(), &paths_csv(&rows)?)?;
    if let Some(dir) = svg_dir {
        std::fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        for &p in &paths {
            let pick_rows = |len: bool| -> Vec<BandPoint> {
                rows.iter()
                    .filter(|r| r.path == p.name())
                    .filter_map(|r| {
                        let (m, s) = if len { (r.mean_length?, r.std_length) } else { (r.mean_size_over_sqrt_n, r.std_size_over_sqrt_n) };
                        Some(BandPoint { x: r.intensity, mean: m, std: s.unwrap_or(0.0) })
                    })
                    .collect()
            };
            for (metric, len, label) in [("length", true, "length / k"), ("size", false, "size / sqrt(n)")] {
                let pts = pick_rows(len);
                if pts.is_empty() {
                    continue;
                }
                let svg = band_plot_svg(&format!("{} {metric}", p.name().to_uppercase()), "intensity n", label, &pts);
                let path: PathBuf = dir.join(format!("{metric}_{}.svg", p.name()));
                write_file(&path, &svg)?;
            }
        }
        println!("wrote plots to {}", dir.display());
    }
    Ok(Verdict::from_ok(violations == 0))
}

fn walk_count(a: WalkCountArgs, f: &FileConfig) -> Outcome {
    let ns = intensities(a.n, f, &[1e5]);
    let k = pick(a.k, f.k, 1.0);
    let trials = to_usize(pick(a.trials, f.trials, 100));
    let seed = pick(a.seed, f.seed, 42);
    let analytic = pds_stretch::bounds::constant("walk_edges").expect("known constant");
    println!("{:>12} {:>14} {:>12} {:>12}", "n", "mean N/(k√n)", "se", "analytic");
    for &n in &ns {
        let cfg = ExperimentConfig { intensity: n, k, trials, master_seed: seed, paths: vec![PathKind::Sw], margin: MarginPolicy::Corridor, pixel: None };
        let exp = run_path_experiment(&cfg).map_err(harness)?;
        let s = exp.summary(PathKind::Sw).expect("requested").size_over_sqrt_n;
        println!("{n:>12} {:>14.6} {:>12} {analytic:>12.6}", s.mean / k, fmt_opt(s.se.map(|e| e / k)));
    }
    Ok(Verdict::Pass)
}

fn n0(a: OriginArgs, f: &FileConfig) -> Outcome {
    let ns = intensities(a.n, f, &[1e3]);
    let trials = to_usize(pick(a.trials, f.trials, 10_000));
    let seed = pick(a.seed, f.seed, 7);
    let mut ok = true;
    println!("{:>12} {:>10} {:>10} {:>10}", "n", "mean N0", "se", "within 3se of 4");
    for (j, &n) in ns.iter().enumerate() {
        let s = estimate_n0(n, trials, pds_stretch::sampling::mix_seed(seed, j as u64)).map_err(harness)?;
        let w = s.within(4.0, 3.0);
        ok &= w;
        println!("{n:>12} {:>10.4} {:>10} {w:>10}", s.mean, fmt_opt(s.se));
    }
    Ok(Verdict::from_ok(ok))
}

fn l0(a: OriginArgs, f: &FileConfig) -> Outcome {
    let ns = intensities(a.n, f, &[1e3, 1e4]);
    let trials = to_usize(pick(a.trials, f.trials, 2000));
    let seed = pick(a.seed, f.seed, 8);
    println!("{:>12} {:>12} {:>12} {:>10}", "n", "mean L0", "mean L0·√n", "se");
    for (j, &n) in ns.iter().enumerate() {
        let e = estimate_l0(n, trials, pds_stretch::sampling::mix_seed(seed, j as u64)).map_err(harness)?;
        println!("{n:>12} {:>12.6} {:>12.4} {:>10}", e.length.mean, e.scaled.mean, fmt_opt(e.scaled.se));
    }
    Ok(Verdict::Pass)
}

fn variance(a: VarianceArgs, f: &FileConfig) -> Outcome {
    let ns = intensities(a.n, f, &[1e4, 1e5, 1e6]);
    let trials = to_usize(pick(a.trials, f.trials, 500));
    let seed = pick(a.seed, f.seed, 11);
    let out = a.out.or_else(|| f.out.clone());
    let study = variance_study(&ns, trials, seed).map_err(harness)?;
    println!("{:>12} {:>10} {:>12} {:>14} {:>12} {:>10}", "n", "trials", "mean_len", "var_len", "var·√n", "P(>1.2k)");
    for r in &study.rows {
        println!("{:>12} {:>10} {:>12.6} {:>14.6e} {:>12.6} {:>10.4}", r.intensity, r.trials, r.mean_length, r.var_length, r.var_sqrt_n, r.tail_fraction);
    }
    println!("variance decreasing: {}; spread of var·√n: {:.3}", study.decreasing, study.ratio_spread);
    if out.is_some() {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &study.rows {
            w.serialize(r)?;
        }
        write_out(out.as_deref(), &String::from_utf8(w.into_inner()?)?)?;
    }
    Ok(Verdict::from_ok(study.decreasing && study.ratio_spread <= 3.0))
}

fn pixels(a: PixelsArgs, f: &FileConfig) -> Outcome {
    let cfg = PixelStudyConfig {
        intensity: pick(a.n, first_of(f.intensity.clone().map(Vec::from)), 153.0),
        rhos: pick(a.rho, f.rho.clone().map(Vec::from), vec![1e-4, 1e-7]),
        windows: to_usize(pick(a.windows, f.windows, 46)),
        half: i64::try_from(pick(a.half, f.half, 11)).map_err(|_| UsageError("half is too large".into()))?,
        master_seed: pick(a.seed, f.seed, 5),
    };
    let rows = pixel_study(&cfg).map_err(harness)?;
    println!("n = {}, {} windows of {} pixels", cfg.intensity, cfg.windows, cfg.pixels_per_window());
    println!("{:>10} {:>8} {:>8} {:>8} {:>12} {:>12} {:>12} {:>6}", "rho", "bad", "not_I", "H", "estimate", "se", "bound", "ok");
    let mut ok = true;
    for r in &rows {
        let note = if r.bound_in_domain { "" } else { " (bound outside its proven range)" };
        println!(
            "{:>10e} {:>8} {:>8} {:>8} {:>12.6} {:>12.6} {:>12.6} {:>6}{note}",
            r.rho, r.bad, r.not_independent, r.horizontal, r.estimate, r.se, r.bound, r.ok
        );
        if r.strong_weak_failures > 0 {
            println!("  {} witnesses failed the weak-horizontality check", r.strong_weak_failures);
        }
        ok &= r.ok && r.strong_weak_failures == 0;
    }
    Ok(Verdict::from_ok(ok))
}

fn theorems(a: TheoremsArgs, f: &FileConfig) -> Outcome {
    let d = TheoremConfig::default();
    let k = match (a.k, f.k) {
        (Some(k), _) => k,
        (None, Some(k)) if k > 0.0 && k.fract() == 0.0 => k as u64,
        (None, Some(k)) => return Err(UsageError(format!("k must be a positive integer, got {k}")).into()),
        (None, None) => u64::from(d.k),
    };
    let cfg = TheoremConfig {
        intensity: pick(a.n, first_of(f.intensity.clone().map(Vec::from)), d.intensity),
        k: u32::try_from(k).map_err(|_| UsageError("k is too large".into()))?,
        instances: to_usize(pick(a.instances, f.instances, d.instances as u64)),
        master_seed: pick(a.seed, f.seed, d.master_seed),
        rho: pick(a.rho, first_of(f.rho.clone().map(Vec::from)), d.rho),
        polylines: to_usize(pick(a.polylines, f.polylines, d.polylines as u64)),
        ..d
    };
    let out = a.out.or_else(|| f.out.clone());
    let report = theorem_checks(&cfg).map_err(harness)?;
    println!("{:<38} {:>10} {:>8} {:>9} {:>20}", "check", "instances", "passes", "failures", "first_failing_seed");
    for r in &report.rows {
        let first = r.first_failing_seed.map_or_else(|| "-".to_string(), |s| s.to_string());
        println!("{:<38} {:>10} {:>8} {:>9} {:>20}", r.check, r.instances, r.passes, r.failures, first);
    }
    write_out(out.as_deref(), &theorem_rows_csv(&report.rows)?)?;
    Ok(Verdict::from_ok(report.all_pass()))
}

fn integrals(a: IntegralsArgs, f: &FileConfig) -> Outcome {
    let d = VerifyOptions::default();
    let opts = VerifyOptions { samples: pick(a.samples, f.samples, d.samples), seed: pick(a.seed, f.seed, d.seed), ..d };
    if opts.samples < 2 {
        return Err(UsageError("samples must be at least 2".into()).into());
    }
    let rows = verify_integrals(&opts);
    println!("{:<40} {:>22} {:>22} {:>12} {:>5}", "integral_id", "estimate", "closed_form", "rel_err", "pass");
    for r in &rows {
        println!("{:<40} {:>22.15e} {:>22.15e} {:>12.3e} {:>5}", r.integral_id, r.estimate, r.closed_form, r.rel_err, r.pass);
    }
    write_out(a.out.or_else(|| f.out.clone()).as_deref(), &integral_rows_csv(&rows)?)?;
    Ok(Verdict::from_ok(rows.iter().all(|r| r.pass)))
}

fn bound(a: BoundArgs, f: &FileConfig) -> Outcome {
    let rho = pick(a.rho, first_of(f.rho.clone().map(Vec::from)), pds_stretch::bounds::PAPER_RHO);
    let n = pick(a.intensity, first_of(f.intensity.clone().map(Vec::from)), pds_stretch::bounds::PAPER_N);
    let unchecked = a.unchecked || f.unchecked.unwrap_or(false);
    let p = if unchecked {
        eval_p_unchecked(rho, n)
    } else {
        match eval_p(rho, n) {
            Ok(p) => p,
            Err(e @ (BoundsError::RhoOutOfDomain(_) | BoundsError::BadIntensity(_))) => {
                return Err(UsageError(format!("{e} (use --unchecked to evaluate anyway)")).into())
            }
            Err(e) => return Err(e.into()),
        }
    };
    let t = p_terms(rho, n);
    println!("rho = {rho:e}, n = {n}");
    println!("P = {p:.6e}  (terms {:.6e} + {:.6e} + {:.6e})", t.delaunay, t.empty, t.horizontal);
    println!("16·sqrt(P) = {:.6}", 16.0 * p.sqrt());
    println!("objective rho·(1 − 16·sqrt(P)) = {:.6e}", rho * (1.0 - 16.0 * p.sqrt()).max(0.0));
    if p > 0.0 && p < 1.0 {
        match lambda_witness(p)? {
            Some(l) => println!("scale witness lambda = {l}"),
            None => println!("no scale lambda ≡ 2 (mod 4) in [1.6/sqrt(P), 2/sqrt(P)]"),
        }
    }
    if a.search || f.search.unwrap_or(false) {
        let r = search(&SearchRange::default())?;
        println!("search optimum: rho = {:.6e}, n = {}, P = {:.6e}, objective = {:.6e}", r.rho, r.n, r.p, r.value);
        println!("reference point: objective = {:.6e}, P = {:.6e}", r.reference_value, r.reference_p);
    }
    Ok(Verdict::Pass)
}

/// Reads `x y` or `x,y` per line; blank lines and `#` comments are skipped.
pub fn read_polyline(path: &Path) -> anyhow::Result<Vec<Point>> {
    let text = std::fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| UsageError(format!("{}:{}: expected two numbers", path.display(), i + 1)))?;
        match nums[..] {
            [x, y] if x.is_finite() && y.is_finite() => out.push(Point::new(x, y)),
            _ => return Err(UsageError(format!("{}:{}: expected two finite numbers", path.display(), i + 1)).into()),
        }
    }
    if out.is_empty() {
        return Err(UsageError(format!("{} holds no vertices", path.display())).into());
    }
    Ok(out)
}

fn animal(a: AnimalArgs, f: &FileConfig) -> Outcome {
    let path = a.file.or_else(|| f.file.clone()).ok_or_else(|| UsageError("--file is required".into()))?;
    let color = match (a.color, &f.color) {
        (Some(c), _) => c,
        (None, Some(s)) => parse_color(s).map_err(UsageError)?,
        (None, None) => Color::Green,
    };
    let scale = pick(a.scale, f.scale, 1);
    let grid = GridSpec::new(scale, color).map_err(|e| UsageError(e.to_string()))?;
    let poly = read_polyline(&path)?;
    let animal = extract_animal(&poly, grid);
    println!("grid: scale {scale}, color {}", color.name());
    println!("animal size: {}", animal.len());
    println!("4-connected: {}", is_four_connected(&animal, grid));
    let b = check_animal_bound(&poly);
    println!("length: {:.6}", b.length);
    println!("unit-grid size {} vs (3√2/2)·length + 1 = {:.6}: {}", b.size, b.bound, if b.ok { "ok" } else { "exceeded" });
    let lattice = |p: &Point| p.x.fract() == 0.0 && p.y.fract() == 0.0;
    if !(lattice(&poly[0]) && lattice(&poly[poly.len() - 1])) {
        println!("note: the bound assumes both endpoints are lattice points");
    }
    Ok(Verdict::from_ok(b.ok))
}
