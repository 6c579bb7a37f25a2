use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::{CheckRow, HarnessError, PathExperiment};
use crate::bounds::IntegralCheck;

/// One line of the path table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathRow {
    pub path: String,
    pub intensity: f64,
    pub k: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub mean_length: Option<f64>,
    pub std_length: Option<f64>,
    pub mean_size_over_sqrt_n: f64,
    pub std_size_over_sqrt_n: Option<f64>,
}

pub fn path_rows(exp: &PathExperiment) -> Vec<PathRow> {
    let c = &exp.config;
    exp.summaries
        .iter()
        .map(|s| PathRow {
            path: s.path.name().to_string(),
            intensity: c.intensity,
            k: c.k,
            trials: c.trials,
            master_seed: c.master_seed,
            mean_length: s.length.map(|l| l.mean),
            std_length: s.length.and_then(|l| l.std),
            mean_size_over_sqrt_n: s.size_over_sqrt_n.mean,
            std_size_over_sqrt_n: s.size_over_sqrt_n.std,
        })
        .collect()
}

fn rows_csv<T: Serialize>(rows: &[T], header: &[&str]) -> Result<String, HarnessError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// `path,intensity,k,trials,master_seed,mean_length,std_length,mean_size_over_sqrt_n,std_size_over_sqrt_n`.
/// Undefined values are empty fields.
pub fn paths_csv(rows: &[PathRow]) -> Result<String, HarnessError> {
    rows_csv(
        rows,
        &["path", "intensity", "k", "trials", "master_seed", "mean_length", "std_length", "mean_size_over_sqrt_n", "std_size_over_sqrt_n"],
    )
}

/// `check,instances,passes,failures,first_failing_seed`.
pub fn theorem_rows_csv(rows: &[CheckRow]) -> Result<String, HarnessError> {
    rows_csv(rows, &["check", "instances", "passes", "failures", "first_failing_seed"])
}

/// `integral_id,estimate,closed_form,rel_err,pass`.
pub fn integral_rows_csv(rows: &[IntegralCheck]) -> Result<String, HarnessError> {
    rows_csv(rows, &["integral_id", "estimate", "closed_form", "rel_err", "pass"])
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    std::fs::write(path, contents).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

/// A point of a mean ± std band.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BandPoint {
    pub x: f64,
    pub mean: f64,
    pub std: f64,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// SVG plot of `mean ± std` against `x` on a log axis: a shaded band whose
/// height is the standard deviation, with the mean line on top.
pub fn band_plot_svg(title: &str, x_label: &str, y_label: &str, points: &[BandPoint]) -> String {
    let (w, h, m) = (640.0, 400.0, 60.0);
    let mut pts: Vec<BandPoint> = points.iter().copied().filter(|p| p.x > 0.0 && p.mean.is_finite() && p.std.is_finite()).collect();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x));
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle" font-size="12">{}</text>"#, w / 2.0, h - 12.0, escape(x_label));
    let _ = writeln!(svg, r#"<text x="16" y="{}" font-size="12" transform="rotate(-90 16 {})">{}</text>"#, h / 2.0, h / 2.0, escape(y_label));
    let _ = writeln!(svg, r#"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="black"/>"#, w - 2.0 * m, h - 2.0 * m);
    if !pts.is_empty() {
        let lx: Vec<f64> = pts.iter().map(|p| p.x.log10()).collect();
        let (x0, x1) = (lx[0], lx[lx.len() - 1]);
        let y0 = pts.iter().map(|p| p.mean - p.std).fold(f64::INFINITY, f64::min);
        let y1 = pts.iter().map(|p| p.mean + p.std).fold(f64::NEG_INFINITY, f64::max);
        let (xs, ys) = (if x1 > x0 { x1 - x0 } else { 1.0 }, if y1 > y0 { y1 - y0 } else { 1.0 });
        let px = |lx: f64| m + (lx - x0) / xs * (w - 2.0 * m);
        let py = |y: f64| h - m - (y - y0) / ys * (h - 2.0 * m);
        let upper = pts.iter().zip(&lx).map(|(p, &l)| format!("{:.2},{:.2}", px(l), py(p.mean + p.std)));
        let lower = pts.iter().zip(&lx).rev().map(|(p, &l)| format!("{:.2},{:.2}", px(l), py(p.mean - p.std)));
        let band: Vec<String> = upper.chain(lower).collect();
        let _ = writeln!(svg, r##"<polygon points="{}" fill="#9ecae1" fill-opacity="0.6" stroke="none"/>"##, band.join(" "));
        let line: Vec<String> = pts.iter().zip(&lx).map(|(p, &l)| format!("{:.2},{:.2}", px(l), py(p.mean))).collect();
        let _ = writeln!(svg, r##"<polyline points="{}" fill="none" stroke="#08519c" stroke-width="2"/>"##, line.join(" "));
        for (p, &l) in pts.iter().zip(&lx) {
            let _ = writeln!(svg, r#"<text x="{:.2}" y="{}" text-anchor="middle" font-size="10">{}</text>"#, px(l), h - m + 14.0, p.x);
        }
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="10">{:.4}</text>"#, m - 4.0, py(y0), y0);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="10">{:.4}</text>"#, m - 4.0, py(y1), y1);
    }
    svg.push_str("</svg>\n");
    svg
}
