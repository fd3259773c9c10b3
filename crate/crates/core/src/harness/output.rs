//! Result persistence: CSV rows, a JSON summary and a log-log SVG plot.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::harness::config::ExperimentConfig;
use crate::harness::experiment::{Aggregate, ResultRow, ResultTable};
use crate::harness::fit::RateFit;

pub const CSV_HEADER: [&str; 6] = ["n", "replicate", "seed", "cost", "estimator", "wall_time_ms"];

pub fn write_csv(table: &ResultTable, path: impl AsRef<Path>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in &table.rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<ResultTable> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<ResultRow>, _>>()?;
    Ok(ResultTable { rows, warnings: Vec::new() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub aggregates: Vec<Aggregate>,
    pub fit: Option<RateFit>,
    /// Reference slope `-p/d`.
    pub reference_slope: f64,
    pub warnings: Vec<String>,
    pub version: String,
}

impl Summary {
    pub fn new(config: &ExperimentConfig, table: &ResultTable, fit: Option<RateFit>) -> Self {
        let mut warnings = table.warnings.clone();
        if let Some(f) = &fit {
            warnings.extend(f.warnings.iter().cloned());
        }
        Self {
            config: config.clone(),
            aggregates: table.aggregate(),
            fit,
            reference_slope: -config.p / config.d as f64,
            warnings,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

pub fn write_summary(summary: &Summary, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(summary)? + "\n")?;
    Ok(())
}

pub fn read_summary(path: impl AsRef<Path>) -> Result<Summary> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}

const W: f64 = 640.0;
const H: f64 = 440.0;
const MARGIN: f64 = 60.0;

/// Log-log plot of the means with error bars, the fitted line and a
/// reference line of slope `reference_slope` through the first point.
pub fn render_svg(points: &[Aggregate], fit: Option<&RateFit>, reference_slope: f64, title: &str) -> String {
    let pos: Vec<&Aggregate> = points.iter().filter(|a| a.mean > 0.0).collect();
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#);
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" font-family="sans-serif" font-size="15" text-anchor="middle">{}</text>"#, W / 2.0, escape(title));
    if pos.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let lx: Vec<f64> = pos.iter().map(|a| (a.n as f64).log10()).collect();
    let ly: Vec<f64> = pos.iter().map(|a| a.mean.log10()).collect();
    let (mut x0, mut x1) = (lx.iter().copied().fold(f64::INFINITY, f64::min), lx.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let (mut y0, mut y1) = (ly.iter().copied().fold(f64::INFINITY, f64::min), ly.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    if x1 - x0 < 1e-9 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 - y0 < 1e-9 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let (px, py) = (0.08 * (x1 - x0), 0.15 * (y1 - y0));
    let (x0, x1, y0, y1) = (x0 - px, x1 + px, y0 - py, y1 + py);
    let sx = |v: f64| MARGIN + (v - x0) / (x1 - x0) * (W - 2.0 * MARGIN);
    let sy = |v: f64| H - MARGIN - (v - y0) / (y1 - y0) * (H - 2.0 * MARGIN);
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * MARGIN,
        H - 2.0 * MARGIN
    );
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">log10 n</text>"#, W / 2.0, H - 15.0);
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle" transform="rotate(-90 18 {})">log10 mean cost</text>"#,
        H / 2.0,
        H / 2.0
    );
    let line = |svg: &mut String, slope: f64, icpt: f64, style: &str| {
        let (a, b) = (x0, x1);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" {style}/>"#,
            sx(a),
            sy(icpt + slope * a),
            sx(b),
            sy(icpt + slope * b)
        );
    };
    svg.push_str(r#"<g>"#);
    svg.push('\n');
    // the fit lives on natural logs; on log10 axes the slope is unchanged
    if let Some(f) = fit {
        line(&mut svg, f.slope, f.intercept / std::f64::consts::LN_10, r#"stroke="steelblue" stroke-width="2""#);
    }
    line(&mut svg, reference_slope, ly[0] - reference_slope * lx[0], r#"stroke="gray" stroke-dasharray="6 4""#);
    svg.push_str("</g>\n");
    for (a, (x, y)) in pos.iter().zip(lx.iter().zip(&ly)) {
        if a.se > 0.0 && a.se < a.mean {
            let (lo, hi) = ((a.mean - a.se).log10(), (a.mean + a.se).log10());
            let _ = writeln!(svg, r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="black"/>"#, sx(*x), sy(lo), sy(hi));
        }
        let _ = writeln!(svg, r#"<circle class="point" cx="{:.2}" cy="{:.2}" r="4" fill="crimson"><title>n={} mean={:e}</title></circle>"#, sx(*x), sy(*y), a.n, a.mean);
    }
    let legend = match fit {
        Some(f) => format!("fit slope {:.3} ± {:.3}; reference {:.3}", f.slope, f.slope_se, reference_slope),
        None => format!("reference slope {reference_slope:.3}"),
    };
    let _ = writeln!(svg, r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#, MARGIN + 8.0, MARGIN + 18.0, escape(&legend));
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Paths written by [`emit_outputs`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub svg: PathBuf,
}

impl OutputPaths {
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let d = dir.as_ref();
        Self { csv: d.join("results.csv"), json: d.join("summary.json"), svg: d.join("rate.svg") }
    }
}

/// Write the CSV rows, the JSON summary and the SVG plot.
pub fn emit_outputs(cfg: &ExperimentConfig, table: &ResultTable, fit: Option<RateFit>, paths: &OutputPaths) -> Result<Summary> {
    for p in [&paths.csv, &paths.json, &paths.svg] {
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent)?;
        }
    }
    write_csv(table, &paths.csv)?;
    let summary = Summary::new(cfg, table, fit);
    write_summary(&summary, &paths.json)?;
    let title = format!("{} estimator, d = {}, p = {}", cfg.estimator, cfg.d, cfg.p);
    fs::write(&paths.svg, render_svg(&summary.aggregates, summary.fit.as_ref(), summary.reference_slope, &title))?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::Estimator;
    use crate::harness::fit::fit_rate;

    fn table() -> ResultTable {
        let mut rows = Vec::new();
        for (k, n) in [16usize, 32, 64].iter().enumerate() {
            for r in 0..3 {
                let cost = (1.0 + 0.1 * r as f64) / (*n as f64).sqrt() + 1e-17 * k as f64;
                rows.push(ResultRow { n: *n, replicate: r, seed: 1000 + r as u64, cost, estimator: Estimator::Proxy, wall_time_ms: 0.0 });
            }
        }
        ResultTable { rows, warnings: vec![] }
    }

    #[test]
    fn csv_round_trip_reproduces_means() {
        let dir = tempfile::tempdir().unwrap();
        let t = table();
        let cfg = ExperimentConfig { seed: 77, n_grid: vec![16, 32, 64], ..Default::default() };
        let summary = emit_outputs(&cfg, &t, Some(fit_rate(&t).unwrap()), &OutputPaths::in_dir(dir.path())).unwrap();
        let back = read_csv(dir.path().join("results.csv")).unwrap();
        assert_eq!(back.rows, t.rows);
        assert_eq!(back.aggregate(), summary.aggregates);
        let header = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
        assert_eq!(header.lines().next().unwrap(), CSV_HEADER.join(","));
        let json = read_summary(dir.path().join("summary.json")).unwrap();
        assert_eq!(json.config, cfg);
        assert_eq!(json.aggregates, summary.aggregates);
        let svg = std::fs::read_to_string(dir.path().join("rate.svg")).unwrap();
        assert_eq!(svg.matches(r#"class="point""#).count(), 3);
    }
}
