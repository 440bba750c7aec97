//! CSV, JSON and SVG writers for the experiment reports.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::rip::RipReport;
use super::spectrum::SpectrumReport;
use super::sweep::{SummaryRow, SweepResult};
use super::threshold::ThresholdReport;
use super::validation::ValidationReport;
use super::Report;
use crate::error::Result;

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Writes rows with a header line; `None` becomes an empty field.
pub fn write_csv<S: Serialize>(path: &Path, rows: &[S]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty-printed JSON with a trailing newline. Non-finite numbers become null.
pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

pub struct Series<'a> {
    pub label: &'a str,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

/// Line chart. Non-finite points break the line.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h) = (720.0, 440.0);
    let (left, right, top, bottom) = (70.0, 170.0, 40.0, 60.0);
    let pw = w - left - right;
    let ph = h - top - bottom;
    let finite = series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x0 = if x0.is_finite() { x0 - 1.0 } else { 0.0 };
        x1 = x0 + 2.0;
    }
    if !(y1 > y0) {
        y0 = if y0.is_finite() { y0 - 1.0 } else { 0.0 };
        y1 = y0 + 2.0;
    }
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + ph - (y - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, left + pw / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(s, r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, top + ph, top + ph + 5.0);
        let _ = writeln!(s, r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, top + ph + 18.0, tick(xv));
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{py:.2}" x2="{left}" y2="{py:.2}" stroke="black"/>"#, left - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, left - 8.0, py + 4.0, tick(yv));
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, left + pw / 2.0, h - 18.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        top + ph / 2.0,
        top + ph / 2.0,
        escape(y_label)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut segment: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, s: &mut String| {
            if seg.len() > 1 {
                let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, seg.join(" "));
            }
            seg.clear();
        };
        for &(x, y) in &ser.points {
            if x.is_finite() && y.is_finite() {
                segment.push(format!("{:.2},{:.2}", sx(x), sy(y)));
            } else {
                flush(&mut segment, &mut s);
            }
        }
        flush(&mut segment, &mut s);
        let ly = top + 16.0 + 18.0 * i as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 20.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 26.0, ly + 4.0, escape(ser.label));
    }
    s.push_str("</svg>\n");
    s
}

fn tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-2..1e4).contains(&a) {
        format!("{v:.1e}")
    } else {
        format!("{v:.2}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[derive(Serialize)]
struct SweepBody<'a> {
    cond_argmax: Option<usize>,
    risk_argmax: Option<usize>,
    notes: &'a [String],
    summary: &'a [SummaryRow],
}

/// `sweep.csv`, `sweep_summary.csv`, `sweep.json` and `sweep.svg`.
pub fn write_sweep<C: Serialize>(dir: &Path, config: &C, r: &SweepResult) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let paths = ["sweep.csv", "sweep_summary.csv", "sweep.json", "sweep.svg"].map(|f| dir.join(f));
    write_csv(&paths[0], &r.rows)?;
    write_csv(&paths[1], &r.summary)?;
    let body = SweepBody { cond_argmax: r.cond_argmax, risk_argmax: r.risk_argmax, notes: &r.notes, summary: &r.summary };
    write_json(&paths[2], &Report::new("sweep", config, &body))?;
    let series = [
        Series { label: "condition number", points: r.summary.iter().map(|s| (s.ratio, s.cond_rescaled)).collect() },
        Series { label: "risk", points: r.summary.iter().map(|s| (s.ratio, s.risk_rescaled)).collect() },
    ];
    fs::write(&paths[3], line_chart("Condition number and risk (rescaled)", "N / m", "rescaled value", &series))?;
    Ok(paths.to_vec())
}

#[derive(Serialize)]
struct DensityRow<'a> {
    scaling: &'a str,
    grid: f64,
    value: f64,
}

/// `density.csv`, `spectrum.json` and `spectrum.svg`.
pub fn write_spectrum<C: Serialize>(dir: &Path, config: &C, r: &SpectrumReport) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let paths = ["density.csv", "spectrum.json", "spectrum.svg"].map(|f| dir.join(f));
    let rows: Vec<DensityRow> = r
        .scalings
        .iter()
        .flat_map(|s| {
            s.density
                .grid
                .iter()
                .zip(&s.density.density)
                .map(|(g, v)| DensityRow { scaling: s.scaling.label(), grid: *g, value: *v })
        })
        .collect();
    write_csv(&paths[0], &rows)?;
    write_json(&paths[1], &Report::new("spectrum", config, r))?;
    let series: Vec<Series> = r
        .scalings
        .iter()
        .map(|s| Series {
            label: s.scaling.label(),
            points: s.density.grid.iter().copied().zip(s.density.density.iter().copied()).collect(),
        })
        .collect();
    fs::write(&paths[2], line_chart("Singular value densities", "singular value", "density (max 1)", &series))?;
    Ok(paths.to_vec())
}

pub fn write_threshold<C: Serialize>(dir: &Path, config: &C, r: &ThresholdReport) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let path = dir.join("threshold.json");
    write_json(&path, &Report::new("threshold", config, r))?;
    Ok(vec![path])
}

pub fn write_validation<C: Serialize>(dir: &Path, config: &C, r: &ValidationReport) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let path = dir.join("validation.json");
    write_json(&path, &Report::new("validate", config, r))?;
    Ok(vec![path])
}

pub fn write_rip<C: Serialize>(dir: &Path, config: &C, r: &RipReport) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let path = dir.join("rip.json");
    write_json(&path, &Report::new("rip", config, r))?;
    Ok(vec![path])
}

pub fn write_theory<C: Serialize, B: Serialize>(dir: &Path, config: &C, r: &B) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let path = dir.join("theory.json");
    write_json(&path, &Report::new("theory", config, r))?;
    Ok(vec![path])
}
