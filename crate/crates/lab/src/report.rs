//! CSV output (and the matching reader) plus a static SVG line chart.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use nw_core::harness::SigmaResult;
use nw_core::ErrorCurve;
use serde::Deserialize;

pub const CSV_HEADER: [&str; 9] = [
    "beta",
    "p",
    "m",
    "reps",
    "mean_error",
    "ci_low",
    "ci_high",
    "tie_count",
    "seed",
];
pub const SIGMA_SUMMARY_HEADER: [&str; 4] = ["sigma", "p", "best_beta", "mean_error"];

/// One parsed line of a curve CSV.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub struct CsvRow {
    pub beta: f64,
    pub p: f64,
    pub m: usize,
    pub reps: usize,
    pub mean_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub tie_count: u64,
    pub seed: u64,
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Writes the curve with `f64`'s `Display`, which is locale-free and
/// round-trips exactly.
pub fn write_curve_csv<W: Write>(curve: &ErrorCurve, w: W) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in &curve.rows {
        out.write_record([
            r.beta.to_string(),
            r.p.to_string(),
            r.m.to_string(),
            r.reps.to_string(),
            r.mean_error.to_string(),
            r.ci_low.to_string(),
            r.ci_high.to_string(),
            r.tie_count.to_string(),
            curve.base_seed.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_curve_csv<R: Read>(r: R) -> Result<Vec<CsvRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    anyhow::ensure!(
        header == CSV_HEADER,
        "unexpected CSV header {:?}",
        header.join(",")
    );
    rdr.deserialize()
        .map(|row| row.context("malformed CSV row"))
        .collect()
}

/// `sigma,p,best_beta,mean_error`, one line per (σ, p).
pub fn write_sigma_summary<W: Write>(results: &[SigmaResult], w: W) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(SIGMA_SUMMARY_HEADER)?;
    for s in results {
        for &(p, beta) in &s.best_betas {
            let err = s.curve.get(beta, p).map_or(f64::NAN, |r| r.mean_error);
            out.write_record([
                s.sigma.to_string(),
                p.to_string(),
                beta.to_string(),
                err.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `out.csv` → `out_sigma0.1.csv`.
pub fn sigma_path(base: &Path, sigma: f64) -> PathBuf {
    let stem = base
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = base
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    base.with_file_name(format!("{stem}_sigma{sigma}{ext}"))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

pub fn curve_csv_bytes(curve: &ErrorCurve) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_curve_csv(curve, &mut buf)?;
    Ok(buf)
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// Mean error against β, one polyline per p with its CI as a shaded band.
pub fn curve_svg(curve: &ErrorCurve, title: &str) -> String {
    let (w, h, pad) = (720.0, 440.0, 60.0);
    let rows = &curve.rows;
    let bmin = rows.iter().map(|r| r.beta).fold(f64::INFINITY, f64::min);
    let bmax = rows
        .iter()
        .map(|r| r.beta)
        .fold(f64::NEG_INFINITY, f64::max);
    let emax = rows.iter().map(|r| r.ci_high).fold(0.0, f64::max).max(1e-3) * 1.05;
    let log_x = bmin > 0.0 && bmax / bmin > 20.0;
    let fx = |b: f64| {
        let (v, lo, hi) = if log_x {
            (b.ln(), bmin.ln(), bmax.ln())
        } else {
            (b, bmin, bmax)
        };
        let span = if hi > lo { hi - lo } else { 1.0 };
        pad + (v - lo) / span * (w - 2.0 * pad)
    };
    let fy = |e: f64| h - pad - e / emax * (h - 2.0 * pad);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        w / 2.0,
        xml_escape(title)
    );
    let (x0, x1, y0, y1) = (pad, w - pad, h - pad, pad);
    let _ = writeln!(
        s,
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let e = emax * f64::from(i) / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" text-anchor="end">{:.3}</text>"#,
            pad - 6.0,
            fy(e) + 4.0,
            e
        );
    }
    let mut betas: Vec<f64> = rows.iter().map(|r| r.beta).collect();
    betas.sort_by(f64::total_cmp);
    betas.dedup();
    for b in &betas {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" text-anchor="middle">{b}</text>"#,
            fx(*b),
            h - pad + 18.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">beta{}</text>"#,
        w / 2.0,
        h - 14.0,
        if log_x { " (log scale)" } else { "" }
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" transform="rotate(-90 16 {})" text-anchor="middle">clean test error</text>"#,
        h / 2.0,
        h / 2.0
    );

    for (k, p) in curve.p_values().into_iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut pts: Vec<_> = rows.iter().filter(|r| r.p == p).collect();
        pts.sort_by(|a, b| a.beta.total_cmp(&b.beta));
        let upper = pts
            .iter()
            .map(|r| format!("{:.2},{:.2}", fx(r.beta), fy(r.ci_high)));
        let lower = pts
            .iter()
            .rev()
            .map(|r| format!("{:.2},{:.2}", fx(r.beta), fy(r.ci_low)));
        let band: Vec<String> = upper.chain(lower).collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#,
            band.join(" ")
        );
        let line: Vec<String> = pts
            .iter()
            .map(|r| format!("{:.2},{:.2}", fx(r.beta), fy(r.mean_error)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            line.join(" ")
        );
        let ly = pad + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" fill="{color}">p = {p}</text>"#,
            w - pad - 70.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
