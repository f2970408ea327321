use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::scoring::EstimatorKind;
use crate::sim::experiment::ReportRow;

pub const CSV_HEADER: [&str; 11] = [
    "model",
    "param_true",
    "estimator",
    "mean_est",
    "mean_sd",
    "are",
    "n_replicates",
    "n_boundary",
    "nu",
    "t_len",
    "seed",
];

/// `%g`-style formatting with `sig` significant digits.
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, x);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= sig as i32 {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn g6(x: f64) -> String {
    format_sig(x, 6)
}

pub fn sort_rows(rows: &mut [ReportRow]) {
    rows.sort_by(|a, b| {
        a.model
            .cmp(&b.model)
            .then(a.param_true.total_cmp(&b.param_true))
            .then(a.estimator.cmp(&b.estimator))
    });
}

/// Write rows as CSV to any sink, sorted by (model, param_true, estimator).
pub fn write_csv<W: Write>(rows: &[ReportRow], sink: W) -> std::result::Result<(), csv::Error> {
    let mut sorted = rows.to_vec();
    sort_rows(&mut sorted);
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CSV_HEADER)?;
    for r in &sorted {
        w.write_record([
            r.model.as_str().to_string(),
            g6(r.param_true),
            r.estimator.as_str().to_string(),
            g6(r.mean_est),
            g6(r.mean_sd),
            g6(r.are),
            r.n_replicates.to_string(),
            r.n_boundary.to_string(),
            r.nu.to_string(),
            r.t_len.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_csv(rows: &[ReportRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(rows, BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 52.0;

fn colour(kind: EstimatorKind) -> &'static str {
    match kind {
        EstimatorKind::FullMl => "#222222",
        EstimatorKind::PairwiseMl => "#1f77b4",
        EstimatorKind::HyvarinenUnivariate => "#d62728",
        EstimatorKind::HyvarinenWishart => "#2ca02c",
    }
}

struct Series {
    kind: EstimatorKind,
    points: Vec<(f64, f64)>,
}

fn group(rows: &[ReportRow], include_baseline: bool, value: impl Fn(&ReportRow) -> f64) -> Result<Vec<Series>> {
    let first = rows
        .first()
        .ok_or_else(|| Error::Config("no rows to plot".into()))?;
    if rows.iter().any(|r| r.model != first.model) {
        return Err(Error::Config("rows mix models; plot one model at a time".into()));
    }
    let mut out: Vec<Series> = Vec::new();
    for kind in EstimatorKind::ALL {
        if kind == EstimatorKind::FullMl && !include_baseline {
            continue;
        }
        let mut points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.estimator == kind)
            .map(|r| (r.param_true, value(r)))
            .collect();
        if points.is_empty() {
            continue;
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        out.push(Series { kind, points });
    }
    if out.is_empty() {
        return Err(Error::Config("no estimator rows to plot".into()));
    }
    Ok(out)
}

fn line_chart(title: &str, x_label: &str, y_label: &str, y_range: (f64, f64), series: &[Series]) -> String {
    let xs = series.iter().flat_map(|s| s.points.iter().map(|p| p.0));
    let (mut x0, mut x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if x1 - x0 < 1e-12 {
        x0 -= 0.1;
        x1 += 0.1;
    }
    let (y0, y1) = y_range;
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (1.0 - (y.clamp(y0, y1) - y0) / (y1 - y0)) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">
<rect width="100%" height="100%" fill="white"/>
<text x="{:.1}" y="22" text-anchor="middle" font-size="15">{title}</text>"#,
        LEFT + pw / 2.0
    );
    let _ = writeln!(
        svg,
        r#"<g stroke="black" stroke-width="1"><line x1="{LEFT}" y1="{b:.1}" x2="{r:.1}" y2="{b:.1}"/><line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{b:.1}"/></g>"#,
        b = TOP + ph,
        r = LEFT + pw
    );
    for k in 0..=4 {
        let xv = x0 + (x1 - x0) * k as f64 / 4.0;
        let yv = y0 + (y1 - y0) * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            sx(xv),
            TOP + ph + 18.0,
            format_sig(xv, 3)
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            sy(yv) + 4.0,
            format_sig(yv, 3),
            y = sy(yv)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{x_label}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{y_label}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let c = colour(s.kind);
        let _ = writeln!(
            svg,
            r#"<polyline data-estimator="{}" fill="none" stroke="{c}" stroke-width="2" points="{}"/>"#,
            s.kind,
            pts.join(" ")
        );
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 14.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{c}" stroke-width="2"/><text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 22.0,
            lx + 28.0,
            ly + 4.0,
            s.kind
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// ARE against the parameter, one polyline per non-baseline estimator.
pub fn render_are_svg(rows: &[ReportRow]) -> Result<String> {
    let series = group(rows, false, |r| r.are)?;
    let model = rows[0].model;
    Ok(line_chart(
        &format!("Asymptotic relative efficiency, {model}"),
        "parameter",
        "ARE",
        (0.0, 1.1),
        &series,
    ))
}

/// Mean asymptotic sd against the parameter, baseline included.
pub fn render_sd_svg(rows: &[ReportRow]) -> Result<String> {
    let series = group(rows, true, |r| r.mean_sd)?;
    let top = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .filter(|v| v.is_finite())
        .fold(0.0f64, f64::max);
    let top = if top > 0.0 { top * 1.1 } else { 1.0 };
    let model = rows[0].model;
    Ok(line_chart(
        &format!("Asymptotic standard deviation, {model}"),
        "parameter",
        "sd",
        (0.0, top),
        &series,
    ))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn emit_are_svg(rows: &[ReportRow], path: &Path) -> Result<()> {
    write_text(path, &render_are_svg(rows)?)
}

pub fn emit_sd_svg(rows: &[ReportRow], path: &Path) -> Result<()> {
    write_text(path, &render_sd_svg(rows)?)
}
