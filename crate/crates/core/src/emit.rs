//! CSV and SVG output.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bracket::DimBracket;
use crate::cover::BoxCountSeries;
use crate::curves::DimCurve;
use crate::error::{spec, Error, Result};

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// CSV text with the given header and numeric rows.
pub fn table_csv(headers: &[&str], rows: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers)?;
    for r in rows {
        if r.len() != headers.len() {
            return spec("row length does not match header");
        }
        w.write_record(r.iter().map(|v| fmt_f64(*v)))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

pub fn curve_csv(curve: &DimCurve) -> Result<String> {
    let rows: Vec<Vec<f64>> = curve
        .theta
        .iter()
        .zip(&curve.values)
        .map(|(t, b)| vec![*t, b.lower, b.upper])
        .collect();
    table_csv(&["theta", "lower", "upper"], &rows)
}

pub fn series_csv(series: &BoxCountSeries) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["delta", "count"])?;
    for e in &series.entries {
        w.write_record([fmt_f64(e.delta), e.count.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("ascii output"))
}

pub fn emit_csv(text: &str, path: &Path) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

/// Parses a numeric CSV table into its header and rows.
pub fn read_table_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Spec(format!("bad number '{f}': {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((headers, rows))
}

pub fn read_curve_csv(text: &str) -> Result<DimCurve> {
    let (h, rows) = read_table_csv(text)?;
    if h.len() < 3 || h[0] != "theta" || h[1] != "lower" || h[2] != "upper" {
        return spec("expected header theta,lower,upper");
    }
    DimCurve::new(
        rows.iter().map(|r| r[0]).collect(),
        rows.iter().map(|r| DimBracket::new(r[1], r[2])).collect(),
        "csv",
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Stroke colour; a palette colour when empty.
    pub style: String,
}

impl Series {
    pub fn new(label: impl Into<String>, xs: Vec<f64>, ys: Vec<f64>) -> Self {
        Series {
            label: label.into(),
            xs,
            ys,
            style: String::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: Option<(f64, f64)>,
    pub y_range: Option<(f64, f64)>,
    pub series: Vec<Series>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn data_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
        (a.min(v), b.max(v))
    });
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let f = raw / mag;
    let m = if f < 1.5 {
        1.0
    } else if f < 3.5 {
        2.0
    } else if f < 7.5 {
        5.0
    } else {
        10.0
    };
    m * mag
}

fn ticks(lo: f64, hi: f64) -> (Vec<f64>, usize) {
    let step = nice_step(hi - lo);
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let mut v = Vec::new();
    let mut t = (lo / step).ceil() * step;
    while t <= hi + 1e-9 * step {
        v.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    (v, decimals)
}

/// Standalone 800x600 SVG line chart.
pub fn render_svg(plot: &PlotSpec) -> Result<String> {
    if plot.series.is_empty() {
        return spec("plot has no series");
    }
    for s in &plot.series {
        if s.xs.len() != s.ys.len() || s.xs.is_empty() {
            return spec(format!("series '{}' has mismatched or empty data", s.label));
        }
        if s.xs.iter().chain(&s.ys).any(|v| !v.is_finite()) {
            return spec(format!("series '{}' has non-finite values", s.label));
        }
    }
    let (x0, x1) = plot
        .x_range
        .unwrap_or_else(|| data_range(plot.series.iter().flat_map(|s| s.xs.iter().copied())));
    let (y0, y1) = plot
        .y_range
        .unwrap_or_else(|| data_range(plot.series.iter().flat_map(|s| s.ys.iter().copied())));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + ph - (y - y0) / (y1 - y0) * ph;

    let mut o = String::new();
    let _ = writeln!(
        o,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="800" height="600" viewBox="0 0 800 600">"#
    );
    let _ = writeln!(o, r#"<rect width="800" height="600" fill="white"/>"#);
    let _ = writeln!(
        o,
        r#"<text x="400" y="28" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#,
        escape(&plot.title)
    );
    let (bx, by) = (LEFT, TOP + ph);
    let _ = writeln!(
        o,
        r#"<line x1="{bx}" y1="{by}" x2="{}" y2="{by}" stroke="black"/>"#,
        LEFT + pw
    );
    let _ = writeln!(
        o,
        r#"<line x1="{bx}" y1="{TOP}" x2="{bx}" y2="{by}" stroke="black"/>"#
    );
    let (xt, xd) = ticks(x0, x1);
    for t in xt {
        let x = sx(t);
        let _ = writeln!(
            o,
            r#"<line x1="{x:.2}" y1="{by}" x2="{x:.2}" y2="{}" stroke="black"/><text x="{x:.2}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{t:.xd$}</text>"#,
            by + 6.0,
            by + 22.0
        );
    }
    let (yt, yd) = ticks(y0, y1);
    for t in yt {
        let y = sy(t);
        let _ = writeln!(
            o,
            r#"<line x1="{}" y1="{y:.2}" x2="{bx}" y2="{y:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end" font-family="sans-serif" font-size="12">{t:.yd$}</text>"#,
            bx - 6.0,
            bx - 10.0,
            y + 4.0
        );
    }
    let _ = writeln!(
        o,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 20.0,
        escape(&plot.x_label)
    );
    let _ = writeln!(
        o,
        r#"<text x="20" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 20 {})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&plot.y_label)
    );
    for (i, s) in plot.series.iter().enumerate() {
        let colour = if s.style.is_empty() {
            PALETTE[i % PALETTE.len()].to_string()
        } else {
            s.style.clone()
        };
        let pts: Vec<String> =
            s.xs.iter()
                .zip(&s.ys)
                .map(|(x, y)| format!("{:.2},{:.2}", sx(*x), sy(*y)))
                .collect();
        let _ = writeln!(
            o,
            r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
            escape(&colour),
            pts.join(" ")
        );
        let ly = TOP + 16.0 + 20.0 * i as f64;
        let lx = LEFT + pw - 220.0;
        let _ = writeln!(
            o,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{}" stroke-width="2"/><text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 24.0,
            escape(&colour),
            lx + 30.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    o.push_str("</svg>\n");
    Ok(o)
}

pub fn emit_svg(plot: &PlotSpec, path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(plot)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{combine_max, seq_curve, theta_grid};

    #[test]
    fn constant_curve_has_four_lines() {
        let c = DimCurve::constant(&[0.0, 0.5, 1.0], 0.5).unwrap();
        let text = curve_csv(&c).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().next(), Some("theta,lower,upper"));
    }

    #[test]
    fn round_trip_is_exact() {
        let g = theta_grid(513, &[6.0 / 7.0]);
        let c = combine_max(&DimBracket::new(0.29, 0.31), &seq_curve(2.0, &g).unwrap());
        let back = read_curve_csv(&curve_csv(&c).unwrap()).unwrap();
        assert_eq!(back.theta, c.theta);
        assert_eq!(back.values, c.values);
        assert!(back.values.iter().all(|b| b.lower <= b.upper));
        let tiny = table_csv(&["x"], &[vec![1e-300]]).unwrap();
        assert_eq!(read_table_csv(&tiny).unwrap().1[0][0], 1e-300);
    }

    #[test]
    fn svg_shapes() {
        let plot = PlotSpec {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            x_range: None,
            y_range: None,
            series: vec![Series::new("a", vec![0.5], vec![0.5])],
        };
        let s = render_svg(&plot).unwrap();
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
        assert_eq!(s.matches("<polyline").count(), 1);
        let empty = PlotSpec {
            series: vec![],
            ..plot
        };
        assert!(render_svg(&empty).is_err());
    }
}
