//! Minimal scatter-and-line plots rendered from a CSV payload.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::record::SUMMARY_MARKER;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Which CSV columns to draw.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotSpec {
    pub x: usize,
    pub y: usize,
    pub log_x: bool,
    pub log_y: bool,
    /// Column whose distinct values split the rows into separate series.
    pub series: Option<usize>,
    /// Keep only rows whose column equals the given text.
    pub only: Option<(usize, String)>,
}

fn transform(v: f64, log: bool) -> Option<f64> {
    match (log, v) {
        (true, v) if v > 0.0 => Some(v.log10()),
        (true, _) => None,
        (false, v) if v.is_finite() => Some(v),
        _ => None,
    }
}

/// SVG document for the per-point rows of `csv` (the summary block is
/// ignored). Rows with non-numeric or, on log axes, non-positive values are
/// skipped.
pub fn render(csv: &str, spec: &PlotSpec) -> String {
    let mut reader = csv::ReaderBuilder::new().flexible(true).has_headers(false).from_reader(csv.as_bytes());
    let records: Vec<csv::StringRecord> = reader.records().map_while(|r| r.ok()).collect();
    let header = records.first().cloned().unwrap_or_default();
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for r in records.iter().skip(1) {
        if r.get(0) == Some(SUMMARY_MARKER) {
            break;
        }
        if let Some((c, want)) = &spec.only {
            if r.get(*c) != Some(want.as_str()) {
                continue;
            }
        }
        let parse = |c: usize| r.get(c).and_then(|t| t.parse::<f64>().ok());
        let (Some(x), Some(y)) = (parse(spec.x), parse(spec.y)) else { continue };
        let (Some(x), Some(y)) = (transform(x, spec.log_x), transform(y, spec.log_y)) else { continue };
        let key = spec.series.and_then(|c| r.get(c)).unwrap_or("").to_string();
        series.entry(key).or_default().push((x, y));
    }
    let all: Vec<(f64, f64)> = series.values().flatten().copied().collect();
    let (mut x0, mut x1, mut y0, mut y1) = all.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if all.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 <= 0.0 {
        (x0, x1) = (x0 - 0.5, x1 + 0.5);
    }
    if y1 - y0 <= 0.0 {
        (y0, y1) = (y0 - 0.5, y1 + 0.5);
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let label = |c: usize, log: bool| {
        let name = header.get(c).unwrap_or("");
        if log { format!("log10 {name}") } else { name.to_string() }
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<path d="M{m} {t} V{b} H{r}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    for (v, anchor) in [(x0, "start"), (x1, "end")] {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="{anchor}">{}</text>"#,
            px(v),
            HEIGHT - MARGIN + 16.0,
            tick(v)
        );
    }
    for v in [y0, y1] {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{}</text>"#,
            MARGIN - 6.0,
            py(v) + 4.0,
            tick(v)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0,
        escape(&label(spec.x, spec.log_x))
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(&label(spec.y, spec.log_y))
    );
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        if pts.len() > 1 {
            let _ = writeln!(out, r#"<polyline points="{}" fill="none" stroke="{color}"/>"#, path.join(" "));
        }
        for &(x, y) in pts {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, px(x), py(y));
        }
        if !name.is_empty() {
            let _ = writeln!(
                out,
                r#"<text x="{:.1}" y="{:.1}" font-size="11" fill="{color}">{}</text>"#,
                WIDTH - MARGIN + 4.0,
                MARGIN + 14.0 * k as f64,
                escape(name)
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

fn tick(v: f64) -> String {
    format!("{:.3}", v)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
