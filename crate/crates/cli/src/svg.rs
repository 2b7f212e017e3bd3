//! Density and CDF plots as standalone SVG.

use std::fmt::Write as _;

use crate::error::{CliError, CliResult};
use crate::record::ResultRecord;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 770.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 440.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Density,
    Cdf,
}

impl PlotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlotKind::Density => "density",
            PlotKind::Cdf => "cdf",
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Upper end of the y axis: 1 for a CDF, otherwise the maximum rounded up
/// to one significant digit.
fn y_top(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(0.0, f64::max);
    if m <= 0.0 {
        return 1.0;
    }
    let scale = 10f64.powf(m.log10().floor());
    ((m / scale).ceil() * scale).min(1.0)
}

fn sx(x: f64) -> f64 {
    LEFT + x * (RIGHT - LEFT)
}

fn sy(y: f64, top: f64) -> f64 {
    BOTTOM - y / top * (BOTTOM - TOP)
}

fn tick(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

/// Points of the series in data coordinates.
fn series(record: &ResultRecord, kind: PlotKind) -> Vec<(f64, f64)> {
    let n = record.n.max(1) as f64;
    match kind {
        PlotKind::Density => {
            record.probs.iter().enumerate().map(|(r, p)| (r as f64 / n, *p)).collect()
        }
        PlotKind::Cdf => {
            let mut pts = Vec::with_capacity(2 * record.cdf.len() + 1);
            let mut prev = 0.0;
            for (r, c) in record.cdf.iter().enumerate() {
                let x = r as f64 / n;
                pts.push((x, prev));
                pts.push((x, *c));
                prev = *c;
            }
            pts.push((1.0, prev));
            pts
        }
    }
}

pub fn render(record: &ResultRecord, kind: PlotKind) -> CliResult<String> {
    if record.probs.is_empty() {
        return Err(CliError::Config("cannot plot an empty record".into()));
    }
    let values = match kind {
        PlotKind::Density => &record.probs,
        PlotKind::Cdf => &record.cdf,
    };
    let top = match kind {
        PlotKind::Density => y_top(values),
        PlotKind::Cdf => 1.0,
    };
    let title = escape(&format!("{} ({})", record.title(), kind.as_str()));
    let mut s = String::new();
    let w = &mut s;
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">"#
    );
    let _ = writeln!(
        w,
        r#"<metadata><config-hash>{}</config-hash><version>{}</version></metadata>"#,
        escape(&record.config_hash),
        escape(&record.version)
    );
    let _ = writeln!(w, "<title>{title}</title>");
    let _ = writeln!(w, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        w,
        r#"<text x="{}" y="30" font-size="16" text-anchor="middle" font-family="sans-serif">{title}</text>"#,
        WIDTH / 2.0
    );
    let _ = writeln!(
        w,
        r#"<g stroke="black" stroke-width="1"><line x1="{LEFT}" y1="{BOTTOM}" x2="{RIGHT}" y2="{BOTTOM}"/><line x1="{LEFT}" y1="{BOTTOM}" x2="{LEFT}" y2="{TOP}"/></g>"#
    );
    let _ = writeln!(w, r#"<g font-size="12" font-family="sans-serif">"#);
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (x, y) = (sx(f), sy(f * top, top));
        let _ = writeln!(
            w,
            r#"<line x1="{x:.2}" y1="{BOTTOM}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            BOTTOM + 5.0,
            BOTTOM + 20.0,
            tick(f)
        );
        let _ = writeln!(
            w,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            tick(f * top)
        );
    }
    let _ = writeln!(
        w,
        r#"<text x="{}" y="{}" text-anchor="middle">r/n</text>"#,
        (LEFT + RIGHT) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(w, "</g>");
    let points: Vec<String> = series(record, kind)
        .into_iter()
        .map(|(x, y)| format!("{:.2},{:.2}", sx(x), sy(y.min(top), top)))
        .collect();
    let _ = writeln!(
        w,
        r#"<polyline class="{}" fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        kind.as_str(),
        points.join(" ")
    );
    let _ = writeln!(w, "</svg>");
    Ok(s)
}
