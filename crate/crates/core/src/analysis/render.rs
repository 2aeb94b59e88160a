use std::f64::consts::PI;
use std::fmt::Write as _;
use std::str::FromStr;

use super::plot::{PlotKind, PlotSeries, SeriesValues};
use super::AnalysisError;

pub const SVG_WIDTH: f64 = 960.0;
pub const SVG_HEIGHT: f64 = 540.0;

const MARGIN_LEFT: f64 = 90.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 70.0;
const TICKS: usize = 5;
const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Svg,
    Csv,
}

impl RenderFormat {
    /// Format implied by a file name's extension.
    pub fn from_path(path: &std::path::Path) -> Option<Self> {
        path.extension().and_then(|e| e.to_str()).and_then(|e| e.parse().ok())
    }
}

impl FromStr for RenderFormat {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, AnalysisError> {
        match s.to_ascii_lowercase().as_str() {
            "svg" => Ok(RenderFormat::Svg),
            "csv" => Ok(RenderFormat::Csv),
            other => Err(AnalysisError::Range(format!("unknown render format {other:?} (svg, csv)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RenderOptions {
    /// Unwrap phase plots before rendering.
    pub unwrap_phase: bool,
}

pub fn render(p: &PlotSeries, format: RenderFormat) -> Result<Vec<u8>, AnalysisError> {
    render_with(p, format, &RenderOptions::default())
}

pub fn render_with(p: &PlotSeries, format: RenderFormat, opts: &RenderOptions) -> Result<Vec<u8>, AnalysisError> {
    p.check()?;
    let p = if opts.unwrap_phase && p.kind == PlotKind::PhaseRad {
        let mut q = p.clone();
        for s in &mut q.series {
            if let SeriesValues::Real(v) = &mut s.values {
                *v = unwrap_phase(v);
            }
        }
        std::borrow::Cow::Owned(q)
    } else {
        std::borrow::Cow::Borrowed(p)
    };
    match format {
        RenderFormat::Csv => csv_bytes(&p),
        RenderFormat::Svg => Ok(svg(&p).into_bytes()),
    }
}

/// Removes `2 pi` jumps between consecutive samples.
pub fn unwrap_phase(v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len());
    let mut offset = 0.0;
    for (i, &p) in v.iter().enumerate() {
        if i > 0 {
            let d = p - v[i - 1];
            if d.is_finite() {
                offset -= 2.0 * PI * ((d / (2.0 * PI)).round());
            }
        }
        out.push(p + offset);
    }
    out
}

fn csv_bytes(p: &PlotSeries) -> Result<Vec<u8>, AnalysisError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let mut header = vec![format!("x({})", p.x_unit)];
    for s in &p.series {
        match s.values {
            SeriesValues::Real(_) => header.push(s.label.clone()),
            SeriesValues::Complex(_) => {
                header.push(format!("{}.re", s.label));
                header.push(format!("{}.im", s.label));
            }
        }
    }
    let err = |e: csv::Error| AnalysisError::Range(format!("csv: {e}"));
    w.write_record(&header).map_err(err)?;
    let mut row = Vec::with_capacity(header.len());
    for (i, x) in p.x.iter().enumerate() {
        row.clear();
        row.push(x.to_string());
        for s in &p.series {
            match &s.values {
                SeriesValues::Real(v) => row.push(v[i].to_string()),
                SeriesValues::Complex(v) => {
                    row.push(v[i].re.to_string());
                    row.push(v[i].im.to_string());
                }
            }
        }
        w.write_record(&row).map_err(err)?;
    }
    w.into_inner().map_err(|e| AnalysisError::Range(format!("csv: {e}")))
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn finite_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > hi {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    }
}

fn plotted(values: &SeriesValues) -> Vec<f64> {
    match values {
        SeriesValues::Real(v) => v.clone(),
        SeriesValues::Complex(v) => v.iter().map(|z| z.norm()).collect(),
    }
}

fn svg(p: &PlotSeries) -> String {
    let ys: Vec<Vec<f64>> = p.series.iter().map(|s| plotted(&s.values)).collect();
    let (x0, x1) = finite_range(p.x.iter().copied());
    let (y0, y1) = finite_range(ys.iter().flatten().copied());
    let (left, right) = (MARGIN_LEFT, SVG_WIDTH - MARGIN_RIGHT);
    let (top, bottom) = (MARGIN_TOP, SVG_HEIGHT - MARGIN_BOTTOM);
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
    let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);
    let y_label = match p.kind {
        PlotKind::TimeComplex => "|h|",
        PlotKind::MagnitudeDb => "magnitude (dB)",
        PlotKind::PhaseRad => "phase (rad)",
        PlotKind::RirAmplitude => "amplitude",
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        SVG_WIDTH / 2.0,
        escape(&p.title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{left:.2}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );
    for i in 0..TICKS {
        let t = i as f64 / (TICKS - 1) as f64;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{bottom:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{xv:.4e}</text>"#,
            bottom + 5.0,
            bottom + 20.0
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{left:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{yv:.4e}</text>"#,
            left - 5.0,
            left - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{} ({})</text>"#,
        (left + right) / 2.0,
        SVG_HEIGHT - 25.0,
        escape(&p.x_label),
        escape(&p.x_unit)
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        (top + bottom) / 2.0,
        (top + bottom) / 2.0,
        y_label
    );
    for (k, (series, y)) in p.series.iter().zip(&ys).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut pts = String::new();
        for (x, v) in p.x.iter().zip(y) {
            if x.is_finite() && v.is_finite() {
                if !pts.is_empty() {
                    pts.push(' ');
                }
                let _ = write!(pts, "{:.2},{:.2}", sx(*x), sy(*v));
            }
        }
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{pts}"/>"#
        );
        let ly = top + 16.0 + 16.0 * k as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{ly:.2}" text-anchor="end" fill="{color}">{}</text>"#,
            right - 8.0,
            escape(&series.label)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unwrap_removes_jumps() {
        let w = [3.0, -3.0, 3.0];
        let u = unwrap_phase(&w);
        assert!((u[1] - (2.0 * PI - 3.0)).abs() < 1e-12);
        assert!((u[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }
}
