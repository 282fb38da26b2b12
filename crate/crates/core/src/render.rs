//! SVG heatmaps of distance matrices and scatter plots of MDS coordinates.
//!
//! Output is plain hand-written SVG with fixed number formatting, so the
//! same input always produces the same bytes.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::correlation::MdsEmbedding;
use crate::matrices::DistanceMatrix;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("matrix `{source_label}` has an infinite entry at ({row}, {col}); mask it before rendering")]
    Infinite {
        source_label: String,
        row: usize,
        col: usize,
    },
    #[error("scatter plot needs at least 2 coordinates, embedding has {0}")]
    TooFewDimensions(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Colour stops of a perceptually ordered dark-to-bright map.
const STOPS: [(f64, [u8; 3]); 5] = [
    (0.0, [13, 8, 135]),
    (0.25, [126, 3, 168]),
    (0.5, [204, 71, 120]),
    (0.75, [248, 149, 64]),
    (1.0, [240, 249, 33]),
];

/// Maps `t` in `[0, 1]` to a `#rrggbb` colour.
pub fn color(t: f64) -> String {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let upper = STOPS
        .iter()
        .position(|&(s, _)| s >= t)
        .unwrap_or(STOPS.len() - 1)
        .max(1);
    let (s0, c0) = STOPS[upper - 1];
    let (s1, c1) = STOPS[upper];
    let w = (t - s0) / (s1 - s0);
    let mix = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * w).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(c0[0], c1[0]),
        mix(c0[1], c1[1]),
        mix(c0[2], c1[2])
    )
}

fn fmt_num(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Layout constants shared by the heatmap writer and its tests.
pub const HEATMAP_PLOT: f64 = 600.0;
const MARGIN: f64 = 40.0;
const LEGEND_WIDTH: f64 = 90.0;

/// Renders `m` as an `n x n` grid. Colours scale linearly from 0 to
/// `ceiling` (defaults to the largest entry).
pub fn heatmap_svg(m: &DistanceMatrix, ceiling: Option<f64>) -> Result<String, RenderError> {
    if let Err(crate::matrices::MatrixError::Infinite { source_label, row, col }) = m.ensure_finite() {
        return Err(RenderError::Infinite { source_label, row, col });
    }
    let n = m.n();
    let top = ceiling.unwrap_or_else(|| m.max_entry());
    let cell = HEATMAP_PLOT / n as f64;
    let width = MARGIN * 2.0 + HEATMAP_PLOT + LEGEND_WIDTH;
    let height = MARGIN * 2.0 + HEATMAP_PLOT;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        fmt_num(width),
        fmt_num(height),
        fmt_num(width),
        fmt_num(height)
    );
    let _ = writeln!(
        svg,
        r#"<title>{} ({n}x{n}, 0 to {})</title>"#,
        escape(m.source()),
        fmt_num(top)
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(svg, r#"<g class="cells" shape-rendering="crispEdges">"#);
    for i in 0..n {
        for j in 0..n {
            let v = m.get(i, j);
            let t = if top > 0.0 { v / top } else { 0.0 };
            let _ = writeln!(
                svg,
                r#"<rect class="cell" data-row="{i}" data-col="{j}" x="{}" y="{}" width="{}" height="{}" fill="{}"/>"#,
                fmt_num(MARGIN + j as f64 * cell),
                fmt_num(MARGIN + i as f64 * cell),
                fmt_num(cell),
                fmt_num(cell),
                color(t)
            );
        }
    }
    let _ = writeln!(svg, "</g>");

    // legend: vertical gradient, bright at the top
    let lx = MARGIN * 1.5 + HEATMAP_PLOT;
    let _ = writeln!(svg, r#"<defs><linearGradient id="legend" x1="0" y1="1" x2="0" y2="0">"#);
    for (s, _) in STOPS {
        let _ = writeln!(svg, r#"<stop offset="{}" stop-color="{}"/>"#, fmt_num(s), color(s));
    }
    let _ = writeln!(svg, "</linearGradient></defs>");
    let _ = writeln!(
        svg,
        r#"<rect class="legend" x="{}" y="{}" width="20" height="{}" fill="url(#legend)" stroke="black" stroke-width="0.5"/>"#,
        fmt_num(lx),
        fmt_num(MARGIN),
        fmt_num(HEATMAP_PLOT)
    );
    let _ = writeln!(
        svg,
        r#"<text class="legend-max" x="{}" y="{}" font-size="12" font-family="sans-serif">{}</text>"#,
        fmt_num(lx + 24.0),
        fmt_num(MARGIN + 10.0),
        fmt_num(top)
    );
    let _ = writeln!(
        svg,
        r#"<text class="legend-min" x="{}" y="{}" font-size="12" font-family="sans-serif">0</text>"#,
        fmt_num(lx + 24.0),
        fmt_num(MARGIN + HEATMAP_PLOT)
    );
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

pub fn render_heatmap(m: &DistanceMatrix, ceiling: Option<f64>, path: &Path) -> Result<(), RenderError> {
    fs::write(path, heatmap_svg(m, ceiling)?)?;
    Ok(())
}

pub const SCATTER_SIZE: f64 = 600.0;

/// Plots the first two MDS coordinates, one labelled point per row. Both
/// axes share one scale so distances in the picture are proportional to
/// distances in the embedding.
pub fn scatter_svg(e: &MdsEmbedding, title: &str) -> Result<String, RenderError> {
    let m = e.coords.ncols();
    if m < 2 {
        return Err(RenderError::TooFewDimensions(m));
    }
    let xs: Vec<f64> = e.coords.column(0).to_vec();
    let ys: Vec<f64> = e.coords.column(1).to_vec();
    let bounds = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = (hi - lo) * 0.05;
        (lo - pad, hi + pad)
    };
    let (x0, x1) = bounds(&xs);
    let (y0, y1) = bounds(&ys);
    let plot = SCATTER_SIZE - 2.0 * MARGIN;
    let span = (x1 - x0).max(y1 - y0);
    let scale = if span > 0.0 { plot / span } else { 0.0 };
    let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
    let mid = SCATTER_SIZE / 2.0;
    let to_svg = |x: f64, y: f64| (mid + (x - cx) * scale, mid - (y - cy) * scale);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        fmt_num(SCATTER_SIZE)
    );
    let _ = writeln!(
        svg,
        r#"<title>{} (MDS, strain {})</title>"#,
        escape(title),
        fmt_num(e.strain)
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let (ax0, ay0) = to_svg(x0, cy);
    let (ax1, _) = to_svg(x1, cy);
    let (_, by0) = to_svg(cx, y0);
    let (_, by1) = to_svg(cx, y1);
    let _ = writeln!(
        svg,
        r#"<g class="axes" stroke="gray" stroke-width="0.5"><line x1="{}" y1="{}" x2="{}" y2="{}"/><line x1="{}" y1="{}" x2="{}" y2="{}"/></g>"#,
        fmt_num(ax0),
        fmt_num(ay0),
        fmt_num(ax1),
        fmt_num(ay0),
        fmt_num(mid),
        fmt_num(by0),
        fmt_num(mid),
        fmt_num(by1)
    );
    let _ = writeln!(svg, r#"<g class="points" font-size="10" font-family="sans-serif">"#);
    for (id, (&x, &y)) in xs.iter().zip(&ys).enumerate() {
        let (px, py) = to_svg(x, y);
        let _ = writeln!(
            svg,
            r##"<circle class="point" data-id="{id}" cx="{}" cy="{}" r="4" fill="#1f77b4"/><text x="{}" y="{}">{id}</text>"##,
            fmt_num(px),
            fmt_num(py),
            fmt_num(px + 5.0),
            fmt_num(py - 5.0)
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

pub fn render_scatter(e: &MdsEmbedding, title: &str, path: &Path) -> Result<(), RenderError> {
    fs::write(path, scatter_svg(e, title)?)?;
    Ok(())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
