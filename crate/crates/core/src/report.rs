//! SVG rendering of biplots and similarity maps, plus the word-frequency
//! baseline.
//!
//! Rendering is a pure function of its inputs: fixed-precision coordinate
//! formatting, deterministic label nudging, no randomness. Biplots use the
//! contribution scaling: rows (batting) in principal coordinates, columns
//! (bowling) scaled by the square root of their masses, so a column's length
//! shows its contribution to the plotted axes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::ca::CaResult;
use crate::corpus::CommentaryRecord;
use crate::lexicon::{extract_ngrams, tokenize, BattingFeature, FeatureLexicon};
use crate::similarity::Embedding;

#[derive(Debug, Error, PartialEq)]
pub enum PlotError {
    #[error("analysis retained {0} dimensions; a biplot needs 2 (matrix too sparse)")]
    DegeneratePlot(usize),
    #[error("invalid plot style: {0}")]
    InvalidStyle(String),
}

/// Sizing and colors for the SVG output.
#[derive(Debug, Clone)]
pub struct PlotStyle {
    pub width: u32,
    pub height: u32,
    pub margin: u32,
    pub point_radius: f64,
    pub label_font_size: u32,
    /// 6-digit hex, e.g. "#1f77b4".
    pub batting_color: String,
    pub bowling_color: String,
}

impl Default for PlotStyle {
    fn default() -> Self {
        Self {
            width: 760,
            height: 560,
            margin: 56,
            point_radius: 3.5,
            label_font_size: 11,
            batting_color: "#1f77b4".to_string(),
            bowling_color: "#d62728".to_string(),
        }
    }
}

impl PlotStyle {
    pub fn validate(&self) -> Result<(), PlotError> {
        if self.width == 0 || self.height == 0 {
            return Err(PlotError::InvalidStyle("zero width or height".into()));
        }
        if 2 * self.margin >= self.width.min(self.height) {
            return Err(PlotError::InvalidStyle("margins exceed the canvas".into()));
        }
        for color in [&self.batting_color, &self.bowling_color] {
            let ok = color.len() == 7
                && color.starts_with('#')
                && color[1..].chars().all(|c| c.is_ascii_hexdigit());
            if !ok {
                return Err(PlotError::InvalidStyle(format!(
                    "color `{color}` is not 6-digit hex"
                )));
            }
        }
        Ok(())
    }
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Viewport {
    width: f64,
    height: f64,
    margin: f64,
    min_x: f64,
    max_x: f64,
    min_y: f64,
    max_y: f64,
}

impl Viewport {
    fn fit(points: &[(f64, f64)], style: &PlotStyle) -> Self {
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for &(x, y) in points {
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
        // 5% padding; degenerate ranges widen to a unit box so a single
        // point lands at the center.
        let pad_x = ((max_x - min_x) * 0.05).max(f64::EPSILON);
        let pad_y = ((max_y - min_y) * 0.05).max(f64::EPSILON);
        let (mut min_x, mut max_x) = (min_x - pad_x, max_x + pad_x);
        let (mut min_y, mut max_y) = (min_y - pad_y, max_y + pad_y);
        if max_x - min_x < 1e-12 {
            min_x -= 0.5;
            max_x += 0.5;
        }
        if max_y - min_y < 1e-12 {
            min_y -= 0.5;
            max_y += 0.5;
        }
        Self {
            width: f64::from(style.width),
            height: f64::from(style.height),
            margin: f64::from(style.margin),
            min_x,
            max_x,
            min_y,
            max_y,
        }
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let sx = self.margin
            + (x - self.min_x) / (self.max_x - self.min_x) * (self.width - 2.0 * self.margin);
        // SVG y grows downward.
        let sy = self.height
            - self.margin
            - (y - self.min_y) / (self.max_y - self.min_y) * (self.height - 2.0 * self.margin);
        (sx, sy)
    }
}

/// Deterministic label placement: nudge radially, in input order, until a
/// label no longer collides with an earlier one.
fn place_labels(anchors: &[(f64, f64)], font: f64) -> Vec<(f64, f64)> {
    let min_gap = font * 1.1;
    let mut placed: Vec<(f64, f64)> = Vec::with_capacity(anchors.len());
    for &(x, y) in anchors {
        let mut candidate = (x + 6.0, y - 6.0);
        let mut attempt = 0u32;
        while placed.iter().any(|&(px, py)| {
            (px - candidate.0).abs() < min_gap * 6.0 && (py - candidate.1).abs() < min_gap
        }) {
            attempt += 1;
            let angle = f64::from(attempt) * 0.9;
            let radius = 8.0 + 4.0 * f64::from(attempt);
            candidate = (x + radius * angle.cos(), y - radius * angle.sin());
            if attempt > 24 {
                break;
            }
        }
        placed.push(candidate);
    }
    placed
}

fn svg_header(out: &mut String, style: &PlotStyle, title: &str) {
    let _ = writeln!(
        out,
        r##"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">
  <rect width="{w}" height="{h}" fill="#ffffff"/>
  <title>{title}</title>"##,
        w = style.width,
        h = style.height,
        title = xml_escape(title),
    );
}

fn svg_point(
    out: &mut String,
    point: (f64, f64),
    r: f64,
    color: &str,
    label: &str,
    label_at: (f64, f64),
    font: u32,
) {
    let ((x, y), (lx, ly)) = (point, label_at);
    let _ = writeln!(
        out,
        r##"  <circle cx="{x:.3}" cy="{y:.3}" r="{r:.3}" fill="{color}"/>
  <text x="{lx:.3}" y="{ly:.3}" font-size="{font}" font-family="sans-serif" fill="{color}">{label}</text>"##,
        label = xml_escape(label),
    );
}

/// Render the contribution biplot of a CA result.
///
/// Rows appear in principal coordinates, columns in contribution coordinates
/// sqrt(c_j) * Gamma_j; pass `symmetric = true` for the symmetric map where
/// both sides use principal coordinates. `row_subset` (original row indices)
/// limits which rows are drawn.
pub fn render_biplot(
    ca: &CaResult,
    row_labels: &[&str],
    col_labels: &[&str],
    row_subset: Option<&[usize]>,
    style: &PlotStyle,
    title: &str,
    symmetric: bool,
) -> Result<String, PlotError> {
    style.validate()?;
    if ca.k() < 2 {
        return Err(PlotError::DegeneratePlot(ca.k()));
    }

    let rows: Vec<(usize, (f64, f64))> = ca
        .surviving_rows
        .iter()
        .enumerate()
        .filter(|(_, original)| row_subset.is_none_or(|s| s.contains(original)))
        .map(|(pos, &original)| {
            (
                original,
                (ca.row_principal[(pos, 0)], ca.row_principal[(pos, 1)]),
            )
        })
        .collect();
    let cols: Vec<(usize, (f64, f64))> = ca
        .surviving_cols
        .iter()
        .enumerate()
        .map(|(pos, &original)| {
            let point = if symmetric {
                (ca.col_principal[(pos, 0)], ca.col_principal[(pos, 1)])
            } else {
                let weight = ca.col_masses[pos].sqrt();
                (
                    weight * ca.col_standard[(pos, 0)],
                    weight * ca.col_standard[(pos, 1)],
                )
            };
            (original, point)
        })
        .collect();

    let all_points: Vec<(f64, f64)> = rows.iter().chain(cols.iter()).map(|&(_, p)| p).collect();
    let viewport = Viewport::fit(&all_points, style);

    let mut out = String::new();
    svg_header(&mut out, style, title);

    // Origin axes with inertia captions.
    let (ox, oy) = viewport.map(0.0, 0.0);
    let _ = writeln!(
        out,
        r##"  <line x1="{m:.3}" y1="{oy:.3}" x2="{r:.3}" y2="{oy:.3}" stroke="#bbbbbb" stroke-width="1"/>
  <line x1="{ox:.3}" y1="{m:.3}" x2="{ox:.3}" y2="{b:.3}" stroke="#bbbbbb" stroke-width="1"/>"##,
        m = viewport.margin,
        r = viewport.width - viewport.margin,
        b = viewport.height - viewport.margin,
    );
    let _ = writeln!(
        out,
        r##"  <text x="{x:.3}" y="{y:.3}" font-size="12" font-family="sans-serif" fill="#333333">Dim 1 ({p1:.1}%)</text>
  <text x="{x2:.3}" y="{y2:.3}" font-size="12" font-family="sans-serif" fill="#333333" transform="rotate(-90 {x2:.3} {y2:.3})">Dim 2 ({p2:.1}%)</text>"##,
        x = viewport.width / 2.0 - 40.0,
        y = viewport.height - 12.0,
        p1 = 100.0 * ca.explained_inertia(0),
        x2 = 16.0,
        y2 = viewport.height / 2.0,
        p2 = 100.0 * ca.explained_inertia(1),
    );

    let anchors: Vec<(f64, f64)> = rows
        .iter()
        .chain(cols.iter())
        .map(|&(_, (x, y))| viewport.map(x, y))
        .collect();
    let labels = place_labels(&anchors, f64::from(style.label_font_size));

    for (idx, &(original, (x, y))) in rows.iter().enumerate() {
        let (sx, sy) = viewport.map(x, y);
        let (lx, ly) = labels[idx];
        svg_point(
            &mut out,
            (sx, sy),
            style.point_radius,
            &style.batting_color,
            row_labels[original],
            (lx, ly),
            style.label_font_size,
        );
    }
    for (idx, &(original, (x, y))) in cols.iter().enumerate() {
        let (sx, sy) = viewport.map(x, y);
        let (lx, ly) = labels[rows.len() + idx];
        svg_point(
            &mut out,
            (sx, sy),
            style.point_radius,
            &style.bowling_color,
            col_labels[original],
            (lx, ly),
            style.label_font_size,
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Render a similarity embedding as a labeled scatter plot.
pub fn render_scatter(
    embedding: &Embedding,
    style: &PlotStyle,
    title: &str,
) -> Result<String, PlotError> {
    style.validate()?;
    let points: Vec<(f64, f64)> = embedding.entries.iter().map(|e| (e.x, e.y)).collect();
    let viewport = Viewport::fit(&points, style);

    let mut out = String::new();
    svg_header(&mut out, style, title);
    let anchors: Vec<(f64, f64)> = points.iter().map(|&(x, y)| viewport.map(x, y)).collect();
    let labels = place_labels(&anchors, f64::from(style.label_font_size));
    for (entry, (&(sx, sy), &(lx, ly))) in embedding.entries.iter().zip(anchors.iter().zip(&labels))
    {
        svg_point(
            &mut out,
            (sx, sy),
            style.point_radius,
            &style.batting_color,
            &entry.label(),
            (lx, ly),
            style.label_font_size,
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// The word-cloud baseline: bigram counts over the records whose text
/// matches the anchor feature. Ties rank alphabetically.
pub fn word_frequency_report(
    records: &[CommentaryRecord],
    anchor: BattingFeature,
    lexicon: &FeatureLexicon,
    top_k: usize,
) -> Vec<(String, u64)> {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for record in records {
        let tokens = tokenize(&record.text);
        let ngrams = extract_ngrams(&tokens);
        let (batting, _) = lexicon.match_features(&ngrams);
        if !batting.contains(&anchor) {
            continue;
        }
        for bigram in ngrams.into_iter().skip(tokens.len()) {
            *counts.entry(bigram).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
    // BTreeMap iteration is alphabetical, and the sort is stable, so ties
    // stay alphabetical.
    ranked.sort_by_key(|(_, count)| std::cmp::Reverse(*count));
    ranked.truncate(top_k);
    ranked
}
