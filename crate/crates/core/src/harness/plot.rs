use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::experiments::{ClipRow, ComparisonCell, ExperimentResult};
use crate::error::{Error, Result};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const PANEL_W: f64 = 320.0;
const PANEL_H: f64 = 240.0;
const MARGIN: f64 = 48.0;
const LEGEND_H: f64 = 28.0;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn first_seen<'a>(keys: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen: Vec<&str> = Vec::new();
    for k in keys {
        if !seen.contains(&k) {
            seen.push(k);
        }
    }
    seen
}

#[derive(Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn fit(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > 0.0)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 {
            lo -= 0.5;
            hi += 0.5;
        }
        let pad = 0.05 * (hi - lo);
        Self {
            lo: lo - pad,
            hi: hi + pad,
            log,
        }
    }

    /// Position in [0, 1], or `None` for values the axis cannot show.
    fn frac(&self, v: f64) -> Option<f64> {
        if !v.is_finite() || (self.log && v <= 0.0) {
            return None;
        }
        let v = if self.log { v.log10() } else { v };
        Some((v - self.lo) / (self.hi - self.lo))
    }

    fn label(&self, f: f64) -> String {
        let v = self.lo + f * (self.hi - self.lo);
        if self.log {
            format!("{:.1e}", 10f64.powf(v))
        } else {
            format!("{v:.3}")
        }
    }
}

struct Panel {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
    xa: Axis,
    ya: Axis,
}

impl Panel {
    fn point(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        Some((
            self.x + self.xa.frac(x)? * self.w,
            self.y + self.h - self.ya.frac(y)? * self.h,
        ))
    }

    fn frame(&self, svg: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let (x, y, w, h) = (self.x, self.y, self.w, self.h);
        let _ = writeln!(
            svg,
            r##"<rect x="{x:.1}" y="{y:.1}" width="{w:.1}" height="{h:.1}" fill="none" stroke="#444"/>"##
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="12">{}</text>"#,
            x + w / 2.0,
            y - 6.0,
            escape(title)
        );
        for (f, anchor) in [(0.0, "start"), (1.0, "end")] {
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="{anchor}" font-size="9">{}</text>"#,
                x + f * w,
                y + h + 12.0,
                escape(&self.xa.label(f))
            );
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end" font-size="9">{}</text>"#,
                x - 3.0,
                y + h - f * h + 3.0,
                escape(&self.ya.label(f))
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="10">{}</text>"#,
            x + w / 2.0,
            y + h + 24.0,
            escape(xlabel)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="10" transform="rotate(-90 {:.1} {:.1})">{}</text>"#,
            x - 36.0,
            y + h / 2.0,
            x - 36.0,
            y + h / 2.0,
            escape(ylabel)
        );
    }

    fn series(&self, svg: &mut String, pts: &[(f64, f64)], colour: &str) {
        let mapped: Vec<_> = pts.iter().filter_map(|&(x, y)| self.point(x, y)).collect();
        if mapped.len() > 1 {
            let path: Vec<String> = mapped.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{colour}" stroke-width="1.5"/>"#,
                path.join(" ")
            );
        }
        for (x, y) in mapped {
            let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="{colour}"/>"#);
        }
    }
}

fn open(width: f64, height: f64) -> String {
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    svg
}

fn legend(svg: &mut String, names: &[&str], y: f64) {
    let mut x = MARGIN;
    for (k, name) in names.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let _ = writeln!(
            svg,
            r#"<rect x="{x:.1}" y="{:.1}" width="12" height="4" fill="{colour}"/>"#,
            y - 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{y:.1}" font-size="10">{}</text>"#,
            x + 16.0,
            escape(name)
        );
        x += 24.0 + 6.5 * name.chars().count() as f64;
    }
}

/// Variance of the ATE estimate against horizon, one panel per instance and
/// one line per strategy, both axes logarithmic.
pub fn variance_svg(cells: &[ComparisonCell]) -> String {
    let instances = first_seen(cells.iter().map(|c| c.instance.as_str()));
    let strategies = first_seen(cells.iter().map(|c| c.strategy.as_str()));
    let n = instances.len().max(1);
    let cols = (n as f64).sqrt().ceil() as usize;
    let rows = n.div_ceil(cols);
    let cell_w = PANEL_W + 2.0 * MARGIN;
    let cell_h = PANEL_H + 2.0 * MARGIN;
    let mut svg = open(cols as f64 * cell_w, rows as f64 * cell_h + LEGEND_H);
    legend(&mut svg, &strategies, LEGEND_H - 8.0);
    for (k, inst) in instances.iter().enumerate() {
        let mine: Vec<&ComparisonCell> = cells.iter().filter(|c| c.instance == *inst).collect();
        let panel = Panel {
            x: (k % cols) as f64 * cell_w + MARGIN,
            y: (k / cols) as f64 * cell_h + MARGIN + LEGEND_H,
            w: PANEL_W,
            h: PANEL_H,
            xa: Axis::fit(mine.iter().map(|c| c.horizon as f64), true),
            ya: Axis::fit(mine.iter().map(|c| c.variance), true),
        };
        panel.frame(&mut svg, inst, "T", "Var");
        for (s, strat) in strategies.iter().enumerate() {
            let mut pts: Vec<(f64, f64)> = mine
                .iter()
                .filter(|c| c.strategy == *strat)
                .map(|c| (c.horizon as f64, c.variance))
                .collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            panel.series(&mut svg, &pts, PALETTE[s % PALETTE.len()]);
        }
    }
    svg.push_str("</svg>\n");
    svg
}

/// Predicted over empirical clipping time against the guard exponent, one
/// line per instance, logarithmic ratio axis.
pub fn clip_ratio_svg(rows: &[ClipRow]) -> String {
    let instances = first_seen(rows.iter().map(|r| r.instance.as_str()));
    let mut svg = open(PANEL_W * 2.0 + 2.0 * MARGIN, PANEL_H * 1.5 + 2.0 * MARGIN + LEGEND_H);
    legend(&mut svg, &instances, LEGEND_H - 8.0);
    let panel = Panel {
        x: MARGIN,
        y: MARGIN + LEGEND_H,
        w: PANEL_W * 2.0,
        h: PANEL_H * 1.5,
        xa: Axis::fit(rows.iter().map(|r| r.alpha), false),
        ya: Axis::fit(rows.iter().map(|r| r.ratio), true),
    };
    panel.frame(&mut svg, "predicted / empirical clipping time", "alpha", "ratio");
    if let Some(f) = panel.ya.frac(1.0).filter(|f| (0.0..=1.0).contains(f)) {
        let y = panel.y + panel.h * (1.0 - f);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.1}" y1="{y:.2}" x2="{:.1}" y2="{y:.2}" stroke="#999" stroke-dasharray="4 3"/>"##,
            panel.x,
            panel.x + panel.w
        );
    }
    for (k, inst) in instances.iter().enumerate() {
        let mut pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.instance == *inst)
            .map(|r| (r.alpha, r.ratio))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        panel.series(&mut svg, &pts, PALETTE[k % PALETTE.len()]);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes `variance.svg` and `clip_ratio.svg` for whichever parts of the
/// result are non-empty. Returns the paths written.
pub fn emit_plots(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        written.push(path);
        Ok(())
    };
    if !result.cells.is_empty() {
        put("variance.svg", variance_svg(&result.cells))?;
    }
    if !result.clip_rows.is_empty() {
        put("clip_ratio.svg", clip_ratio_svg(&result.clip_rows))?;
    }
    Ok(written)
}
