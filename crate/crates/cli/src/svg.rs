//! Static SVG renderings of the boxplots and the benchmark table.
//!
//! Colours: the observed share of the central region is magenta and the rest
//! grey; the 50% proportion line is dashed cyan; domain outliers are green,
//! functional outliers red, potential outliers blue (most) and yellow
//! (second-most), and the median is black. Output is deterministic.

use std::collections::BTreeMap;
use std::fmt::Write;

use mfdepth::boxplot::{fivenum, BoxplotSummary, IntensitySurface};
use mfdepth::metrics::AssessmentRow;
use mfdepth::{Dataset, Method};

use crate::provenance::Provenance;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 50.0;

const OBSERVED: &str = "#c51b7d";
const UNOBSERVED: &str = "#bdbdbd";
const HALF_LINE: &str = "#00bcd4";
const BOUNDS: &str = "#3b3b98";
const MEDIAN: &str = "#000000";

/// Outlier classes, lowest drawing priority first.
pub const OUTLIER_CLASSES: [(&str, &str); 4] = [
    ("potential-2", "#e6c000"),
    ("potential-1", "#1f77b4"),
    ("domain", "#2ca02c"),
    ("functional", "#d62728"),
];

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(lo, hi): (f64, f64)| {
            let w = if hi > lo { hi - lo } else { 1.0 };
            (lo - 0.05 * w, hi + 0.05 * w)
        };
        Self { x: pad(x), y: pad(y) }
    }

    fn px(&self, t: f64) -> f64 {
        MARGIN + (t - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }

    fn point(&self, t: f64, v: f64) -> String {
        format!("{:.2},{:.2}", self.px(t), self.py(v))
    }
}

fn header(out: &mut String, prov: &Provenance, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, "<!-- {} -->", prov.comment());
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

fn axes(out: &mut String, f: &Frame) {
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<rect x="{x0}" y="{y0}" width="{:.2}" height="{:.2}" fill="none" stroke="black" stroke-width="1"/>"#,
        x1 - x0,
        y1 - y0
    );
    let label = |out: &mut String, x: f64, y: f64, anchor: &str, v: f64| {
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="10" text-anchor="{anchor}">{v:.3}</text>"#
        );
    };
    label(out, x0, y1 + 14.0, "start", f.x.0);
    label(out, x1, y1 + 14.0, "end", f.x.1);
    label(out, x0 - 4.0, y1, "end", f.y.0);
    label(out, x0 - 4.0, y0 + 8.0, "end", f.y.1);
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Mean observation time of every bin, `NaN` for empty bins.
fn bin_times(summary: &BoxplotSummary, ds: &Dataset) -> Vec<f64> {
    let k = summary.grid.n_bins();
    let (mut sum, mut count) = (vec![0.0; k], vec![0usize; k]);
    for c in &ds.curves {
        for &t in &c.times {
            let b = summary.grid.assign(t);
            sum[b] += t;
            count[b] += 1;
        }
    }
    sum.iter().zip(&count).map(|(s, &n)| if n > 0 { s / n as f64 } else { f64::NAN }).collect()
}

/// Maximal runs of bins where every series is finite.
fn runs(x: &[f64], series: &[&[f64]]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut cur = Vec::new();
    for k in 0..x.len() {
        if x[k].is_finite() && series.iter().all(|s| s[k].is_finite()) {
            cur.push(k);
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

fn band(out: &mut String, f: &Frame, x: &[f64], lo: &[f64], hi: &[f64], fill: &str, class: &str) {
    for run in runs(x, &[lo, hi]) {
        let mut pts: Vec<String> = run.iter().map(|&k| f.point(x[k], hi[k])).collect();
        pts.extend(run.iter().rev().map(|&k| f.point(x[k], lo[k])));
        let _ = writeln!(out, r#"<polygon class="{class}" points="{}" fill="{fill}" stroke="none"/>"#, pts.join(" "));
    }
}

fn line(out: &mut String, f: &Frame, x: &[f64], y: &[f64], stroke: &str, extra: &str, class: &str) {
    for run in runs(x, &[y]) {
        let pts: Vec<String> = run.iter().map(|&k| f.point(x[k], y[k])).collect();
        let _ = writeln!(
            out,
            r#"<polyline class="{class}" points="{}" fill="none" stroke="{stroke}"{extra}/>"#,
            pts.join(" ")
        );
    }
}

fn curve(out: &mut String, f: &Frame, ds: &Dataset, i: usize, j: usize, stroke: &str, width: f64, class: &str) {
    let c = &ds.curves[i];
    let pts: Vec<String> = (0..c.len()).map(|k| f.point(c.times[k], c.value(k, j))).collect();
    let _ = writeln!(
        out,
        r#"<polyline class="{class}" data-id="{}" points="{}" fill="none" stroke="{stroke}" stroke-width="{width}"/>"#,
        escape(&c.id),
        pts.join(" ")
    );
}

/// Highest-priority class of every flagged curve.
fn outlier_colours(summary: &BoxplotSummary) -> BTreeMap<usize, (&'static str, &'static str)> {
    let o = &summary.outliers;
    let sets = [&o.potential_2, &o.potential_1, &o.domain, &o.functional];
    let mut out = BTreeMap::new();
    for (set, &(name, colour)) in sets.iter().zip(&OUTLIER_CLASSES) {
        for &i in set.iter() {
            out.insert(i, (name, colour));
        }
    }
    out
}

fn frame_for(summary: &BoxplotSummary, ds: &Dataset, j: usize) -> Frame {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for c in &ds.curves {
        for k in 0..c.len() {
            lo = lo.min(c.value(k, j));
            hi = hi.max(c.value(k, j));
        }
    }
    Frame::new(summary.grid.span(), (lo, hi))
}

fn overlay(out: &mut String, f: &Frame, summary: &BoxplotSummary, ds: &Dataset, x: &[f64], j: usize) {
    line(out, f, x, &summary.nonoutlying.lower[j], BOUNDS, r#" stroke-width="1.5""#, "bound");
    line(out, f, x, &summary.nonoutlying.upper[j], BOUNDS, r#" stroke-width="1.5""#, "bound");
    for (i, (name, colour)) in outlier_colours(summary) {
        curve(out, f, ds, i, j, colour, 1.0, &format!("outlier-{name}"));
    }
    curve(out, f, ds, summary.median, j, MEDIAN, 2.0, "median");
}

fn legend(out: &mut String, entries: &[(&str, &str)]) {
    for (n, (label, colour)) in entries.iter().enumerate() {
        let x = MARGIN + n as f64 * 95.0;
        let y = HEIGHT - 12.0;
        let _ = writeln!(out, r#"<rect x="{x:.2}" y="{:.2}" width="10" height="10" fill="{colour}"/>"#, y - 9.0);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{y:.2}" font-family="sans-serif" font-size="10">{label}</text>"#,
            x + 13.0
        );
    }
}

const LEGEND: [(&str, &str); 6] = [
    ("median", MEDIAN),
    ("domain", "#2ca02c"),
    ("functional", "#d62728"),
    ("potential 1", "#1f77b4"),
    ("potential 2", "#e6c000"),
    ("bounds", BOUNDS),
];

/// Sparse functional boxplot of component `j`.
pub fn sparse_boxplot(summary: &BoxplotSummary, ds: &Dataset, j: usize, prov: &Provenance) -> String {
    let f = frame_for(summary, ds, j);
    let x = bin_times(summary, ds);
    let region = &summary.region.bounds;
    let mut out = String::new();
    header(&mut out, prov, &format!("sparse functional boxplot, y{} ({})", j + 1, summary.method));
    let split = &summary.sparse.proportion_line[j];
    band(&mut out, &f, &x, &region.lower[j], split, OBSERVED, "region-observed");
    band(&mut out, &f, &x, split, &region.upper[j], UNOBSERVED, "region-unobserved");
    line(&mut out, &f, &x, &summary.sparse.half_line[j], HALF_LINE, r#" stroke-width="1.5" stroke-dasharray="6,4""#, "half-line");
    overlay(&mut out, &f, summary, ds, &x, j);
    axes(&mut out, &f);
    legend(&mut out, &LEGEND);
    out.push_str("</svg>\n");
    out
}

/// Magenta at zero sparseness intensity, white at one.
fn intensity_colour(s: f64) -> String {
    let s = s.clamp(0.0, 1.0);
    let mix = |c: f64| (c + (255.0 - c) * s).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(197.0), mix(27.0), mix(125.0))
}

fn cell_edges(g: &[f64]) -> Vec<f64> {
    let n = g.len();
    if n == 1 {
        return vec![g[0] - 0.5, g[0] + 0.5];
    }
    let mut e = Vec::with_capacity(n + 1);
    e.push(g[0] - 0.5 * (g[1] - g[0]));
    e.extend(g.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    e.push(g[n - 1] + 0.5 * (g[n - 1] - g[n - 2]));
    e
}

/// Intensity sparse functional boxplot of one component.
pub fn intensity_boxplot(summary: &BoxplotSummary, ds: &Dataset, surface: &IntensitySurface, prov: &Provenance) -> String {
    let j = surface.component;
    let f = frame_for(summary, ds, j);
    let x = bin_times(summary, ds);
    let mut out = String::new();
    header(&mut out, prov, &format!("intensity sparse functional boxplot, y{} ({})", j + 1, summary.method));
    let (te, ye) = (cell_edges(&surface.t_grid), cell_edges(&surface.y_grid));
    let nt = surface.t_grid.len();
    for (r, yw) in ye.windows(2).enumerate() {
        for (c, tw) in te.windows(2).enumerate() {
            let s = surface.sparseness[r * nt + c];
            if !s.is_finite() {
                continue;
            }
            let (x0, x1) = (f.px(tw[0]), f.px(tw[1]));
            let (y0, y1) = (f.py(yw[1]), f.py(yw[0]));
            let _ = writeln!(
                out,
                r#"<rect class="intensity" x="{x0:.2}" y="{y0:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                x1 - x0,
                y1 - y0,
                intensity_colour(s)
            );
        }
    }
    overlay(&mut out, &f, summary, ds, &x, j);
    axes(&mut out, &f);
    legend(&mut out, &LEGEND);
    out.push_str("</svg>\n");
    out
}

type Metric = (&'static str, fn(&AssessmentRow) -> Option<f64>);

const METRICS: [Metric; 5] = [
    ("ase_median", |r| r.ase_median),
    ("ase_central", |r| r.ase_central),
    ("capture", |r| r.capture),
    ("spearman", |r| r.spearman),
    ("runtime_s", |r| r.runtime_s),
];

const METHOD_COLOURS: [&str; 6] = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];

/// One panel per criterion; within it a box per scenario and method.
pub fn metrics_panels(rows: &[AssessmentRow], prov: &Provenance) -> String {
    let panel_h = 220.0;
    let height = 40.0 + panel_h * METRICS.len() as f64;
    let mut groups: BTreeMap<(String, String, String, String), BTreeMap<usize, Vec<&AssessmentRow>>> = BTreeMap::new();
    for r in rows {
        let key = (r.model.to_string(), r.outlier_type.to_string(), r.sparseness_type.to_string(), r.p_curve_level.to_string());
        let m = Method::ALL.iter().position(|&m| m == r.method).unwrap_or(0);
        groups.entry(key).or_default().entry(m).or_default().push(r);
    }
    let slots: Vec<(usize, usize)> =
        groups.values().enumerate().flat_map(|(g, by)| by.keys().map(move |&m| (g, m))).collect();

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    );
    let _ = writeln!(out, "<!-- {} -->", prov.comment());
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let labels: Vec<String> = groups.keys().map(|k| format!("{}/{}/{}/{}", k.0, k.1, k.2, k.3)).collect();
    let _ = writeln!(
        out,
        r#"<text x="{MARGIN}" y="20" font-family="sans-serif" font-size="11">{}</text>"#,
        escape(&labels.join("  |  "))
    );

    for (p, (name, get)) in METRICS.iter().enumerate() {
        let top = 40.0 + p as f64 * panel_h;
        let bottom = top + panel_h - 40.0;
        let mut boxes = Vec::new();
        for (g, by) in groups.values().enumerate() {
            for (&m, rs) in by {
                let vals: Vec<f64> = rs.iter().filter_map(|r| get(r)).filter(|v| v.is_finite()).collect();
                if !vals.is_empty() {
                    boxes.push((g, m, fivenum(&vals)));
                }
            }
        }
        let lo = boxes.iter().map(|b| b.2[0]).fold(f64::INFINITY, f64::min);
        let hi = boxes.iter().map(|b| b.2[4]).fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if lo.is_finite() { (lo, if hi > lo { hi } else { lo + 1.0 }) } else { (0.0, 1.0) };
        let py = |v: f64| bottom - (v - lo) / (hi - lo) * (bottom - top);
        let _ = writeln!(
            out,
            r#"<text x="{MARGIN}" y="{:.2}" font-family="sans-serif" font-size="12">{name}</text>"#,
            top - 4.0
        );
        let _ = writeln!(
            out,
            r#"<rect x="{MARGIN}" y="{top:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            WIDTH - 2.0 * MARGIN,
            bottom - top
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{hi:.3}</text><text x="{:.2}" y="{bottom:.2}" font-family="sans-serif" font-size="10" text-anchor="end">{lo:.3}</text>"#,
            MARGIN - 4.0,
            top + 8.0,
            MARGIN - 4.0
        );
        let slot_w = (WIDTH - 2.0 * MARGIN) / slots.len().max(1) as f64;
        for (g, m, q) in boxes {
            let s = slots.iter().position(|&x| x == (g, m)).unwrap_or(0);
            let cx = MARGIN + (s as f64 + 0.5) * slot_w;
            let half = 0.3 * slot_w;
            let colour = METHOD_COLOURS[m % METHOD_COLOURS.len()];
            let _ = writeln!(
                out,
                r#"<g class="box" data-method="{}"><line x1="{cx:.2}" y1="{:.2}" x2="{cx:.2}" y2="{:.2}" stroke="black"/><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{colour}" stroke="black"/><line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="2"/></g>"#,
                Method::ALL[m].name(),
                py(q[0]),
                py(q[4]),
                cx - half,
                py(q[3]),
                2.0 * half,
                (py(q[1]) - py(q[3])).max(0.5),
                cx - half,
                py(q[2]),
                cx + half,
                py(q[2]),
            );
        }
    }
    let legend_y = height - 8.0;
    for (m, method) in Method::ALL.iter().enumerate() {
        let x = MARGIN + m as f64 * 100.0;
        let _ = writeln!(
            out,
            r#"<rect x="{x:.2}" y="{:.2}" width="10" height="10" fill="{}"/><text x="{:.2}" y="{legend_y:.2}" font-family="sans-serif" font-size="10">{}</text>"#,
            legend_y - 9.0,
            METHOD_COLOURS[m],
            x + 13.0,
            method.name()
        );
    }
    out.push_str("</svg>\n");
    out
}
