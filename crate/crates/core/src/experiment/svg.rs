//! Standalone SVG 1.1 boxplots: box from q1 to q3, median line, whiskers,
//! "+" outlier markers and a dashed mean line, one group per parameter.

use std::fmt::Write;

use super::boxplot::BoxplotSummary;

const SLOT: f64 = 70.0;
const LEFT: f64 = 70.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 360.0;
const HEIGHT: f64 = 420.0;
const BOX_W: f64 = 36.0;

/// Linear map from data values to the vertical pixel axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YScale {
    pub min: f64,
    pub max: f64,
    pub top: f64,
    pub bottom: f64,
}

impl YScale {
    fn fit(summaries: &[BoxplotSummary]) -> Self {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in summaries {
            for v in [s.whisker_low, s.whisker_high, s.mean]
                .into_iter()
                .chain(s.outliers.iter().copied())
            {
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5 * lo.abs().max(1.0) };
        YScale {
            min: lo - pad,
            max: hi + pad,
            top: TOP,
            bottom: BOTTOM,
        }
    }

    pub fn to_px(&self, v: f64) -> f64 {
        self.bottom - (v - self.min) / (self.max - self.min) * (self.bottom - self.top)
    }

    pub fn to_value(&self, px: f64) -> f64 {
        self.min + (self.bottom - px) / (self.bottom - self.top) * (self.max - self.min)
    }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_boxplots(title: &str, summaries: &[BoxplotSummary]) -> String {
    let scale = YScale::fit(summaries);
    let width = LEFT + SLOT * summaries.len().max(1) as f64 + 20.0;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0}" height="{HEIGHT:.0}" data-y-min="{:.17e}" data-y-max="{:.17e}" data-plot-top="{TOP}" data-plot-bottom="{BOTTOM}">"#,
        scale.min, scale.max
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="22" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        width / 2.0,
        esc(title)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{BOTTOM}" stroke="black"/>"#
    );
    for k in 0..=4 {
        let v = scale.min + (scale.max - scale.min) * k as f64 / 4.0;
        let y = scale.to_px(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.1}" y1="{y:.6}" x2="{LEFT}" y2="{y:.6}" stroke="black"/><text x="{:.1}" y="{:.6}" font-family="sans-serif" font-size="10" text-anchor="end">{v:.3}</text>"#,
            LEFT - 4.0,
            LEFT - 6.0,
            y + 3.0
        );
    }
    for (n, b) in summaries.iter().enumerate() {
        let cx = LEFT + SLOT * (n as f64 + 0.5);
        let (x0, x1) = (cx - BOX_W / 2.0, cx + BOX_W / 2.0);
        let (y_q1, y_q3) = (scale.to_px(b.q1), scale.to_px(b.q3));
        let (y_lo, y_hi) = (scale.to_px(b.whisker_low), scale.to_px(b.whisker_high));
        let y_med = scale.to_px(b.median);
        let y_mean = scale.to_px(b.mean);
        let _ = writeln!(
            s,
            r#"<g class="param" data-label="{}" data-median="{:.17e}" data-q1="{:.17e}" data-q3="{:.17e}" data-whisker-low="{:.17e}" data-whisker-high="{:.17e}" data-mean="{:.17e}" data-outliers="{}">"#,
            esc(&b.label),
            b.median,
            b.q1,
            b.q3,
            b.whisker_low,
            b.whisker_high,
            b.mean,
            b.outliers.len()
        );
        let _ = writeln!(
            s,
            r#"  <line class="whisker-low" x1="{cx:.6}" y1="{y_q1:.6}" x2="{cx:.6}" y2="{y_lo:.6}" stroke="black" stroke-dasharray="2,2"/>"#
        );
        let _ = writeln!(
            s,
            r#"  <line class="whisker-high" x1="{cx:.6}" y1="{y_q3:.6}" x2="{cx:.6}" y2="{y_hi:.6}" stroke="black" stroke-dasharray="2,2"/>"#
        );
        for (class, y) in [("cap-low", y_lo), ("cap-high", y_hi)] {
            let _ = writeln!(
                s,
                r#"  <line class="{class}" x1="{:.6}" y1="{y:.6}" x2="{:.6}" y2="{y:.6}" stroke="black"/>"#,
                cx - BOX_W / 4.0,
                cx + BOX_W / 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"  <rect class="box" x="{x0:.6}" y="{y_q3:.6}" width="{BOX_W:.6}" height="{:.6}" fill="none" stroke="blue"/>"#,
            y_q1 - y_q3
        );
        let _ = writeln!(
            s,
            r#"  <line class="median" x1="{x0:.6}" y1="{y_med:.6}" x2="{x1:.6}" y2="{y_med:.6}" stroke="red" stroke-width="1.5"/>"#
        );
        let _ = writeln!(
            s,
            r#"  <line class="mean" x1="{x0:.6}" y1="{y_mean:.6}" x2="{x1:.6}" y2="{y_mean:.6}" stroke="blue" stroke-dasharray="4,3"/>"#
        );
        for &o in &b.outliers {
            let _ = writeln!(
                s,
                r#"  <text class="outlier" x="{cx:.6}" y="{:.6}" data-value="{o:.17e}" font-family="sans-serif" font-size="12" text-anchor="middle" fill="red">+</text>"#,
                scale.to_px(o) + 4.0
            );
        }
        let _ = writeln!(
            s,
            r#"  <text class="label" x="{cx:.6}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            BOTTOM + 20.0,
            esc(&b.label)
        );
        let _ = writeln!(s, "</g>");
    }
    s.push_str("</svg>\n");
    s
}
