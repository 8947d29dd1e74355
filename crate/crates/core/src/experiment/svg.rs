//! Static SVG line chart of `F(t)` curves, one polyline per swept value.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

use super::{write_atomically, SweepResult};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const F_MAX: f64 = 1.05;
const T_TICKS: usize = 5;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

struct Frame {
    t0: f64,
    t1: f64,
}

impl Frame {
    fn x(&self, t: f64) -> f64 {
        LEFT + (t - self.t0) / (self.t1 - self.t0) * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, f: f64) -> f64 {
        TOP + (F_MAX - f.clamp(0.0, F_MAX)) / F_MAX * (HEIGHT - TOP - BOTTOM)
    }
}

/// Shortest decimal that reads well on an axis.
fn tick_label(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

pub fn sweep_svg(result: &SweepResult) -> String {
    let spec = &result.spec;
    let frame = Frame {
        t0: spec.grid.t_start(),
        t1: spec.grid.t_end(),
    };
    let plot_right = WIDTH - RIGHT;
    let plot_bottom = HEIGHT - BOTTOM;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle">F(t), {} sweep</text>"#,
        (LEFT + plot_right) / 2.0,
        spec.swept.as_str()
    );

    // axes
    let _ = writeln!(
        s,
        r#"<path d="M {LEFT} {TOP} L {LEFT} {plot_bottom} L {plot_right} {plot_bottom}" fill="none" stroke="black"/>"#
    );
    for i in 0..T_TICKS {
        let t = if i == T_TICKS - 1 {
            frame.t1
        } else {
            frame.t0 + (frame.t1 - frame.t0) * i as f64 / (T_TICKS - 1) as f64
        };
        let x = frame.x(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.3}" y1="{plot_bottom}" x2="{x:.3}" y2="{}" stroke="black"/><text class="t-tick" x="{x:.3}" y="{}" text-anchor="middle">{}</text>"#,
            plot_bottom + 5.0,
            plot_bottom + 20.0,
            tick_label(t)
        );
    }
    for f in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let y = frame.y(f);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.3}" x2="{LEFT}" y2="{y:.3}" stroke="black"/><text class="f-tick" x="{}" y="{:.3}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            tick_label(f)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">t</text>"#,
        (LEFT + plot_right) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">F(t)</text>"#,
        (TOP + plot_bottom) / 2.0,
        (TOP + plot_bottom) / 2.0
    );

    for (i, (value, series)) in spec.values.iter().zip(&result.series).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = series
            .times()
            .into_iter()
            .zip(&series.values)
            .map(|(t, f)| format!("{:.3},{:.3}", frame.x(t), frame.y(*f)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text class="legend" x="{}" y="{}">{} = {}</text>"#,
            plot_right + 15.0,
            plot_right + 40.0,
            plot_right + 45.0,
            ly + 4.0,
            spec.swept.symbol(),
            value
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Writes [`sweep_svg`] to `path` atomically.
pub fn render_svg(result: &SweepResult, path: &Path) -> Result<()> {
    write_atomically(path, sweep_svg(result).as_bytes())
}
