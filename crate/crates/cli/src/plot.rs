//! Standalone SVG line plots with the plotted data embedded as a comment.

use std::fmt::Write as _;

use rectenna_core::si::format_sig;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

pub struct PlotSpec<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    /// Plot x on a log10 axis (load sweeps).
    pub log_x: bool,
}

fn nice_ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    (0..=count)
        .map(|i| lo + (hi - lo) * i as f64 / count as f64)
        .collect()
}

/// Render one polyline over the given points.
pub fn line_plot(spec: &PlotSpec, points: &[(f64, f64)]) -> String {
    let map_x = |x: f64| if spec.log_x { x.log10() } else { x };
    let xs: Vec<f64> = points.iter().map(|p| map_x(p.0)).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (x_lo, x_hi) = bounds(&xs);
    let (y_lo, y_hi) = bounds(&ys);
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let px = |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo).max(1e-300) * plot_w;
    let py = |y: f64| MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo).max(1e-300) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, "<!-- data: x,y");
    for p in points {
        let _ = writeln!(svg, "{},{}", format_sig(p.0, 6), format_sig(p.1, 6));
    }
    let _ = writeln!(svg, "-->");
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        spec.title
    );

    // Axes.
    let _ = writeln!(
        svg,
        r#"<line x1="{l}" y1="{t}" x2="{l}" y2="{b}" stroke="black"/>"#,
        l = MARGIN_LEFT,
        t = MARGIN_TOP,
        b = MARGIN_TOP + plot_h
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#,
        l = MARGIN_LEFT,
        b = MARGIN_TOP + plot_h,
        r = MARGIN_LEFT + plot_w
    );
    for tick in nice_ticks(x_lo, x_hi, 5) {
        let x = px(tick);
        let label = if spec.log_x {
            format_sig(10f64.powf(tick), 3)
        } else {
            format_sig(tick, 4)
        };
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{b}" x2="{x}" y2="{b2}" stroke="black"/><text x="{x}" y="{ty}" font-size="11" text-anchor="middle">{label}</text>"#,
            b = MARGIN_TOP + plot_h,
            b2 = MARGIN_TOP + plot_h + 6.0,
            ty = MARGIN_TOP + plot_h + 20.0
        );
    }
    for tick in nice_ticks(y_lo, y_hi, 5) {
        let y = py(tick);
        let _ = writeln!(
            svg,
            r#"<line x1="{x2}" y1="{y}" x2="{l}" y2="{y}" stroke="black"/><text x="{tx}" y="{ty}" font-size="11" text-anchor="end">{label}</text>"#,
            x2 = MARGIN_LEFT - 6.0,
            l = MARGIN_LEFT,
            tx = MARGIN_LEFT - 10.0,
            ty = y + 4.0,
            label = format_sig(tick, 4)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-size="13" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 14.0,
        spec.x_label
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        spec.y_label
    );

    let path: Vec<String> = points
        .iter()
        .map(|p| format!("{:.2},{:.2}", px(map_x(p.0)), py(p.1)))
        .collect();
    let _ = writeln!(
        svg,
        r##"<polyline points="{}" fill="none" stroke="#1f6fb2" stroke-width="2"/>"##,
        path.join(" ")
    );
    for p in points {
        let _ = writeln!(
            svg,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#1f6fb2"/>"##,
            px(map_x(p.0)),
            py(p.1)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn bounds(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}
