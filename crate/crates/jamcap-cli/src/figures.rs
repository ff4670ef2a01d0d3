//! Figure set: for each attempt probability in the standard six-value grid,
//! a CSV of (alpha, lb_s2, ub) over alpha = 0.05..0.99 step 0.01 and a
//! matching self-contained SVG line chart (no plotting library; the markup
//! is assembled by hand so identical inputs give identical bytes).

use crate::fmtnum::g6;
use jamcap::bounds::{lb_strategy2, ub_two_user};
use jamcap::SystemParams;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// Attempt probabilities the figure set covers.
pub const FIGURE_P: [f64; 6] = [0.01, 0.2, 0.4, 0.6, 0.8, 0.9];

/// One curve pair: (alpha, achievable rate, upper bound).
pub fn curve(p: f64) -> Vec<(f64, f64, f64)> {
    (5..=99)
        .filter_map(|i| {
            let alpha = i as f64 / 100.0;
            let params = SystemParams::from_alpha(2, p, alpha).ok()?;
            let lb = lb_strategy2(&params).ok()?.rate;
            let ub = ub_two_user(&params).ok()?.rate;
            Some((alpha, lb, ub))
        })
        .collect()
}

/// CSV body for one figure.
pub fn render_csv(points: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("alpha,lb_s2,ub\n");
    for &(alpha, lb, ub) in points {
        let _ = writeln!(out, "{},{},{}", g6(alpha), g6(lb), g6(ub));
    }
    out
}

// ---- SVG assembly ----------------------------------------------------------

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 616.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 392.0;

fn x_px(alpha: f64) -> f64 {
    LEFT + (RIGHT - LEFT) * alpha
}

fn y_px(v: f64, y_top: f64) -> f64 {
    BOTTOM - (BOTTOM - TOP) * (v / y_top)
}

fn polyline(out: &mut String, points: &[(f64, f64)], color: &str) {
    let _ = write!(out, "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"");
    for (i, (x, y)) in points.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x:.2},{y:.2}");
    }
    out.push_str("\"/>\n");
}

/// Self-contained SVG chart for one figure: both curves, axes with ticks,
/// and an in-plot legend naming the curves.
pub fn render_svg(p: f64, points: &[(f64, f64, f64)]) -> String {
    let max_v = points.iter().map(|&(_, lb, ub)| lb.max(ub)).fold(0.0f64, f64::max);
    // Nice ceiling in fifths so the top gridline is a round label.
    let y_top = ((max_v * 5.0).ceil() / 5.0).max(0.2);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"13\">"
    );
    let _ = writeln!(svg, "  <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">covert-rate \
         bounds, p = {}</text>",
        (LEFT + RIGHT) / 2.0,
        g6(p)
    );

    // Axes.
    let _ = writeln!(
        svg,
        "  <line x1=\"{LEFT:.2}\" y1=\"{BOTTOM:.2}\" x2=\"{RIGHT:.2}\" y2=\"{BOTTOM:.2}\" \
         stroke=\"black\"/>"
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{LEFT:.2}\" y1=\"{TOP:.2}\" x2=\"{LEFT:.2}\" y2=\"{BOTTOM:.2}\" \
         stroke=\"black\"/>"
    );

    // X ticks every 0.2 of offered load.
    for i in 0..=5 {
        let alpha = i as f64 / 5.0;
        let x = x_px(alpha);
        let _ = writeln!(
            svg,
            "  <line x1=\"{x:.2}\" y1=\"{BOTTOM:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
            BOTTOM + 5.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            BOTTOM + 20.0,
            g6(alpha)
        );
    }
    // Y ticks in fifths of the axis height.
    for i in 0..=5 {
        let v = y_top * i as f64 / 5.0;
        let y = y_px(v, y_top);
        let _ = writeln!(
            svg,
            "  <line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{LEFT:.2}\" y2=\"{y:.2}\" stroke=\"black\"/>",
            LEFT - 5.0
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            LEFT - 9.0,
            y + 4.0,
            g6(v)
        );
    }
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">offered load alpha</text>",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 40.0
    );
    let _ = writeln!(
        svg,
        "  <text x=\"18\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {:.2})\">\
         bits per slot</text>",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );

    // Curves: achievable rate below, upper bound above.
    let lb_pts: Vec<(f64, f64)> =
        points.iter().map(|&(a, lb, _)| (x_px(a), y_px(lb, y_top))).collect();
    let ub_pts: Vec<(f64, f64)> =
        points.iter().map(|&(a, _, ub)| (x_px(a), y_px(ub, y_top))).collect();
    polyline(&mut svg, &ub_pts, "#d62728");
    polyline(&mut svg, &lb_pts, "#1f77b4");

    // Legend.
    let (lx, ly) = (RIGHT - 210.0, TOP + 14.0);
    let _ = writeln!(
        svg,
        "  <line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"#d62728\" \
         stroke-width=\"1.5\"/>",
        lx + 28.0
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"{:.2}\">upper bound (ub)</text>",
        lx + 34.0,
        ly + 4.0
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{lx:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#1f77b4\" \
         stroke-width=\"1.5\"/>",
        ly + 20.0,
        lx + 28.0,
        ly + 20.0
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"{:.2}\">achievable rate (lb_s2)</text>",
        lx + 34.0,
        ly + 24.0
    );
    svg.push_str("</svg>\n");
    svg
}

/// Emit all twelve files into `out_dir`, returning the paths written.
pub fn run(out_dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for &p in &FIGURE_P {
        let points = curve(p);
        let stem = format!("fig_p{}", g6(p));
        let csv_path = out_dir.join(format!("{stem}.csv"));
        fs::write(&csv_path, render_csv(&points))?;
        written.push(csv_path);
        let svg_path = out_dir.join(format!("{stem}.svg"));
        fs::write(&svg_path, render_svg(p, &points))?;
        written.push(svg_path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_keep_the_bound_order_and_vanish_at_high_load() {
        let points = curve(0.5);
        assert_eq!(points.len(), 95);
        for &(alpha, lb, ub) in &points {
            assert!(ub >= lb - 1e-9, "ub {ub} below lb {lb} at alpha {alpha}");
        }
        let first = points.first().unwrap();
        let last = points.last().unwrap();
        assert!(last.1 < first.1 && last.2 < first.2, "curves fail to fall toward high load");
    }

    #[test]
    fn svg_is_self_contained_markup() {
        let points = curve(0.2);
        let svg = render_svg(0.2, &points);
        assert!(svg.starts_with("<svg "));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("achievable rate (lb_s2)") && svg.contains("upper bound (ub)"));
        // No external fetches: the only URL is the SVG namespace itself.
        assert!(!svg.contains("href"));
    }
}
