//! Text and SVG renderings. Both are deterministic functions of their input.

use std::fmt::Write as _;

use crate::continuum::path::PlPath;
use crate::error::{Error, Result};
use crate::lattice::BinaryConfiguration;

/// One ●/○ row per configuration over the common window `[lo, hi]`.
pub fn render_rows(configs: &[BinaryConfiguration], lo: i64, hi: i64) -> String {
    configs.iter().map(|c| c.render_row(lo, hi) + "\n").collect()
}

/// Smallest window holding every particle of every row, and `[1, 1]` when
/// there are none. Cyclic rows use their full period.
pub fn common_window(configs: &[BinaryConfiguration]) -> (i64, i64) {
    let mut lo = i64::MAX;
    let mut hi = i64::MIN;
    for c in configs {
        let (a, b) = if c.is_cyclic() || c.particle_count() == 0 {
            (c.first(), c.last())
        } else {
            let pos = c.particle_positions();
            (pos[0], *pos.last().unwrap())
        };
        lo = lo.min(a);
        hi = hi.max(b);
    }
    if lo > hi {
        (1, 1)
    } else {
        (lo, hi)
    }
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 48.0;

/// Tick spacing from {1, 2, 5} x 10^k giving at most about 10 ticks.
fn tick_step(span: f64) -> f64 {
    if span <= 0.0 {
        return 1.0;
    }
    let raw = span / 10.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|&s| s >= raw).unwrap_or(10.0 * mag)
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = tick_step(hi - lo);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + 1e-9 * step {
        out.push(if t.abs() < 1e-12 * step { 0.0 } else { t });
        t += step;
    }
    out
}

fn label(x: f64) -> String {
    let s = format!("{x:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// SVG of `paths` in black and `overlays` (typically the running maximum)
/// in red, on shared axes with ticks.
pub fn render_path_svg(paths: &[PlPath<f64>], overlays: &[PlPath<f64>]) -> Result<String> {
    if paths.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let all = paths.iter().chain(overlays);
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in all {
        x0 = x0.min(p.first());
        x1 = x1.max(p.last());
        for &v in p.values() {
            y0 = y0.min(v);
            y1 = y1.max(v);
        }
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    // axes
    let (ax, ay) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<g class="axes" stroke="gray" stroke-width="1"><line x1="{ax}" y1="{ay}" x2="{:.3}" y2="{ay}"/><line x1="{ax}" y1="{ay}" x2="{ax}" y2="{MARGIN}"/></g>"#,
        WIDTH - MARGIN
    );
    let _ = writeln!(out, r#"<g class="ticks" font-family="monospace" font-size="10" fill="gray">"#);
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.3}" y1="{ay}" x2="{x:.3}" y2="{:.3}" stroke="gray"/><text x="{x:.3}" y="{:.3}" text-anchor="middle">{}</text>"#,
            ay + 4.0,
            ay + 16.0,
            label(t)
        );
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            out,
            r#"<line x1="{:.3}" y1="{y:.3}" x2="{ax}" y2="{y:.3}" stroke="gray"/><text x="{:.3}" y="{:.3}" text-anchor="end">{}</text>"#,
            ax - 4.0,
            ax - 6.0,
            y + 3.0,
            label(t)
        );
    }
    let _ = writeln!(out, "</g>");
    let polyline = |p: &PlPath<f64>| -> String {
        p.times().iter().zip(p.values()).map(|(&t, &v)| format!("{:.3},{:.3}", sx(t), sy(v))).collect::<Vec<_>>().join(" ")
    };
    for p in paths {
        let _ = writeln!(
            out,
            r#"<polyline class="path" fill="none" stroke="black" stroke-width="1.5" points="{}"/>"#,
            polyline(p)
        );
    }
    for p in overlays {
        let _ = writeln!(
            out,
            r#"<polyline class="max" fill="none" stroke="red" stroke-width="1.5" stroke-dasharray="4 2" points="{}"/>"#,
            polyline(p)
        );
    }
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

/// Number of segments of every polyline of the given class.
pub fn polyline_segments(svg: &str, class: &str) -> Vec<usize> {
    let tag = format!(r#"class="{class}""#);
    svg.lines()
        .filter(|l| l.starts_with("<polyline") && l.contains(&tag))
        .map(|l| {
            let pts = l.split("points=\"").nth(1).unwrap_or("").split('"').next().unwrap_or("");
            pts.split_whitespace().count().saturating_sub(1)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuum::path::pl_running_max;
    use crate::lattice::{encode_path, LeftPolicy};

    fn single_ball() -> PlPath<f64> {
        let c = BinaryConfiguration::finite(1, vec![1, 0, 0, 0]).unwrap();
        PlPath::<f64>::from_lattice(&encode_path(&c).unwrap())
    }

    #[test]
    fn single_ball_has_four_segments() {
        let svg = render_path_svg(&[single_ball()], &[]).unwrap();
        assert_eq!(polyline_segments(&svg, "path"), vec![4]);
    }

    #[test]
    fn overlay_sits_on_or_above_path() {
        let s = single_ball();
        let m = pl_running_max(&s, LeftPolicy::FiniteSupport).unwrap();
        for &t in s.times() {
            assert!(m.at(t).unwrap() >= s.at(t).unwrap());
        }
        let a = render_path_svg(std::slice::from_ref(&s), std::slice::from_ref(&m)).unwrap();
        let b = render_path_svg(&[s], &[m]).unwrap();
        assert_eq!(a, b);
        assert_eq!(polyline_segments(&a, "max").len(), 1);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(render_path_svg(&[], &[]).is_err());
    }

    #[test]
    fn rows_use_filled_circles_for_particles() {
        let c = BinaryConfiguration::finite(1, vec![0, 1, 0, 1, 1]).unwrap();
        assert_eq!(render_rows(&[c], 1, 5), "○●○●●\n");
    }
}
