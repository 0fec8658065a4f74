//! SVG contour plots and PGM curvature maps.

use std::fmt::Write as _;

use crate::contour::{ContourSet, ScalarGrid};

use super::config::PgmFormat;

/// One `<path>` per projected chain. The plane's second axis points up, so
/// `y` is negated; the view box hugs the data with a 5% margin.
pub fn contour_svg(cs: &ContourSet) -> String {
    let pts = || cs.chains().flat_map(|(_, c)| c.projected.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts() {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(-p[1]);
        y1 = y1.max(-p[1]);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let (w, h) = ((x1 - x0).max(1e-9), (y1 - y0).max(1e-9));
    let (mx, my) = (0.05 * w, 0.05 * h);
    let stroke = 0.003 * w.max(h);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{:.6} {:.6} {:.6} {:.6}">"#,
        x0 - mx,
        y0 - my,
        w + 2.0 * mx,
        h + 2.0 * my
    );
    let _ = writeln!(out, r#"<g fill="none" stroke="black" stroke-width="{stroke:.6}">"#);
    for lvl in &cs.levels {
        for ch in &lvl.chains {
            if ch.projected.is_empty() {
                continue;
            }
            let mut d = String::new();
            for (i, p) in ch.projected.iter().enumerate() {
                let _ = write!(d, "{}{:.6} {:.6}", if i == 0 { "M" } else { " L" }, p[0], -p[1]);
            }
            if ch.closed {
                d.push_str(" Z");
            }
            let _ = writeln!(out, r#"<path data-level="{:e}" d="{d}"/>"#, lvl.level);
        }
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// Grey value of every node: `K_min ↦ 0`, `K_max ↦ 255`; a uniform field
/// and masked nodes map to 255. Column index is the first grid index and
/// the top row is the last second-coordinate column.
pub fn grey_levels(g: &ScalarGrid) -> Vec<Vec<u8>> {
    let (lo, hi) = g.range();
    let span = hi - lo;
    (0..g.nv())
        .rev()
        .map(|j| {
            (0..g.nu())
                .map(|i| match g.value(i, j) {
                    Some(k) if span > 0.0 => ((k - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8,
                    _ => 255,
                })
                .collect()
        })
        .collect()
}

pub fn pgm(g: &ScalarGrid, format: PgmFormat) -> Vec<u8> {
    let rows = grey_levels(g);
    let (w, h) = (g.nu(), g.nv());
    match format {
        PgmFormat::P5 => {
            let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
            rows.iter().for_each(|r| out.extend_from_slice(r));
            out
        }
        PgmFormat::P2 => {
            let mut out = format!("P2\n{w} {h}\n255\n");
            for r in &rows {
                // keep lines under 70 characters
                let mut line = String::new();
                for v in r {
                    let tok = v.to_string();
                    if !line.is_empty() && line.len() + 1 + tok.len() > 70 {
                        out.push_str(&line);
                        out.push('\n');
                        line.clear();
                    }
                    if !line.is_empty() {
                        line.push(' ');
                    }
                    line.push_str(&tok);
                }
                out.push_str(&line);
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}
