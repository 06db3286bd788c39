//! SVG panels of range regions over the square `[-3, 3]²`.

use std::fmt::Write;

use crate::geometry::{classify_admittance, Orientation, RegionClass, Shape};

const HALF_WIDTH: f64 = 3.0;
const PLOT: f64 = 200.0;
const PAD: f64 = 20.0;
const TITLE: f64 = 18.0;
const FILL: &str = "#9ecae1";
const EDGE: &str = "#08519c";

pub struct Panel {
    pub title: String,
    pub region: RegionClass,
}

/// The nine `(c, d)` pairs of the admittance taxonomy figure, row by row.
pub const FIGURE_PAIRS: [(f64, f64); 9] = [
    (-1.0, -1.0),
    (0.0, -1.0),
    (2.0, -1.0),
    (-0.125, -0.1),
    (0.0, 0.0),
    (-2.0, 0.125),
    (0.0, 1.0 / 3.0),
    (0.0, 1.0),
    (1.0, 1.0),
];

pub fn figure_panels() -> Vec<Panel> {
    FIGURE_PAIRS
        .iter()
        .map(|&(c, d)| Panel {
            title: format!("c = {}, d = {}", num(c), num(d)),
            region: classify_admittance(c, d),
        })
        .collect()
}

/// Rounds to three decimals and never prints `-0.000`.
fn n3(x: f64) -> String {
    let s = format!("{:.3}", x);
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

fn num(x: f64) -> String {
    let r = (x * 1e4).round() / 1e4;
    if r == 0.0 {
        "0".into()
    } else {
        format!("{r}")
    }
}

fn px(x: f64) -> f64 {
    (x + HALF_WIDTH) / (2.0 * HALF_WIDTH) * PLOT
}

fn py(y: f64) -> f64 {
    (HALF_WIDTH - y) / (2.0 * HALF_WIDTH) * PLOT
}

fn scale(r: f64) -> f64 {
    r / (2.0 * HALF_WIDTH) * PLOT
}

fn circle_path(cx: f64, cy: f64, r: f64) -> String {
    format!(
        "M {} {} a {} {} 0 1 0 {} 0 a {} {} 0 1 0 {} 0 Z",
        n3(cx - r),
        n3(cy),
        n3(r),
        n3(r),
        n3(2.0 * r),
        n3(r),
        n3(r),
        n3(-2.0 * r)
    )
}

fn panel(out: &mut String, index: usize, ox: f64, oy: f64, p: &Panel) {
    let r = &p.region;
    let _ = writeln!(out, r#"<g transform="translate({},{})">"#, n3(ox), n3(oy));
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{} ({})</text>"#,
        n3(PLOT / 2.0),
        n3(TITLE - 6.0),
        p.title,
        r.case
    );
    let _ = writeln!(out, r#"<g transform="translate(0,{})">"#, n3(TITLE));
    let _ = writeln!(
        out,
        r#"<clipPath id="clip{index}"><rect x="0.000" y="0.000" width="{w}" height="{w}"/></clipPath>"#,
        w = n3(PLOT)
    );
    let _ = writeln!(out, r#"<g clip-path="url(#clip{index})">"#);
    let full = format!("M 0.000 0.000 H {w} V {w} H 0.000 Z", w = n3(PLOT));
    match r.shape {
        Shape::FullPlane => {
            let _ = writeln!(out, r#"<path d="{full}" fill="{FILL}"/>"#);
        }
        Shape::HalfPlane => {
            let h = r.half_plane.expect("half-plane bound");
            let edge = px(h.threshold).clamp(-1.0, PLOT + 1.0);
            let (x0, x1) = match h.orientation {
                Orientation::AtLeast => (edge, PLOT + 1.0),
                Orientation::AtMost => (-1.0, edge),
            };
            if x1 > x0 {
                let _ = writeln!(
                    out,
                    r#"<rect x="{}" y="0.000" width="{}" height="{}" fill="{FILL}"/>"#,
                    n3(x0),
                    n3(x1 - x0),
                    n3(PLOT)
                );
            }
        }
        Shape::Disk | Shape::DiskComplement | Shape::Point => {
            let c = r.center.expect("center");
            let (cx, cy) = (px(c.re), py(c.im));
            let rad = scale(r.radius.unwrap_or(0.0));
            match r.shape {
                Shape::Disk => {
                    let _ = writeln!(out, r#"<path d="{}" fill="{FILL}"/>"#, circle_path(cx, cy, rad));
                }
                Shape::DiskComplement => {
                    let _ = writeln!(
                        out,
                        r#"<path d="{full} {}" fill="{FILL}" fill-rule="evenodd"/>"#,
                        circle_path(cx, cy, rad)
                    );
                }
                _ => {
                    let _ = writeln!(out, r#"<circle cx="{}" cy="{}" r="3.000" fill="{EDGE}"/>"#, n3(cx), n3(cy));
                }
            }
            if rad > 0.0 {
                let _ = writeln!(
                    out,
                    r#"<path d="{}" fill="none" stroke="{EDGE}" stroke-width="1.500"/>"#,
                    circle_path(cx, cy, rad)
                );
            }
        }
        Shape::Empty => {}
    }
    if let Some(h) = r.half_plane {
        let x = n3(px(h.threshold));
        let _ = writeln!(
            out,
            r#"<line x1="{x}" y1="0.000" x2="{x}" y2="{}" stroke="{EDGE}" stroke-width="1.500"/>"#,
            n3(PLOT)
        );
    }
    let (ax, ay) = (n3(px(0.0)), n3(py(0.0)));
    let w = n3(PLOT);
    let _ = writeln!(out, r##"<line x1="0.000" y1="{ay}" x2="{w}" y2="{ay}" stroke="#555555" stroke-width="0.750"/>"##);
    let _ = writeln!(out, r##"<line x1="{ax}" y1="0.000" x2="{ax}" y2="{w}" stroke="#555555" stroke-width="0.750"/>"##);
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r##"<rect x="0.000" y="0.000" width="{w}" height="{w}" fill="none" stroke="#000000" stroke-width="1.000"/>"##
    );
    let _ = writeln!(out, "</g>\n</g>");
}

/// Lays panels out row-major on a grid with `columns` columns.
pub fn render(panels: &[Panel], columns: usize) -> String {
    let columns = columns.max(1);
    let rows = panels.len().div_ceil(columns).max(1);
    let cell_w = PLOT + 2.0 * PAD;
    let cell_h = PLOT + TITLE + 2.0 * PAD;
    let (w, h) = (cell_w * columns as f64, cell_h * rows as f64);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        n3(w),
        n3(h),
        n3(w),
        n3(h)
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (i, p) in panels.iter().enumerate() {
        let (col, row) = (i % columns, i / columns);
        panel(&mut out, i, col as f64 * cell_w + PAD, row as f64 * cell_h + PAD, p);
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_has_nine_panels() {
        let svg = render(&figure_panels(), 3);
        assert_eq!(svg.matches("<clipPath").count(), 9);
        assert!(svg.contains("c = 0, d = 0 (iii)"));
        assert!(svg.contains("c = 1, d = 1 (vi)"));
        assert_eq!(svg, render(&figure_panels(), 3));
        assert!(!svg.contains("-0.000"));
    }

    #[test]
    fn coordinates_have_three_decimals() {
        let svg = render(&figure_panels(), 3);
        let attrs = svg.split('"').skip(1).step_by(2);
        for tok in attrs.flat_map(|a| a.split_whitespace()) {
            if let Ok(v) = tok.parse::<f64>() {
                if tok.contains('.') {
                    assert_eq!(tok, n3(v), "{tok}");
                }
            }
        }
    }
}
