use std::fmt::Write as _;
use std::path::Path;

use crate::ndcore::Matrix;
use crate::{Error, Result};

/// Half-width of the square viewport, centered on the origin.
pub const VIEW_HALF_WIDTH: f64 = 3.0;
const PIXELS: f64 = 600.0;
const REAL_COLOR: &str = "#d62728";
const FAKE_COLOR: &str = "#1f77b4";

fn point_radius(n: usize) -> f64 {
    (0.03 * (512.0 / n.max(1) as f64).sqrt()).clamp(0.008, 0.06)
}

fn circles(out: &mut String, pts: &Matrix, color: &str) {
    let r = point_radius(pts.rows());
    let _ = writeln!(out, r#"<g fill="{color}" fill-opacity="0.6">"#);
    for p in pts.iter_rows() {
        if !(p[0].is_finite() && p[1].is_finite()) {
            continue;
        }
        // SVG's y axis points down.
        let _ = writeln!(out, r#"<circle cx="{:.4}" cy="{:.4}" r="{r:.4}"/>"#, p[0], -p[1]);
    }
    out.push_str("</g>\n");
}

/// Scatter plot of real (red) and generated (blue) points over
/// `[−3, 3]²`.
pub fn render_scatter_svg(real: &Matrix, fake: &Matrix) -> Result<String> {
    for (name, m) in [("real", real), ("fake", fake)] {
        if m.cols() != 2 {
            return Err(Error::DimensionMismatch {
                op: if name == "real" {
                    "scatter real"
                } else {
                    "scatter fake"
                },
                lhs: m.shape(),
                rhs: (m.rows(), 2),
            });
        }
    }
    let h = VIEW_HALF_WIDTH;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PIXELS}" height="{PIXELS}" viewBox="{} {} {} {}">"#,
        -h,
        -h,
        2.0 * h,
        2.0 * h
    );
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="white"/>"#,
        -h,
        -h,
        2.0 * h,
        2.0 * h
    );
    circles(&mut out, real, REAL_COLOR);
    circles(&mut out, fake, FAKE_COLOR);
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_scatter_svg(real: &Matrix, fake: &Matrix, path: &Path) -> Result<()> {
    let svg = render_scatter_svg(real, fake)?;
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}
