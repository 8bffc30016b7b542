//! Static SVG figures of boundary curves.
//!
//! Coordinates are written in data units with Rust's shortest round-trip
//! float formatting, so the plotted points parse back to the exact values
//! read from the CSV input.

use std::fmt::Write as _;
use std::io::Read;

use anyhow::{bail, Context, Result};

/// Boundary points read from a CSV with `x` and `y` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub points: Vec<(f64, f64)>,
}

pub fn read_curve<R: Read>(input: R) -> Result<Curve> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers().context("reading CSV header")?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (Some(ix), Some(iy)) = (column("x"), column("y")) else {
        bail!("CSV needs x and y columns, found {:?}", headers.iter().collect::<Vec<_>>());
    };
    let mut points = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("CSV row {}", line + 2))?;
        let field = |i: usize| -> Result<f64> {
            let raw = record.get(i).unwrap_or("").trim();
            let v: f64 = raw.parse().with_context(|| format!("CSV row {}: {raw:?} is not a number", line + 2))?;
            if !v.is_finite() {
                bail!("CSV row {}: non-finite value {raw}", line + 2);
            }
            Ok(v)
        };
        points.push((field(ix)?, field(iy)?));
    }
    if points.len() < 2 {
        bail!("CSV holds {} points; a curve needs at least 2", points.len());
    }
    Ok(Curve { points })
}

fn bounds<'a>(curves: impl Iterator<Item = &'a Curve>, extra: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in curves.flat_map(|c| c.points.iter()).chain(extra) {
        b = (b.0.min(x), b.1.min(y), b.2.max(x), b.3.max(y));
    }
    b
}

fn polyline(out: &mut String, id: &str, curve: &Curve, stroke: &str) {
    let _ = write!(
        out,
        r#"  <polygon id="{id}" fill="none" stroke="{stroke}" stroke-width="1.5" vector-effect="non-scaling-stroke" points=""#
    );
    for (i, (x, y)) in curve.points.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x},{y}");
    }
    out.push_str("\"/>\n");
}

/// SVG with the numeric boundary, an optional closed-form overlay, the
/// coordinate axes and markers at `foci`. The y axis points up.
pub fn render_svg(numeric: &Curve, overlay: Option<&Curve>, foci: &[(f64, f64)]) -> String {
    let (x0, y0, x1, y1) = bounds(std::iter::once(numeric).chain(overlay), foci);
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-12);
    let (x0, y0, x1, y1) = (x0 - pad, y0 - pad, x1 + pad, y1 + pad);
    let (w, h) = (x1 - x0, y1 - y0);
    let marker = 0.01 * w.max(h);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="640" height="{}" viewBox="{x0} {} {w} {h}">"#,
        (640.0 * h / w).round(),
        -y1
    );
    out.push_str("<g transform=\"scale(1,-1)\">\n");
    let _ = writeln!(
        out,
        r##"  <line x1="{x0}" y1="0" x2="{x1}" y2="0" stroke="#bbb" stroke-width="0.5" vector-effect="non-scaling-stroke"/>"##
    );
    let _ = writeln!(
        out,
        r##"  <line x1="0" y1="{y0}" x2="0" y2="{y1}" stroke="#bbb" stroke-width="0.5" vector-effect="non-scaling-stroke"/>"##
    );
    polyline(&mut out, "numeric", numeric, "#1f4e9c");
    if let Some(c) = overlay {
        polyline(&mut out, "closed-form", c, "#c0392b");
    }
    for &(x, y) in foci {
        let _ = writeln!(out, r#"  <circle class="focus" cx="{x}" cy="{y}" r="{marker}" fill="black"/>"#);
    }
    out.push_str("</g>\n</svg>\n");
    out
}

/// The points of the polygon with the given id, parsed back from an SVG
/// produced by [`render_svg`].
#[cfg(test)]
pub fn polygon_points(svg: &str, id: &str) -> Option<Vec<(f64, f64)>> {
    let start = svg.find(&format!("id=\"{id}\""))?;
    let rest = &svg[start..];
    let p = rest.find("points=\"")? + "points=\"".len();
    let body = &rest[p..p + rest[p..].find('"')?];
    body.split_whitespace()
        .map(|pair| {
            let (x, y) = pair.split_once(',')?;
            Some((x.parse().ok()?, y.parse().ok()?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_points_survive_the_svg() {
        let csv = "alpha,lambda,x,y\n0.0,1.0,1.6666666666666667e0,0.0\n1.0,1.2,3.0000000000000004e-1,-1.2345678901234567e0\n2.0,1.1,-7.0e-1,2.0e-1\n";
        let curve = read_curve(csv.as_bytes()).unwrap();
        let svg = render_svg(&curve, None, &[(1.0, 0.0), (-1.0, 0.0)]);
        assert_eq!(polygon_points(&svg, "numeric").unwrap(), curve.points);
        assert_eq!(svg.matches("class=\"focus\"").count(), 2);
        assert!(polygon_points(&svg, "closed-form").is_none());
    }

    #[test]
    fn envelope_layout_is_accepted() {
        let curve = read_curve("alpha,x,y\n0,1,0\n1,0,1\n".as_bytes()).unwrap();
        assert_eq!(curve.points, vec![(1.0, 0.0), (0.0, 1.0)]);
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(read_curve("a,b\n1,2\n3,4\n".as_bytes()).is_err());
        assert!(read_curve("x,y\n1,oops\n3,4\n".as_bytes()).is_err());
        assert!(read_curve("x,y\n1,2\n".as_bytes()).is_err());
        assert!(read_curve("x,y\n1,2\n3,4,5\n".as_bytes()).is_err());
        assert!(read_curve("x,y\n1,NaN\n3,4\n".as_bytes()).is_err());
    }
}
