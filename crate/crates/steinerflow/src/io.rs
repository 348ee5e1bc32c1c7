//! File formats: polygon text files, CSV tables, SVG plots, field dumps.
//!
//! All writers are deterministic: fixed column orders, fixed float
//! formatting, no timestamps. The polygon writer emits 17 significant
//! digits so that write → read is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::diagram::{bfnt_upper, h_lower, kj_lower, BallConstants, DiagramPoint, PointSource};
use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};
use crate::pde::ScalarField;
use crate::symflow::StripDomain;

/// Parses the polygon text format: '#' starts a comment, one "x y" vertex
/// per line, a blank line separates rings. The first ring is the outer
/// boundary (counterclockwise); clockwise rings are holes.
pub fn parse_polygon(text: &str) -> Result<Polygon> {
    let mut rings: Vec<Vec<Point>> = Vec::new();
    let mut current: Vec<Point> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            if !current.is_empty() {
                rings.push(std::mem::take(&mut current));
            }
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<f64> {
            tok.ok_or(Error::Parse { line: lineno + 1, msg: "expected two coordinates".into() })?
                .parse::<f64>()
                .map_err(|e| Error::Parse { line: lineno + 1, msg: e.to_string() })
        };
        let x = parse(it.next())?;
        let y = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::Parse {
                line: lineno + 1,
                msg: "expected exactly two coordinates".into(),
            });
        }
        current.push(Point::new(x, y));
    }
    if !current.is_empty() {
        rings.push(current);
    }
    if rings.is_empty() {
        return Err(Error::Parse { line: 0, msg: "no vertices found".into() });
    }
    Polygon::new(rings).map_err(|e| Error::Parse { line: 0, msg: e.to_string() })
}

pub fn read_polygon(path: &Path) -> Result<Polygon> {
    parse_polygon(&fs::read_to_string(path)?)
}

/// Serializes a polygon with 17 significant digits per coordinate.
pub fn polygon_to_string(p: &Polygon) -> String {
    let mut out = String::new();
    for (k, ring) in p.rings().iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        for v in ring {
            let _ = writeln!(out, "{:.16e} {:.16e}", v.x, v.y);
        }
    }
    out
}

pub fn write_polygon(path: &Path, p: &Polygon) -> Result<()> {
    Ok(fs::write(path, polygon_to_string(p))?)
}

/// Strip CSV for a symmetral or any strip state: one row per strip with the
/// strip midline height and the semicolon-separated interval list.
pub fn strips_to_csv(dom: &StripDomain) -> String {
    let mut out = String::from("y_mid,intervals\n");
    for (i, strip) in dom.strips().iter().enumerate() {
        let ivs: Vec<String> =
            strip.intervals().iter().map(|(a, b)| format!("{a}:{b}")).collect();
        let _ = writeln!(out, "{},{}", dom.strip_mid_y(i), ivs.join(";"));
    }
    out
}

/// One evaluated snapshot row of the flow CSV.
#[derive(Clone, Copy, Debug)]
pub struct SnapshotRow {
    pub t_global: f64,
    pub phase: usize,
    pub area: f64,
    pub n_walls: usize,
    pub lambda: f64,
    pub torsion: f64,
    pub x: f64,
    pub y: f64,
}

pub fn snapshots_to_csv(rows: &[SnapshotRow]) -> String {
    let mut out = String::from("t_global,phase,area,n_walls,lambda,torsion,x,y\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.t_global, r.phase, r.area, r.n_walls, r.lambda, r.torsion, r.x, r.y
        );
    }
    out
}

fn source_tag(s: &PointSource) -> &'static str {
    match s {
        PointSource::Computed { .. } => "computed",
        PointSource::AnalyticFamily { .. } => "analytic-family",
        PointSource::BoundCurve => "bound-curve",
    }
}

/// Diagram CSV: x, y, d, source, t_global (flow points only), n (family
/// points only).
pub fn diagram_to_csv(points: &[DiagramPoint]) -> String {
    let mut out = String::from("x,y,d,source,t_global,n\n");
    for p in points {
        let (t, n) = match p.source {
            PointSource::Computed { t_global } => (format!("{t_global}"), String::new()),
            PointSource::AnalyticFamily { n, .. } => (String::new(), format!("{n}")),
            PointSource::BoundCurve => (String::new(), String::new()),
        };
        let _ = writeln!(out, "{},{},{},{},{},{}", p.x, p.y, p.d, source_tag(&p.source), t, n);
    }
    out
}

/// Reads back a diagram CSV produced by [`diagram_to_csv`].
pub fn parse_diagram_csv(text: &str) -> Result<Vec<DiagramPoint>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 4 {
            return Err(Error::Parse { line: lineno + 1, msg: "expected at least 4 columns".into() });
        }
        let num = |k: usize| -> Result<f64> {
            fields[k]
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse { line: lineno + 1, msg: e.to_string() })
        };
        let x = num(0)?;
        let y = num(1)?;
        let d = num(2)? as u32;
        let source = match fields[3].trim() {
            "computed" => {
                let t = fields.get(4).and_then(|s| s.trim().parse().ok()).unwrap_or(0.0);
                PointSource::Computed { t_global: t }
            }
            "analytic-family" => {
                let n = fields.get(5).and_then(|s| s.trim().parse().ok()).unwrap_or(2);
                PointSource::AnalyticFamily { n, sigma: f64::NAN }
            }
            _ => PointSource::BoundCurve,
        };
        out.push(DiagramPoint { x, y, d, source });
    }
    Ok(out)
}

/// Bounds CSV: uniform x grid with the two closed-form bounds and the lower
/// estimate of the upper envelope.
pub fn bounds_to_csv(c: &BallConstants, samples: usize) -> String {
    let mut out = String::from("x,kj,h_lower,bfnt\n");
    let n = samples.max(2);
    for k in 0..n {
        let x = k as f64 / (n - 1) as f64;
        let _ = writeln!(
            out,
            "{},{},{},{}",
            x,
            kj_lower(x, c.d),
            h_lower(x, c.d),
            bfnt_upper(x, c)
        );
    }
    out
}

/// Flat text dump of a grid field, row-major, one row of node values per
/// line — for external plotting.
pub fn field_to_text(f: &ScalarField) -> String {
    let mut out = String::new();
    for j in 0..f.ny() {
        for i in 0..f.nx() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", f.at(i, j));
        }
        out.push('\n');
    }
    out
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 560.0;
const SVG_MARGIN: f64 = 50.0;
const Y_MAX: f64 = 1.25;

fn svg_xy(x: f64, y: f64) -> (f64, f64) {
    let sx = SVG_MARGIN + x * (SVG_W - 2.0 * SVG_MARGIN);
    let sy = SVG_H - SVG_MARGIN - (y / Y_MAX) * (SVG_H - 2.0 * SVG_MARGIN);
    (sx, sy)
}

fn polyline(points: impl Iterator<Item = (f64, f64)>, class: &str) -> String {
    let coords: Vec<String> = points
        .map(|(x, y)| {
            let (sx, sy) = svg_xy(x, y);
            format!("{sx:.2},{sy:.2}")
        })
        .collect();
    format!("<polyline class=\"{class}\" points=\"{}\"/>\n", coords.join(" "))
}

/// Self-contained SVG of the diagram: the unit square, the closed-form
/// bound curves, and a scatter of points colored by provenance.
pub fn diagram_svg(points: &[DiagramPoint], c: &BallConstants) -> String {
    let mut s = String::new();
    let _ = write!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" \
         viewBox=\"0 0 {SVG_W} {SVG_H}\">\n<style>\n\
         .axis{{stroke:#222;stroke-width:1;fill:none}}\n\
         .box{{stroke:#999;stroke-width:0.7;stroke-dasharray:4 3;fill:none}}\n\
         .kj{{stroke:#1f77b4;stroke-width:1.5;fill:none}}\n\
         .hl{{stroke:#2ca02c;stroke-width:1.2;stroke-dasharray:6 3;fill:none}}\n\
         .bfnt{{stroke:#d62728;stroke-width:1.5;fill:none}}\n\
         .computed{{fill:#111;stroke:none}}\n\
         .family{{fill:#9467bd;stroke:none;fill-opacity:0.55}}\n\
         .bound{{fill:#8c564b;stroke:none}}\n\
         text{{font-family:sans-serif;font-size:12px;fill:#222}}\n\
         </style>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    // axes and the unit box
    let (x0, y0) = svg_xy(0.0, 0.0);
    let (x1, _) = svg_xy(1.0, 0.0);
    let (_, y1) = svg_xy(0.0, Y_MAX);
    let _ = write!(
        s,
        "<path class=\"axis\" d=\"M {x0:.2} {y1:.2} L {x0:.2} {y0:.2} L {x1:.2} {y0:.2}\"/>\n"
    );
    let (bx, by) = svg_xy(1.0, 1.0);
    let _ = write!(
        s,
        "<rect class=\"box\" x=\"{x0:.2}\" y=\"{by:.2}\" width=\"{:.2}\" height=\"{:.2}\"/>\n",
        bx - x0,
        y0 - by
    );
    let _ = write!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\">x</text>\n<text x=\"{:.2}\" y=\"{:.2}\">y</text>\n",
        x1 + 8.0,
        y0 + 4.0,
        x0 - 16.0,
        y1 - 8.0
    );
    let n = 257;
    let grid = (0..n).map(|k| k as f64 / (n - 1) as f64);
    s.push_str(&polyline(grid.clone().map(|x| (x, kj_lower(x, c.d))), "kj"));
    s.push_str(&polyline(grid.clone().map(|x| (x, h_lower(x, c.d))), "hl"));
    s.push_str(&polyline(grid.map(|x| (x, bfnt_upper(x, c))), "bfnt"));
    for p in points {
        let (sx, sy) = svg_xy(p.x, p.y.min(Y_MAX));
        let (class, r) = match p.source {
            PointSource::Computed { .. } => ("computed", 2.4),
            PointSource::AnalyticFamily { .. } => ("family", 1.4),
            PointSource::BoundCurve => ("bound", 1.8),
        };
        let _ = write!(s, "<circle class=\"{class}\" cx=\"{sx:.2}\" cy=\"{sy:.2}\" r=\"{r}\"/>\n");
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    Ok(fs::write(path, text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_round_trip_lossless() {
        let p = crate::demo::disk64();
        let text = polygon_to_string(&p);
        let q = parse_polygon(&text).unwrap();
        assert_eq!(p.rings().len(), q.rings().len());
        for (r1, r2) in p.rings().iter().zip(q.rings()) {
            for (a, b) in r1.iter().zip(r2) {
                assert_eq!(a.x, b.x);
                assert_eq!(a.y, b.y);
            }
        }
    }

    #[test]
    fn polygon_parse_comments_and_holes() {
        let text = "# outer\n0 0\n1 0\n1 1\n0 1\n\n# hole\n0.25 0.25 # corner\n0.25 0.75\n0.75 0.75\n0.75 0.25\n";
        let p = parse_polygon(text).unwrap();
        assert_eq!(p.rings().len(), 2);
        assert_eq!(p.area(), 0.75);
    }

    #[test]
    fn polygon_parse_errors_carry_line_numbers() {
        let text = "0 0\n1 zero\n1 1\n";
        match parse_polygon(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn diagram_csv_round_trip() {
        let pts = vec![
            DiagramPoint { x: 0.9, y: 0.8, d: 2, source: PointSource::Computed { t_global: 0.25 } },
            DiagramPoint {
                x: 0.5,
                y: 0.5,
                d: 2,
                source: PointSource::AnalyticFamily { n: 2, sigma: 1.0 },
            },
        ];
        let csv = diagram_to_csv(&pts);
        let back = parse_diagram_csv(&csv).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].x, 0.9);
        assert!(matches!(back[1].source, PointSource::AnalyticFamily { n: 2, .. }));
    }

    #[test]
    fn svg_is_self_contained() {
        let c = BallConstants::dim2();
        let svg = diagram_svg(&[], &c);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("<style>"));
        assert!(!svg.contains("http://") || svg.contains("xmlns"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
