//! Built-in demo domains.

use crate::geometry::{Point, Polygon};

/// U-shape: the square [0,3]² minus the open notch (1,2)×(1,3]. The flow in
/// the horizontal direction merges all leg sections simultaneously at ln 2,
/// which creates a full wall — the canonical discontinuity example.
pub fn ushape() -> Polygon {
    Polygon::simple(vec![
        Point::new(0.0, 0.0),
        Point::new(3.0, 0.0),
        Point::new(3.0, 3.0),
        Point::new(2.0, 3.0),
        Point::new(2.0, 1.0),
        Point::new(1.0, 1.0),
        Point::new(1.0, 3.0),
        Point::new(0.0, 3.0),
    ])
    .unwrap()
}

/// Two disjoint unit squares side by side; every horizontal section is
/// {(0,1), (2,3)}, so the whole gap closes at once.
pub fn two_rects() -> Polygon {
    Polygon::new(vec![
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ],
        vec![
            Point::new(2.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(3.0, 1.0),
            Point::new(2.0, 1.0),
        ],
    ])
    .unwrap()
}

/// Regular 64-gon inscribed in the unit circle, centered at the origin;
/// area 32 sin(π/32), within 0.2% of π.
pub fn disk64() -> Polygon {
    let ring = (0..64)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 64.0;
            Point::new(t.cos(), t.sin())
        })
        .collect();
    Polygon::simple(ring).unwrap()
}

/// L-shape: [0,2]² minus the top-right unit square; area 3.
pub fn lshape() -> Polygon {
    Polygon::simple(vec![
        Point::new(0.0, 0.0),
        Point::new(2.0, 0.0),
        Point::new(2.0, 1.0),
        Point::new(1.0, 1.0),
        Point::new(1.0, 2.0),
        Point::new(0.0, 2.0),
    ])
    .unwrap()
}

pub const DEMO_NAMES: [&str; 4] = ["ushape", "two_rects", "disk64", "lshape"];

pub fn by_name(name: &str) -> Option<Polygon> {
    match name {
        "ushape" => Some(ushape()),
        "two_rects" => Some(two_rects()),
        "disk64" => Some(disk64()),
        "lshape" => Some(lshape()),
        _ => None,
    }
}
