//! Polygon geometry: rings with holes, sections orthogonal to a direction,
//! and the static Steiner symmetral as a strip decomposition.
//!
//! Sections are computed exactly by edge–line intersection with a half-open
//! vertex rule (an edge owns its lower endpoint, not its upper one), which
//! avoids double counting when the section line passes through a vertex.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::symflow::StripDomain;

/// A point in the plane. Coordinates are dimensionless lengths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

impl From<(f64, f64)> for Point {
    fn from(p: (f64, f64)) -> Self {
        Self { x: p.0, y: p.1 }
    }
}

/// Symmetrization direction: an angle in `[0, π)`.
///
/// A direction and its opposite induce the same symmetrization, so angles
/// are normalized modulo π.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction {
    angle: f64,
}

impl Direction {
    pub fn new(angle: f64) -> Self {
        let mut a = angle % PI;
        if a < 0.0 {
            a += PI;
        }
        if a >= PI {
            a = 0.0;
        }
        Self { angle: a }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Rotation angle applied to bring this direction onto the horizontal
    /// axis: the normalization of `-angle` into `[0, π)`.
    pub fn frame_rotation(&self) -> f64 {
        Direction::new(-self.angle).angle
    }
}

/// A finite union of disjoint open intervals on a line.
///
/// Invariants: each interval has `a < b`, and closures are disjoint
/// (`b_i < a_{i+1}`). Two intervals sharing an endpoint are a merge event,
/// not a valid state.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    /// Builds an interval set after validating the invariants.
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if !(a < b) || !a.is_finite() || !b.is_finite() {
                return Err(Error::InvalidIntervalSet(format!(
                    "interval ({a}, {b}) is not a finite open interval"
                )));
            }
        }
        for w in intervals.windows(2) {
            if !(w[0].1 < w[1].0) {
                return Err(Error::InvalidIntervalSet(format!(
                    "intervals ({}, {}) and ({}, {}) do not have disjoint closures",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        Ok(Self { intervals })
    }

    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    /// Constructs from already sorted, disjoint intervals without checks.
    pub(crate) fn from_sorted_unchecked(intervals: Vec<(f64, f64)>) -> Self {
        debug_assert!(intervals.windows(2).all(|w| w[0].1 < w[1].0));
        debug_assert!(intervals.iter().all(|&(a, b)| a < b));
        Self { intervals }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    /// True when `x` lies in one of the open intervals.
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a < x && x < b)
    }

    /// The single centered interval of the same total length; the limit of
    /// the symmetrization flow on this section.
    pub fn symmetrized(&self) -> IntervalSet {
        let len = self.total_length();
        if len > 0.0 {
            Self { intervals: vec![(-len / 2.0, len / 2.0)] }
        } else {
            Self::empty()
        }
    }
}

/// Planar domain bounded by simple polygonal rings.
///
/// Counterclockwise rings bound components of the domain; clockwise rings
/// are holes. The first ring must be counterclockwise. Holes must lie
/// strictly inside a counterclockwise ring; distinct rings never touch.
#[derive(Clone, Debug)]
pub struct Polygon {
    rings: Vec<Vec<Point>>,
}

impl Polygon {
    pub fn new(rings: Vec<Vec<Point>>) -> Result<Self> {
        let poly = Self { rings };
        poly.validate()?;
        Ok(poly)
    }

    /// Single-ring convenience constructor.
    pub fn simple(ring: Vec<Point>) -> Result<Self> {
        Self::new(vec![ring])
    }

    pub fn rings(&self) -> &[Vec<Point>] {
        &self.rings
    }

    fn validate(&self) -> Result<()> {
        if self.rings.is_empty() {
            return Err(Error::InvalidPolygon("no rings".into()));
        }
        for (k, ring) in self.rings.iter().enumerate() {
            if ring.len() < 3 {
                return Err(Error::InvalidPolygon(format!(
                    "ring {k} has {} vertices, need at least 3",
                    ring.len()
                )));
            }
            for (i, p) in ring.iter().enumerate() {
                if !p.x.is_finite() || !p.y.is_finite() {
                    return Err(Error::InvalidPolygon(format!(
                        "ring {k} vertex {i} is not finite"
                    )));
                }
                let q = ring[(i + 1) % ring.len()];
                if p.x == q.x && p.y == q.y {
                    return Err(Error::InvalidPolygon(format!(
                        "ring {k} has a zero-length edge at vertex {i}"
                    )));
                }
            }
            if !ring_is_simple(ring) {
                return Err(Error::InvalidPolygon(format!("ring {k} self-intersects")));
            }
        }
        if signed_area(&self.rings[0]) <= 0.0 {
            return Err(Error::InvalidPolygon(
                "first ring must be counterclockwise (outer boundary)".into(),
            ));
        }
        let orientations: Vec<f64> = self.rings.iter().map(|r| signed_area(r)).collect();
        for (k, &s) in orientations.iter().enumerate() {
            if s == 0.0 {
                return Err(Error::InvalidPolygon(format!("ring {k} has zero area")));
            }
        }
        // Rings must be pairwise non-crossing and non-touching.
        for i in 0..self.rings.len() {
            for j in (i + 1)..self.rings.len() {
                if rings_intersect(&self.rings[i], &self.rings[j]) {
                    return Err(Error::InvalidPolygon(format!("rings {i} and {j} touch")));
                }
            }
        }
        let outers: Vec<usize> =
            (0..self.rings.len()).filter(|&k| orientations[k] > 0.0).collect();
        let holes: Vec<usize> =
            (0..self.rings.len()).filter(|&k| orientations[k] < 0.0).collect();
        // Outer rings must not be nested in each other.
        for &i in &outers {
            for &j in &outers {
                if i != j && point_in_ring(self.rings[i][0], &self.rings[j]) {
                    return Err(Error::InvalidPolygon(format!(
                        "outer rings {i} and {j} are nested"
                    )));
                }
            }
        }
        // Every hole lies strictly inside exactly one outer ring, and holes
        // must not be nested in one another.
        let mut hole_area_of: Vec<f64> = vec![0.0; self.rings.len()];
        for &h in &holes {
            let mut owner = None;
            for &o in &outers {
                if point_in_ring(self.rings[h][0], &self.rings[o]) {
                    owner = Some(o);
                    break;
                }
            }
            match owner {
                Some(o) => hole_area_of[o] += -orientations[h],
                None => {
                    return Err(Error::InvalidPolygon(format!(
                        "hole ring {h} lies outside every outer ring"
                    )))
                }
            }
            for &h2 in &holes {
                if h != h2 && point_in_ring(self.rings[h][0], &self.rings[h2]) {
                    return Err(Error::InvalidPolygon(format!(
                        "hole rings {h} and {h2} are nested"
                    )));
                }
            }
        }
        for &o in &outers {
            if orientations[o] - hole_area_of[o] <= 0.0 {
                return Err(Error::InvalidPolygon(format!(
                    "component of ring {o} has non-positive area"
                )));
            }
        }
        Ok(())
    }

    /// Shoelace area of the outer rings minus the holes.
    pub fn area(&self) -> f64 {
        self.rings.iter().map(|r| signed_area(r)).sum()
    }

    /// Vertices rotated so that direction `d` becomes horizontal; area is
    /// preserved exactly up to rounding.
    pub fn rotate(&self, d: Direction) -> Polygon {
        let m = d.frame_rotation();
        let (s, c) = m.sin_cos();
        let rings = self
            .rings
            .iter()
            .map(|ring| {
                ring.iter()
                    .map(|p| Point::new(c * p.x - s * p.y, s * p.x + c * p.y))
                    .collect()
            })
            .collect();
        Polygon { rings }
    }

    /// Maximal open intervals `{x : (x, y) ∈ interior}` along the horizontal
    /// line at height `y`, over all rings (even-odd rule).
    pub fn section(&self, y: f64) -> IntervalSet {
        let mut xs: Vec<f64> = Vec::new();
        for ring in &self.rings {
            let n = ring.len();
            for i in 0..n {
                let a = ring[i];
                let b = ring[(i + 1) % n];
                if a.y == b.y {
                    continue;
                }
                let (lo, hi) = if a.y < b.y { (a, b) } else { (b, a) };
                // Half-open rule: count the lower endpoint, not the upper.
                if lo.y <= y && y < hi.y {
                    xs.push(lo.x + (y - lo.y) * (hi.x - lo.x) / (hi.y - lo.y));
                }
            }
        }
        xs.sort_by(f64::total_cmp);
        debug_assert_eq!(xs.len() % 2, 0, "odd crossing count at y = {y}");
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(xs.len() / 2);
        for pair in xs.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if b <= a {
                continue; // degenerate pair from a vertex tangency
            }
            if let Some(last) = out.last_mut() {
                if a <= last.1 {
                    last.1 = last.1.max(b);
                    continue;
                }
            }
            out.push((a, b));
        }
        IntervalSet::from_sorted_unchecked(out)
    }

    /// Total length of the section at height `y`.
    pub fn section_length(&self, y: f64) -> f64 {
        self.section(y).total_length()
    }

    /// Extent of the polygon in the y coordinate.
    pub fn y_extent(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for ring in &self.rings {
            for p in ring {
                lo = lo.min(p.y);
                hi = hi.max(p.y);
            }
        }
        (lo, hi)
    }

    /// Axis-aligned bounding box `((xmin, ymin), (xmax, ymax))`.
    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for ring in &self.rings {
            for p in ring {
                lo.x = lo.x.min(p.x);
                lo.y = lo.y.min(p.y);
                hi.x = hi.x.max(p.x);
                hi.y = hi.y.max(p.y);
            }
        }
        (lo, hi)
    }

    fn has_horizontal_edge_at(&self, y: f64) -> bool {
        self.rings.iter().any(|ring| {
            let n = ring.len();
            (0..n).any(|i| {
                let a = ring[i];
                let b = ring[(i + 1) % n];
                a.y == y && b.y == y
            })
        })
    }
}

/// Signed shoelace area: positive for counterclockwise rings.
pub fn signed_area(ring: &[Point]) -> f64 {
    let n = ring.len();
    let mut acc = 0.0;
    for i in 0..n {
        let p = ring[i];
        let q = ring[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    acc / 2.0
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    orient(a, b, p) == 0.0
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

/// Segment intersection including touching endpoints.
fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    on_segment(c, d, a) || on_segment(c, d, b) || on_segment(a, b, c) || on_segment(a, b, d)
}

fn ring_is_simple(ring: &[Point]) -> bool {
    let n = ring.len();
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        for j in (i + 1)..n {
            // Skip the pair itself and edges adjacent to edge i.
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let c = ring[j];
            let d = ring[(j + 1) % n];
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

fn rings_intersect(r1: &[Point], r2: &[Point]) -> bool {
    let n1 = r1.len();
    let n2 = r2.len();
    for i in 0..n1 {
        for j in 0..n2 {
            if segments_intersect(r1[i], r1[(i + 1) % n1], r2[j], r2[(j + 1) % n2]) {
                return true;
            }
        }
    }
    false
}

/// Even-odd point-in-ring test with the half-open edge rule.
fn point_in_ring(p: Point, ring: &[Point]) -> bool {
    let n = ring.len();
    let mut inside = false;
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        if a.y == b.y {
            continue;
        }
        let (lo, hi) = if a.y < b.y { (a, b) } else { (b, a) };
        if lo.y <= p.y && p.y < hi.y {
            let x = lo.x + (p.y - lo.y) * (hi.x - lo.x) / (hi.y - lo.y);
            if x > p.x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Slices the polygon into `n_strips` uniform horizontal strips in the frame
/// where direction `d` is horizontal. Each strip carries the exact section at
/// its midline. When a horizontal edge lies exactly on a sample line, the
/// sample height is nudged by `dy * 1e-9` as a deterministic tiebreak.
pub fn strip_slice(p: &Polygon, d: Direction, n_strips: usize) -> Result<StripDomain> {
    if n_strips < 8 {
        return Err(Error::InvalidArgument(format!(
            "n_strips = {n_strips}, need at least 8"
        )));
    }
    let q = p.rotate(d);
    let (ymin, ymax) = q.y_extent();
    let dy = (ymax - ymin) / n_strips as f64;
    if !(dy > 0.0) {
        return Err(Error::InvalidPolygon("degenerate y extent".into()));
    }
    let mut strips = Vec::with_capacity(n_strips);
    for i in 0..n_strips {
        let mut y = ymin + (i as f64 + 0.5) * dy;
        if q.has_horizontal_edge_at(y) {
            y += dy * 1e-9;
        }
        strips.push(q.section(y));
    }
    Ok(StripDomain::new(ymin, dy, strips, d.frame_rotation()))
}

/// The Steiner symmetral of `p` with respect to `d`, as a strip domain whose
/// strip at height y holds the single centered interval of the same length
/// as the section there. Per-strip length is preserved exactly.
pub fn steiner_symmetrize(p: &Polygon, d: Direction, n_strips: usize) -> Result<StripDomain> {
    let dom = strip_slice(p, d, n_strips)?;
    Ok(dom.symmetrized())
}
