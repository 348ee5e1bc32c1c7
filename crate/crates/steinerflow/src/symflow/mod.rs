//! The continuous symmetrization engine.
//!
//! Each horizontal strip carries a finite union of open intervals that
//! evolves exactly: every interval keeps its length while its barycenter
//! decays as `e^{-t}`. When two intervals touch they are replaced by the
//! interior of the closure (a single spanning interval) and the flow
//! restarts from the merged state. Merge times have the closed form
//! `t* = ln((m2 - m1) / (r1 + r2))` per consecutive pair, so the per-strip
//! dynamics is event-driven and exact; discretization error enters only
//! through the strip width.
//!
//! Simultaneous merges across a run of strips create a "wall": a slit that
//! would vanish instantly and make eigenvalue and torsion jump. Walls are
//! detected from merge-event batches and removed gradually by a shrink
//! phase (see [`schedule`]), which restores continuity.

mod schedule;

pub use schedule::{run_schedule, FlowRun, FlowSchedule, JumpCheck, Segment, SegmentKind};

use crate::error::{Error, Result};
use crate::geometry::IntervalSet;

/// Minimum number of consecutive strips forming a wall.
pub const WALL_MIN_STRIPS: usize = 3;
/// Merge times within a wall must agree to this tolerance.
pub const WALL_TIME_TOL: f64 = 1e-6;
/// Touch abscissae within a wall must agree to this tolerance
/// (rotated-frame units).
pub const WALL_X_TOL: f64 = 1e-6;

/// A vertical slit left behind by a simultaneous merge across a strip run.
///
/// While `eta < 1` the wall acts as a Dirichlet constraint over the central
/// `(1 - eta)` fraction of its original strip span; the interval geometry
/// itself is unchanged.
#[derive(Clone, Debug, PartialEq)]
pub struct WallSegment {
    /// Abscissa of the slit in the rotated frame.
    pub x: f64,
    pub strip_lo: usize,
    pub strip_hi: usize,
    /// Shrink progress: 0 = full wall, 1 = gone.
    pub eta: f64,
}

impl WallSegment {
    /// Strip range still constrained at the current shrink progress, reduced
    /// symmetrically from both ends to the central `(1 - eta)` fraction of
    /// the original span (count rounded down). `None` once nothing is left.
    pub fn active_range(&self) -> Option<(usize, usize)> {
        if self.eta >= 1.0 {
            return None;
        }
        let span = self.strip_hi - self.strip_lo + 1;
        let keep = ((1.0 - self.eta) * span as f64).floor() as usize;
        if keep == 0 {
            return None;
        }
        let removed = span - keep;
        let rm_lo = removed / 2;
        let rm_hi = removed - rm_lo;
        Some((self.strip_lo + rm_lo, self.strip_hi - rm_hi))
    }
}

/// One merge event: the strip it happened in, the flow time, and the
/// abscissa where the two intervals touched.
#[derive(Clone, Copy, Debug)]
pub struct MergeEvent {
    pub strip: usize,
    pub time: f64,
    pub x: f64,
}

/// Kind of a logged flow event.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EventKind {
    MergeCluster,
    WallStart,
    WallEnd,
}

/// A logged event of a schedule run, with both phase-local flow time and the
/// global reparametrized time in `[0, 1]`.
#[derive(Clone, Debug)]
pub struct FlowEvent {
    pub kind: EventKind,
    pub strip_lo: usize,
    pub strip_hi: usize,
    pub x: f64,
    pub phase: usize,
    pub t_phase: f64,
    pub t_global: f64,
}

/// The flow's two-dimensional state: a uniform strip decomposition in a
/// rotated frame, one interval set per strip, plus any active walls.
#[derive(Clone, Debug)]
pub struct StripDomain {
    y0: f64,
    dy: f64,
    strips: Vec<IntervalSet>,
    walls: Vec<WallSegment>,
    frame_angle: f64,
    time: f64,
}

impl StripDomain {
    pub fn new(y0: f64, dy: f64, strips: Vec<IntervalSet>, frame_angle: f64) -> Self {
        Self { y0, dy, strips, walls: Vec::new(), frame_angle, time: 0.0 }
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn strips(&self) -> &[IntervalSet] {
        &self.strips
    }

    pub fn n_strips(&self) -> usize {
        self.strips.len()
    }

    pub fn walls(&self) -> &[WallSegment] {
        &self.walls
    }

    /// Rotation that was applied to reach this frame.
    pub fn frame_angle(&self) -> f64 {
        self.frame_angle
    }

    /// Current flow time of the state (phase-local).
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn area(&self) -> f64 {
        self.strips.iter().map(|s| s.total_length()).sum::<f64>() * self.dy
    }

    pub fn strip_mid_y(&self, i: usize) -> f64 {
        self.y0 + (i as f64 + 0.5) * self.dy
    }

    /// Index of the strip containing height `y`; the vertical extent is
    /// treated as open, and interior strip boundaries go to the upper strip.
    pub fn strip_of_y(&self, y: f64) -> Option<usize> {
        let top = self.y0 + self.dy * self.strips.len() as f64;
        if y <= self.y0 || y >= top {
            return None;
        }
        let i = ((y - self.y0) / self.dy).floor() as usize;
        Some(i.min(self.strips.len() - 1))
    }

    /// Extent in x over all intervals, `None` for an empty domain.
    pub fn x_extent(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in &self.strips {
            if let Some(&(a, _)) = s.intervals().first() {
                lo = lo.min(a);
            }
            if let Some(&(_, b)) = s.intervals().last() {
                hi = hi.max(b);
            }
        }
        (lo < hi).then_some((lo, hi))
    }

    /// Replaces every strip by the single centered interval of the same
    /// length: the symmetral limit of the flow.
    pub fn symmetrized(&self) -> StripDomain {
        StripDomain {
            y0: self.y0,
            dy: self.dy,
            strips: self.strips.iter().map(IntervalSet::symmetrized).collect(),
            walls: Vec::new(),
            frame_angle: self.frame_angle,
            time: 0.0,
        }
    }

    /// A copy with the wall list replaced.
    pub fn with_walls(&self, walls: Vec<WallSegment>) -> StripDomain {
        let mut d = self.clone();
        d.walls = walls;
        d
    }

    pub(crate) fn set_wall_etas(&mut self, eta: f64) {
        for w in &mut self.walls {
            w.eta = eta.clamp(0.0, 1.0);
        }
    }
}

fn params((a, b): (f64, f64)) -> (f64, f64) {
    ((a + b) / 2.0, (b - a) / 2.0)
}

fn evolve_raw(iv: &[(f64, f64)], dt: f64) -> Vec<(f64, f64)> {
    let decay = (-dt).exp();
    iv.iter()
        .map(|&p| {
            let (m, r) = params(p);
            let m2 = m * decay;
            (m2 - r, m2 + r)
        })
        .collect()
}

fn touch_tol(iv: &[(f64, f64)]) -> f64 {
    let mut s: f64 = 1.0;
    for &(a, b) in iv {
        s = s.max(a.abs()).max(b.abs());
    }
    1e-9 * s
}

/// Merges every touching chain into its single spanning interval, keeping
/// the total length bit-for-bit. Returns the merged list and the abscissae
/// where pairs touched.
fn interiorize(iv: &[(f64, f64)], tol: f64) -> (Vec<(f64, f64)>, Vec<f64>) {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    let mut touches = Vec::new();
    for &(a, b) in iv {
        if let Some(last) = out.last_mut() {
            if a - last.1 <= tol {
                touches.push((last.1 + a) / 2.0);
                let merged = (last.1 - last.0) + (b - a);
                last.1 = last.0 + merged;
                continue;
            }
        }
        out.push((a, b));
    }
    (out, touches)
}

fn merge_time_raw(iv: &[(f64, f64)]) -> f64 {
    let mut t = f64::INFINITY;
    for w in iv.windows(2) {
        let (m1, r1) = params(w[0]);
        let (m2, r2) = params(w[1]);
        let dm = m2 - m1;
        let rs = r1 + r2;
        if dm > 0.0 {
            let tm = (dm / rs).ln();
            if tm > 0.0 {
                t = t.min(tm);
            }
        }
    }
    t
}

/// Evolves each interval for time `t`: lengths are preserved and barycenters
/// decay as `e^{-t}`. Valid only strictly before the next merge.
pub fn evolve_intervals(s: &IntervalSet, t: f64) -> Result<IntervalSet> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative flow time {t}")));
    }
    let tm = next_merge_time(s);
    if t >= tm {
        return Err(Error::EvolvePastMerge { t, t_merge: tm });
    }
    Ok(IntervalSet::from_sorted_unchecked(evolve_raw(s.intervals(), t)))
}

/// The least `t > 0` at which two consecutive intervals meet, from the
/// closed form `t* = ln((m2 - m1) / (r1 + r2))`; `+∞` when there is at most
/// one interval.
pub fn next_merge_time(s: &IntervalSet) -> f64 {
    merge_time_raw(s.intervals())
}

/// Evolves to the merge instant `t_star` (which must match
/// [`next_merge_time`] to 1e-12) and replaces each touching chain by its
/// spanning interval, i.e. the interior of the closure.
pub fn merge_at(s: &IntervalSet, t_star: f64) -> Result<IntervalSet> {
    let tm = next_merge_time(s);
    if !tm.is_finite() || (t_star - tm).abs() > 1e-12 * (1.0 + tm.abs()) {
        return Err(Error::MergeTimeMismatch { requested: t_star, actual: tm });
    }
    let evolved = evolve_raw(s.intervals(), tm);
    let tol = touch_tol(&evolved);
    let (merged, _) = interiorize(&evolved, tol);
    Ok(IntervalSet::from_sorted_unchecked(merged))
}

fn advance_strip(
    iv: &mut Vec<(f64, f64)>,
    t0: f64,
    t1: f64,
    strip: usize,
    events: &mut Vec<MergeEvent>,
) {
    let mut now = t0;
    loop {
        let tm = merge_time_raw(iv);
        if now + tm >= t1 {
            *iv = evolve_raw(iv, t1 - now);
            return;
        }
        now += tm;
        *iv = evolve_raw(iv, tm);
        let tol = touch_tol(iv);
        let (merged, touches) = interiorize(iv, tol);
        for x in touches {
            events.push(MergeEvent { strip, time: now, x });
        }
        *iv = merged;
    }
}

/// Flows every strip independently, event by event, from the domain's
/// current time to `t`. Merge events are reported with strip index, exact
/// flow time, and touch abscissa.
pub fn strip_flow_to(dom: &StripDomain, t: f64) -> Result<(StripDomain, Vec<MergeEvent>)> {
    if t < dom.time {
        return Err(Error::TimeDecrease { current: dom.time, requested: t });
    }
    let mut out = dom.clone();
    let mut events = Vec::new();
    for (i, s) in out.strips.iter_mut().enumerate() {
        let mut iv = s.intervals().to_vec();
        advance_strip(&mut iv, dom.time, t, i, &mut events);
        *s = IntervalSet::from_sorted_unchecked(iv);
    }
    out.time = t;
    Ok((out, events))
}

/// Groups a batch of merge events into walls: maximal runs of at least
/// [`WALL_MIN_STRIPS`] consecutive strips whose merge times agree within
/// [`WALL_TIME_TOL`] and abscissae within [`WALL_X_TOL`]. Isolated merges
/// produce no wall.
pub fn detect_walls(dom: &StripDomain, events: &[MergeEvent]) -> Vec<WallSegment> {
    debug_assert!(events.iter().all(|e| e.strip < dom.n_strips()));
    // Cluster events by (time, abscissa) against each cluster's first event.
    let mut clusters: Vec<Vec<&MergeEvent>> = Vec::new();
    for e in events {
        match clusters.iter_mut().find(|c| {
            (e.time - c[0].time).abs() <= WALL_TIME_TOL && (e.x - c[0].x).abs() <= WALL_X_TOL
        }) {
            Some(c) => c.push(e),
            None => clusters.push(vec![e]),
        }
    }
    let mut walls = Vec::new();
    for cluster in &clusters {
        let mut strips: Vec<usize> = cluster.iter().map(|e| e.strip).collect();
        strips.sort_unstable();
        strips.dedup();
        let mut run_start = 0;
        for i in 0..=strips.len() {
            let run_ends = i == strips.len() || (i > 0 && strips[i] != strips[i - 1] + 1);
            if run_ends {
                let len = i - run_start;
                if len >= WALL_MIN_STRIPS {
                    let (lo, hi) = (strips[run_start], strips[i - 1]);
                    let xs: Vec<f64> = cluster
                        .iter()
                        .filter(|e| lo <= e.strip && e.strip <= hi)
                        .map(|e| e.x)
                        .collect();
                    let x = xs.iter().sum::<f64>() / xs.len() as f64;
                    walls.push(WallSegment { x, strip_lo: lo, strip_hi: hi, eta: 0.0 });
                }
                run_start = i;
            }
        }
    }
    walls
}

/// Advances the shrink progress of the wall at `wall_index` to `eta`.
/// Progress must not decrease; at `eta = 1` the wall is dropped. The
/// interval geometry is untouched: walls live only as PDE constraints.
pub fn shrink_wall(dom: &StripDomain, wall_index: usize, eta: f64) -> Result<StripDomain> {
    let w = dom.walls.get(wall_index).ok_or_else(|| {
        Error::InvalidArgument(format!("wall index {wall_index} out of range"))
    })?;
    if eta < w.eta {
        return Err(Error::EtaDecrease { current: w.eta, requested: eta });
    }
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidArgument(format!("eta = {eta} outside [0, 1]")));
    }
    let mut out = dom.clone();
    if eta >= 1.0 {
        out.walls.remove(wall_index);
    } else {
        out.walls[wall_index].eta = eta;
    }
    Ok(out)
}

/// Snapshot of a schedule run at one global time.
#[derive(Clone, Debug)]
pub struct FlowSnapshot {
    /// Global reparametrized time in `[0, 1]`.
    pub t_global: f64,
    /// Index of the direction phase the snapshot falls in.
    pub phase: usize,
    pub domain: StripDomain,
    /// Events that occurred since the previous snapshot.
    pub events: Vec<FlowEvent>,
}
