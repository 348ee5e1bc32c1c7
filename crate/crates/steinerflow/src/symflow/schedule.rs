//! Multi-direction flow schedules reparametrized to `[0, 1]`.
//!
//! A run alternates flow segments (event-driven strip dynamics) with unit
//! wall-shrink segments inserted at every confirmed wall, then maps the
//! whole timeline affinely onto `[0, 1]` proportionally to segment
//! durations. Between direction phases the strip state is re-sliced in the
//! new frame with exact per-band areas, so the total area is conserved
//! across the entire run.

use crate::error::{Error, Result};
use crate::geometry::{strip_slice, Direction, IntervalSet, Polygon};
use crate::pde;

use super::{
    detect_walls, strip_flow_to, EventKind, FlowEvent, FlowSnapshot, StripDomain, WallSegment,
    WALL_TIME_TOL,
};

/// Confirmation that a detected wall actually carries a torsion jump:
/// the wall is kept only when `T(no wall) - T(wall) > min_rel_gap * T`.
#[derive(Clone, Debug)]
pub struct JumpCheck {
    /// Grid nodes across the domain extent for the confirmation solves.
    pub resolution: usize,
    /// Minimum relative torsion gap for a wall to count as a jump.
    pub min_rel_gap: f64,
    pub cg_tol: f64,
}

impl Default for JumpCheck {
    fn default() -> Self {
        Self { resolution: 64, min_rel_gap: 1e-4, cg_tol: 1e-10 }
    }
}

/// A symmetrization schedule: finitely many directions, each flowed for
/// `horizon` time units, with unit-width shrink intervals spliced in at
/// detected walls.
#[derive(Clone, Debug)]
pub struct FlowSchedule {
    pub directions: Vec<Direction>,
    /// Flow time spent per direction before switching.
    pub horizon: f64,
    /// Duration of one wall-shrink interval, in flow-time units.
    pub shrink_duration: f64,
    pub n_strips: usize,
    /// When false, walls vanish instantly (the unmodified flow).
    pub wall_shrink: bool,
    pub jump_check: Option<JumpCheck>,
}

impl FlowSchedule {
    /// `k` directions at angles `j π / k`, with default horizon 6
    /// (`e^{-6} < 0.25%` residual asymmetry) and unit shrink intervals.
    pub fn uniform(k: usize, n_strips: usize) -> Self {
        let directions = (0..k)
            .map(|j| Direction::new(j as f64 * std::f64::consts::PI / k as f64))
            .collect();
        Self {
            directions,
            horizon: 6.0,
            shrink_duration: 1.0,
            n_strips,
            wall_shrink: true,
            jump_check: Some(JumpCheck::default()),
        }
    }

    pub fn single(d: Direction, n_strips: usize) -> Self {
        Self { directions: vec![d], ..Self::uniform(1, n_strips) }
    }

    fn validate(&self) -> Result<()> {
        if self.directions.is_empty() {
            return Err(Error::InvalidArgument("schedule has no directions".into()));
        }
        if !(self.horizon > 0.0) {
            return Err(Error::InvalidArgument(format!("horizon = {}", self.horizon)));
        }
        if !(self.shrink_duration > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "shrink_duration = {}",
                self.shrink_duration
            )));
        }
        if self.n_strips < 8 {
            return Err(Error::InvalidArgument(format!(
                "n_strips = {}, need at least 8",
                self.n_strips
            )));
        }
        Ok(())
    }
}

/// What happens during one stretch of the timeline.
#[derive(Clone, Debug)]
pub enum SegmentKind {
    /// Event-driven flow starting from the stored state.
    Flow(StripDomain),
    /// Frozen geometry; the stored walls shrink from eta 0 to 1 following
    /// the profile (piecewise-linear knots over local time).
    Shrink { state: StripDomain, profile: ShrinkProfile },
}

/// Monotone map from local shrink time `s ∈ [0,1]` to wall progress
/// `eta ∈ [0,1]`.
///
/// A slit in the plane keeps a logarithmic capacity in its remaining
/// length, so torsion released by a linearly shrinking wall concentrates
/// near the end of the interval. The profile instead spreads the wall's
/// γ-distance evenly over the interval: knots are placed at the normalized
/// cumulative torsion change measured at a few shrink stages (the same
/// reparametrization freedom that maps the whole flow onto `[0, 1]`).
/// Without a PDE confirmation configured, the profile is linear.
#[derive(Clone, Debug)]
pub struct ShrinkProfile {
    /// `(s, eta)` knots, increasing in both coordinates, from (0,0) to (1,1).
    knots: Vec<(f64, f64)>,
}

impl ShrinkProfile {
    pub fn linear() -> Self {
        Self { knots: vec![(0.0, 0.0), (1.0, 1.0)] }
    }

    /// Builds the arc-length profile from torsion samples at equally spaced
    /// eta stages; falls back to linear when the samples are degenerate.
    fn from_torsion_samples(torsions: &[f64]) -> Self {
        let m = torsions.len();
        if m < 2 {
            return Self::linear();
        }
        let t0 = torsions[0];
        let range = torsions[m - 1] - t0;
        if !(range > 0.0) {
            return Self::linear();
        }
        let mut knots = Vec::with_capacity(m);
        let mut prev_s = 0.0;
        for (i, &t) in torsions.iter().enumerate() {
            let eta = i as f64 / (m - 1) as f64;
            let s = (((t - t0) / range).clamp(0.0, 1.0)).max(prev_s);
            knots.push((s, eta));
            prev_s = s;
        }
        knots[m - 1] = (1.0, 1.0);
        Self { knots }
    }

    /// Wall progress at local time `s`.
    pub fn eta_at(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, 1.0);
        for w in self.knots.windows(2) {
            let ((s0, e0), (s1, e1)) = (w[0], w[1]);
            if s <= s1 {
                if s1 <= s0 {
                    return e1;
                }
                return e0 + (e1 - e0) * (s - s0) / (s1 - s0);
            }
        }
        1.0
    }
}

/// One stretch of the reparametrized timeline.
#[derive(Clone, Debug)]
pub struct Segment {
    pub phase: usize,
    pub duration: f64,
    pub kind: SegmentKind,
}

/// A completed schedule run: the segment timeline, the event log, and the
/// terminal state. Snapshots at arbitrary global times are reconstructed
/// exactly from segment checkpoints.
pub struct FlowRun {
    segments: Vec<Segment>,
    cumulative: Vec<f64>,
    total: f64,
    events: Vec<FlowEvent>,
    initial_area: f64,
    terminal: StripDomain,
}

impl FlowRun {
    pub fn new(p: &Polygon, sched: &FlowSchedule) -> Result<FlowRun> {
        sched.validate()?;
        let mut segments: Vec<Segment> = Vec::new();
        let mut events: Vec<RawEvent> = Vec::new();
        let mut cum_closed = 0.0_f64;
        let mut prev_end: Option<StripDomain> = None;
        let mut initial_area = 0.0;

        for (phase, &dir) in sched.directions.iter().enumerate() {
            let start = match &prev_end {
                None => strip_slice(p, dir, sched.n_strips)?,
                Some(d) => reslice(d, dir.frame_rotation(), sched.n_strips)?,
            };
            if phase == 0 {
                initial_area = start.area();
            }
            let mut dom = start.clone();
            let mut seg_start = start;
            let mut t_open = 0.0_f64;

            loop {
                let rel = dom
                    .strips()
                    .iter()
                    .map(super::next_merge_time)
                    .fold(f64::INFINITY, f64::min);
                let t_next = dom.time() + rel;
                if !(t_next < sched.horizon) {
                    break;
                }
                let batch_end = (t_next + WALL_TIME_TOL).min(sched.horizon);
                let (dom2, merge_events) = strip_flow_to(&dom, batch_end)?;
                for c in cluster_merges(&merge_events) {
                    events.push(RawEvent {
                        kind: EventKind::MergeCluster,
                        strip_lo: c.lo,
                        strip_hi: c.hi,
                        x: c.x,
                        phase,
                        t_phase: c.time,
                        pos: cum_closed + (c.time - t_open),
                    });
                }
                if sched.wall_shrink {
                    let mut walls = detect_walls(&dom2, &merge_events);
                    if let Some(jc) = &sched.jump_check {
                        walls.retain(|w| confirm_wall(&dom2, w, jc));
                    }
                    if !walls.is_empty() {
                        let profile = match &sched.jump_check {
                            Some(jc) => shrink_profile(&dom2, &walls, jc),
                            None => ShrinkProfile::linear(),
                        };
                        let dur = batch_end - t_open;
                        if dur > 0.0 {
                            segments.push(Segment {
                                phase,
                                duration: dur,
                                kind: SegmentKind::Flow(seg_start.clone()),
                            });
                            cum_closed += dur;
                        }
                        for w in &walls {
                            events.push(RawEvent {
                                kind: EventKind::WallStart,
                                strip_lo: w.strip_lo,
                                strip_hi: w.strip_hi,
                                x: w.x,
                                phase,
                                t_phase: batch_end,
                                pos: cum_closed,
                            });
                            events.push(RawEvent {
                                kind: EventKind::WallEnd,
                                strip_lo: w.strip_lo,
                                strip_hi: w.strip_hi,
                                x: w.x,
                                phase,
                                t_phase: batch_end,
                                pos: cum_closed + sched.shrink_duration,
                            });
                        }
                        segments.push(Segment {
                            phase,
                            duration: sched.shrink_duration,
                            kind: SegmentKind::Shrink { state: dom2.with_walls(walls), profile },
                        });
                        cum_closed += sched.shrink_duration;
                        seg_start = dom2.clone();
                        t_open = batch_end;
                    }
                }
                dom = dom2;
            }

            let (end, tail) = strip_flow_to(&dom, sched.horizon)?;
            debug_assert!(tail.is_empty());
            let dur = sched.horizon - t_open;
            if dur > 0.0 {
                segments.push(Segment { phase, duration: dur, kind: SegmentKind::Flow(seg_start) });
                cum_closed += dur;
            }
            prev_end = Some(end);
        }

        let total = cum_closed;
        let mut cumulative = Vec::with_capacity(segments.len());
        let mut acc = 0.0;
        for s in &segments {
            acc += s.duration;
            cumulative.push(acc);
        }
        let events = events
            .into_iter()
            .map(|e| FlowEvent {
                kind: e.kind,
                strip_lo: e.strip_lo,
                strip_hi: e.strip_hi,
                x: e.x,
                phase: e.phase,
                t_phase: e.t_phase,
                t_global: e.pos / total,
            })
            .collect();
        Ok(FlowRun {
            segments,
            cumulative,
            total,
            events,
            initial_area,
            terminal: prev_end.expect("at least one phase"),
        })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Total timeline duration (flow time plus inserted shrink intervals).
    pub fn total_duration(&self) -> f64 {
        self.total
    }

    pub fn events(&self) -> &[FlowEvent] {
        &self.events
    }

    pub fn initial_area(&self) -> f64 {
        self.initial_area
    }

    pub fn terminal_state(&self) -> &StripDomain {
        &self.terminal
    }

    /// Maps a global time in `[0, 1]` to `(phase index, phase-local time)`.
    pub fn reparam(&self, t_global: f64) -> (usize, f64) {
        let (idx, local) = self.locate(t_global);
        let seg = &self.segments[idx];
        match &seg.kind {
            SegmentKind::Flow(state) => (seg.phase, state.time() + local),
            SegmentKind::Shrink { state, .. } => (seg.phase, state.time()),
        }
    }

    fn locate(&self, t_global: f64) -> (usize, f64) {
        let x = t_global.clamp(0.0, 1.0) * self.total;
        let mut idx = self.segments.len() - 1;
        for (i, &c) in self.cumulative.iter().enumerate() {
            if x <= c {
                idx = i;
                break;
            }
        }
        let start = self.cumulative[idx] - self.segments[idx].duration;
        (idx, x - start)
    }

    /// Reconstructs the domain state at one global time.
    pub fn state_at(&self, t_global: f64) -> Result<(usize, StripDomain)> {
        let (idx, local) = self.locate(t_global);
        let seg = &self.segments[idx];
        let dom = match &seg.kind {
            SegmentKind::Flow(state) => strip_flow_to(state, state.time() + local)?.0,
            SegmentKind::Shrink { state, profile } => {
                let mut d = state.clone();
                d.set_wall_etas(profile.eta_at(local / seg.duration));
                d
            }
        };
        Ok((seg.phase, dom))
    }

    /// Snapshots at `samples` equally spaced global times in `[0, 1]`,
    /// each carrying the events since the previous snapshot.
    pub fn snapshots(&self, samples: usize) -> Result<Vec<FlowSnapshot>> {
        if samples < 2 {
            return Err(Error::InvalidArgument("need at least 2 samples".into()));
        }
        let mut out = Vec::with_capacity(samples);
        let mut prev_t = f64::NEG_INFINITY;
        for k in 0..samples {
            let t = k as f64 / (samples - 1) as f64;
            let (phase, domain) = self.state_at(t)?;
            let events = self
                .events
                .iter()
                .filter(|e| prev_t < e.t_global && e.t_global <= t)
                .cloned()
                .collect();
            out.push(FlowSnapshot { t_global: t, phase, domain, events });
            prev_t = t;
        }
        Ok(out)
    }
}

/// Runs the schedule and samples it at `samples` equally spaced global
/// times. The flow starts at the polygon, ends near its iterated symmetral,
/// and inserts a wall-shrink interval at every confirmed wall.
pub fn run_schedule(
    p: &Polygon,
    sched: &FlowSchedule,
    samples: usize,
) -> Result<Vec<FlowSnapshot>> {
    FlowRun::new(p, sched)?.snapshots(samples)
}

struct RawEvent {
    kind: EventKind,
    strip_lo: usize,
    strip_hi: usize,
    x: f64,
    phase: usize,
    t_phase: f64,
    pos: f64,
}

struct MergeCluster {
    lo: usize,
    hi: usize,
    x: f64,
    time: f64,
}

fn cluster_merges(events: &[super::MergeEvent]) -> Vec<MergeCluster> {
    let mut clusters: Vec<Vec<&super::MergeEvent>> = Vec::new();
    for e in events {
        match clusters.iter_mut().find(|c| {
            (e.time - c[0].time).abs() <= WALL_TIME_TOL && (e.x - c[0].x).abs() <= super::WALL_X_TOL
        }) {
            Some(c) => c.push(e),
            None => clusters.push(vec![e]),
        }
    }
    clusters
        .into_iter()
        .map(|c| {
            let lo = c.iter().map(|e| e.strip).min().unwrap();
            let hi = c.iter().map(|e| e.strip).max().unwrap();
            let x = c.iter().map(|e| e.x).sum::<f64>() / c.len() as f64;
            MergeCluster { lo, hi, x, time: c[0].time }
        })
        .collect()
}

/// How many shrink stages are probed when building the arc-length profile.
const PROFILE_STAGES: usize = 9;

/// Probes the torsion at equally spaced shrink stages of the detected walls
/// and turns the cumulative change into the segment's time profile.
fn shrink_profile(dom: &StripDomain, walls: &[WallSegment], jc: &JumpCheck) -> ShrinkProfile {
    let base = dom.with_walls(walls.to_vec());
    let Some((xlo, xhi)) = dom.x_extent() else {
        return ShrinkProfile::linear();
    };
    let height = dom.dy() * dom.n_strips() as f64;
    let h = (xhi - xlo).max(height) / jc.resolution as f64;
    let mut torsions = Vec::with_capacity(PROFILE_STAGES);
    for i in 0..PROFILE_STAGES {
        let mut staged = base.clone();
        staged.set_wall_etas(i as f64 / (PROFILE_STAGES - 1) as f64);
        let t = pde::rasterize(&staged, h)
            .and_then(|g| pde::torsion_solve(&g, jc.cg_tol))
            .map(|(t, _)| t);
        match t {
            Ok(t) => torsions.push(t),
            Err(_) => return ShrinkProfile::linear(),
        }
    }
    ShrinkProfile::from_torsion_samples(&torsions)
}

/// PDE confirmation of a wall: solve the torsion problem with and without
/// the wall column and require a relative gap above the threshold. Solver
/// failures keep the wall (shrinking is always admissible).
fn confirm_wall(dom: &StripDomain, wall: &WallSegment, jc: &JumpCheck) -> bool {
    let with_wall = dom.with_walls(vec![wall.clone()]);
    let without = dom.with_walls(Vec::new());
    let Some((xlo, xhi)) = without.x_extent() else {
        return false;
    };
    let height = without.dy() * without.n_strips() as f64;
    let extent = (xhi - xlo).max(height);
    let h = extent / jc.resolution as f64;
    let masks = (pde::rasterize(&with_wall, h), pde::rasterize(&without, h));
    let (Ok(gw), Ok(go)) = masks else {
        return true;
    };
    match (pde::torsion_solve(&gw, jc.cg_tol), pde::torsion_solve(&go, jc.cg_tol)) {
        (Ok((t_wall, _)), Ok((t_open, _))) => t_open - t_wall > jc.min_rel_gap * t_open,
        _ => true,
    }
}

/// Re-slices a strip state into `n_strips` horizontal strips of a new frame.
///
/// The state is treated as a union of axis-aligned rectangles, rotated by
/// the frame difference. Each new strip takes the section at its midline,
/// then interval lengths are calibrated proportionally so the strip area
/// equals the exact clipped area of the rotated rectangles in that band;
/// the total area is therefore conserved to rounding.
pub(crate) fn reslice(
    dom: &StripDomain,
    new_frame: f64,
    n_strips: usize,
) -> Result<StripDomain> {
    debug_assert!(dom.walls().is_empty(), "reslice with active walls");
    let delta = new_frame - dom.frame_angle();
    let (s, c) = delta.sin_cos();
    let rot = |x: f64, y: f64| (c * x - s * y, s * x + c * y);

    // One convex quad per interval per strip.
    let mut quads: Vec<[(f64, f64); 4]> = Vec::new();
    for (i, strip) in dom.strips().iter().enumerate() {
        let ylo = dom.y0() + i as f64 * dom.dy();
        let yhi = dom.y0() + (i + 1) as f64 * dom.dy();
        for &(a, b) in strip.intervals() {
            quads.push([rot(a, ylo), rot(b, ylo), rot(b, yhi), rot(a, yhi)]);
        }
    }
    if quads.is_empty() {
        return Err(Error::InvalidArgument("cannot re-slice an empty domain".into()));
    }
    let mut ymin = f64::INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    let mut scale = 1.0_f64;
    for q in &quads {
        for &(x, y) in q {
            ymin = ymin.min(y);
            ymax = ymax.max(y);
            scale = scale.max(x.abs()).max(y.abs());
        }
    }
    let dy = (ymax - ymin) / n_strips as f64;
    let touch = 1e-9 * scale;
    let quad_spans: Vec<(f64, f64)> = quads
        .iter()
        .map(|q| {
            let lo = q.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            let hi = q.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
        .collect();

    let mut strips = Vec::with_capacity(n_strips);
    for j in 0..n_strips {
        let band_lo = ymin + j as f64 * dy;
        let band_hi = ymin + (j + 1) as f64 * dy;
        let band_mid = ymin + (j as f64 + 0.5) * dy;
        let mut segs: Vec<(f64, f64)> = Vec::new();
        let mut area = 0.0_f64;
        let mut xmom = 0.0_f64;
        for (q, &(qlo, qhi)) in quads.iter().zip(&quad_spans) {
            if qlo >= band_hi || qhi <= band_lo {
                continue;
            }
            if let Some(seg) = midline_crossing(q, band_mid) {
                segs.push(seg);
            }
            let clipped = clip_band(q, band_lo, band_hi);
            if clipped.len() >= 3 {
                let (a, mx) = area_and_xmoment(&clipped);
                area += a;
                xmom += mx;
            }
        }
        strips.push(calibrated_strip(segs, area, xmom, dy, touch));
    }
    Ok(StripDomain::new(ymin, dy, strips, new_frame))
}

/// Crossing of a horizontal line with a convex quad, using the same
/// half-open edge rule as polygon sections.
fn midline_crossing(q: &[(f64, f64); 4], y: f64) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut count = 0;
    for e in 0..4 {
        let a = q[e];
        let b = q[(e + 1) % 4];
        if a.1 == b.1 {
            continue;
        }
        let (p, r) = if a.1 < b.1 { (a, b) } else { (b, a) };
        if p.1 <= y && y < r.1 {
            let x = p.0 + (y - p.1) * (r.0 - p.0) / (r.1 - p.1);
            lo = lo.min(x);
            hi = hi.max(x);
            count += 1;
        }
    }
    (count >= 2 && hi > lo).then_some((lo, hi))
}

/// Clips a convex polygon to the horizontal band `[ylo, yhi]`.
fn clip_band(q: &[(f64, f64); 4], ylo: f64, yhi: f64) -> Vec<(f64, f64)> {
    let keep_above = clip_halfplane(&q[..], ylo, true);
    clip_halfplane(&keep_above, yhi, false)
}

fn clip_halfplane(poly: &[(f64, f64)], ycut: f64, keep_above: bool) -> Vec<(f64, f64)> {
    let inside = |p: (f64, f64)| if keep_above { p.1 >= ycut } else { p.1 <= ycut };
    let mut out = Vec::with_capacity(poly.len() + 2);
    let n = poly.len();
    for i in 0..n {
        let cur = poly[i];
        let nxt = poly[(i + 1) % n];
        let (ci, ni) = (inside(cur), inside(nxt));
        if ci {
            out.push(cur);
        }
        if ci != ni {
            let t = (ycut - cur.1) / (nxt.1 - cur.1);
            out.push((cur.0 + t * (nxt.0 - cur.0), ycut));
        }
    }
    out
}

/// Shoelace area and x-moment (area times centroid x) of a polygon.
fn area_and_xmoment(poly: &[(f64, f64)]) -> (f64, f64) {
    let n = poly.len();
    let mut a = 0.0;
    let mut mx = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        let cross = p.0 * q.1 - q.0 * p.1;
        a += cross;
        mx += (p.0 + q.0) * cross;
    }
    (a / 2.0, mx / 6.0)
}

/// Builds a strip from midline segments calibrated to the exact band area.
fn calibrated_strip(
    mut segs: Vec<(f64, f64)>,
    area: f64,
    xmom: f64,
    dy: f64,
    touch: f64,
) -> IntervalSet {
    if area <= 1e-14 * (1.0 + dy) {
        return IntervalSet::empty();
    }
    let target = area / dy;
    segs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Coalesce abutting segments from vertically adjacent rectangles.
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(segs.len());
    for (a, b) in segs {
        if let Some(last) = merged.last_mut() {
            if a - last.1 <= touch {
                last.1 = last.1.max(b);
                continue;
            }
        }
        merged.push((a, b));
    }
    if merged.is_empty() {
        // Cap band: the midline misses the region but the band area is
        // positive. Place one interval at the band centroid.
        let cx = xmom / area;
        return IntervalSet::from_sorted_unchecked(vec![(cx - target / 2.0, cx + target / 2.0)]);
    }
    let len: f64 = merged.iter().map(|&(a, b)| b - a).sum();
    let factor = target / len;
    // Scale every interval about its barycenter, then repair any overlaps
    // with a length-preserving merge at the length-weighted barycenter.
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(merged.len());
    for (a, b) in merged {
        let m = (a + b) / 2.0;
        let r = (b - a) / 2.0 * factor;
        let mut cur = (m - r, m + r);
        while let Some(last) = out.last() {
            if cur.0 > last.1 {
                break;
            }
            let (la, lb) = out.pop().unwrap();
            let l1 = lb - la;
            let l2 = cur.1 - cur.0;
            let m = ((la + lb) / 2.0 * l1 + (cur.0 + cur.1) / 2.0 * l2) / (l1 + l2);
            let half = (l1 + l2) / 2.0;
            cur = (m - half, m + half);
        }
        out.push(cur);
    }
    IntervalSet::from_sorted_unchecked(out)
}
