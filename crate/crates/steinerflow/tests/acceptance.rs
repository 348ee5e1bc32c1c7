//! Acceptance suite: one test per criterion, each printing a PASS line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).
//!
//! Expected values tagged as derived below were computed from independent
//! oracles (series expansions, bisection, closed-form arithmetic) before
//! being frozen here.

use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use steinerflow::cli::{check_monotonicity, evaluate_snapshots};
use steinerflow::config::Config;
use steinerflow::diagram::{
    bfnt_upper, diagram_point, family_curve, family_values, h_lower, kj_lower, BallConstants,
    PointSource,
};
use steinerflow::geometry::{strip_slice, Direction, IntervalSet};
use steinerflow::io::SnapshotRow;
use steinerflow::pde::{eigen_solve, gamma_distance, rasterize, torsion_gap_l1, torsion_solve, GridMask};
use steinerflow::symflow::{next_merge_time, strip_flow_to, FlowRun, FlowSchedule, JumpCheck, StripDomain};
use steinerflow::{demo, synth};

const J0_SQ: f64 = 5.783185962946785;
const PI: f64 = std::f64::consts::PI;

fn disk_mask(h: f64, cx: f64, cy: f64, r: f64) -> GridMask {
    GridMask::from_fn(h, cx - r, cy - r, cx + r, cy + r, |x, y| {
        (x - cx).powi(2) + (y - cy).powi(2) < r * r
    })
    .unwrap()
}

/// Fourier-series oracle for the unit-square torsion, derived from the 1D
/// profile x(1-x)/2 plus its harmonic correction:
/// T = 1/12 - (16/π⁵) Σ_{k odd} tanh(kπ/2)/k⁵.
fn square_torsion_oracle() -> f64 {
    let mut series = 0.0;
    for k in (1..400).step_by(2) {
        let kf = k as f64;
        series += (kf * PI / 2.0).tanh() / kf.powi(5);
    }
    1.0 / 12.0 - 16.0 / PI.powi(5) * series
}

#[test]
fn criterion_1_ball_constants() {
    let t0 = Instant::now();
    let h = 1.0 / 128.0;
    let g = disk_mask(h, 0.0, 0.0, 1.0);
    let (lambda, _) = eigen_solve(&g, 1e-8).unwrap();
    let (torsion, _) = torsion_solve(&g, 1e-10).unwrap();
    let elapsed = t0.elapsed();
    let lambda_err = (lambda - J0_SQ).abs() / J0_SQ;
    let torsion_err = (torsion - PI / 8.0).abs() / (PI / 8.0);
    assert!(lambda_err < 0.02, "disk eigenvalue off by {:.3}%", lambda_err * 100.0);
    assert!(torsion_err < 0.02, "disk torsion off by {:.3}%", torsion_err * 100.0);
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "[acceptance] criterion 1 (ball constants): PASS — λ err {:.3}%, T err {:.3}%, {:.2?}",
        lambda_err * 100.0,
        torsion_err * 100.0,
        elapsed
    );
}

#[test]
fn criterion_2_oracle_domains() {
    let oracle_t = square_torsion_oracle();
    assert!((oracle_t - 0.03514).abs() < 1e-5);
    let exact_l = 2.0 * PI * PI;
    let square = |n: usize| {
        GridMask::from_fn(1.0 / n as f64, 0.0, 0.0, 1.0, 1.0, |x, y| {
            x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0
        })
        .unwrap()
    };
    let mut errs = Vec::new();
    for n in [64usize, 128] {
        let g = square(n);
        let (lambda, _) = eigen_solve(&g, 1e-8).unwrap();
        let (torsion, _) = torsion_solve(&g, 1e-10).unwrap();
        if n == 128 {
            assert!((lambda - exact_l).abs() / exact_l < 0.02);
            assert!((torsion - oracle_t).abs() / oracle_t < 0.02);
        }
        errs.push(((lambda - exact_l).abs(), (torsion - oracle_t).abs()));
    }
    let order_l = (errs[0].0 / errs[1].0).log2();
    let order_t = (errs[0].1 / errs[1].1).log2();
    assert!(order_l >= 1.7, "eigenvalue refinement order {order_l:.2}");
    assert!(order_t >= 1.7, "torsion refinement order {order_t:.2}");
    println!(
        "[acceptance] criterion 2 (oracle domains): PASS — square λ/T within 2% \
         (oracle T = {oracle_t:.6}), refinement orders {order_l:.2}/{order_t:.2}"
    );
}

/// Forward-Euler integrator for the interval dynamics with merging on
/// contact — the independent oracle for the event-driven engine.
fn naive_integrate(start: &[(f64, f64)], t_end: f64, dt: f64) -> Vec<(f64, f64)> {
    let mut iv: Vec<(f64, f64)> = start.to_vec();
    let mut t = 0.0;
    while t < t_end {
        let step = dt.min(t_end - t);
        for p in iv.iter_mut() {
            let m = (p.0 + p.1) / 2.0;
            let r = (p.1 - p.0) / 2.0;
            let m2 = m * (1.0 - step);
            *p = (m2 - r, m2 + r);
        }
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
        for &(a, b) in &iv {
            if let Some(last) = merged.last_mut() {
                if a <= last.1 {
                    last.1 = b.max(last.1);
                    continue;
                }
            }
            merged.push((a, b));
        }
        iv = merged;
        t += step;
    }
    iv
}

fn random_interval_set(rng: &mut ChaCha8Rng) -> Vec<(f64, f64)> {
    let k = rng.gen_range(1..=5);
    let mut x = rng.gen_range(-4.0..-2.0);
    let mut out = Vec::with_capacity(k);
    for _ in 0..k {
        let a = x + rng.gen_range(0.05..0.9);
        let b = a + rng.gen_range(0.05..1.2);
        out.push((a, b));
        x = b;
    }
    out
}

fn merge_time_bisection(s: &IntervalSet) -> f64 {
    let mut best = f64::INFINITY;
    for w in s.intervals().windows(2) {
        let (m1, r1) = ((w[0].0 + w[0].1) / 2.0, (w[0].1 - w[0].0) / 2.0);
        let (m2, r2) = ((w[1].0 + w[1].1) / 2.0, (w[1].1 - w[1].0) / 2.0);
        let gap = |t: f64| (m2 - m1) * (-t).exp() - (r1 + r2);
        let (mut lo, mut hi) = (0.0_f64, 100.0_f64);
        if gap(lo) <= 0.0 || gap(hi) > 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best = best.min(0.5 * (lo + hi));
    }
    best
}

#[test]
fn criterion_3_flow_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(314159);
    let mut max_dev: f64 = 0.0;
    let mut max_bisect_dev: f64 = 0.0;
    for _ in 0..200 {
        let start = random_interval_set(&mut rng);
        let set = IntervalSet::new(start.clone()).unwrap();

        // closed-form merge time vs bisection
        let tm = next_merge_time(&set);
        let tb = merge_time_bisection(&set);
        if tm.is_finite() {
            max_bisect_dev = max_bisect_dev.max((tm - tb).abs());
        }

        // event-driven vs naive integration, away from merge instants
        let dom = StripDomain::new(0.0, 1.0, vec![set.clone()], 0.0);
        let (_, events) = strip_flow_to(&dom, 2.0).unwrap();
        let event_times: Vec<f64> = events.iter().map(|e| e.time).collect();
        for k in 1..=10 {
            let mut t = 2.0 * k as f64 / 10.0;
            while event_times.iter().any(|&te| (t - te).abs() < 0.01) {
                t += 0.013;
            }
            let (exact_dom, _) = strip_flow_to(&dom, t).unwrap();
            let exact = exact_dom.strips()[0].intervals();
            let naive = naive_integrate(&start, t, 1e-5);
            assert_eq!(exact.len(), naive.len(), "interval count differs at t = {t}");
            for (e, n) in exact.iter().zip(&naive) {
                max_dev = max_dev.max((e.0 - n.0).abs()).max((e.1 - n.1).abs());
            }
        }
    }
    assert!(max_dev < 1e-3, "endpoint deviation {max_dev:.2e}");
    assert!(max_bisect_dev < 1e-10, "merge-time deviation {max_bisect_dev:.2e}");

    // U-shape legs from the polygon pipeline merge exactly at ln 2.
    let dom = strip_slice(&demo::ushape(), Direction::new(0.0), 64).unwrap();
    let legs: Vec<&IntervalSet> = dom
        .strips()
        .iter()
        .enumerate()
        .filter(|(i, _)| dom.strip_mid_y(*i) > 1.0)
        .map(|(_, s)| s)
        .collect();
    assert!(!legs.is_empty());
    for s in legs {
        assert_eq!(next_merge_time(s), std::f64::consts::LN_2);
    }
    println!(
        "[acceptance] criterion 3 (1D flow exactness): PASS — naive-integrator deviation \
         {max_dev:.2e} (< 1e-3), bisection deviation {max_bisect_dev:.2e} (< 1e-10), \
         U-shape merge time = ln 2 exactly"
    );
}

fn default_schedule() -> FlowSchedule {
    FlowSchedule {
        directions: (0..8).map(|j| Direction::new(j as f64 * PI / 8.0)).collect(),
        horizon: 6.0,
        shrink_duration: 1.0,
        n_strips: 256,
        wall_shrink: true,
        jump_check: Some(JumpCheck::default()),
    }
}

fn modified_flow_rows(p: &steinerflow::geometry::Polygon) -> Vec<SnapshotRow> {
    let cfg = Config::default();
    let run = FlowRun::new(p, &default_schedule()).unwrap();
    let snaps = run.snapshots(40).unwrap();
    evaluate_snapshots(&snaps, &cfg).unwrap()
}

fn lshape_rows() -> &'static [SnapshotRow] {
    static ROWS: OnceLock<Vec<SnapshotRow>> = OnceLock::new();
    ROWS.get_or_init(|| modified_flow_rows(&demo::lshape()))
}

#[test]
fn criterion_4_monotonicity() {
    for (name, rows) in [
        ("ushape", &modified_flow_rows(&demo::ushape())[..]),
        ("lshape", lshape_rows()),
    ] {
        assert_eq!(rows.len(), 40);
        let (ok, msg) = check_monotonicity(rows, 0.01);
        assert!(ok, "{name}: {msg}");
        let a0 = rows[0].area;
        let worst_area =
            rows.iter().map(|r| ((r.area - a0) / a0).abs()).fold(0.0_f64, f64::max);
        assert!(worst_area <= 1e-9, "{name}: area drift {worst_area:.2e}");
    }
    println!(
        "[acceptance] criterion 4 (flow monotonicity): PASS — λ non-increasing and T \
         non-decreasing within 1% per step, area constant to 1e-9 (ushape and lshape, \
         resolution 128, 40 snapshots)"
    );
}

#[test]
fn criterion_5_discontinuity_contrast() {
    // Single horizontal direction on the U-shape; the wall appears at ln 2.
    // 9 snapshots resolve the torsion range without resolving the grid's
    // single-node capacity quantum.
    let cfg = Config::default();
    let run_once = |wall_shrink: bool| -> Vec<f64> {
        let sched = FlowSchedule {
            directions: vec![Direction::new(0.0)],
            horizon: 1.0,
            shrink_duration: 3.0,
            n_strips: 256,
            wall_shrink,
            jump_check: Some(JumpCheck::default()),
        };
        let run = FlowRun::new(&demo::ushape(), &sched).unwrap();
        let rows = evaluate_snapshots(&run.snapshots(9).unwrap(), &cfg).unwrap();
        rows.windows(2).map(|w| (w[1].torsion - w[0].torsion).abs()).collect()
    };
    let ratio = |steps: &[f64]| {
        let mut sorted = steps.to_vec();
        sorted.sort_by(f64::total_cmp);
        sorted[sorted.len() - 1] / sorted[sorted.len() / 2]
    };
    let unmodified = ratio(&run_once(false));
    let modified = ratio(&run_once(true));
    assert!(unmodified >= 10.0, "unmodified max/median = {unmodified:.2}");
    assert!(modified <= 3.0, "modified max/median = {modified:.2}");
    println!(
        "[acceptance] criterion 5 (discontinuity contrast): PASS — unmodified T jump \
         {unmodified:.1}× median (≥ 10×), modified max step {modified:.2}× median (≤ 3×)"
    );
}

#[test]
fn criterion_6_convergence_to_ball() {
    let last = lshape_rows().last().unwrap();
    let dist = ((last.x - 1.0).powi(2) + (last.y - 1.0).powi(2)).sqrt();
    assert!(dist <= 0.05, "terminal point ({}, {}), distance {dist:.4}", last.x, last.y);
    println!(
        "[acceptance] criterion 6 (convergence to the ball): PASS — L-shape terminal point \
         ({:.4}, {:.4}), distance to (1,1) = {dist:.4} (≤ 0.05)",
        last.x, last.y
    );
}

#[test]
fn criterion_7_inequality_suite() {
    let c = BallConstants::dim2();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let polys: Vec<_> = (0..100)
        .map(|_| {
            let n = rng.gen_range(8..28);
            synth::random_star_polygon(&mut rng, n, 0.35, 1.0)
        })
        .collect();
    let points: Vec<(f64, f64)> = polys
        .par_iter()
        .map(|poly| {
            let dom = strip_slice(poly, Direction::new(0.0), 256).unwrap();
            let (lo, hi) = poly.bbox();
            let h = (hi.x - lo.x).max(hi.y - lo.y) / 128.0;
            let g = rasterize(&dom, h).unwrap();
            let (lambda, _) = eigen_solve(&g, 1e-8).unwrap();
            let (torsion, _) = torsion_solve(&g, 1e-10).unwrap();
            let p = diagram_point(lambda, torsion, dom.area(), &c, PointSource::BoundCurve);
            (p.x, p.y)
        })
        .collect();
    for (i, &(x, y)) in points.iter().enumerate() {
        assert!(x <= 1.0 + 0.02, "polygon {i}: Faber-Krahn violated, x = {x:.4}");
        assert!(y <= 1.0 + 0.02, "polygon {i}: Saint-Venant violated, y = {y:.4}");
        assert!(y >= x * x - 0.03, "polygon {i}: Kohler-Jobin violated at ({x:.4}, {y:.4})");
        assert!(
            y <= 8.0 * x / (x + J0_SQ) + 0.03,
            "polygon {i}: upper bound violated at ({x:.4}, {y:.4})"
        );
    }
    let worst_kj = points.iter().map(|&(x, y)| y - x * x).fold(f64::INFINITY, f64::min);
    println!(
        "[acceptance] criterion 7 (inequality suite): PASS — 100 random polygons at \
         resolution 128 satisfy all four bounds (worst Kohler-Jobin margin {worst_kj:+.4})"
    );
}

#[test]
fn criterion_8_analytic_identities() {
    let c = BallConstants::dim2();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut max_dev: f64 = 0.0;
    for _ in 0..1000 {
        let area = rng.gen_range(0.5..5.0);
        let lambda = rng.gen_range(3.0..80.0);
        // torsion between the Kohler-Jobin and Saint-Venant values for this λ
        let ratio = c.volume_ball / area;
        let x = (ratio * c.lambda_ball / lambda).min(1.0);
        let y = rng.gen_range(kj_lower(x, 2) * 0.9..1.0);
        let torsion = y * c.torsion_ball * (area / c.volume_ball).powi(2);
        let n = rng.gen_range(2..9);
        let sigma = rng.gen_range(0.0..=1.0);
        let base = diagram_point(lambda, torsion, area, &c, PointSource::BoundCurve);
        let (l2, t2) = family_values(lambda, torsion, n, 2, sigma);
        let via_values = diagram_point(l2, t2, area, &c, PointSource::BoundCurve);
        let (xc, yc) = family_curve(base.x, base.y, n, 2, sigma);
        max_dev = max_dev.max((via_values.x - xc).abs()).max((via_values.y - yc).abs());
    }
    assert!(max_dev < 1e-12, "family identity deviation {max_dev:.2e}");

    // family endpoint reproduces n^{-2/d} (x0, y0)
    for n in 2..=8 {
        let (xe, ye) = family_curve(0.73, 0.68, n, 2, 1.0);
        let f = (n as f64).powf(-1.0);
        assert!((xe - 0.73 * f).abs() < 1e-12 && (ye - 0.68 * f).abs() < 1e-12);
    }

    // two equal disks: exactly (1/2, 1/2) analytically
    let two = diagram_point(J0_SQ, 2.0 * PI / 8.0, 2.0 * PI, &c, PointSource::BoundCurve);
    assert!((two.x - 0.5).abs() < 1e-12 && (two.y - 0.5).abs() < 1e-12);
    // equality case of the lower envelope estimate at x = 1/2
    assert!((h_lower(0.5, 2) - 0.5).abs() < 1e-13);
    assert!(bfnt_upper(0.5, &c) > 0.5);

    // and within 0.02 by PDE solve on two equal disks
    let h = 1.0 / 96.0;
    let union = GridMask::from_fn(h, -1.0, -1.0, 4.4, 1.0, |x, y| {
        x * x + y * y < 1.0 || ((x - 3.4).powi(2) + y * y) < 1.0
    })
    .unwrap();
    let (lambda, _) = eigen_solve(&union, 1e-8).unwrap();
    let (torsion, _) = torsion_solve(&union, 1e-10).unwrap();
    let pde_pt = diagram_point(lambda, torsion, 2.0 * PI, &c, PointSource::BoundCurve);
    assert!(
        (pde_pt.x - 0.5).abs() <= 0.02 && (pde_pt.y - 0.5).abs() <= 0.02,
        "PDE two-disk point ({:.4}, {:.4})",
        pde_pt.x,
        pde_pt.y
    );
    println!(
        "[acceptance] criterion 8 (analytic identities): PASS — family identity to \
         {max_dev:.1e}, endpoints exact, two-disk point analytic (0.5, 0.5) and PDE \
         ({:.3}, {:.3}), h_lower(1/2) = 1/2",
        pde_pt.x, pde_pt.y
    );
}

#[test]
fn criterion_9_gamma_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(7777);
    let h = 1.0 / 24.0;
    // nested masks: torsion gap equals the torsion difference
    let mut worst_gap_dev: f64 = 0.0;
    for _ in 0..8 {
        let big = GridMask::from_fn(h, -1.2, -1.2, 1.2, 1.2, |x, y| {
            x * x + y * y < 1.2 * 1.2
        })
        .unwrap();
        let keep: Vec<bool> = (0..big.nx() * big.ny())
            .map(|k| big.is_free(k) && rng.gen_bool(0.92))
            .collect();
        let small = GridMask::new(
            h,
            big.nx(),
            big.ny(),
            big.origin(),
            keep,
            vec![false; big.nx() * big.ny()],
        )
        .unwrap();
        let gap = torsion_gap_l1(&small, &big).unwrap();
        let (t_small, _) = torsion_solve(&small, 1e-10).unwrap();
        let (t_big, _) = torsion_solve(&big, 1e-10).unwrap();
        worst_gap_dev = worst_gap_dev.max((gap - (t_big - t_small)).abs() / (t_big - t_small));
        assert!(gap >= 0.0);
    }
    assert!(worst_gap_dev < 1e-8, "gap identity deviation {worst_gap_dev:.2e}");

    // metric axioms on random triples over one bounding box
    let bbox_mask = |rng: &mut ChaCha8Rng| {
        let (cx, cy) = (rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let r = rng.gen_range(0.4..0.9);
        GridMask::from_fn(h, -1.5, -1.5, 1.5, 1.5, move |x, y| {
            (x - cx).powi(2) + (y - cy).powi(2) < r * r
        })
        .unwrap()
    };
    for _ in 0..5 {
        let a = bbox_mask(&mut rng);
        let b = bbox_mask(&mut rng);
        let c = bbox_mask(&mut rng);
        let dab = gamma_distance(&a, &b).unwrap();
        let dba = gamma_distance(&b, &a).unwrap();
        let dac = gamma_distance(&a, &c).unwrap();
        let dbc = gamma_distance(&b, &c).unwrap();
        assert!((dab - dba).abs() <= 1e-10);
        assert_eq!(gamma_distance(&a, &a).unwrap(), 0.0);
        assert!(dac <= dab + dbc + 1e-10, "triangle inequality: {dac} > {dab} + {dbc}");
    }
    println!(
        "[acceptance] criterion 9 (γ-distance identities): PASS — torsion gap equals T \
         difference to {worst_gap_dev:.1e} (< 1e-8), metric axioms hold to 1e-10"
    );
}
