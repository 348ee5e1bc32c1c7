//! Command implementations behind the `steinerflow` binary.
//!
//! Every command is a plain function so tests can drive it directly; the
//! binary only parses flags and maps errors to exit codes. All output is
//! deterministic for a fixed configuration.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::config::Config;
use crate::diagram::{
    diagram_point, diagram_scan, verify_point, BallConstants, DiagramPoint, PointSource,
};
use crate::error::{Error, Result};
use crate::geometry::Direction;
use crate::io::{self, SnapshotRow};
use crate::pde;
use crate::symflow::{EventKind, FlowRun, FlowSchedule, FlowSnapshot, JumpCheck};

fn schedule_from_config(cfg: &Config, base_angle: f64, wall_shrink: bool) -> FlowSchedule {
    let k = cfg.directions;
    let directions = (0..k)
        .map(|j| Direction::new(base_angle + j as f64 * std::f64::consts::PI / k as f64))
        .collect();
    FlowSchedule {
        directions,
        horizon: cfg.horizon,
        shrink_duration: cfg.shrink_duration,
        n_strips: cfg.n_strips,
        wall_shrink,
        jump_check: wall_shrink.then(|| JumpCheck { cg_tol: cfg.cg_tol, ..JumpCheck::default() }),
    }
}

/// Grid spacing so the snapshot's larger bounding-box extent spans
/// `resolution` nodes.
fn grid_h(snap: &FlowSnapshot, resolution: usize) -> Result<f64> {
    let (xlo, xhi) = snap.domain.x_extent().ok_or(Error::EmptyRasterization)?;
    let height = snap.domain.dy() * snap.domain.n_strips() as f64;
    Ok((xhi - xlo).max(height) / resolution as f64)
}

/// Solves λ and T on every snapshot (in parallel, deterministic order) and
/// emits the snapshot CSV rows.
pub fn evaluate_snapshots(snaps: &[FlowSnapshot], cfg: &Config) -> Result<Vec<SnapshotRow>> {
    let c = BallConstants::dim2();
    let h = grid_h(&snaps[0], cfg.grid_resolution)?;
    snaps
        .par_iter()
        .map(|snap| -> Result<SnapshotRow> {
            let g = pde::rasterize(&snap.domain, h)?;
            let (lambda, _) = pde::eigen_solve(&g, cfg.eig_tol)?;
            let (torsion, _) = pde::torsion_solve(&g, cfg.cg_tol)?;
            let area = snap.domain.area();
            let p = diagram_point(
                lambda,
                torsion,
                area,
                &c,
                PointSource::Computed { t_global: snap.t_global },
            );
            Ok(SnapshotRow {
                t_global: snap.t_global,
                phase: snap.phase,
                area,
                n_walls: snap.domain.walls().len(),
                lambda,
                torsion,
                x: p.x,
                y: p.y,
            })
        })
        .collect()
}

/// Per-step monotonicity check: λ non-increasing and T non-decreasing up to
/// `tol_step` relative violations, and area constant to 1e-9 relative.
pub fn check_monotonicity(rows: &[SnapshotRow], tol_step: f64) -> (bool, String) {
    let mut ok = true;
    let mut msg = String::new();
    for w in rows.windows(2) {
        let dl = (w[1].lambda - w[0].lambda) / w[0].lambda;
        let dt = (w[0].torsion - w[1].torsion) / w[0].torsion;
        if dl > tol_step {
            ok = false;
            msg = format!("lambda rose by {:.3}% at t = {}", dl * 100.0, w[1].t_global);
            break;
        }
        if dt > tol_step {
            ok = false;
            msg = format!("torsion fell by {:.3}% at t = {}", dt * 100.0, w[1].t_global);
            break;
        }
    }
    if ok {
        let a0 = rows[0].area;
        for r in rows {
            if ((r.area - a0) / a0).abs() > 1e-9 {
                ok = false;
                msg = format!("area drifted to {} from {}", r.area, a0);
                break;
            }
        }
    }
    (ok, msg)
}

/// `demo <name>`: writes the built-in polygon file.
pub fn cmd_demo(name: &str, out: Option<&Path>) -> Result<()> {
    let p = crate::demo::by_name(name).ok_or_else(|| Error::UnknownDemo(name.to_string()))?;
    let default = PathBuf::from(format!("{name}.poly"));
    let path = out.unwrap_or(&default);
    io::write_polygon(path, &p)?;
    println!("wrote {} (area {})", path.display(), p.area());
    Ok(())
}

/// `symmetrize`: writes the Steiner symmetral of the input polygon as a
/// strip CSV and prints the area before and after.
pub fn cmd_symmetrize(input: &Path, angle: f64, out: Option<&Path>, cfg: &Config) -> Result<()> {
    cfg.validate()?;
    let p = io::read_polygon(input)?;
    let dom = crate::geometry::steiner_symmetrize(&p, Direction::new(angle), cfg.n_strips)?;
    let default = PathBuf::from("symmetral.csv");
    let path = out.unwrap_or(&default);
    io::write_text(path, &io::strips_to_csv(&dom))?;
    println!("area before {} after {}", p.area(), dom.area());
    println!("wrote {}", path.display());
    Ok(())
}

pub struct FlowOptions {
    pub base_angle: f64,
    pub snapshots: usize,
    pub wall_shrink: bool,
    pub out: Option<PathBuf>,
    pub dump_torsion_field: Option<PathBuf>,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            base_angle: 0.0,
            snapshots: 40,
            wall_shrink: true,
            out: None,
            dump_torsion_field: None,
        }
    }
}

/// `flow`: runs the schedule, solves every snapshot, writes the snapshot
/// CSV, prints the event log, and verifies monotonicity. Returns whether
/// the verification passed.
pub fn cmd_flow(p: &crate::geometry::Polygon, cfg: &Config, opts: &FlowOptions) -> Result<bool> {
    cfg.validate()?;
    let sched = schedule_from_config(cfg, opts.base_angle, opts.wall_shrink);
    let run = FlowRun::new(p, &sched)?;
    let snaps = run.snapshots(opts.snapshots)?;
    for e in run.events() {
        let what = match e.kind {
            EventKind::MergeCluster => "merge",
            EventKind::WallStart => "wall start",
            EventKind::WallEnd => "wall end",
        };
        println!(
            "[phase {}] t_flow={:.6} t_global={:.6} {} strips {}..{} at x={:.6}",
            e.phase, e.t_phase, e.t_global, what, e.strip_lo, e.strip_hi, e.x
        );
    }
    let rows = evaluate_snapshots(&snaps, cfg)?;
    let path = opts.out.clone().unwrap_or_else(|| PathBuf::from("flow.csv"));
    io::write_text(&path, &io::snapshots_to_csv(&rows))?;
    println!("wrote {}", path.display());
    if let Some(dump) = &opts.dump_torsion_field {
        let h = grid_h(snaps.last().unwrap(), cfg.grid_resolution)?;
        let g = pde::rasterize(&snaps.last().unwrap().domain, h)?;
        let (_, u) = pde::torsion_solve(&g, cfg.cg_tol)?;
        io::write_text(dump, &io::field_to_text(&u))?;
        println!("wrote {}", dump.display());
    }
    let (ok, msg) = check_monotonicity(&rows, 0.01);
    if ok {
        println!("monotonicity: PASS");
    } else {
        println!("monotonicity: FAIL ({msg})");
    }
    Ok(ok)
}

/// `diagram`: scans every polygon file in a directory, merges the points
/// into one CSV and SVG, and prints a verification summary per file.
/// Returns whether every point of every file verified.
pub fn cmd_diagram(
    corpus: &Path,
    cfg: &Config,
    family_n: &[usize],
    snapshots: usize,
    out_csv: &Path,
    out_svg: &Path,
) -> Result<bool> {
    cfg.validate()?;
    let c = BallConstants::dim2();
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let mut all_points: Vec<DiagramPoint> = Vec::new();
    let mut all_ok = true;
    for file in &files {
        let polygon = match io::read_polygon(file) {
            Ok(p) => p,
            Err(e) => {
                println!("{}: SKIP ({e})", file.display());
                all_ok = false;
                continue;
            }
        };
        let sched = schedule_from_config(cfg, 0.0, true);
        let (xlo, xhi) = {
            let (lo, hi) = polygon.bbox();
            (lo, hi)
        };
        let extent = (xhi.x - xlo.x).max(xhi.y - xlo.y);
        let h = extent / cfg.grid_resolution as f64;
        match diagram_scan(&polygon, &sched, family_n, h, snapshots) {
            Ok(points) => {
                let mut pass = 0usize;
                let mut fail = 0usize;
                for p in &points {
                    if verify_point(p, &c, cfg.eps_disc).all_pass() {
                        pass += 1;
                    } else {
                        fail += 1;
                    }
                }
                println!(
                    "{}: {} points, {} verified, {} failed",
                    file.display(),
                    points.len(),
                    pass,
                    fail
                );
                if fail > 0 {
                    all_ok = false;
                }
                all_points.extend(points);
            }
            Err(e) => {
                println!("{}: FAIL ({e})", file.display());
                all_ok = false;
            }
        }
    }
    io::write_text(out_csv, &io::diagram_to_csv(&all_points))?;
    io::write_text(out_svg, &io::diagram_svg(&all_points, &c))?;
    println!("wrote {} and {}", out_csv.display(), out_svg.display());
    Ok(all_ok)
}

/// `bounds`: emits the closed-form bound curves on a uniform x grid as CSV
/// and SVG.
pub fn cmd_bounds(
    dim: u32,
    lambda_ball: Option<f64>,
    samples: usize,
    out_csv: &Path,
    out_svg: &Path,
) -> Result<()> {
    let c = ball_constants_for(dim, lambda_ball)?;
    io::write_text(out_csv, &io::bounds_to_csv(&c, samples))?;
    io::write_text(out_svg, &io::diagram_svg(&[], &c))?;
    println!("wrote {} and {}", out_csv.display(), out_svg.display());
    Ok(())
}

/// `verify`: re-checks a diagram CSV against the closed-form inequalities.
/// Returns whether every point passes.
pub fn cmd_verify(input: &Path, eps: f64) -> Result<bool> {
    let text = std::fs::read_to_string(input)?;
    let points = io::parse_diagram_csv(&text)?;
    let mut ok = true;
    let mut fails = [0usize; 6];
    for p in &points {
        let c = ball_constants_for(p.d, None)?;
        let r = verify_point(p, &c, eps);
        for (k, flag) in [
            r.faber_krahn,
            r.saint_venant,
            r.kohler_jobin,
            r.bfnt,
            r.polya,
            r.h_lower_consistent,
        ]
        .into_iter()
        .enumerate()
        {
            if !flag {
                fails[k] += 1;
                ok = false;
            }
        }
    }
    let names = ["faber_krahn", "saint_venant", "kohler_jobin", "bfnt", "polya", "h_lower"];
    println!("{} points checked at eps = {eps}", points.len());
    for (name, n) in names.iter().zip(fails) {
        println!("  {name:<14} {}", if n == 0 { "PASS".into() } else { format!("{n} FAIL") });
    }
    Ok(ok)
}

fn ball_constants_for(dim: u32, lambda_ball: Option<f64>) -> Result<BallConstants> {
    match (dim, lambda_ball) {
        (d, Some(l)) => BallConstants::new(d, l),
        (2, None) => Ok(BallConstants::dim2()),
        (3, None) => Ok(BallConstants::dim3()),
        (d, None) => Err(Error::InvalidArgument(format!(
            "no built-in unit-ball eigenvalue for d = {d}; pass --lambda-ball"
        ))),
    }
}
