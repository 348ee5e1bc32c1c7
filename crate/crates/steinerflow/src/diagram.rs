//! The Blaschke-Santaló diagram of (rescaled 1/eigenvalue, rescaled
//! torsion): coordinates, closed-form bounds, analytic curve families, and
//! full scans of flowed domains.
//!
//! In the rescaled variables
//!
//! ```text
//! x = (|B| / |Ω|)^{2/d}      · λ(B) / λ(Ω)
//! y = (|B| / |Ω|)^{(d+2)/d}  · T(Ω) / T(B)
//! ```
//!
//! (B the unit ball) every domain lands in `(0,1] × (0,1]`: Faber-Krahn
//! gives `x ≤ 1`, Saint-Venant `y ≤ 1`, Kohler-Jobin `y ≥ x^{(d+2)/2}`, and
//! an upper bound rational in x caps the diagram from above. The PDE solvers
//! handle d = 2 only; the formulas here work for any dimension once the
//! unit-ball eigenvalue is supplied.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Polygon;
use crate::pde;
use crate::symflow::{FlowRun, FlowSchedule};

/// First zero of the Bessel function J₀; λ of the unit disk is its square.
pub const BESSEL_J0_ZERO: f64 = 2.404825557695773;

/// Reference constants of the unit ball in dimension `d`.
#[derive(Clone, Copy, Debug)]
pub struct BallConstants {
    pub d: u32,
    pub lambda_ball: f64,
    pub torsion_ball: f64,
    pub volume_ball: f64,
}

impl BallConstants {
    /// Unit-ball constants with a caller-supplied eigenvalue; torsion and
    /// volume follow from `T(B) = ω_d / (d (d+2))` and `|B| = ω_d`.
    pub fn new(d: u32, lambda_ball: f64) -> Result<Self> {
        if d == 0 || !(lambda_ball > 0.0) {
            return Err(Error::InvalidArgument("ball constants need d ≥ 1, λ > 0".into()));
        }
        let volume_ball = unit_ball_volume(d);
        let torsion_ball = volume_ball / (d as f64 * (d as f64 + 2.0));
        Ok(Self { d, lambda_ball, torsion_ball, volume_ball })
    }

    /// Planar constants: λ(B) = j₀², T(B) = π/8, |B| = π.
    pub fn dim2() -> Self {
        Self::new(2, BESSEL_J0_ZERO * BESSEL_J0_ZERO).unwrap()
    }

    /// Three-dimensional constants: λ(B) = π².
    pub fn dim3() -> Self {
        Self::new(3, std::f64::consts::PI * std::f64::consts::PI).unwrap()
    }
}

/// Volume of the unit ball, ω_d = π^{d/2} / Γ(d/2 + 1).
fn unit_ball_volume(d: u32) -> f64 {
    std::f64::consts::PI.powf(d as f64 / 2.0) / gamma_half_integer(d + 2)
}

/// Γ(n/2) for positive integer n.
fn gamma_half_integer(n: u32) -> f64 {
    let mut x = n as f64 / 2.0;
    let mut acc = 1.0;
    while x > 1.0 {
        x -= 1.0;
        acc *= x;
    }
    if (x - 0.5).abs() < 1e-12 {
        acc * std::f64::consts::PI.sqrt()
    } else {
        acc // Γ(1) = 1
    }
}

/// Where a diagram point came from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PointSource {
    /// PDE solve of a flow snapshot at the given global time.
    Computed { t_global: f64 },
    /// Analytic curve family value with the given copy count.
    AnalyticFamily { n: usize, sigma: f64 },
    /// A sample of one of the closed-form bound curves.
    BoundCurve,
}

/// A rescaled diagram point with provenance.
#[derive(Clone, Copy, Debug)]
pub struct DiagramPoint {
    pub x: f64,
    pub y: f64,
    pub d: u32,
    pub source: PointSource,
}

/// Maps (λ, T, area) to the rescaled diagram coordinates. The map is
/// invariant under the scaling (λ, T, |Ω|) ↦ (λ/s², s^{d+2} T, s^d |Ω|).
pub fn diagram_point(
    lambda: f64,
    torsion: f64,
    area: f64,
    c: &BallConstants,
    source: PointSource,
) -> DiagramPoint {
    let d = c.d as f64;
    let ratio = c.volume_ball / area;
    let x = ratio.powf(2.0 / d) * c.lambda_ball / lambda;
    let y = ratio.powf((d + 2.0) / d) * torsion / c.torsion_ball;
    DiagramPoint { x, y, d: c.d, source }
}

/// Kohler-Jobin lower bound `x^{(d+2)/2}`.
pub fn kj_lower(x: f64, d: u32) -> f64 {
    x.powf((d as f64 + 2.0) / 2.0)
}

/// Upper bound `x d (d+2)² / (2xd + (d+2) λ(B))`; for d = 2 this is
/// `8x / (x + j₀²)`.
pub fn bfnt_upper(x: f64, c: &BallConstants) -> f64 {
    let d = c.d as f64;
    x * d * (d + 2.0) * (d + 2.0) / (2.0 * x * d + (d + 2.0) * c.lambda_ball)
}

/// Lower bound for the diagram's upper envelope:
/// `x^{(d+2)/2} ([x^{-d/2}] + (x^{-d/2} - [x^{-d/2}])^{(d+2)/d})`,
/// with `[...]` the integer part. Continuous on (0, 1], extended by 0 at 0.
pub fn h_lower(x: f64, d: u32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let d = d as f64;
    let w = x.powf(-d / 2.0);
    let int = w.floor();
    let frac = w - int;
    x.powf((d + 2.0) / 2.0) * (int + frac.powf((d + 2.0) / d))
}

/// Slope of the Polya line `y < coeff · x`, `coeff = |B| / (λ(B) T(B))`.
pub fn polya_coeff(c: &BallConstants) -> f64 {
    c.volume_ball / (c.lambda_ball * c.torsion_ball)
}

/// The analytic family through `(x0, y0)`: one shrunk copy plus `n - 1`
/// equal small copies, traced by `sigma ∈ [0, 1]`. At `sigma = 0` the curve
/// starts at `(x0, y0)`; at `sigma = 1` it reaches `n^{-2/d} (x0, y0)`.
pub fn family_curve(x0: f64, y0: f64, n: usize, d: u32, sigma: f64) -> (f64, f64) {
    let d = d as f64;
    let a_n = 1.0 - (n as f64).powf(-1.0 / d);
    let u = 1.0 - a_n * sigma;
    let x = x0 * u * u;
    let y = y0
        * (u.powf(d + 2.0)
            + (n as f64 - 1.0).powf(-2.0 / d) * (1.0 - u.powf(d)).powf((d + 2.0) / d));
    (x, y)
}

/// The same family in raw (λ, T) values at fixed measure:
/// `λ' = (1 - a_n σ)^{-2} λ` and the bracketed torsion combination.
pub fn family_values(lambda: f64, torsion: f64, n: usize, d: u32, sigma: f64) -> (f64, f64) {
    let d = d as f64;
    let a_n = 1.0 - (n as f64).powf(-1.0 / d);
    let u = 1.0 - a_n * sigma;
    let lambda_new = lambda / (u * u);
    let torsion_new = torsion
        * (u.powf(d + 2.0)
            + (n as f64 - 1.0).powf(-2.0 / d) * (1.0 - u.powf(d)).powf((d + 2.0) / d));
    (lambda_new, torsion_new)
}

/// Inequality flags for one diagram point at tolerance `eps`.
#[derive(Clone, Copy, Debug)]
pub struct VerifyReport {
    pub faber_krahn: bool,
    pub saint_venant: bool,
    pub kohler_jobin: bool,
    pub bfnt: bool,
    pub polya: bool,
    pub h_lower_consistent: bool,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.faber_krahn
            && self.saint_venant
            && self.kohler_jobin
            && self.bfnt
            && self.polya
            && self.h_lower_consistent
    }
}

/// Checks the closed-form inequalities at one point.
pub fn verify_point(p: &DiagramPoint, c: &BallConstants, eps: f64) -> VerifyReport {
    VerifyReport {
        faber_krahn: p.x <= 1.0 + eps,
        saint_venant: p.y <= 1.0 + eps,
        kohler_jobin: p.y >= kj_lower(p.x, c.d) - eps,
        bfnt: p.y <= bfnt_upper(p.x, c) + eps,
        polya: p.y <= polya_coeff(c) * p.x + eps,
        h_lower_consistent: bfnt_upper(p.x, c) >= h_lower(p.x, c.d) - 1e-12,
    }
}

/// How many sigma samples each analytic family curve contributes to a scan.
pub const FAMILY_SIGMA_SAMPLES: usize = 17;

/// Runs the flow on a polygon, solves λ and T on every snapshot, and emits
/// the computed curve together with the analytic family curves hanging off
/// each snapshot point. Snapshot solves run in parallel; output order is
/// deterministic.
pub fn diagram_scan(
    p: &Polygon,
    sched: &FlowSchedule,
    n_list: &[usize],
    grid_h: f64,
    samples: usize,
) -> Result<Vec<DiagramPoint>> {
    let c = BallConstants::dim2();
    let run = FlowRun::new(p, sched)?;
    let snaps = run.snapshots(samples)?;
    let computed: Vec<DiagramPoint> = snaps
        .par_iter()
        .map(|snap| -> Result<DiagramPoint> {
            let g = pde::rasterize(&snap.domain, grid_h)?;
            let (lambda, _) = pde::eigen_solve(&g, 1e-8)?;
            let (torsion, _) = pde::torsion_solve(&g, 1e-10)?;
            Ok(diagram_point(
                lambda,
                torsion,
                snap.domain.area(),
                &c,
                PointSource::Computed { t_global: snap.t_global },
            ))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for pt in &computed {
        out.push(*pt);
        for &n in n_list {
            if n < 2 {
                continue;
            }
            for k in 0..FAMILY_SIGMA_SAMPLES {
                let sigma = k as f64 / (FAMILY_SIGMA_SAMPLES - 1) as f64;
                let (x, y) = family_curve(pt.x, pt.y, n, c.d, sigma);
                out.push(DiagramPoint {
                    x,
                    y,
                    d: c.d,
                    source: PointSource::AnalyticFamily { n, sigma },
                });
            }
        }
    }
    Ok(out)
}
