//! Five-point Dirichlet Laplacian solvers on a binary occupancy grid.
//!
//! Dirichlet conditions are imposed by node elimination: the operator acts
//! on free nodes only (inside and not constrained by a wall), which keeps
//! the system symmetric positive definite for conjugate gradients. Walls
//! are one-node-wide Dirichlet columns: at a fixed grid spacing a slit must
//! block flux, which a constrained column does.
//!
//! All solves are single-threaded and deterministic; masks are immutable,
//! so independent solves can run concurrently.

use crate::error::{Error, Result};
use crate::symflow::StripDomain;

/// Binary occupancy grid with spacing `h` and Dirichlet-constrained wall
/// nodes. The bounding box always keeps a margin of at least two outside
/// nodes around the domain.
#[derive(Clone, Debug)]
pub struct GridMask {
    h: f64,
    nx: usize,
    ny: usize,
    origin: (f64, f64),
    inside: Vec<bool>,
    wall_node: Vec<bool>,
}

impl GridMask {
    pub fn new(
        h: f64,
        nx: usize,
        ny: usize,
        origin: (f64, f64),
        inside: Vec<bool>,
        wall_node: Vec<bool>,
    ) -> Result<Self> {
        if !(h > 0.0) || inside.len() != nx * ny || wall_node.len() != nx * ny {
            return Err(Error::InvalidArgument("malformed grid mask".into()));
        }
        if wall_node.iter().zip(&inside).any(|(&w, &i)| w && !i) {
            return Err(Error::InvalidArgument("wall node outside the domain".into()));
        }
        let g = Self { h, nx, ny, origin, inside, wall_node };
        if g.free_count() == 0 {
            return Err(Error::EmptyRasterization);
        }
        Ok(g)
    }

    /// Builds a mask from a pointwise predicate over a bounding box.
    pub fn from_fn(
        h: f64,
        x0: f64,
        y0: f64,
        x1: f64,
        y1: f64,
        f: impl Fn(f64, f64) -> bool,
    ) -> Result<Self> {
        let origin = (x0 - 2.0 * h, y0 - 2.0 * h);
        let nx = ((x1 - x0) / h - 1e-12).ceil() as usize + 5;
        let ny = ((y1 - y0) / h - 1e-12).ceil() as usize + 5;
        let mut inside = vec![false; nx * ny];
        for j in 2..ny.saturating_sub(2) {
            for i in 2..nx.saturating_sub(2) {
                inside[j * nx + i] = f(origin.0 + i as f64 * h, origin.1 + j as f64 * h);
            }
        }
        Self::new(h, nx, ny, origin, inside, vec![false; nx * ny])
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn origin(&self) -> (f64, f64) {
        self.origin
    }

    pub fn node_x(&self, i: usize) -> f64 {
        self.origin.0 + i as f64 * self.h
    }

    pub fn node_y(&self, j: usize) -> f64 {
        self.origin.1 + j as f64 * self.h
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn is_inside(&self, i: usize, j: usize) -> bool {
        self.inside[self.idx(i, j)]
    }

    pub fn is_wall(&self, i: usize, j: usize) -> bool {
        self.wall_node[self.idx(i, j)]
    }

    pub fn is_free(&self, idx: usize) -> bool {
        self.inside[idx] && !self.wall_node[idx]
    }

    pub fn inside_count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn free_count(&self) -> usize {
        (0..self.nx * self.ny).filter(|&k| self.is_free(k)).count()
    }

    /// A copy with spacing scaled by `s` and the identical node pattern.
    pub fn scaled(&self, s: f64) -> GridMask {
        GridMask {
            h: self.h * s,
            origin: (self.origin.0 * s, self.origin.1 * s),
            ..self.clone()
        }
    }

    fn same_geometry(&self, other: &GridMask) -> bool {
        self.h == other.h
            && self.nx == other.nx
            && self.ny == other.ny
            && self.origin == other.origin
    }
}

/// A grid function supported on the free nodes of a mask, stored over the
/// full grid with zeros elsewhere.
#[derive(Clone, Debug)]
pub struct ScalarField {
    values: Vec<f64>,
    nx: usize,
    ny: usize,
}

impl ScalarField {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.nx + i]
    }
}

/// Rasterizes a strip domain: a node is inside iff its center lies in some
/// interval of its strip (the vertical extent being open), and becomes a
/// wall node when it sits on the nearest column to an active wall abscissa
/// within a constrained strip.
pub fn rasterize(dom: &StripDomain, h: f64) -> Result<GridMask> {
    let (xmin, xmax) = dom.x_extent().ok_or(Error::EmptyRasterization)?;
    let ymin = dom.y0();
    let ymax = dom.y0() + dom.dy() * dom.n_strips() as f64;
    let origin = (xmin - 2.0 * h, ymin - 2.0 * h);
    let nx = ((xmax - xmin) / h - 1e-12).ceil() as usize + 5;
    let ny = ((ymax - ymin) / h - 1e-12).ceil() as usize + 5;
    let mut inside = vec![false; nx * ny];
    let mut strip_of_row: Vec<Option<usize>> = Vec::with_capacity(ny);
    for j in 0..ny {
        strip_of_row.push(dom.strip_of_y(origin.1 + j as f64 * h));
    }
    for j in 0..ny {
        let Some(sidx) = strip_of_row[j] else { continue };
        let strip = &dom.strips()[sidx];
        if strip.is_empty() {
            continue;
        }
        for i in 0..nx {
            let x = origin.0 + i as f64 * h;
            if strip.contains(x) {
                inside[j * nx + i] = true;
            }
        }
    }
    let mut wall_node = vec![false; nx * ny];
    for w in dom.walls() {
        let Some((lo, hi)) = w.active_range() else { continue };
        let col = ((w.x - origin.0) / h).round() as isize;
        if col < 0 || col as usize >= nx {
            continue;
        }
        let col = col as usize;
        for j in 0..ny {
            if let Some(sidx) = strip_of_row[j] {
                if lo <= sidx && sidx <= hi && inside[j * nx + col] {
                    wall_node[j * nx + col] = true;
                }
            }
        }
    }
    GridMask::new(h, nx, ny, origin, inside, wall_node)
}

/// The packed five-point system over free nodes.
struct FreeSystem {
    n: usize,
    nbr: Vec<[u32; 4]>,
    inv_h2: f64,
    /// free index per grid node, u32::MAX where constrained
    map: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl FreeSystem {
    fn build(g: &GridMask) -> Result<FreeSystem> {
        Self::build_filtered(g, |_| true)
    }

    /// Builds the system over the free nodes passing the grid-index filter.
    fn build_filtered(g: &GridMask, keep: impl Fn(usize) -> bool) -> Result<FreeSystem> {
        let total = g.nx * g.ny;
        let mut map = vec![NONE; total];
        let mut count: u32 = 0;
        for k in 0..total {
            if g.is_free(k) && keep(k) {
                map[k] = count;
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::EmptyRasterization);
        }
        let mut nbr = vec![[NONE; 4]; count as usize];
        for j in 0..g.ny {
            for i in 0..g.nx {
                let k = g.idx(i, j);
                if map[k] == NONE {
                    continue;
                }
                let f = map[k] as usize;
                if i > 0 {
                    nbr[f][0] = map[k - 1];
                }
                if i + 1 < g.nx {
                    nbr[f][1] = map[k + 1];
                }
                if j > 0 {
                    nbr[f][2] = map[k - g.nx];
                }
                if j + 1 < g.ny {
                    nbr[f][3] = map[k + g.nx];
                }
            }
        }
        Ok(FreeSystem { n: count as usize, nbr, inv_h2: 1.0 / (g.h * g.h), map })
    }

    /// out = A u with A the negative five-point Laplacian on free nodes.
    fn apply(&self, u: &[f64], out: &mut [f64]) {
        for (k, nb) in self.nbr.iter().enumerate() {
            let mut acc = 4.0 * u[k];
            for &m in nb {
                if m != NONE {
                    acc -= u[m as usize];
                }
            }
            out[k] = acc * self.inv_h2;
        }
    }

    /// Conjugate gradient to relative residual `tol`, starting from `x`.
    fn cg(&self, b: &[f64], x: &mut [f64], tol: f64) -> Result<usize> {
        let max_iters = (50.0 * (self.n as f64).sqrt()).ceil() as usize;
        let nrm_b = norm(b);
        if nrm_b == 0.0 {
            x.fill(0.0);
            return Ok(0);
        }
        let mut r = vec![0.0; self.n];
        self.apply(x, &mut r);
        for k in 0..self.n {
            r[k] = b[k] - r[k];
        }
        let mut p = r.clone();
        let mut ap = vec![0.0; self.n];
        let mut rr = dot(&r, &r);
        let target = tol * nrm_b;
        if rr.sqrt() <= target {
            return Ok(0);
        }
        for it in 1..=max_iters {
            self.apply(&p, &mut ap);
            let alpha = rr / dot(&p, &ap);
            for k in 0..self.n {
                x[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            let rr_new = dot(&r, &r);
            if rr_new.sqrt() <= target {
                return Ok(it);
            }
            let beta = rr_new / rr;
            rr = rr_new;
            for k in 0..self.n {
                p[k] = r[k] + beta * p[k];
            }
        }
        Err(Error::SolverDiverged { max_iters, residual: rr.sqrt() / nrm_b })
    }

    fn scatter(&self, u: &[f64], nx: usize, ny: usize) -> ScalarField {
        let mut values = vec![0.0; nx * ny];
        for (k, &m) in self.map.iter().enumerate() {
            if m != NONE {
                values[k] = u[m as usize];
            }
        }
        ScalarField { values, nx, ny }
    }

    /// Connected-component label per free node (grid adjacency).
    fn component_labels(&self) -> (Vec<u32>, u32) {
        let mut label = vec![NONE; self.n];
        let mut next = 0u32;
        let mut stack = Vec::new();
        for start in 0..self.n {
            if label[start] != NONE {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(k) = stack.pop() {
                for &m in &self.nbr[k] {
                    if m != NONE && label[m as usize] == NONE {
                        label[m as usize] = next;
                        stack.push(m as usize);
                    }
                }
            }
            next += 1;
        }
        (label, next)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `-Δu = 1` with zero boundary values on the free nodes and returns
/// the torsional rigidity `T = h² Σ u` together with the torsion function.
pub fn torsion_solve(g: &GridMask, tol: f64) -> Result<(f64, ScalarField)> {
    let sys = FreeSystem::build(g)?;
    let b = vec![1.0; sys.n];
    let mut u = vec![0.0; sys.n];
    sys.cg(&b, &mut u, tol)?;
    let t = g.h * g.h * u.iter().sum::<f64>();
    Ok((t, sys.scatter(&u, g.nx, g.ny)))
}

/// Smallest Dirichlet eigenvalue by inverse power iteration with conjugate
/// gradient inner solves. The iteration starts from the all-ones vector on
/// free nodes and stops when the relative eigenvalue change drops below
/// `tol`. The returned field has unit discrete L² norm and is nonnegative.
///
/// Disconnected masks are solved component by component and the minimum is
/// returned: the ground state of a connected component is simple, so the
/// per-component iteration cannot stall on a degenerate pair the way a
/// union of near-identical components would.
pub fn eigen_solve(g: &GridMask, tol: f64) -> Result<(f64, ScalarField)> {
    let full = FreeSystem::build(g)?;
    let (labels, ncomp) = full.component_labels();
    if ncomp == 1 {
        let (lambda, u) = inverse_power(&full, g.h, tol)?;
        return Ok((lambda, full.scatter(&u, g.nx, g.ny)));
    }
    let mut best: Option<(f64, FreeSystem, Vec<f64>)> = None;
    for c in 0..ncomp {
        let sub = FreeSystem::build_filtered(g, |k| {
            full.map[k] != NONE && labels[full.map[k] as usize] == c
        })?;
        let (lambda, u) = inverse_power(&sub, g.h, tol)?;
        if best.as_ref().is_none_or(|(l, _, _)| lambda < *l) {
            best = Some((lambda, sub, u));
        }
    }
    let (lambda, sys, u) = best.expect("at least one component");
    Ok((lambda, sys.scatter(&u, g.nx, g.ny)))
}

fn inverse_power(sys: &FreeSystem, h: f64, tol: f64) -> Result<(f64, Vec<f64>)> {
    const INNER_TOL: f64 = 1e-10;
    const MAX_OUTER: usize = 5000;
    let mut u = vec![1.0; sys.n];
    normalize(&mut u, h);
    let mut lambda = rayleigh(sys, &u);
    for _ in 0..MAX_OUTER {
        // Warm start: v ≈ u / λ for a near-converged eigenpair.
        let mut v: Vec<f64> = u.iter().map(|&x| x / lambda).collect();
        sys.cg(&u, &mut v, INNER_TOL)?;
        normalize(&mut v, h);
        if v.iter().sum::<f64>() < 0.0 {
            for x in &mut v {
                *x = -*x;
            }
        }
        let lambda_new = rayleigh(sys, &v);
        let done = (lambda_new - lambda).abs() <= tol * lambda_new.abs();
        u = v;
        lambda = lambda_new;
        if done {
            return Ok((lambda, u));
        }
    }
    Err(Error::SolverDiverged { max_iters: MAX_OUTER, residual: f64::NAN })
}

fn normalize(u: &mut [f64], h: f64) {
    let nrm = h * norm(u);
    for x in u.iter_mut() {
        *x /= nrm;
    }
}

fn rayleigh(sys: &FreeSystem, u: &[f64]) -> f64 {
    let mut au = vec![0.0; sys.n];
    sys.apply(u, &mut au);
    dot(u, &au) / dot(u, u)
}

/// Numeric γ-distance: the L² distance of the torsion functions extended by
/// zero to the common bounding box. Both masks must share the exact same
/// grid geometry.
pub fn gamma_distance(g1: &GridMask, g2: &GridMask) -> Result<f64> {
    const TOL: f64 = 1e-10;
    if !g1.same_geometry(g2) {
        return Err(Error::GridMismatch);
    }
    let (_, u1) = torsion_solve(g1, TOL)?;
    let (_, u2) = torsion_solve(g2, TOL)?;
    let ss: f64 = u1
        .values()
        .iter()
        .zip(u2.values())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(g1.h * ss.sqrt())
}

/// The torsion gap `h² Σ (u_big - u_small)` for nested masks. For nested
/// domains this L¹ distance of the torsion functions equals the torsion
/// difference `T(big) - T(small)`; the identity is verified internally to
/// 1e-8 relative as a solver-consistency check.
pub fn torsion_gap_l1(g_small: &GridMask, g_big: &GridMask) -> Result<f64> {
    const TOL: f64 = 1e-10;
    if !g_small.same_geometry(g_big) {
        return Err(Error::GridMismatch);
    }
    let total = g_small.nx * g_small.ny;
    if (0..total).any(|k| g_small.is_free(k) && !g_big.is_free(k)) {
        return Err(Error::NotNested);
    }
    let (t_small, u_small) = torsion_solve(g_small, TOL)?;
    let (t_big, u_big) = torsion_solve(g_big, TOL)?;
    let h2 = g_small.h * g_small.h;
    let gap: f64 = h2
        * u_big
            .values()
            .iter()
            .zip(u_small.values())
            .map(|(b, s)| b - s)
            .sum::<f64>();
    let direct = t_big - t_small;
    if (gap - direct).abs() > 1e-8 * direct.abs().max(1e-300) && (gap - direct).abs() > 1e-12 {
        return Err(Error::SolverInconsistency(format!(
            "torsion gap {gap} disagrees with T difference {direct}"
        )));
    }
    Ok(gap)
}
