//! Continuous Steiner symmetrization of planar polygonal domains and the
//! torsion/eigenvalue Blaschke-Santaló diagram.
//!
//! The crate is organized around five building blocks:
//!
//! * [`geometry`] — polygons with holes, sections orthogonal to a direction,
//!   and the static Steiner symmetral on a strip decomposition.
//! * [`symflow`] — the one-parameter symmetrization flow: exact per-strip
//!   interval dynamics, merge events, wall detection, the wall-shrink phases
//!   that keep eigenvalue and torsion continuous across merges, and
//!   multi-direction schedules reparametrized to `[0, 1]`.
//! * [`pde`] — five-point Dirichlet Laplacian solvers on rasterized strip
//!   domains: torsion function and rigidity, principal eigenvalue, and the
//!   numeric γ-distance between domains.
//! * [`diagram`] — rescaled (1/eigenvalue, torsion) coordinates, the
//!   closed-form bounds and curve families of the diagram, inequality
//!   verification, and full diagram scans.
//! * [`cli`] — the command-line surface (`symmetrize`, `flow`, `diagram`,
//!   `bounds`, `verify`, `demo`) with deterministic CSV/SVG output.

pub mod cli;
pub mod config;
pub mod demo;
pub mod diagram;
pub mod error;
pub mod geometry;
pub mod io;
pub mod pde;
pub mod symflow;
pub mod synth;

pub use error::{Error, Result};
