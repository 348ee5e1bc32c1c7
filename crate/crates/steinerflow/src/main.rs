use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use steinerflow::cli;
use steinerflow::config::Config;
use steinerflow::error::Error;
use steinerflow::io;

/// Continuous Steiner symmetrization of polygonal domains and the
/// torsion/eigenvalue diagram.
#[derive(Parser)]
#[command(name = "steinerflow", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct ConfigArgs {
    /// key=value config file; explicit flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Grid nodes across the domain extent for PDE solves
    #[arg(long)]
    grid_resolution: Option<usize>,
    /// Number of horizontal strips
    #[arg(long)]
    strips: Option<usize>,
    /// Number of schedule directions (angles k pi / K)
    #[arg(long)]
    directions: Option<usize>,
    /// Flow time per direction
    #[arg(long)]
    horizon: Option<f64>,
    /// Duration of one wall-shrink interval
    #[arg(long)]
    shrink_duration: Option<f64>,
    #[arg(long)]
    cg_tol: Option<f64>,
    #[arg(long)]
    eig_tol: Option<f64>,
    /// Verification slack for computed diagram points
    #[arg(long)]
    eps_disc: Option<f64>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<Config, Error> {
        let mut cfg = Config::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { cfg.$field = v; })*
            };
        }
        take!(grid_resolution, directions, horizon, shrink_duration, cg_tol, eig_tol, eps_disc);
        if let Some(v) = self.strips {
            cfg.n_strips = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a built-in demo polygon (ushape, two_rects, disk64, lshape)
    Demo {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Steiner-symmetrize a polygon and write the strip CSV
    Symmetrize {
        #[arg(long)]
        input: PathBuf,
        /// Symmetrization direction in radians
        #[arg(long, default_value_t = 0.0)]
        angle: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Run the symmetrization flow and verify monotonicity
    Flow {
        #[arg(long, conflicts_with = "demo")]
        input: Option<PathBuf>,
        /// Use a built-in demo domain instead of a file
        #[arg(long)]
        demo: Option<String>,
        /// Base angle added to every schedule direction
        #[arg(long, default_value_t = 0.0)]
        angle: f64,
        #[arg(long, default_value_t = 40)]
        snapshots: usize,
        /// Disable the wall-shrink modification (the unmodified flow)
        #[arg(long)]
        no_wall_shrink: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Dump the final snapshot's torsion function as a text grid
        #[arg(long)]
        dump_torsion_field: Option<PathBuf>,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Scan every polygon file in a directory into one diagram CSV/SVG
    Diagram {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "diagram.csv")]
        out_csv: PathBuf,
        #[arg(long, default_value = "diagram.svg")]
        out_svg: PathBuf,
        /// Copy counts for the analytic family curves
        #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 5])]
        family_n: Vec<usize>,
        #[arg(long, default_value_t = 16)]
        snapshots: usize,
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Emit the closed-form bound curves as CSV and SVG
    Bounds {
        #[arg(long, default_value_t = 2)]
        dim: u32,
        /// Unit-ball eigenvalue, required for dimensions other than 2 and 3
        #[arg(long)]
        lambda_ball: Option<f64>,
        #[arg(long, default_value_t = 257)]
        samples: usize,
        #[arg(long, default_value = "bounds.csv")]
        out_csv: PathBuf,
        #[arg(long, default_value = "bounds.svg")]
        out_svg: PathBuf,
    },
    /// Re-check a diagram CSV against the closed-form inequalities
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0.03)]
        eps: f64,
    },
}

fn init_threads() {
    if let Ok(v) = std::env::var("STEINERFLOW_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.cmd {
        Cmd::Demo { name, out } => {
            cli::cmd_demo(&name, out.as_deref())?;
            Ok(true)
        }
        Cmd::Symmetrize { input, angle, out, cfg } => {
            let cfg = cfg.resolve()?;
            cli::cmd_symmetrize(&input, angle, out.as_deref(), &cfg)?;
            Ok(true)
        }
        Cmd::Flow {
            input,
            demo,
            angle,
            snapshots,
            no_wall_shrink,
            out,
            dump_torsion_field,
            cfg,
        } => {
            let cfg = cfg.resolve()?;
            let polygon = match (&input, &demo) {
                (Some(path), None) => io::read_polygon(path)?,
                (None, Some(name)) => steinerflow::demo::by_name(name)
                    .ok_or_else(|| Error::UnknownDemo(name.clone()))?,
                _ => {
                    return Err(Error::InvalidArgument(
                        "pass exactly one of --input or --demo".into(),
                    ))
                }
            };
            let opts = cli::FlowOptions {
                base_angle: angle,
                snapshots,
                wall_shrink: !no_wall_shrink,
                out,
                dump_torsion_field,
            };
            cli::cmd_flow(&polygon, &cfg, &opts)
        }
        Cmd::Diagram { corpus, out_csv, out_svg, family_n, snapshots, cfg } => {
            let cfg = cfg.resolve()?;
            cli::cmd_diagram(&corpus, &cfg, &family_n, snapshots, &out_csv, &out_svg)
        }
        Cmd::Bounds { dim, lambda_ball, samples, out_csv, out_svg } => {
            cli::cmd_bounds(dim, lambda_ball, samples, &out_csv, &out_svg)?;
            Ok(true)
        }
        Cmd::Verify { input, eps } => cli::cmd_verify(&input, eps),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_)
                | Error::Parse { .. }
                | Error::UnknownDemo(_)
                | Error::InvalidArgument(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
