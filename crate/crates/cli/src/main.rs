//! `qcarpet`: generate carpets, compute moduli, build extensions, run rigidity checks
//! and plot the results.

mod commands;
mod formats;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qcarpet::rigidity::PipelineOptions;

use commands::{emit, ExtendArgs, GenKind, ModulusInput, PlaneMapArgs, EXIT_OK};

const EXIT_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "qcarpet", version, about = "Numerical toolkit for quasiconformal maps of square carpets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Grid resolution (meaning depends on the command).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Identity tolerance for rigidity verdicts.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Leave the timestamp comment out of SVG output.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, env = "QC_CARPET_THREADS", default_value_t = 0)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a carpet file.
    Gen {
        #[command(subcommand)]
        kind: GenCmd,
    },
    /// Modulus of a product path family over a region.
    Modulus {
        #[arg(long, value_parser = ["vertical", "horizontal", "radial", "circular"])]
        family: String,
        /// Carpet file whose base region is used.
        #[arg(long, group = "input")]
        carpet: Option<PathBuf>,
        /// Rectangle [0, A] × [0, 1].
        #[arg(long, group = "input")]
        rect: Option<f64>,
        /// Annulus 1 ≤ |z| ≤ R in log coordinates.
        #[arg(long, group = "input")]
        annulus: Option<f64>,
        /// Also write the extremal density as an SVG heatmap.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Extend a circle map (or a twisted carpet rotation) and sample it on a grid.
    Extend {
        #[arg(long, value_parser = ["ba", "periodic-annulus", "tower", "carpet"])]
        mode: String,
        /// Circle map CSV with columns angle,image.
        #[arg(long)]
        map: Option<PathBuf>,
        /// Carpet file for mode carpet.
        #[arg(long)]
        carpet: Option<PathBuf>,
        /// Period.
        #[arg(long)]
        k: Option<usize>,
        /// Inner radius of the annulus.
        #[arg(long, default_value_t = 0.5)]
        r: f64,
        /// Tower depth; chosen from the grid spacing when omitted.
        #[arg(long)]
        depth: Option<usize>,
        /// Twist amplitude applied to the holes in mode carpet.
        #[arg(long, default_value_t = 0.1)]
        twist: f64,
        /// Where to write the residual manifest; stdout when omitted.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Run a rigidity pipeline on a sampled carpet map.
    Rigidity {
        #[arg(long)]
        carpet: PathBuf,
        /// Plane map JSON.
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value = "auto", value_parser = ["auto", "carpet", "square", "cstar"])]
        pipeline: String,
        /// Claimed period for the carpet pipeline.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Tolerance for the hypothesis checks.
        #[arg(long)]
        hypothesis_tol: Option<f64>,
    },
    /// Render a carpet, modulus, manifest or plane map file as SVG.
    Plot {
        #[arg(long)]
        input: PathBuf,
    },
    /// Write sample circle or plane maps.
    Map {
        #[command(subcommand)]
        kind: MapCmd,
    },
}

#[derive(Subcommand)]
enum GenCmd {
    /// Standard Sierpiński carpet.
    Sierpinski {
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Unit square with five congruent holes.
    FourFold,
    /// Square carpet in [0, A] × [0, 1].
    Rect {
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Square carpet in the rectangle ring [0, A] × [0, 1] minus K.
    Ring {
        #[arg(long)]
        a: f64,
        /// Distinguished hole as s,w,t,h.
        #[arg(long = "K", alias = "k", value_delimiter = ',', allow_negative_numbers = true)]
        k: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// C*-square carpet in the annulus 1 ≤ |z| ≤ R.
    Cstar {
        #[arg(long)]
        r: f64,
        /// Distinguished hole as s,w,t,h in log coordinates.
        #[arg(long = "K", alias = "k", value_delimiter = ',', allow_negative_numbers = true)]
        k: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        #[arg(long, default_value_t = 8)]
        divisions: usize,
        #[arg(long, default_value_t = 1)]
        symmetry: usize,
    },
}

#[derive(Subcommand)]
enum MapCmd {
    /// Circle map CSV.
    Circle {
        #[arg(long, value_parser = ["identity", "rotation", "conjugated", "wobble"])]
        kind: String,
        /// Rotation order for rotation and conjugated.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Plane map JSON.
    Plane {
        #[arg(long, value_parser = ["identity", "rotation", "quarter-turn", "noise", "slide"])]
        kind: String,
        /// Sampling window x0,x1,y0,y1.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0,1,0,1")]
        window: Vec<f64>,
        /// Nodes along the longer side.
        #[arg(long, default_value_t = 129)]
        nodes: usize,
        /// Rotation angle in radians.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        angle: f64,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true, default_value = "0.5,0.5")]
        center: Vec<f64>,
        /// Amplitude for noise and slide.
        #[arg(long, default_value_t = 1e-3)]
        amplitude: f64,
    },
}

fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    rayon::ThreadPoolBuilder::new()
        .num_threads(g.threads)
        .build_global()
        .context("configuring the thread pool")?;
    let out = g.out.as_deref();
    let timestamp = !g.no_timestamp;
    match &cli.command {
        Command::Gen { kind } => {
            let (kind, depth) = match kind {
                GenCmd::Sierpinski { depth } => (GenKind::Sierpinski, *depth),
                GenCmd::FourFold => (GenKind::FourFold, 1),
                GenCmd::Rect { a, depth } => (GenKind::Rect { a: *a }, *depth),
                GenCmd::Ring { a, k, depth } => (GenKind::Ring { a: *a, k }, *depth),
                GenCmd::Cstar { r, k, depth, divisions, symmetry } => (
                    GenKind::Cstar { r: *r, k, divisions: *divisions, symmetry: *symmetry },
                    *depth,
                ),
            };
            emit(&commands::gen(kind, depth)?, out)?;
        }
        Command::Modulus { family, carpet, rect, annulus, svg } => {
            let input = match (carpet, rect, annulus) {
                (Some(p), _, _) => ModulusInput::Carpet(p),
                (_, Some(a), _) => ModulusInput::Rect(*a),
                (_, _, Some(r)) => ModulusInput::Annulus(*r),
                _ => anyhow::bail!("one of --carpet, --rect or --annulus is required"),
            };
            let json = commands::modulus_cmd(family, input, g.grid.unwrap_or(32), svg.as_deref(), timestamp)?;
            emit(&json, out)?;
        }
        Command::Extend { mode, map, carpet, k, r, depth, twist, manifest } => {
            let (plane, man) = commands::extend(&ExtendArgs {
                mode,
                map: map.as_deref(),
                carpet: carpet.as_deref(),
                k: *k,
                r: *r,
                depth: *depth,
                twist: *twist,
                grid: g.grid.unwrap_or(129),
            })?;
            match out {
                Some(p) => emit(&plane, Some(p))?,
                None if manifest.is_none() => anyhow::bail!("--out or --manifest is required"),
                None => emit(&plane, None)?,
            }
            emit(&man, manifest.as_deref())?;
        }
        Command::Rigidity { carpet, map, pipeline, k, hypothesis_tol } => {
            let mut opts = PipelineOptions::default();
            if let Some(t) = g.tol {
                opts.tol = t;
            }
            if let Some(t) = hypothesis_tol {
                opts.hypothesis_tol = *t;
            }
            if let Some(n) = g.grid {
                opts.grid = n;
            }
            let (json, code) = commands::rigidity(carpet, map, pipeline, *k, &opts)?;
            emit(&json, out)?;
            return Ok(code);
        }
        Command::Plot { input } => emit(&commands::plot(input, timestamp)?, out)?,
        Command::Map { kind } => {
            let text = match kind {
                MapCmd::Circle { kind, k, samples } => commands::circle_map(kind, *k, *samples)?,
                MapCmd::Plane { kind, window, nodes, angle, center, amplitude } => {
                    commands::plane_map(&PlaneMapArgs {
                        kind,
                        window,
                        nodes: *nodes,
                        angle: *angle,
                        center,
                        amplitude: *amplitude,
                    })?
                }
            };
            emit(&text, out)?;
        }
    }
    Ok(EXIT_OK)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { EXIT_OK });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
