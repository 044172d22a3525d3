//! Command-line entry point: `run` executes a configured case, `reference`
//! produces 1D reference profiles, `converge` runs the vortex mesh ladder.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use twophase::config::RunConfig;
use twophase::error::SolverError;
use twophase::{driver, output, refsol};

#[derive(Parser)]
#[command(name = "twophase", about = "Curl-free finite volume solver for barotropic two-phase flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured case to its final time.
    Run {
        /// Config file (flat key = value text; needs at least `case = ...`).
        #[arg(long)]
        config: PathBuf,
        /// Override config keys, e.g. --override nx=256.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Resume from a restart file written by a previous run.
        #[arg(long)]
        resume: Option<PathBuf>,
    },
    /// Compute a 1D reference profile (planar Riemann problem or radial
    /// explosion) and write it as CSV.
    Reference {
        /// rp1d (planar) or explosion (radial).
        #[arg(long, default_value = "rp1d")]
        case: String,
        /// Force the radial geometry on or off (defaults to the case).
        #[arg(long)]
        radial: Option<String>,
        /// Cell count.
        #[arg(long, default_value_t = 24000)]
        n: usize,
        #[arg(long)]
        t_end: Option<f64>,
        #[arg(long)]
        cfl: Option<f64>,
        /// Output CSV path.
        #[arg(long, default_value = "reference.csv")]
        out: PathBuf,
    },
    /// Vortex convergence study over a mesh ladder.
    Converge {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated mesh sizes, e.g. 64,128,256.
        #[arg(long, default_value = "64,128,256")]
        meshes: String,
    },
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch() -> Result<(), SolverError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, overrides, resume } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = RunConfig::from_text(&text)?;
            for ov in &overrides {
                let (k, v) = ov.split_once('=').ok_or_else(|| {
                    SolverError::Config(format!("override '{ov}' is not KEY=VALUE"))
                })?;
                cfg.apply_override(k.trim(), v.trim())?;
            }
            cfg.validate()?;
            if let Some(workers) = cfg.workers {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build_global()
                    .map_err(|e| SolverError::Config(format!("worker pool: {e}")))?;
            }
            let summary = driver::run(&cfg, resume.as_deref())?;
            println!(
                "done: case {} to t = {} in {} steps, max curl L1 = {:.3e}",
                cfg.case.name(),
                summary.t_final,
                summary.steps,
                summary.max_curl_l1
            );
            println!("outputs in {}", cfg.output_dir.display());
            Ok(())
        }
        Command::Reference { case, radial, n, t_end, cfl, out } => {
            let mut setup = match case.as_str() {
                "rp1d" => refsol::rp1d_reference(),
                "explosion" => refsol::explosion_radial_reference(),
                other => {
                    return Err(SolverError::Config(format!(
                        "unknown reference case '{other}' (expected rp1d|explosion)"
                    )))
                }
            };
            if let Some(r) = radial {
                setup.geometry = match r.as_str() {
                    "on" => refsol::Geometry::Cylindrical,
                    "off" => refsol::Geometry::Planar,
                    other => {
                        return Err(SolverError::Config(format!(
                            "--radial expects on|off, got '{other}'"
                        )))
                    }
                };
            }
            if let Some(t) = t_end {
                setup.t_end = t;
            }
            if let Some(c) = cfl {
                setup.cfl = c;
            }
            let profile = refsol::solve(&setup, n)?;
            output::write_profile_csv(&out, &profile)?;
            println!("reference profile ({} cells) written to {}", n, out.display());
            Ok(())
        }
        Command::Converge { config, meshes } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = RunConfig::from_text(&text)?;
            let meshes: Result<Vec<usize>, _> =
                meshes.split(',').map(|t| t.trim().parse::<usize>()).collect();
            let meshes =
                meshes.map_err(|_| SolverError::Config("bad --meshes list".to_string()))?;
            let table = driver::convergence_study(&cfg, &meshes)?;
            print!("{}", table.format());
            Ok(())
        }
    }
}
