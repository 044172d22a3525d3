//! Top-level run loop and the convergence-study driver.
//!
//! A run executes init, then repeats {fill boundaries, CFL time step, center
//! update, vertex update, diagnostics} until the final time, clipping steps
//! to land exactly on output times and on `t_end`. Two runs of the same
//! configuration produce byte-identical diagnostics.

use crate::cases::{self, CaseKind};
use crate::config::RunConfig;
use crate::diag;
use crate::error::SolverError;
use crate::output::{self, DiagRow, DiagWriter};
use crate::solver::Simulation;
use std::fs;
use std::path::{Path, PathBuf};

/// Result of a completed run.
pub struct RunSummary {
    pub steps: u64,
    pub t_final: f64,
    /// Largest curl L1 norm seen over all diagnostics samples.
    pub max_curl_l1: f64,
    pub initial_totals: diag::Totals,
    pub final_totals: diag::Totals,
    pub rows: Vec<DiagRow>,
}

/// Runs a configuration to completion, writing outputs under
/// `cfg.output_dir`. `resume` restores state from a restart file first.
pub fn run(cfg: &RunConfig, resume: Option<&Path>) -> Result<RunSummary, SolverError> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir)?;
    fs::write(cfg.output_dir.join("config_resolved.txt"), cfg.to_text())?;
    let mut sim = cfg.build_simulation()?;
    if let Some(path) = resume {
        output::read_restart(path, &mut sim)?;
    }
    let mut diag_writer = Some(DiagWriter::create(&cfg.output_dir.join("diagnostics.csv"))?);
    let out_dir = Some(cfg.output_dir.clone());
    let summary = run_loop(&mut sim, cfg.t_end, cfg.output_every, cfg.diag_every, out_dir, &mut diag_writer);
    if let Some(mut w) = diag_writer {
        w.flush()?;
    }
    summary
}

/// In-memory variant used by tests and the convergence driver: no files.
pub fn run_in_memory(sim: &mut Simulation, t_end: f64) -> Result<RunSummary, SolverError> {
    run_loop(sim, t_end, None, 1, None, &mut None)
}

fn run_loop(
    sim: &mut Simulation,
    t_end: f64,
    output_every: Option<f64>,
    diag_every: u64,
    out_dir: Option<PathBuf>,
    diag_writer: &mut Option<DiagWriter>,
) -> Result<RunSummary, SolverError> {
    let mut rows = Vec::new();
    let mut max_curl: f64 = 0.0;
    let initial_totals = sim.totals();
    let mut snap_index = 0usize;

    let record = |sim: &mut Simulation,
                      dt: f64,
                      floored: u64,
                      rows: &mut Vec<DiagRow>,
                      max_curl: &mut f64,
                      diag_writer: &mut Option<DiagWriter>|
     -> Result<(), SolverError> {
        let curl = sim.curl_l1();
        *max_curl = max_curl.max(curl);
        let t = sim.totals();
        let row = DiagRow {
            t: sim.t,
            dt,
            curl_l1: curl,
            mass1: t.mass1,
            mass2: t.mass2,
            momx: t.momx,
            momy: t.momy,
            energy: t.energy,
            floored_cells: floored,
        };
        if let Some(w) = diag_writer {
            w.append(&row)?;
        }
        rows.push(row);
        Ok(())
    };

    record(sim, 0.0, 0, &mut rows, &mut max_curl, diag_writer)?;
    if let Some(dir) = &out_dir {
        write_snapshot(sim, dir, snap_index)?;
        snap_index += 1;
    }

    // output times partition the run into segments ending exactly on t_end
    let mut next_output = output_every.map(|dt_out| {
        let mut t = dt_out;
        while t <= sim.t + 1e-13 {
            t += dt_out;
        }
        t
    });

    while sim.t < t_end - 1e-13 * t_end.max(1.0) {
        let stop = match next_output {
            Some(t_out) if t_out < t_end => t_out,
            _ => t_end,
        };
        let mut steps_in_segment = 0u64;
        while sim.t < stop - 1e-13 * stop.max(1.0) {
            let stats = sim.step_to(stop).map_err(|e| flush_on_error(e, sim, &out_dir))?;
            steps_in_segment += 1;
            if sim.nstep % diag_every == 0 || sim.t >= stop - 1e-13 * stop.max(1.0) {
                record(
                    sim,
                    stats.dt,
                    stats.clamps.floored_density,
                    &mut rows,
                    &mut max_curl,
                    diag_writer,
                )?;
            }
        }
        let _ = steps_in_segment;
        if let Some(t_out) = next_output {
            if sim.t >= t_out - 1e-13 * t_out.max(1.0) {
                if let Some(dir) = &out_dir {
                    write_snapshot(sim, dir, snap_index)?;
                    snap_index += 1;
                }
                next_output = Some(t_out + output_every.unwrap());
            }
        }
    }

    if let Some(dir) = &out_dir {
        write_snapshot(sim, dir, snap_index)?;
    }
    let final_totals = sim.totals();
    Ok(RunSummary {
        steps: sim.nstep,
        t_final: sim.t,
        max_curl_l1: max_curl,
        initial_totals,
        final_totals,
        rows,
    })
}

fn flush_on_error(e: SolverError, sim: &mut Simulation, out_dir: &Option<PathBuf>) -> SolverError {
    if let Some(dir) = out_dir {
        let _ = write_snapshot(sim, dir, usize::MAX);
    }
    e
}

fn write_snapshot(sim: &mut Simulation, dir: &Path, index: usize) -> Result<(), SolverError> {
    let tag = if index == usize::MAX { "failed".to_string() } else { format!("{index:04}") };
    let fields = output::snapshot_fields(sim);
    output::write_vtk(
        &dir.join(format!("snap_{tag}.vtk")),
        &format!("t = {}", sim.t),
        &sim.grid,
        &fields,
    )?;
    output::write_centerline_csv(&dir.join(format!("centerline_{tag}.csv")), sim)?;
    output::write_restart(&dir.join(format!("state_{tag}.dat")), sim)?;
    Ok(())
}

/// L2 errors of one vortex run against the exact stationary solution.
#[derive(Debug, Clone, Copy)]
pub struct VortexErrors {
    pub n: usize,
    pub alpha1: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub ux: f64,
    pub uy: f64,
}

/// Runs the vortex case on one mesh and measures L2 errors at `t_end`.
pub fn vortex_errors(cfg: &RunConfig, n: usize) -> Result<VortexErrors, SolverError> {
    let mut cfg = cfg.clone();
    cfg.nx = n;
    cfg.ny = n;
    let mut sim = cfg.build_simulation()?;
    run_in_memory(&mut sim, cfg.t_end)?;
    let mut num = vec![Vec::with_capacity(n * n); 5];
    let mut exact = vec![Vec::with_capacity(n * n); 5];
    let mut stats = crate::model::ClampStats::default();
    for j in 0..n as isize {
        for i in 0..n as isize {
            let s = sim.state_at(i, j);
            let w = sim.w_at_center(i, j);
            let p = crate::model::primitives_from_conserved(&s, w, &sim.phases, &mut stats);
            let e = cases::exact_vortex(sim.grid.xc(i), sim.grid.yc(j));
            for (k, (nv, ev)) in [
                (p.alpha1, e.alpha1),
                (p.rho1, e.rho1),
                (p.rho2, e.rho2),
                (p.u[0], e.u[0]),
                (p.u[1], e.u[1]),
            ]
            .into_iter()
            .enumerate()
            {
                num[k].push(nv);
                exact[k].push(ev);
            }
        }
    }
    let area = sim.grid.cell_area();
    let e = |k: usize| diag::error_norms(&num[k], &exact[k], area).l2;
    Ok(VortexErrors { n, alpha1: e(0), rho1: e(1), rho2: e(2), ux: e(3), uy: e(4) })
}

/// Experimental convergence orders of the vortex case on a mesh ladder.
pub struct ConvTable {
    pub meshes: Vec<usize>,
    pub errors: Vec<VortexErrors>,
    /// Orders per adjacent mesh pair for (alpha1, rho1, rho2, ux, uy).
    pub orders: Vec<[f64; 5]>,
}

pub fn convergence_study(cfg: &RunConfig, meshes: &[usize]) -> Result<ConvTable, SolverError> {
    if cfg.case != CaseKind::Vortex {
        return Err(SolverError::Config(
            "the convergence study measures against the vortex exact solution".into(),
        ));
    }
    if meshes.len() < 2 {
        return Err(SolverError::Config("convergence study needs at least two meshes".into()));
    }
    let mut errors = Vec::new();
    for &n in meshes {
        errors.push(vortex_errors(cfg, n)?);
    }
    let hs: Vec<f64> = meshes.iter().map(|&n| 1.0 / n as f64).collect();
    let per_var = |f: fn(&VortexErrors) -> f64| -> Vec<f64> {
        let errs: Vec<f64> = errors.iter().map(f).collect();
        diag::eoc(&errs, &hs)
    };
    let oa = per_var(|e| e.alpha1);
    let o1 = per_var(|e| e.rho1);
    let o2 = per_var(|e| e.rho2);
    let ox = per_var(|e| e.ux);
    let oy = per_var(|e| e.uy);
    let orders = (0..meshes.len() - 1)
        .map(|k| [oa[k], o1[k], o2[k], ox[k], oy[k]])
        .collect();
    Ok(ConvTable { meshes: meshes.to_vec(), errors, orders })
}

impl ConvTable {
    pub fn format(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let _ = writeln!(s, "{:>6}  {:>10}  {:>10}  {:>10}  {:>10}  {:>10}", "N", "e_alpha1", "e_rho1", "e_rho2", "e_ux", "e_uy");
        for e in &self.errors {
            let _ = writeln!(
                s,
                "{:>6}  {:>10.3e}  {:>10.3e}  {:>10.3e}  {:>10.3e}  {:>10.3e}",
                e.n, e.alpha1, e.rho1, e.rho2, e.ux, e.uy
            );
        }
        let _ = writeln!(s, "{:>6}  {:>10}  {:>10}  {:>10}  {:>10}  {:>10}", "", "O_alpha1", "O_rho1", "O_rho2", "O_ux", "O_uy");
        for o in &self.orders {
            let _ = writeln!(
                s,
                "{:>6}  {:>10.2}  {:>10.2}  {:>10.2}  {:>10.2}  {:>10.2}",
                "", o[0], o[1], o[2], o[3], o[4]
            );
        }
        s
    }
}
