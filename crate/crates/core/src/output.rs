//! Output writers: legacy-VTK snapshots, centerline CSV cuts, full-precision
//! restart files and the diagnostics CSV stream.
//!
//! Snapshots store center fields (`alpha1`, `rho1`, `rho2`, `rho`, `u`, `p`)
//! plus the relative velocity resampled to centers, on a structured-points
//! lattice whose points are the cell centers. Restart files carry the exact
//! conserved state (and vertex `w`) with shortest-round-trip formatting, so
//! a resumed run reproduces the uninterrupted one.

use crate::error::SolverError;
use crate::model::ClampStats;
use crate::solver::Simulation;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

/// One named center-lattice scalar, row-major over the interior.
pub struct VtkField {
    pub name: String,
    pub data: Vec<f64>,
}

/// Collects the snapshot fields of a simulation, all at cell centers.
pub fn snapshot_fields(sim: &mut Simulation) -> Vec<VtkField> {
    let (nx, ny) = (sim.grid.nx, sim.grid.ny);
    let n = nx * ny;
    let mut fields: Vec<VtkField> = ["alpha1", "rho1", "rho2", "rho", "ux", "uy", "p", "wx", "wy"]
        .iter()
        .map(|name| VtkField { name: name.to_string(), data: Vec::with_capacity(n) })
        .collect();
    let mut stats = ClampStats::default();
    for j in 0..ny as isize {
        for i in 0..nx as isize {
            let s = sim.state_at(i, j);
            let w = sim.w_at_center(i, j);
            let p = crate::model::primitives_from_conserved(&s, w, &sim.phases, &mut stats);
            let vals = [
                p.alpha1, p.rho1, p.rho2, p.rho, p.u[0], p.u[1], p.p, w[0], w[1],
            ];
            for (f, v) in fields.iter_mut().zip(vals) {
                f.data.push(v);
            }
        }
    }
    fields
}

/// Legacy-VTK structured-points writer; points sit at the cell centers, so
/// the point count in the header equals `nx * ny`.
pub fn write_vtk(
    path: &Path,
    title: &str,
    grid: &crate::grid::StaggeredGrid,
    fields: &[VtkField],
) -> Result<(), SolverError> {
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "{title}");
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET STRUCTURED_POINTS");
    let _ = writeln!(s, "DIMENSIONS {} {} 1", grid.nx, grid.ny);
    let _ = writeln!(s, "ORIGIN {} {} 0", grid.xc(0), grid.yc(0));
    let _ = writeln!(s, "SPACING {} {} 1", grid.dx, grid.dy);
    let _ = writeln!(s, "POINT_DATA {}", grid.nx * grid.ny);
    for f in fields {
        assert_eq!(f.data.len(), grid.nx * grid.ny);
        let _ = writeln!(s, "SCALARS {} double 1", f.name);
        let _ = writeln!(s, "LOOKUP_TABLE default");
        for v in &f.data {
            let _ = writeln!(s, "{v}");
        }
    }
    fs::write(path, s)?;
    Ok(())
}

/// Snapshot geometry and fields read back from a legacy-VTK file.
pub struct VtkData {
    pub nx: usize,
    pub ny: usize,
    pub origin: [f64; 2],
    pub spacing: [f64; 2],
    pub fields: HashMap<String, Vec<f64>>,
}

/// Reader for the snapshot format written by [`write_vtk`].
pub fn read_vtk(path: &Path) -> Result<VtkData, SolverError> {
    let text = fs::read_to_string(path)?;
    let bad = |msg: &str| SolverError::Config(format!("{}: {msg}", path.display()));
    let mut nx = 0usize;
    let mut ny = 0usize;
    let mut origin = [0.0; 2];
    let mut spacing = [0.0; 2];
    let mut fields = HashMap::new();
    let mut lines = text.lines().peekable();
    while let Some(line) = lines.next() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first().copied() {
            Some("DIMENSIONS") => {
                nx = toks[1].parse().map_err(|_| bad("bad DIMENSIONS"))?;
                ny = toks[2].parse().map_err(|_| bad("bad DIMENSIONS"))?;
            }
            Some("ORIGIN") => {
                origin = [
                    toks[1].parse().map_err(|_| bad("bad ORIGIN"))?,
                    toks[2].parse().map_err(|_| bad("bad ORIGIN"))?,
                ];
            }
            Some("SPACING") => {
                spacing = [
                    toks[1].parse().map_err(|_| bad("bad SPACING"))?,
                    toks[2].parse().map_err(|_| bad("bad SPACING"))?,
                ];
            }
            Some("SCALARS") => {
                let name = toks.get(1).ok_or_else(|| bad("SCALARS without name"))?.to_string();
                // skip LOOKUP_TABLE
                lines.next();
                let mut data = Vec::with_capacity(nx * ny);
                while data.len() < nx * ny {
                    let l = lines.next().ok_or_else(|| bad("truncated SCALARS block"))?;
                    for tok in l.split_whitespace() {
                        data.push(tok.parse().map_err(|_| bad("bad scalar value"))?);
                    }
                }
                fields.insert(name, data);
            }
            _ => {}
        }
    }
    if nx == 0 || ny == 0 {
        return Err(bad("missing DIMENSIONS"));
    }
    Ok(VtkData { nx, ny, origin, spacing, fields })
}

/// Writes the centerline cut `y = const` nearest the domain mid-height:
/// `x, alpha1, rho1, rho2, rho, ux, uy, p, wx, wy`.
pub fn write_centerline_csv(path: &Path, sim: &mut Simulation) -> Result<(), SolverError> {
    let (nx, ny) = (sim.grid.nx, sim.grid.ny);
    let j = (ny / 2) as isize;
    let mut s = String::from("x,alpha1,rho1,rho2,rho,ux,uy,p,wx,wy\n");
    let mut stats = ClampStats::default();
    for i in 0..nx as isize {
        let st = sim.state_at(i, j);
        let w = sim.w_at_center(i, j);
        let p = crate::model::primitives_from_conserved(&st, w, &sim.phases, &mut stats);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            sim.grid.xc(i),
            p.alpha1,
            p.rho1,
            p.rho2,
            p.rho,
            p.u[0],
            p.u[1],
            p.p,
            w[0],
            w[1]
        );
    }
    fs::write(path, s)?;
    Ok(())
}

const RESTART_MAGIC: &str = "twophase-restart 1";

/// Full-precision machine state for restarts.
pub fn write_restart(path: &Path, sim: &Simulation) -> Result<(), SolverError> {
    let f = fs::File::create(path)?;
    let mut out = BufWriter::new(f);
    let g = &sim.grid;
    writeln!(out, "{RESTART_MAGIC}")?;
    writeln!(out, "t {}", sim.t)?;
    writeln!(out, "nstep {}", sim.nstep)?;
    writeln!(out, "grid {} {} {} {} {} {}", g.nx, g.ny, g.x0, g.y0, g.lx, g.ly)?;
    writeln!(out, "curl_free {}", if sim.scheme.curl_free { 1 } else { 0 })?;
    for (k, name) in ["alpha1", "m1", "m2", "momx", "momy"].iter().enumerate() {
        writeln!(out, "field {} {}", name, g.nx * g.ny)?;
        for j in 0..g.ny as isize {
            for i in 0..g.nx as isize {
                writeln!(out, "{}", sim.q[k].at(i, j))?;
            }
        }
    }
    if let Some(wc) = &sim.wc {
        for (f, name) in wc.iter().zip(["wcx", "wcy"]) {
            writeln!(out, "field {} {}", name, g.nx * g.ny)?;
            for j in 0..g.ny as isize {
                for i in 0..g.nx as isize {
                    writeln!(out, "{}", f.at(i, j))?;
                }
            }
        }
    } else {
        let nv = (g.nx + 1) * (g.ny + 1);
        for (f, name) in [&sim.w.wx, &sim.w.wy].iter().zip(["wx", "wy"]) {
            writeln!(out, "field {} {}", name, nv)?;
            for j in 0..=g.ny as isize {
                for i in 0..=g.nx as isize {
                    writeln!(out, "{}", f.at(i, j))?;
                }
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Loads a restart file into a freshly built simulation. The grid and mode
/// must match the configuration that produced the file.
pub fn read_restart(path: &Path, sim: &mut Simulation) -> Result<(), SolverError> {
    let text = fs::read_to_string(path)?;
    let bad = |msg: String| SolverError::Config(format!("{}: {msg}", path.display()));
    let mut lines = text.lines();
    if lines.next() != Some(RESTART_MAGIC) {
        return Err(bad("not a restart file".into()));
    }
    let mut t = None;
    let mut nstep = 0u64;
    let mut fields: HashMap<String, Vec<f64>> = HashMap::new();
    while let Some(line) = lines.next() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.first().copied() {
            Some("t") => t = Some(toks[1].parse().map_err(|_| bad("bad t".into()))?),
            Some("nstep") => nstep = toks[1].parse().map_err(|_| bad("bad nstep".into()))?,
            Some("grid") => {
                let nx: usize = toks[1].parse().map_err(|_| bad("bad grid".into()))?;
                let ny: usize = toks[2].parse().map_err(|_| bad("bad grid".into()))?;
                if nx != sim.grid.nx || ny != sim.grid.ny {
                    return Err(bad(format!(
                        "grid mismatch: file has {nx}x{ny}, simulation has {}x{}",
                        sim.grid.nx, sim.grid.ny
                    )));
                }
            }
            Some("curl_free") => {
                let on = toks[1] == "1";
                if on != sim.scheme.curl_free {
                    return Err(bad("curl_free mode mismatch".into()));
                }
            }
            Some("field") => {
                let name = toks[1].to_string();
                let count: usize = toks[2].parse().map_err(|_| bad("bad field count".into()))?;
                let mut data = Vec::with_capacity(count);
                for _ in 0..count {
                    let l = lines.next().ok_or_else(|| bad("truncated field".into()))?;
                    data.push(l.trim().parse().map_err(|_| bad("bad field value".into()))?);
                }
                fields.insert(name, data);
            }
            _ => {}
        }
    }
    let t = t.ok_or_else(|| bad("missing t".into()))?;
    let g = sim.grid;
    for (k, name) in ["alpha1", "m1", "m2", "momx", "momy"].iter().enumerate() {
        let data = fields.remove(*name).ok_or_else(|| bad(format!("missing field {name}")))?;
        let mut it = data.into_iter();
        for j in 0..g.ny as isize {
            for i in 0..g.nx as isize {
                sim.q[k].set(i, j, it.next().unwrap());
            }
        }
    }
    if let Some(wc) = &mut sim.wc {
        for (f, name) in wc.iter_mut().zip(["wcx", "wcy"]) {
            let data = fields.remove(name).ok_or_else(|| bad(format!("missing field {name}")))?;
            let mut it = data.into_iter();
            for j in 0..g.ny as isize {
                for i in 0..g.nx as isize {
                    f.set(i, j, it.next().unwrap());
                }
            }
        }
    } else {
        for (f, name) in [&mut sim.w.wx, &mut sim.w.wy].into_iter().zip(["wx", "wy"]) {
            let data = fields.remove(name).ok_or_else(|| bad(format!("missing field {name}")))?;
            let mut it = data.into_iter();
            for j in 0..=g.ny as isize {
                for i in 0..=g.nx as isize {
                    f.set(i, j, it.next().unwrap());
                }
            }
        }
    }
    sim.t = t;
    sim.nstep = nstep;
    Ok(())
}

/// Appends one row per diagnostics sample:
/// `t, dt, curl_l1, mass1, mass2, momx, momy, energy, floored_cells`.
pub struct DiagWriter {
    out: BufWriter<fs::File>,
}

#[derive(Debug, Clone, Copy)]
pub struct DiagRow {
    pub t: f64,
    pub dt: f64,
    pub curl_l1: f64,
    pub mass1: f64,
    pub mass2: f64,
    pub momx: f64,
    pub momy: f64,
    pub energy: f64,
    pub floored_cells: u64,
}

impl DiagWriter {
    pub fn create(path: &Path) -> Result<Self, SolverError> {
        let f = fs::File::create(path)?;
        let mut out = BufWriter::new(f);
        writeln!(out, "t,dt,curl_l1,mass1,mass2,momx,momy,energy,floored_cells")?;
        Ok(DiagWriter { out })
    }

    pub fn append(&mut self, r: &DiagRow) -> Result<(), SolverError> {
        writeln!(
            self.out,
            "{},{},{},{},{},{},{},{},{}",
            r.t, r.dt, r.curl_l1, r.mass1, r.mass2, r.momx, r.momy, r.energy, r.floored_cells
        )?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<(), SolverError> {
        self.out.flush()?;
        Ok(())
    }
}

/// Writes a 1D reference profile as CSV.
pub fn write_profile_csv(path: &Path, p: &crate::refsol::Profile) -> Result<(), SolverError> {
    let mut s = String::from("x,alpha1,rho1,rho2,rho,u,w\n");
    for i in 0..p.x.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            p.x[i], p.alpha1[i], p.rho1[i], p.rho2[i], p.rho[i], p.u[i], p.w[i]
        );
    }
    fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::CaseKind;
    use crate::config::RunConfig;
    use approx::assert_relative_eq;

    fn tmpdir(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("twophase-test-{name}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn vtk_round_trips_through_own_reader() {
        let mut cfg = RunConfig::for_case(CaseKind::Vortex);
        cfg.nx = 16;
        cfg.ny = 16;
        let mut sim = cfg.build_simulation().unwrap();
        let fields = snapshot_fields(&mut sim);
        let dir = tmpdir("vtk");
        let path = dir.join("snap.vtk");
        write_vtk(&path, "vortex", &sim.grid, &fields).unwrap();
        let back = read_vtk(&path).unwrap();
        assert_eq!((back.nx, back.ny), (16, 16));
        assert_relative_eq!(back.spacing[0], sim.grid.dx, epsilon = 1e-14);
        for f in &fields {
            let data = &back.fields[&f.name];
            for (a, b) in f.data.iter().zip(data) {
                assert_relative_eq!(a, b, epsilon = 0.0); // exact round trip
            }
        }
        // header point count equals the cell count
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains(&format!("POINT_DATA {}", 16 * 16)));
        fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn centerline_matches_state_row() {
        let mut cfg = RunConfig::for_case(CaseKind::Rp1d);
        cfg.nx = 64;
        let mut sim = cfg.build_simulation().unwrap();
        let dir = tmpdir("centerline");
        let path = dir.join("cut.csv");
        write_centerline_csv(&path, &mut sim).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 65);
        // first data row matches cell (0, 0)
        let cols: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
        assert_relative_eq!(cols[0], sim.grid.xc(0), epsilon = 1e-14);
        assert_relative_eq!(cols[1], sim.state_at(0, 0).alpha1, epsilon = 1e-14);
        fs::remove_dir_all(dir).ok();
    }

    use crate::model::N_COMP;

    #[test]
    fn restart_round_trip_is_exact() {
        let mut cfg = RunConfig::for_case(CaseKind::Vortex);
        cfg.nx = 12;
        cfg.ny = 12;
        let mut sim = cfg.build_simulation().unwrap();
        sim.prepare().unwrap();
        let dt = sim.compute_dt().unwrap();
        sim.advance(dt).unwrap();
        let dir = tmpdir("restart");
        let path = dir.join("state.dat");
        write_restart(&path, &sim).unwrap();
        let mut other = cfg.build_simulation().unwrap();
        read_restart(&path, &mut other).unwrap();
        assert_eq!(other.t.to_bits(), sim.t.to_bits());
        for k in 0..N_COMP {
            for j in 0..12 {
                for i in 0..12 {
                    assert_eq!(other.q[k].at(i, j).to_bits(), sim.q[k].at(i, j).to_bits());
                }
            }
        }
        for j in 0..=12 {
            for i in 0..=12 {
                assert_eq!(other.w.wx.at(i, j).to_bits(), sim.w.wx.at(i, j).to_bits());
            }
        }
        fs::remove_dir_all(dir).ok();
    }
}
