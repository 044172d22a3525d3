//! Run orchestration: state containers, the per-step pipeline, CFL control
//! and the time loop.
//!
//! With `curl_free` on (the default), centers advance with the MUSCL-Hancock
//! corrector and the vertex relative velocity with the compatible update;
//! both read time-n data only. With `curl_free` off, `w` moves to cell
//! centers and the whole 7-component system is advanced with the same
//! MUSCL-Hancock machinery and central non-conservative terms, which does
//! not preserve the curl constraint - the reference foil for the
//! structure-preserving scheme.

use crate::boundary::{self, BcSpec, WallSym};
use crate::diag;
use crate::error::SolverError;
use crate::grid::{center_from_vertices, vertex_from_centers, Field, StaggeredGrid, VertexVel, GHOST};
use crate::model::{self, CenterState, ClampStats, PhasePair, Primitives, N_COMP};
use crate::muscl::{self, Pad, PredCell, Slopes};
use crate::ops;
use crate::wsolver;
use rayon::prelude::*;

const G: isize = GHOST as isize;

/// Wall-mirror symmetry of each conserved component.
pub const CONS_SYMS: [WallSym; N_COMP] =
    [WallSym::Scalar, WallSym::Scalar, WallSym::Scalar, WallSym::VecX, WallSym::VecY];

/// Scheme controls beyond the grid and boundary conditions.
#[derive(Debug, Clone, Copy)]
pub struct SchemeParams {
    pub cfl: f64,
    /// Structure-preserving vertex update (on) or naive collocated w (off).
    pub curl_free: bool,
    /// Drop slopes and the half-step predictor (first-order scheme).
    pub first_order: bool,
    pub gravity: [f64; 2],
}

impl Default for SchemeParams {
    fn default() -> Self {
        SchemeParams { cfl: 0.25, curl_free: true, first_order: false, gravity: [0.0, 0.0] }
    }
}

/// Pointwise initial state in primitive phase variables.
#[derive(Debug, Clone, Copy)]
pub struct PointState {
    pub alpha1: f64,
    pub rho1: f64,
    pub rho2: f64,
    /// Mixture velocity.
    pub u: [f64; 2],
    /// Relative velocity `u1 - u2`.
    pub w: [f64; 2],
}

impl PointState {
    pub fn conserved(&self) -> CenterState {
        let m1 = self.alpha1 * self.rho1;
        let m2 = (1.0 - self.alpha1) * self.rho2;
        let rho = m1 + m2;
        CenterState { alpha1: self.alpha1, m1, m2, mom: [rho * self.u[0], rho * self.u[1]] }
    }
}

/// Outcome counters of one step.
#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub dt: f64,
    pub c_h: f64,
    pub predictor_fallbacks: u64,
    pub clamps: ClampStats,
}

struct Workspace {
    prims: Vec<Primitives>,
    wcx: Field,
    wcy: Field,
    g_pot: Field,
    div_v: Field,
    div_c: Field,
    curl_c: Field,
    slopes: Vec<Slopes>,
    pred: Vec<PredCell>,
    fvx: Vec<[f64; N_COMP]>,
    fvy: Vec<[f64; N_COMP]>,
    flux_x: Vec<[f64; N_COMP]>,
    jump_x: Vec<f64>,
    flux_y: Vec<[f64; N_COMP]>,
    jump_y: Vec<f64>,
    off: Option<off::OffWorkspace>,
}

impl Workspace {
    fn new(grid: &StaggeredGrid, curl_free: bool) -> Self {
        let pad = Pad::centers(grid);
        let vpad = Pad::vertices(grid);
        let ncells = pad.len(grid.ny);
        let nverts = vpad.len(grid.ny + 1);
        Workspace {
            prims: vec![Primitives::default(); ncells],
            wcx: Field::centers(grid),
            wcy: Field::centers(grid),
            g_pot: Field::centers(grid),
            div_v: Field::vertices(grid),
            div_c: Field::centers(grid),
            curl_c: Field::centers(grid),
            slopes: vec![Slopes::default(); ncells],
            pred: vec![PredCell::default(); ncells],
            fvx: vec![[0.0; N_COMP]; nverts],
            fvy: vec![[0.0; N_COMP]; nverts],
            flux_x: vec![[0.0; N_COMP]; (grid.nx + 1) * grid.ny],
            jump_x: vec![0.0; (grid.nx + 1) * grid.ny],
            flux_y: vec![[0.0; N_COMP]; grid.nx * (grid.ny + 1)],
            jump_y: vec![0.0; grid.nx * (grid.ny + 1)],
            off: if curl_free { None } else { Some(off::OffWorkspace::new(grid)) },
        }
    }
}

pub struct Simulation {
    pub grid: StaggeredGrid,
    pub phases: PhasePair,
    pub bc: BcSpec,
    pub scheme: SchemeParams,
    /// Conserved fields `(alpha1, m1, m2, mom_x, mom_y)`.
    pub q: [Field; N_COMP],
    /// Vertex relative velocity (curl-free mode).
    pub w: VertexVel,
    /// Center relative velocity (collocated mode only).
    pub wc: Option<[Field; 2]>,
    pub t: f64,
    pub nstep: u64,
    pub total_fallbacks: u64,
    pub total_clamps: ClampStats,
    ws: Workspace,
    smax_x: f64,
    smax_y: f64,
    prepared: bool,
}

impl Simulation {
    pub fn new(
        grid: StaggeredGrid,
        phases: PhasePair,
        bc: BcSpec,
        scheme: SchemeParams,
    ) -> Result<Self, SolverError> {
        bc.validate()?;
        phases.eos1.validate()?;
        phases.eos2.validate()?;
        if !(scheme.cfl > 0.0 && scheme.cfl <= 1.0) {
            return Err(SolverError::Config(format!("cfl must be in (0, 1], got {}", scheme.cfl)));
        }
        let ws = Workspace::new(&grid, scheme.curl_free);
        let mut q = [
            Field::centers(&grid),
            Field::centers(&grid),
            Field::centers(&grid),
            Field::centers(&grid),
            Field::centers(&grid),
        ];
        for f in &mut q {
            f.fill(0.0);
        }
        let wc = if scheme.curl_free {
            None
        } else {
            let mut a = Field::centers(&grid);
            let mut b = Field::centers(&grid);
            a.fill(0.0);
            b.fill(0.0);
            Some([a, b])
        };
        Ok(Simulation {
            w: VertexVel::zeros(&grid),
            grid,
            phases,
            bc,
            scheme,
            q,
            wc,
            t: 0.0,
            nstep: 0,
            total_fallbacks: 0,
            total_clamps: ClampStats::default(),
            ws,
            smax_x: 0.0,
            smax_y: 0.0,
            prepared: false,
        })
    }

    /// Fills interior data by sampling `f` at cell centers (conserved
    /// variables) and at vertices (relative velocity).
    pub fn init_with(&mut self, f: impl Fn(f64, f64) -> PointState + Sync) {
        let grid = self.grid;
        for (k, field) in self.q.iter_mut().enumerate() {
            field.compute_ring(0, |p, q| {
                let s = f(grid.xc(p), grid.yc(q)).conserved().to_array();
                s[k]
            });
        }
        if let Some(wc) = &mut self.wc {
            wc[0].compute_ring(0, |p, q| f(grid.xc(p), grid.yc(q)).w[0]);
            wc[1].compute_ring(0, |p, q| f(grid.xc(p), grid.yc(q)).w[1]);
        } else {
            self.w.wx.compute_ring(0, |i, j| f(grid.xv(i), grid.yv(j)).w[0]);
            self.w.wy.compute_ring(0, |i, j| f(grid.xv(i), grid.yv(j)).w[1]);
        }
        self.prepared = false;
    }

    /// Replaces the vertex relative velocity with the corner gradient of a
    /// potential sampled at cell centers, which is discretely curl-free by
    /// construction.
    pub fn init_w_from_potential(&mut self, psi: impl Fn(f64, f64) -> f64 + Sync) {
        assert!(self.scheme.curl_free, "potential init applies to the vertex-based scheme");
        let grid = self.grid;
        let mut pot = Field::centers(&grid);
        pot.compute_ring(0, |p, q| psi(grid.xc(p), grid.yc(q)));
        boundary::fill_center(&mut pot, &self.bc, WallSym::Scalar);
        ops::corner_gradient(&grid, &pot, &mut self.w.wx, &mut self.w.wy, 0);
        self.prepared = false;
    }

    /// Ghost fills plus the time-n derived fields (primitives, interpolated
    /// w, divergence) and the directional wave-speed maxima.
    pub fn prepare(&mut self) -> Result<(), SolverError> {
        for (f, sym) in self.q.iter_mut().zip(CONS_SYMS) {
            boundary::fill_center(f, &self.bc, sym);
        }
        if let Some(wc) = &mut self.wc {
            boundary::fill_center(&mut wc[0], &self.bc, WallSym::VecX);
            boundary::fill_center(&mut wc[1], &self.bc, WallSym::VecY);
            let [a, b] = wc;
            self.ws.wcx.compute_ring(GHOST, |i, j| a.at(i, j));
            self.ws.wcy.compute_ring(GHOST, |i, j| b.at(i, j));
        } else {
            boundary::fill_vertex_vel(&mut self.w, &self.bc);
            // fills wcx/wcy at ring 2 on the way to the vertex divergence
            ops::vertex_divergence(
                &self.grid,
                &self.w.wx,
                &self.w.wy,
                &mut self.ws.wcx,
                &mut self.ws.wcy,
                &mut self.ws.div_v,
                1,
            );
        }
        self.build_prims()?;
        self.prepared = true;
        Ok(())
    }

    fn build_prims(&mut self) -> Result<(), SolverError> {
        let grid = self.grid;
        let (nx, ny) = (grid.nx as isize, grid.ny as isize);
        let pad = Pad::centers(&grid);
        let q = &self.q;
        let wcx = &self.ws.wcx;
        let wcy = &self.ws.wcy;
        let phases = self.phases;
        let results: Vec<(Option<(isize, isize)>, f64, f64, ClampStats)> = self
            .ws
            .prims
            .par_chunks_mut(pad.stride)
            .enumerate()
            .map(|(row, chunk)| {
                let j = row as isize - G;
                let mut bad = None;
                let mut sx: f64 = 0.0;
                let mut sy: f64 = 0.0;
                let mut stats = ClampStats::default();
                if !(-1..ny + 1).contains(&j) {
                    return (bad, sx, sy, stats);
                }
                for i in -1..nx + 1 {
                    let s = CenterState {
                        alpha1: q[0].at(i, j),
                        m1: q[1].at(i, j),
                        m2: q[2].at(i, j),
                        mom: [q[3].at(i, j), q[4].at(i, j)],
                    };
                    let wv = [wcx.at(i, j), wcy.at(i, j)];
                    if !s.is_finite() || !wv[0].is_finite() || !wv[1].is_finite() {
                        bad = bad.or(Some((i, j)));
                        continue;
                    }
                    let interior = (0..nx).contains(&i) && (0..ny).contains(&j);
                    let mut local = ClampStats::default();
                    let p = model::primitives_from_conserved(&s, wv, &phases, &mut local);
                    if interior {
                        stats.merge(local);
                        sx = sx.max(model::max_signal_speed(&p, 0));
                        sy = sy.max(model::max_signal_speed(&p, 1));
                    }
                    chunk[(i + G) as usize] = p;
                }
                (bad, sx, sy, stats)
            })
            .collect();
        let mut bad = None;
        let (mut sx, mut sy) = (0.0f64, 0.0f64);
        let mut stats = ClampStats::default();
        for (b, rx, ry, st) in results {
            bad = bad.or(b);
            sx = sx.max(rx);
            sy = sy.max(ry);
            stats.merge(st);
        }
        if let Some(cell) = bad {
            return Err(SolverError::numerical("non-finite state", Some(cell), self.t));
        }
        self.smax_x = sx;
        self.smax_y = sy;
        self.total_clamps.merge(stats);
        Ok(())
    }

    /// Global signal-speed bound used for the CFL condition and as the
    /// viscosity constant of the vertex update.
    pub fn c_h(&self) -> f64 {
        self.smax_x.max(self.smax_y)
    }

    /// `dt = cfl * min(dx/smax_x, dy/smax_y)` from the prepared state.
    pub fn compute_dt(&self) -> Result<f64, SolverError> {
        assert!(self.prepared, "compute_dt needs a prepared state");
        if !(self.smax_x.is_finite() && self.smax_y.is_finite()) {
            return Err(SolverError::numerical("non-finite wave speed", None, self.t));
        }
        let s = self.smax_x.max(self.smax_y);
        if s <= 0.0 {
            // quiescent identical phases: no waves at all
            return Ok(f64::INFINITY);
        }
        let dt = self.scheme.cfl * (self.grid.dx / self.smax_x.max(1e-300))
            .min(self.grid.dy / self.smax_y.max(1e-300));
        if !dt.is_finite() || dt < 1e-14 {
            return Err(SolverError::numerical(
                format!("time step collapsed (dt = {dt:.3e}, smax = {s:.3e})"),
                None,
                self.t,
            ));
        }
        Ok(dt)
    }

    /// One explicit step of size `dt` from prepared time-n data.
    pub fn advance(&mut self, dt: f64) -> Result<StepStats, SolverError> {
        assert!(self.prepared, "advance needs a prepared state");
        let stats = if self.scheme.curl_free { self.advance_staggered(dt)? } else { self.advance_collocated(dt)? };
        self.t += dt;
        self.nstep += 1;
        self.total_fallbacks += stats.predictor_fallbacks;
        self.total_clamps.merge(stats.clamps);
        self.prepared = false;
        Ok(stats)
    }

    fn advance_staggered(&mut self, dt: f64) -> Result<StepStats, SolverError> {
        let grid = self.grid;
        let c_h = self.c_h();
        let ws = &mut self.ws;

        // derived center fields for the vertex update, all from time n
        wsolver::build_g(&grid, &ws.prims, &mut ws.g_pot);
        boundary::fill_center(&mut ws.g_pot, &self.bc, WallSym::Scalar);
        center_from_vertices(&ws.div_v, &mut ws.div_c, 1);
        ops::center_curl(&grid, &self.w.wx, &self.w.wy, &mut ws.curl_c, 1);

        // vertex fluxes F^v from interpolated state + native w
        build_vertex_fluxes(&grid, &self.phases, &self.q, &self.w, &mut ws.fvx, &mut ws.fvy);

        let pred_dt = if self.scheme.first_order { 0.0 } else { dt };
        if self.scheme.first_order {
            ws.slopes.iter_mut().for_each(|s| *s = Slopes::default());
        } else {
            muscl::compute_slopes(&grid, &self.q, &mut ws.slopes);
        }
        let fallbacks = muscl::compute_predictor(
            &grid,
            &self.phases,
            self.scheme.gravity,
            pred_dt,
            &self.q,
            &ws.prims,
            &mut ws.slopes,
            &ws.fvx,
            &ws.fvy,
            &mut ws.pred,
        );
        muscl::compute_fluxes(
            &grid,
            &self.phases,
            &self.bc,
            &ws.pred,
            &ws.fvx,
            &ws.fvy,
            &self.w.wx,
            &self.w.wy,
            &mut ws.flux_x,
            &mut ws.jump_x,
            &mut ws.flux_y,
            &mut ws.jump_y,
        )
        .map_err(|e| at_time(e, self.t))?;
        let clamps = muscl::update_cells(
            &grid,
            self.scheme.gravity,
            dt,
            &ws.slopes,
            &ws.pred,
            &ws.flux_x,
            &ws.jump_x,
            &ws.flux_y,
            &ws.jump_y,
            &mut self.q,
        );

        let inputs = wsolver::VertexUpdateInputs {
            g_pot: &ws.g_pot,
            div_c: &ws.div_c,
            curl_c: &ws.curl_c,
            wcx: &ws.wcx,
            wcy: &ws.wcy,
            prims: &ws.prims,
            c_h,
        };
        wsolver::update_vertices(&grid, dt, &inputs, &mut self.w);

        Ok(StepStats { dt, c_h, predictor_fallbacks: fallbacks, clamps })
    }

    fn advance_collocated(&mut self, dt: f64) -> Result<StepStats, SolverError> {
        off::advance(self, dt)
    }

    /// Prepared-state convenience: `prepare`, clip `dt` to land exactly on
    /// `t_stop`, advance.
    pub fn step_to(&mut self, t_stop: f64) -> Result<StepStats, SolverError> {
        self.prepare()?;
        let mut dt = self.compute_dt()?;
        let remaining = t_stop - self.t;
        let lands = dt >= remaining * (1.0 - 1e-12);
        if lands {
            dt = remaining;
        }
        if !(dt > 0.0) || dt < 1e-14 {
            return Err(SolverError::numerical(
                format!("no time left to step (dt = {dt:.3e})"),
                None,
                self.t,
            ));
        }
        let stats = self.advance(dt)?;
        if lands {
            self.t = t_stop;
        }
        Ok(stats)
    }

    /// Runs until `t_end`, calling `on_step` after every step.
    pub fn run_until(
        &mut self,
        t_end: f64,
        mut on_step: impl FnMut(&mut Simulation, &StepStats) -> Result<(), SolverError>,
    ) -> Result<(), SolverError> {
        while self.t < t_end - 1e-13 * t_end.max(1.0) {
            let stats = self.step_to(t_end)?;
            on_step(self, &stats)?;
        }
        Ok(())
    }

    /// Area-weighted L1 curl error of the current relative velocity.
    pub fn curl_l1(&mut self) -> f64 {
        if let Some(wc) = &mut self.wc {
            boundary::fill_center(&mut wc[0], &self.bc, WallSym::VecX);
            boundary::fill_center(&mut wc[1], &self.bc, WallSym::VecY);
            diag::curl_error_l1_centered(&self.grid, &wc[0], &wc[1])
        } else {
            diag::curl_error_l1(&self.grid, &self.w)
        }
    }

    /// Conserved totals (with total energy) of the current state.
    pub fn totals(&mut self) -> diag::Totals {
        if let Some(wc) = &self.wc {
            self.ws.wcx.compute_ring(0, |i, j| wc[0].at(i, j));
            self.ws.wcy.compute_ring(0, |i, j| wc[1].at(i, j));
        } else {
            center_from_vertices(&self.w.wx, &mut self.ws.wcx, 0);
            center_from_vertices(&self.w.wy, &mut self.ws.wcy, 0);
        }
        diag::conservation_totals(&self.grid, &self.q, &self.ws.wcx, &self.ws.wcy, &self.phases)
    }

    /// Center state at one interior cell.
    pub fn state_at(&self, i: isize, j: isize) -> CenterState {
        CenterState {
            alpha1: self.q[0].at(i, j),
            m1: self.q[1].at(i, j),
            m2: self.q[2].at(i, j),
            mom: [self.q[3].at(i, j), self.q[4].at(i, j)],
        }
    }

    /// Relative velocity resampled at one interior cell center.
    pub fn w_at_center(&self, i: isize, j: isize) -> [f64; 2] {
        if let Some(wc) = &self.wc {
            [wc[0].at(i, j), wc[1].at(i, j)]
        } else {
            let m = |f: &Field| {
                0.25 * (f.at(i, j) + f.at(i + 1, j) + f.at(i, j + 1) + f.at(i + 1, j + 1))
            };
            [m(&self.w.wx), m(&self.w.wy)]
        }
    }
}

fn at_time(e: SolverError, t: f64) -> SolverError {
    match e {
        SolverError::Numerical { what, cell, .. } => SolverError::Numerical { what, cell, t },
        other => other,
    }
}

/// Evaluates `F^v` at every vertex of the interior plus a one-vertex ring,
/// interpolating the conserved state to vertices and pairing it with the
/// native vertex `w`.
fn build_vertex_fluxes(
    grid: &StaggeredGrid,
    phases: &PhasePair,
    q: &[Field; N_COMP],
    w: &VertexVel,
    fvx: &mut [[f64; N_COMP]],
    fvy: &mut [[f64; N_COMP]],
) {
    let (nxv, nyv) = (grid.nx as isize + 1, grid.ny as isize + 1);
    let vpad = Pad::vertices(grid);
    fvx.par_chunks_mut(vpad.stride)
        .zip(fvy.par_chunks_mut(vpad.stride))
        .enumerate()
        .for_each(|(row, (rx, ry))| {
            let j = row as isize - G;
            if !(-1..nyv + 1).contains(&j) {
                return;
            }
            for i in -1..nxv + 1 {
                let avg = |f: &Field| {
                    0.25 * (f.at(i - 1, j - 1) + f.at(i, j - 1) + f.at(i - 1, j) + f.at(i, j))
                };
                let s = CenterState {
                    alpha1: avg(&q[0]),
                    m1: avg(&q[1]),
                    m2: avg(&q[2]),
                    mom: [avg(&q[3]), avg(&q[4])],
                };
                let wv = [w.wx.at(i, j), w.wy.at(i, j)];
                let mut local = ClampStats::default();
                let p = model::primitives_from_conserved(&s, wv, phases, &mut local);
                let ix = (i + G) as usize;
                rx[ix] = model::flux_v(&p, 0);
                ry[ix] = model::flux_v(&p, 1);
            }
        });
}

/// Collocated (non-structure-preserving) variant: `w` lives at cell centers
/// as components 5 and 6 of the state and is advanced by the same
/// MUSCL-Hancock machinery with central gradient and rotation terms.
mod off {
    use super::*;

    pub const NOFF: usize = 7;

    #[derive(Debug, Clone, Copy, Default)]
    pub struct Slopes7 {
        pub sx: [f64; NOFF],
        pub sy: [f64; NOFF],
    }

    #[derive(Debug, Clone, Copy, Default)]
    pub struct Pred7 {
        pub east: [f64; NOFF],
        pub west: [f64; NOFF],
        pub north: [f64; NOFF],
        pub south: [f64; NOFF],
        pub mid: [f64; NOFF],
    }

    pub struct OffWorkspace {
        slopes: Vec<Slopes7>,
        pred: Vec<Pred7>,
        flux_x: Vec<[f64; NOFF]>,
        gx_face: Vec<f64>,
        jump_x: Vec<f64>,
        flux_y: Vec<[f64; NOFF]>,
        gy_face: Vec<f64>,
        jump_y: Vec<f64>,
    }

    impl OffWorkspace {
        pub fn new(grid: &StaggeredGrid) -> Self {
            let pad = Pad::centers(grid);
            let ncells = pad.len(grid.ny);
            OffWorkspace {
                slopes: vec![Slopes7::default(); ncells],
                pred: vec![Pred7::default(); ncells],
                flux_x: vec![[0.0; NOFF]; (grid.nx + 1) * grid.ny],
                gx_face: vec![0.0; (grid.nx + 1) * grid.ny],
                jump_x: vec![0.0; (grid.nx + 1) * grid.ny],
                flux_y: vec![[0.0; NOFF]; grid.nx * (grid.ny + 1)],
                gy_face: vec![0.0; grid.nx * (grid.ny + 1)],
                jump_y: vec![0.0; grid.nx * (grid.ny + 1)],
            }
        }
    }

    #[inline]
    fn prim7(s: &[f64; NOFF], phases: &PhasePair) -> Primitives {
        let mut scratch = ClampStats::default();
        model::primitives_from_conserved(
            &CenterState { alpha1: s[0], m1: s[1], m2: s[2], mom: [s[3], s[4]] },
            [s[5], s[6]],
            phases,
            &mut scratch,
        )
    }

    /// Full divergence flux of the 7-system: `F^b + F^v` on the conserved
    /// rows, nothing on the w rows (their terms are non-conservative).
    #[inline]
    fn flux7(p: &Primitives, dir: usize) -> [f64; NOFF] {
        let fb = model::flux_b(p, dir);
        let fv = model::flux_v(p, dir);
        let mut f = [0.0; NOFF];
        for k in 0..N_COMP {
            f[k] = fb[k] + fv[k];
        }
        f
    }

    #[inline]
    fn axpy7(a: [f64; NOFF], h: f64, b: [f64; NOFF]) -> [f64; NOFF] {
        let mut r = [0.0; NOFF];
        for k in 0..NOFF {
            r[k] = a[k] + h * b[k];
        }
        r
    }

    #[inline]
    fn mirror7(s: &[f64; NOFF], dir: usize) -> [f64; NOFF] {
        let mut m = *s;
        m[3 + dir] = -m[3 + dir];
        m[5 + dir] = -m[5 + dir];
        m
    }

    #[inline]
    fn gather7(q: &[Field; N_COMP], wc: &[Field; 2], i: isize, j: isize) -> [f64; NOFF] {
        [
            q[0].at(i, j),
            q[1].at(i, j),
            q[2].at(i, j),
            q[3].at(i, j),
            q[4].at(i, j),
            wc[0].at(i, j),
            wc[1].at(i, j),
        ]
    }

    pub fn advance(sim: &mut Simulation, dt: f64) -> Result<StepStats, SolverError> {
        let grid = sim.grid;
        let phases = sim.phases;
        let gravity = sim.scheme.gravity;
        let first_order = sim.scheme.first_order;
        let bc = sim.bc;
        let c_h = sim.c_h();
        let t = sim.t;
        let Simulation { q, wc, ws, .. } = sim;
        let wc = wc.as_mut().expect("collocated mode carries center w");
        let Workspace { prims, off, .. } = ws;
        let ws = off.as_mut().expect("collocated workspace allocated");

        stages(&grid, &phases, gravity, first_order, dt, &bc, q, wc, prims, ws);
        let clamps = corrector(&grid, gravity, dt, ws, q, wc, t)?;
        Ok(StepStats { dt, c_h, predictor_fallbacks: 0, clamps })
    }

    /// Slopes, predictor and face fluxes (reads the state, writes scratch).
    #[allow(clippy::too_many_arguments)]
    fn stages(
        grid: &StaggeredGrid,
        phases: &PhasePair,
        gravity: [f64; 2],
        first_order: bool,
        dt: f64,
        bc: &BcSpec,
        q: &[Field; N_COMP],
        wc: &[Field; 2],
        prims: &[Primitives],
        ws: &mut OffWorkspace,
    ) {
        let (nx, ny) = (grid.nx as isize, grid.ny as isize);
        let (dx, dy) = (grid.dx, grid.dy);
        let pad = Pad::centers(grid);

        ws.slopes.par_chunks_mut(pad.stride).enumerate().for_each(|(row, chunk)| {
            let j = row as isize - G;
            if !(-1..ny + 1).contains(&j) {
                return;
            }
            for i in -1..nx + 1 {
                let mut s = Slopes7::default();
                if !first_order {
                    let c = gather7(q, wc, i, j);
                    let e = gather7(q, wc, i + 1, j);
                    let w_ = gather7(q, wc, i - 1, j);
                    let n = gather7(q, wc, i, j + 1);
                    let so = gather7(q, wc, i, j - 1);
                    for k in 0..NOFF {
                        s.sx[k] = muscl::minmod((e[k] - c[k]) / dx, (c[k] - w_[k]) / dx);
                        s.sy[k] = muscl::minmod((n[k] - c[k]) / dy, (c[k] - so[k]) / dy);
                    }
                }
                chunk[(i + G) as usize] = s;
            }
        });

        let pred_dt = if first_order { 0.0 } else { dt };
        let slopes_ref: &[Slopes7] = &ws.slopes;
        ws.pred.par_chunks_mut(pad.stride).enumerate().for_each(|(row, chunk)| {
            let j = row as isize - G;
            if !(-1..ny + 1).contains(&j) {
                return;
            }
            for i in -1..nx + 1 {
                let c = pad.at(i, j);
                let qc = gather7(q, wc, i, j);
                let s = &slopes_ref[c];
                let pe = prim7(&axpy7(qc, 0.5 * dx, s.sx), phases);
                let pw = prim7(&axpy7(qc, -0.5 * dx, s.sx), phases);
                let pn = prim7(&axpy7(qc, 0.5 * dy, s.sy), phases);
                let ps = prim7(&axpy7(qc, -0.5 * dy, s.sy), phases);
                let (fe, fw) = (flux7(&pe, 0), flux7(&pw, 0));
                let (fn_, fs) = (flux7(&pn, 1), flux7(&ps, 1));
                let pc = &prims[c];
                let mut dtq = [0.0; NOFF];
                for k in 0..NOFF {
                    dtq[k] = -(fe[k] - fw[k]) / dx - (fn_[k] - fs[k]) / dy;
                }
                dtq[0] -= pc.u[0] * s.sx[0] + pc.u[1] * s.sy[0];
                dtq[3] += pc.rho * gravity[0];
                dtq[4] += pc.rho * gravity[1];
                // central gradient of G and the rotation term
                dtq[5] -= (model::gv_potential(&pe) - model::gv_potential(&pw)) / dx;
                dtq[6] -= (model::gv_potential(&pn) - model::gv_potential(&ps)) / dy;
                let rot = s.sx[6] - s.sy[5];
                dtq[5] += pc.u[1] * rot;
                dtq[6] -= pc.u[0] * rot;
                chunk[(i + G) as usize] = Pred7 {
                    east: axpy7(axpy7(qc, 0.5 * dx, s.sx), 0.5 * pred_dt, dtq),
                    west: axpy7(axpy7(qc, -0.5 * dx, s.sx), 0.5 * pred_dt, dtq),
                    north: axpy7(axpy7(qc, 0.5 * dy, s.sy), 0.5 * pred_dt, dtq),
                    south: axpy7(axpy7(qc, -0.5 * dy, s.sy), 0.5 * pred_dt, dtq),
                    mid: axpy7(qc, 0.5 * pred_dt, dtq),
                };
            }
        });

        let pred_ref: &[Pred7] = &ws.pred;
        let xw = (nx + 1) as usize;
        ws.flux_x
            .par_chunks_mut(xw)
            .zip(ws.gx_face.par_chunks_mut(xw).zip(ws.jump_x.par_chunks_mut(xw)))
            .enumerate()
            .for_each(|(j, (frow, (grow, jrow)))| {
                let j = j as isize;
                if j >= ny {
                    return;
                }
                for i in 0..=nx {
                    let mut qm = pred_ref[pad.at(i - 1, j)].east;
                    let mut qp = pred_ref[pad.at(i, j)].west;
                    if i == 0 && bc.xlo == boundary::Bc::Wall {
                        qm = mirror7(&qp, 0);
                    }
                    if i == nx && bc.xhi == boundary::Bc::Wall {
                        qp = mirror7(&qm, 0);
                    }
                    let pm = prim7(&qm, phases);
                    let pp = prim7(&qp, phases);
                    let smax =
                        model::max_signal_speed(&pm, 0).max(model::max_signal_speed(&pp, 0));
                    let (fm, fp) = (flux7(&pm, 0), flux7(&pp, 0));
                    let mut f = [0.0; NOFF];
                    for k in 0..NOFF {
                        f[k] = 0.5 * (fm[k] + fp[k]) - 0.5 * smax * (qp[k] - qm[k]);
                    }
                    let u_path = (qm[3] + qp[3]) / (qm[1] + qm[2] + qp[1] + qp[2]);
                    frow[i as usize] = f;
                    grow[i as usize] =
                        0.5 * (model::gv_potential(&pm) + model::gv_potential(&pp));
                    jrow[i as usize] = 0.5 * u_path * (qp[0] - qm[0]);
                }
            });
        let yw = nx as usize;
        ws.flux_y
            .par_chunks_mut(yw)
            .zip(ws.gy_face.par_chunks_mut(yw).zip(ws.jump_y.par_chunks_mut(yw)))
            .enumerate()
            .for_each(|(j, (frow, (grow, jrow)))| {
                let j = j as isize;
                if j > ny {
                    return;
                }
                for i in 0..nx {
                    let mut qm = pred_ref[pad.at(i, j - 1)].north;
                    let mut qp = pred_ref[pad.at(i, j)].south;
                    if j == 0 && bc.ylo == boundary::Bc::Wall {
                        qm = mirror7(&qp, 1);
                    }
                    if j == ny && bc.yhi == boundary::Bc::Wall {
                        qp = mirror7(&qm, 1);
                    }
                    let pm = prim7(&qm, phases);
                    let pp = prim7(&qp, phases);
                    let smax =
                        model::max_signal_speed(&pm, 1).max(model::max_signal_speed(&pp, 1));
                    let (fm, fp) = (flux7(&pm, 1), flux7(&pp, 1));
                    let mut f = [0.0; NOFF];
                    for k in 0..NOFF {
                        f[k] = 0.5 * (fm[k] + fp[k]) - 0.5 * smax * (qp[k] - qm[k]);
                    }
                    let u_path = (qm[4] + qp[4]) / (qm[1] + qm[2] + qp[1] + qp[2]);
                    frow[i as usize] = f;
                    grow[i as usize] =
                        0.5 * (model::gv_potential(&pm) + model::gv_potential(&pp));
                    jrow[i as usize] = 0.5 * u_path * (qp[0] - qm[0]);
                }
            });
    }

    fn corrector(
        grid: &StaggeredGrid,
        gravity: [f64; 2],
        dt: f64,
        ws: &OffWorkspace,
        q: &mut [Field; N_COMP],
        wc: &mut [Field; 2],
        t: f64,
    ) -> Result<ClampStats, SolverError> {
        let (nx, ny) = (grid.nx as isize, grid.ny as isize);
        let (dx, dy) = (grid.dx, grid.dy);
        let pad = Pad::centers(grid);
        let xw = (nx + 1) as usize;
        let yw = nx as usize;
        let mut stats = ClampStats::default();
        for j in 0..ny {
            for i in 0..nx {
                let c = pad.at(i, j);
                let ju = j as usize;
                let iu = i as usize;
                let fxw = ws.flux_x[ju * xw + iu];
                let fxe = ws.flux_x[ju * xw + iu + 1];
                let fys = ws.flux_y[ju * yw + iu];
                let fyn = ws.flux_y[(ju + 1) * yw + iu];
                let mid = ws.pred[c].mid;
                let s = ws.slopes[c];
                let rho_mid = mid[1] + mid[2];
                let u_mid = [mid[3] / rho_mid, mid[4] / rho_mid];
                let mut qn = gather7(q, wc, i, j);
                for k in 0..NOFF {
                    qn[k] -= dt / dx * (fxe[k] - fxw[k]) + dt / dy * (fyn[k] - fys[k]);
                }
                qn[0] -= dt / dx * (ws.jump_x[ju * xw + iu + 1] + ws.jump_x[ju * xw + iu])
                    + dt / dy * (ws.jump_y[(ju + 1) * yw + iu] + ws.jump_y[ju * yw + iu]);
                qn[0] -= dt * (u_mid[0] * s.sx[0] + u_mid[1] * s.sy[0]);
                qn[3] += dt * rho_mid * gravity[0];
                qn[4] += dt * rho_mid * gravity[1];
                // central gradient of G and rotation term at the midpoint
                qn[5] -= dt / dx * (ws.gx_face[ju * xw + iu + 1] - ws.gx_face[ju * xw + iu]);
                qn[6] -= dt / dy * (ws.gy_face[(ju + 1) * yw + iu] - ws.gy_face[ju * yw + iu]);
                let rot = s.sx[6] - s.sy[5];
                qn[5] += dt * u_mid[1] * rot;
                qn[6] -= dt * u_mid[0] * rot;

                if !(0.0..=1.0).contains(&qn[0]) {
                    stats.clamped_alpha += 1;
                    qn[0] = qn[0].clamp(model::EPS_ALPHA, 1.0 - model::EPS_ALPHA);
                }
                if qn[1] <= 0.0 {
                    stats.floored_density += 1;
                    qn[1] = model::DENSITY_FLOOR;
                }
                if qn[2] <= 0.0 {
                    stats.floored_density += 1;
                    qn[2] = model::DENSITY_FLOOR;
                }
                if !qn.iter().all(|v| v.is_finite()) {
                    return Err(SolverError::numerical(
                        "non-finite collocated update",
                        Some((i, j)),
                        t,
                    ));
                }
                for (k, f) in q.iter_mut().enumerate() {
                    f.set(i, j, qn[k]);
                }
                wc[0].set(i, j, qn[5]);
                wc[1].set(i, j, qn[6]);
            }
        }
        Ok(stats)
    }
}

/// Interpolates the conserved fields to vertices once; used by output and
/// tests rather than the hot path.
pub fn vertex_state(grid: &StaggeredGrid, q: &[Field; N_COMP]) -> [Field; N_COMP] {
    let mut out = [
        Field::vertices(grid),
        Field::vertices(grid),
        Field::vertices(grid),
        Field::vertices(grid),
        Field::vertices(grid),
    ];
    for (src, dst) in q.iter().zip(out.iter_mut()) {
        vertex_from_centers(src, dst, 0);
    }
    out
}
