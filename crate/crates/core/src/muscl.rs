//! Second-order MUSCL-Hancock update of the cell-centered subsystem.
//!
//! Minmod slopes on the conserved variables, a half-step predictor driven by
//! the split fluxes, Rusanov face fluxes blending the center flux `F^b` of
//! the predictor states with the vertex flux `F^v` sampled at the two
//! face-adjacent vertices, path-conservative jump terms for the
//! volume-fraction row, and the cell-volume non-conservative term plus
//! gravity at the half step.
//!
//! At wall faces the outer state is the mirrored inner state, so the mass
//! rows of the face flux cancel exactly.

use crate::boundary::{Bc, BcSpec};
use crate::error::SolverError;
use crate::grid::{Field, StaggeredGrid, GHOST};
use crate::model::{self, CenterState, ClampStats, PhasePair, Primitives, N_COMP};
use rayon::prelude::*;

const G: isize = GHOST as isize;

/// Index helper for ghost-padded arrays stored row-major.
#[derive(Debug, Clone, Copy)]
pub struct Pad {
    pub stride: usize,
}

impl Pad {
    pub fn centers(grid: &StaggeredGrid) -> Self {
        Pad { stride: grid.nx + 2 * GHOST }
    }

    pub fn vertices(grid: &StaggeredGrid) -> Self {
        Pad { stride: grid.nx + 1 + 2 * GHOST }
    }

    #[inline]
    pub fn at(&self, i: isize, j: isize) -> usize {
        ((j + G) as usize) * self.stride + (i + G) as usize
    }

    pub fn len(&self, nj: usize) -> usize {
        self.stride * (nj + 2 * GHOST)
    }
}

/// Limited slopes of one cell, per conserved component and direction.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Slopes {
    pub sx: [f64; N_COMP],
    pub sy: [f64; N_COMP],
}

/// Predictor output of one cell: the four boundary-extrapolated half-step
/// states and the cell-centered half-step state for the volume terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct PredCell {
    pub east: [f64; N_COMP],
    pub west: [f64; N_COMP],
    pub north: [f64; N_COMP],
    pub south: [f64; N_COMP],
    pub mid: [f64; N_COMP],
}

#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() <= b.abs() {
        a
    } else {
        b
    }
}

#[inline]
fn gather(q: &[Field; N_COMP], i: isize, j: isize) -> [f64; N_COMP] {
    [q[0].at(i, j), q[1].at(i, j), q[2].at(i, j), q[3].at(i, j), q[4].at(i, j)]
}

/// Component-wise minmod slopes over the interior plus a one-cell ring.
pub fn compute_slopes(grid: &StaggeredGrid, q: &[Field; N_COMP], out: &mut [Slopes]) {
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    let (dx, dy) = (grid.dx, grid.dy);
    let pad = Pad::centers(grid);
    out.par_chunks_mut(pad.stride).enumerate().for_each(|(row, chunk)| {
        let j = row as isize - G;
        if !(-1..ny + 1).contains(&j) {
            return;
        }
        for i in -1..nx + 1 {
            let mut s = Slopes::default();
            for k in 0..N_COMP {
                let c = q[k].at(i, j);
                s.sx[k] = minmod((q[k].at(i + 1, j) - c) / dx, (c - q[k].at(i - 1, j)) / dx);
                s.sy[k] = minmod((q[k].at(i, j + 1) - c) / dy, (c - q[k].at(i, j - 1)) / dy);
            }
            chunk[(i + G) as usize] = s;
        }
    });
}

#[inline]
fn axpy(a: [f64; N_COMP], h: f64, b: [f64; N_COMP]) -> [f64; N_COMP] {
    let mut r = [0.0; N_COMP];
    for k in 0..N_COMP {
        r[k] = a[k] + h * b[k];
    }
    r
}

#[inline]
fn positive(s: &[f64; N_COMP]) -> bool {
    s[1] > 0.0 && s[2] > 0.0 && s[0] > 0.0 && s[0] < 1.0
}

/// Pressure/velocity evaluation of an intermediate state; `F^b` does not
/// need `w`.
#[inline]
fn prim_of(state: &[f64; N_COMP], phases: &PhasePair) -> Primitives {
    let mut scratch = ClampStats::default();
    model::primitives_from_conserved(
        &CenterState::from_array(*state),
        [0.0, 0.0],
        phases,
        &mut scratch,
    )
}

/// Half-step predictor over the interior plus a one-cell ring.
///
/// Cells whose extrapolated states lose positivity fall back to first order:
/// their slopes are zeroed in place and the predictor is redone without
/// them. Returns the fallback count.
#[allow(clippy::too_many_arguments)]
pub fn compute_predictor(
    grid: &StaggeredGrid,
    phases: &PhasePair,
    gravity: [f64; 2],
    dt: f64,
    q: &[Field; N_COMP],
    prims: &[Primitives],
    slopes: &mut [Slopes],
    fvx: &[[f64; N_COMP]],
    fvy: &[[f64; N_COMP]],
    out: &mut [PredCell],
) -> u64 {
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    let (dx, dy) = (grid.dx, grid.dy);
    let pad = Pad::centers(grid);
    let vpad = Pad::vertices(grid);
    out.par_chunks_mut(pad.stride)
        .zip(slopes.par_chunks_mut(pad.stride))
        .enumerate()
        .map(|(row, (chunk, srow))| {
            let j = row as isize - G;
            if !(-1..ny + 1).contains(&j) {
                return 0u64;
            }
            let mut fallbacks = 0u64;
            for i in -1..nx + 1 {
                let c = pad.at(i, j);
                let qc = gather(q, i, j);
                let pc = &prims[c];

                let dtq_for = |s: &Slopes| -> [f64; N_COMP] {
                    let fbe = model::flux_b(&prim_of(&axpy(qc, 0.5 * dx, s.sx), phases), 0);
                    let fbw = model::flux_b(&prim_of(&axpy(qc, -0.5 * dx, s.sx), phases), 0);
                    let fbn = model::flux_b(&prim_of(&axpy(qc, 0.5 * dy, s.sy), phases), 1);
                    let fbs = model::flux_b(&prim_of(&axpy(qc, -0.5 * dy, s.sy), phases), 1);
                    let v00 = vpad.at(i, j);
                    let v10 = vpad.at(i + 1, j);
                    let v01 = vpad.at(i, j + 1);
                    let v11 = vpad.at(i + 1, j + 1);
                    let mut dtq = [0.0; N_COMP];
                    for k in 0..N_COMP {
                        dtq[k] = -(fbe[k] - fbw[k]) / dx
                            - (fbn[k] - fbs[k]) / dy
                            - (fvx[v11][k] + fvx[v10][k] - fvx[v01][k] - fvx[v00][k]) / (2.0 * dx)
                            - (fvy[v11][k] + fvy[v01][k] - fvy[v10][k] - fvy[v00][k]) / (2.0 * dy);
                    }
                    // non-conservative volume-fraction transport at t^n
                    dtq[0] -= pc.u[0] * s.sx[0] + pc.u[1] * s.sy[0];
                    dtq[3] += pc.rho * gravity[0];
                    dtq[4] += pc.rho * gravity[1];
                    dtq
                };

                let build = |s: &Slopes, dtq: &[f64; N_COMP]| -> PredCell {
                    PredCell {
                        east: axpy(axpy(qc, 0.5 * dx, s.sx), 0.5 * dt, *dtq),
                        west: axpy(axpy(qc, -0.5 * dx, s.sx), 0.5 * dt, *dtq),
                        north: axpy(axpy(qc, 0.5 * dy, s.sy), 0.5 * dt, *dtq),
                        south: axpy(axpy(qc, -0.5 * dy, s.sy), 0.5 * dt, *dtq),
                        mid: axpy(qc, 0.5 * dt, *dtq),
                    }
                };

                let ix = (i + G) as usize;
                let s = srow[ix];
                let dtq = dtq_for(&s);
                let mut cell = build(&s, &dtq);
                let ok = positive(&cell.east)
                    && positive(&cell.west)
                    && positive(&cell.north)
                    && positive(&cell.south)
                    && positive(&cell.mid);
                if !ok {
                    fallbacks += 1;
                    srow[ix] = Slopes::default();
                    let dtq0 = dtq_for(&Slopes::default());
                    cell = build(&Slopes::default(), &dtq0);
                }
                chunk[ix] = cell;
            }
            fallbacks
        })
        .sum()
}

/// One Rusanov face flux plus the path-conservative jump of the alpha row.
///
/// `qm`/`qp` are the predictor states on either side, `fv1`/`fv2` the vertex
/// fluxes at the two face-adjacent vertices, `w_face` their averaged
/// relative velocity (enters the wave-speed estimate through the phase
/// velocities).
#[inline]
pub fn rusanov_face(
    qm: &[f64; N_COMP],
    qp: &[f64; N_COMP],
    fv1: &[f64; N_COMP],
    fv2: &[f64; N_COMP],
    w_face: [f64; 2],
    dir: usize,
    phases: &PhasePair,
) -> ([f64; N_COMP], f64, f64) {
    let mut scratch = ClampStats::default();
    let pm = model::primitives_from_conserved(
        &CenterState::from_array(*qm),
        w_face,
        phases,
        &mut scratch,
    );
    let pp = model::primitives_from_conserved(
        &CenterState::from_array(*qp),
        w_face,
        phases,
        &mut scratch,
    );
    let smax = model::max_signal_speed(&pm, dir).max(model::max_signal_speed(&pp, dir));
    let fbm = model::flux_b(&pm, dir);
    let fbp = model::flux_b(&pp, dir);
    let mut f = [0.0; N_COMP];
    for k in 0..N_COMP {
        f[k] = 0.5 * (fbm[k] + fbp[k] + fv1[k] + fv2[k]) - 0.5 * smax * (qp[k] - qm[k]);
    }
    // straight-segment path, midpoint rule: u of the averaged state
    let u_path = (qm[3 + dir] + qp[3 + dir]) / (qm[1] + qm[2] + qp[1] + qp[2]);
    let jump = 0.5 * u_path * (qp[0] - qm[0]);
    (f, jump, smax)
}

#[inline]
fn mirror(state: &[f64; N_COMP], dir: usize) -> [f64; N_COMP] {
    let mut m = *state;
    m[3 + dir] = -m[3 + dir];
    m
}

/// Assembles all face fluxes and jump terms. X faces are indexed
/// `(i, j), i in 0..=nx, j in 0..ny`; y faces `(i, j), i in 0..nx, j in 0..=ny`.
#[allow(clippy::too_many_arguments)]
pub fn compute_fluxes(
    grid: &StaggeredGrid,
    phases: &PhasePair,
    bc: &BcSpec,
    pred: &[PredCell],
    fvx: &[[f64; N_COMP]],
    fvy: &[[f64; N_COMP]],
    wx: &Field,
    wy: &Field,
    flux_x: &mut [[f64; N_COMP]],
    jump_x: &mut [f64],
    flux_y: &mut [[f64; N_COMP]],
    jump_y: &mut [f64],
) -> Result<(), SolverError> {
    let (nx, ny) = (grid.nx as isize, grid.ny as isize);
    let pad = Pad::centers(grid);
    let vpad = Pad::vertices(grid);
    let xw = (nx + 1) as usize;

    let bad_x = flux_x
        .par_chunks_mut(xw)
        .zip(jump_x.par_chunks_mut(xw))
        .enumerate()
        .map(|(j, (frow, jrow))| {
            let j = j as isize;
            if j >= ny {
                return None;
            }
            for i in 0..=nx {
                let mut qm = pred[pad.at(i - 1, j)].east;
                let mut qp = pred[pad.at(i, j)].west;
                if i == 0 && bc.xlo == Bc::Wall {
                    qm = mirror(&qp, 0);
                }
                if i == nx && bc.xhi == Bc::Wall {
                    qp = mirror(&qm, 0);
                }
                let v1 = vpad.at(i, j);
                let v2 = vpad.at(i, j + 1);
                let wf = [
                    0.5 * (wx.at(i, j) + wx.at(i, j + 1)),
                    0.5 * (wy.at(i, j) + wy.at(i, j + 1)),
                ];
                let (f, jm, _) = rusanov_face(&qm, &qp, &fvx[v1], &fvx[v2], wf, 0, phases);
                if !f.iter().all(|v| v.is_finite()) {
                    return Some((i, j));
                }
                frow[i as usize] = f;
                jrow[i as usize] = jm;
            }
            None
        })
        .reduce(|| None, Option::or);
    if let Some((i, j)) = bad_x {
        return Err(SolverError::numerical("NaN in x-face flux", Some((i, j)), 0.0));
    }

    let yw = nx as usize;
    let bad_y = flux_y
        .par_chunks_mut(yw)
        .zip(jump_y.par_chunks_mut(yw))
        .enumerate()
        .map(|(j, (frow, jrow))| {
            let j = j as isize;
            if j > ny {
                return None;
            }
            for i in 0..nx {
                let mut qm = pred[pad.at(i, j - 1)].north;
                let mut qp = pred[pad.at(i, j)].south;
                if j == 0 && bc.ylo == Bc::Wall {
                    qm = mirror(&qp, 1);
                }
                if j == ny && bc.yhi == Bc::Wall {
                    qp = mirror(&qm, 1);
                }
                let v1 = vpad.at(i, j);
                let v2 = vpad.at(i + 1, j);
                let wf = [
                    0.5 * (wx.at(i, j) + wx.at(i + 1, j)),
                    0.5 * (wy.at(i, j) + wy.at(i + 1, j)),
                ];
                let (f, jm, _) = rusanov_face(&qm, &qp, &fvy[v1], &fvy[v2], wf, 1, phases);
                if !f.iter().all(|v| v.is_finite()) {
                    return Some((i, j));
                }
                frow[i as usize] = f;
                jrow[i as usize] = jm;
            }
            None
        })
        .reduce(|| None, Option::or);
    if let Some((i, j)) = bad_y {
        return Err(SolverError::numerical("NaN in y-face flux", Some((i, j)), 0.0));
    }
    Ok(())
}

/// Conservative corrector step over the interior cells. The mass and
/// momentum rows are in pure flux form; jump terms and the volume term act
/// on the volume fraction, gravity on the momentum.
#[allow(clippy::too_many_arguments)]
pub fn update_cells(
    grid: &StaggeredGrid,
    gravity: [f64; 2],
    dt: f64,
    slopes: &[Slopes],
    pred: &[PredCell],
    flux_x: &[[f64; N_COMP]],
    jump_x: &[f64],
    flux_y: &[[f64; N_COMP]],
    jump_y: &[f64],
    q: &mut [Field; N_COMP],
) -> ClampStats {
    let (nx, ny) = (grid.nx, grid.ny);
    let (dx, dy) = (grid.dx, grid.dy);
    let pad = Pad::centers(grid);
    let xw = nx + 1;
    let [qa, q1, q2, qmx, qmy] = q;
    let rows: Vec<_> = qa
        .data_mut()
        .chunks_mut(pad.stride)
        .zip(q1.data_mut().chunks_mut(pad.stride))
        .zip(q2.data_mut().chunks_mut(pad.stride))
        .zip(qmx.data_mut().chunks_mut(pad.stride))
        .zip(qmy.data_mut().chunks_mut(pad.stride))
        .map(|((((a, b), c), d), e)| (a, b, c, d, e))
        .collect();

    rows.into_par_iter()
        .enumerate()
        .map(|(row, (ra, r1, r2, rmx, rmy))| {
            let j = row as isize - G;
            let mut stats = ClampStats::default();
            if j < 0 || j >= ny as isize {
                return stats;
            }
            let ju = j as usize;
            for i in 0..nx {
                let ii = i as isize;
                let c = pad.at(ii, j);
                let fxw = &flux_x[ju * xw + i];
                let fxe = &flux_x[ju * xw + i + 1];
                let fys = &flux_y[ju * nx + i];
                let fyn = &flux_y[(ju + 1) * nx + i];
                let mid = &pred[c].mid;
                let rho_mid = mid[1] + mid[2];
                let u_mid = [mid[3] / rho_mid, mid[4] / rho_mid];
                let s = &slopes[c];

                let ix = (ii + G) as usize;
                let mut qn = [ra[ix], r1[ix], r2[ix], rmx[ix], rmy[ix]];
                for k in 0..N_COMP {
                    qn[k] -= dt / dx * (fxe[k] - fxw[k]) + dt / dy * (fyn[k] - fys[k]);
                }
                qn[0] -= dt / dx * (jump_x[ju * xw + i + 1] + jump_x[ju * xw + i])
                    + dt / dy * (jump_y[(ju + 1) * nx + i] + jump_y[ju * nx + i]);
                qn[0] -= dt * (u_mid[0] * s.sx[0] + u_mid[1] * s.sy[0]);
                qn[3] += dt * rho_mid * gravity[0];
                qn[4] += dt * rho_mid * gravity[1];

                // emergency clamps; counted, conserved data otherwise untouched
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
                ra[ix] = qn[0];
                r1[ix] = qn[1];
                r2[ix] = qn[2];
                rmx[ix] = qn[3];
                rmy[ix] = qn[4];
            }
            stats
        })
        .reduce(ClampStats::default, |mut a, b| {
            a.merge(b);
            a
        })
}
