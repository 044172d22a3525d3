//! One-dimensional reference solvers: planar (for the Riemann problem) and
//! radial with geometric weights (for the circular explosion).
//!
//! Same MUSCL-Hancock/Rusanov discretization as the 2D solver, restricted to
//! one dimension; `w` is a plain cell unknown with the conservative flux
//! `w u + phi`. The radial variant advances mass and convective momentum in
//! `r`-weighted flux form, `(1/r) d(r F)/dr`, so the radially weighted phase
//! masses are conserved to round-off; the pressure gradient and the `w` and
//! `alpha` rows stay unweighted.

use crate::error::SolverError;
use crate::model::{self, CenterState, ClampStats, PhasePair, Primitives};
use crate::muscl::minmod;
use crate::solver::PointState;

const NC: usize = 5;
const G: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Planar,
    /// Cylindrical symmetry about `x = 0`; the domain must sit in `x > 0`.
    Cylindrical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndBc {
    Transmissive,
    /// Mirror with `u` and `w` negated.
    Reflective,
}

/// A 1D problem: initial primitive profile, domain, geometry and run
/// controls.
pub struct Setup1d {
    pub phases: PhasePair,
    pub geometry: Geometry,
    pub x_lo: f64,
    pub x_hi: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub bc_lo: EndBc,
    pub bc_hi: EndBc,
    pub init: Box<dyn Fn(f64) -> PointState + Sync>,
}

/// Primitive profile at the final time, sampled at cell centers.
#[derive(Debug, Clone)]
pub struct Profile {
    pub x: Vec<f64>,
    pub alpha1: Vec<f64>,
    pub rho1: Vec<f64>,
    pub rho2: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

#[inline]
fn prim1(s: &[f64; NC], phases: &PhasePair) -> Primitives {
    let mut scratch = ClampStats::default();
    model::primitives_from_conserved(
        &CenterState { alpha1: s[0], m1: s[1], m2: s[2], mom: [s[3], 0.0] },
        [s[4], 0.0],
        phases,
        &mut scratch,
    )
}

/// Convective part of the physical flux (what the radial geometry weights):
/// `(0, m1 u1, m2 u2, rho u^2 + c1 c2 rho w^2, 0)`.
#[inline]
fn conv_flux(p: &Primitives) -> [f64; NC] {
    let m1 = p.alpha1 * p.rho1;
    let m2 = (1.0 - p.alpha1) * p.rho2;
    [
        0.0,
        m1 * p.u1()[0],
        m2 * p.u2()[0],
        p.rho * p.u[0] * p.u[0] + p.c1 * p.c2 * p.rho * p.w[0] * p.w[0],
        0.0,
    ]
}

struct FaceFlux {
    /// Geometry-weighted rows (masses, convective momentum) incl. dissipation.
    weighted: [f64; NC],
    /// Unweighted rows: alpha dissipation, pressure, `w` flux.
    plain: [f64; NC],
    /// Path-conservative alpha jump, added to both neighbors.
    jump: f64,
}

fn face_flux(qm: &[f64; NC], qp: &[f64; NC], phases: &PhasePair) -> FaceFlux {
    let pm = prim1(qm, phases);
    let pp = prim1(qp, phases);
    let smax = model::max_signal_speed(&pm, 0).max(model::max_signal_speed(&pp, 0));
    let (cm, cp) = (conv_flux(&pm), conv_flux(&pp));
    let mut weighted = [0.0; NC];
    for k in 1..4 {
        weighted[k] = 0.5 * (cm[k] + cp[k]) - 0.5 * smax * (qp[k] - qm[k]);
    }
    let mut plain = [0.0; NC];
    plain[0] = -0.5 * smax * (qp[0] - qm[0]);
    plain[3] = 0.5 * (pm.p + pp.p);
    plain[4] = 0.5 * (model::gv_potential(&pm) + model::gv_potential(&pp))
        - 0.5 * smax * (qp[4] - qm[4]);
    let u_path = (qm[3] + qp[3]) / (qm[1] + qm[2] + qp[1] + qp[2]);
    FaceFlux { weighted, plain, jump: 0.5 * u_path * (qp[0] - qm[0]) }
}

fn fill_ghosts(q: &mut [[f64; NC]], n: usize, bc_lo: EndBc, bc_hi: EndBc) {
    for g in 1..=G {
        q[G - g] = match bc_lo {
            EndBc::Transmissive => q[G],
            EndBc::Reflective => {
                let mut m = q[G + g - 1];
                m[3] = -m[3];
                m[4] = -m[4];
                m
            }
        };
        q[G + n + g - 1] = match bc_hi {
            EndBc::Transmissive => q[G + n - 1],
            EndBc::Reflective => {
                let mut m = q[G + n - g];
                m[3] = -m[3];
                m[4] = -m[4];
                m
            }
        };
    }
}

/// Runs the 1D solver on `n` cells and returns the final profile.
pub fn solve(setup: &Setup1d, n: usize) -> Result<Profile, SolverError> {
    assert!(n >= 4);
    if setup.geometry == Geometry::Cylindrical && setup.x_lo < 0.0 {
        return Err(SolverError::Config("cylindrical domain must sit in r >= 0".into()));
    }
    let dx = (setup.x_hi - setup.x_lo) / n as f64;
    let xc = |i: usize| setup.x_lo + (i as f64 + 0.5) * dx;
    // face radius weights; planar geometry weighs everything by 1
    let rf = |i: usize| -> f64 {
        match setup.geometry {
            Geometry::Planar => 1.0,
            Geometry::Cylindrical => setup.x_lo + i as f64 * dx,
        }
    };
    let rc = |i: usize| -> f64 {
        match setup.geometry {
            Geometry::Planar => 1.0,
            Geometry::Cylindrical => xc(i),
        }
    };

    let mut q = vec![[0.0f64; NC]; n + 2 * G];
    for i in 0..n {
        let p = (setup.init)(xc(i));
        let c = p.conserved();
        q[G + i] = [c.alpha1, c.m1, c.m2, c.mom[0], p.w[0]];
    }

    let mut slopes = vec![[0.0f64; NC]; n + 2 * G];
    let mut east = vec![[0.0f64; NC]; n + 2 * G];
    let mut west = vec![[0.0f64; NC]; n + 2 * G];
    let mut mid = vec![[0.0f64; NC]; n + 2 * G];
    let mut fw = vec![[0.0f64; NC]; n + 1]; // weighted numerical flux per face
    let mut fp = vec![[0.0f64; NC]; n + 1];
    let mut jumps = vec![0.0f64; n + 1];

    let mut t = 0.0;
    let mut steps: u64 = 0;
    while t < setup.t_end - 1e-13 {
        fill_ghosts(&mut q, n, setup.bc_lo, setup.bc_hi);

        // global signal speed for the CFL condition
        let mut smax: f64 = 0.0;
        for cell in q.iter().take(G + n).skip(G) {
            let p = prim1(cell, &setup.phases);
            if !p.rho.is_finite() {
                return Err(SolverError::numerical("non-finite 1D state", None, t));
            }
            smax = smax.max(model::max_signal_speed(&p, 0));
        }
        let mut dt = setup.cfl * dx / smax.max(1e-300);
        if !dt.is_finite() || dt < 1e-15 {
            return Err(SolverError::numerical("1D time step collapsed", None, t));
        }
        if t + dt > setup.t_end {
            dt = setup.t_end - t;
        }

        // slopes and half-step predictor over interior + one ghost ring
        for i in 1..n + 2 * G - 1 {
            for k in 0..NC {
                slopes[i][k] = minmod((q[i + 1][k] - q[i][k]) / dx, (q[i][k] - q[i - 1][k]) / dx);
            }
        }
        for i in 1..n + 2 * G - 1 {
            let ri = if i >= G && i < G + n {
                rc(i - G)
            } else if i < G {
                // mirror/copy cells keep their own radius for the weights
                match setup.geometry {
                    Geometry::Planar => 1.0,
                    Geometry::Cylindrical => setup.x_lo + ((i as f64) - (G as f64) + 0.5) * dx,
                }
            } else {
                match setup.geometry {
                    Geometry::Planar => 1.0,
                    Geometry::Cylindrical => setup.x_lo + ((i - G) as f64 + 0.5) * dx,
                }
            };
            let dtq_for = |s: &[f64; NC]| -> [f64; NC] {
                let qe = axpy(&q[i], 0.5 * dx, s);
                let qw = axpy(&q[i], -0.5 * dx, s);
                let pe = prim1(&qe, &setup.phases);
                let pw = prim1(&qw, &setup.phases);
                let (ce, cw) = (conv_flux(&pe), conv_flux(&pw));
                let (rfe, rfw) = match setup.geometry {
                    Geometry::Planar => (1.0, 1.0),
                    Geometry::Cylindrical => (ri + 0.5 * dx, ri - 0.5 * dx),
                };
                let mut dtq = [0.0; NC];
                for k in 1..4 {
                    dtq[k] = -(rfe * ce[k] - rfw * cw[k]) / (ri.abs().max(1e-300) * dx);
                }
                dtq[3] -= (pe.p - pw.p) / dx;
                dtq[4] -= (model::gv_potential(&pe) - model::gv_potential(&pw)) / dx;
                let pc = prim1(&q[i], &setup.phases);
                dtq[0] -= pc.u[0] * s[0];
                dtq
            };
            let mut s = slopes[i];
            let mut dtq = dtq_for(&s);
            let mut e = axpy(&axpy(&q[i], 0.5 * dx, &s), 0.5 * dt, &dtq);
            let mut w_ = axpy(&axpy(&q[i], -0.5 * dx, &s), 0.5 * dt, &dtq);
            let ok = e[1] > 0.0 && e[2] > 0.0 && w_[1] > 0.0 && w_[2] > 0.0;
            if !ok {
                s = [0.0; NC];
                slopes[i] = s;
                dtq = dtq_for(&s);
                e = axpy(&q[i], 0.5 * dt, &dtq);
                w_ = axpy(&q[i], 0.5 * dt, &dtq);
            }
            east[i] = e;
            west[i] = w_;
            mid[i] = axpy(&q[i], 0.5 * dt, &dtq);
        }

        for f in 0..=n {
            let ff = face_flux(&east[G + f - 1], &west[G + f], &setup.phases);
            fw[f] = ff.weighted;
            fp[f] = ff.plain;
            jumps[f] = ff.jump;
            if !ff.weighted.iter().chain(ff.plain.iter()).all(|v| v.is_finite()) {
                return Err(SolverError::numerical("non-finite 1D flux", Some((f as isize, 0)), t));
            }
        }

        for i in 0..n {
            let c = G + i;
            let ri = rc(i);
            let (re, rw) = (rf(i + 1), rf(i));
            let s = slopes[c];
            let m = mid[c];
            let u_mid = m[3] / (m[1] + m[2]);
            let mut qn = q[c];
            for k in 1..4 {
                qn[k] -= dt * (re * fw[i + 1][k] - rw * fw[i][k]) / (ri * dx);
            }
            for k in 0..NC {
                qn[k] -= dt / dx * (fp[i + 1][k] - fp[i][k]);
            }
            qn[0] -= dt / dx * (jumps[i + 1] + jumps[i]);
            qn[0] -= dt * u_mid * s[0];
            if qn[1] <= 0.0 {
                qn[1] = model::DENSITY_FLOOR;
            }
            if qn[2] <= 0.0 {
                qn[2] = model::DENSITY_FLOOR;
            }
            qn[0] = qn[0].clamp(model::EPS_ALPHA, 1.0 - model::EPS_ALPHA);
            q[c] = qn;
        }
        t += dt;
        steps += 1;
        if steps > 50_000_000 {
            return Err(SolverError::numerical("1D run exceeded step budget", None, t));
        }
    }

    let mut out = Profile {
        x: Vec::with_capacity(n),
        alpha1: Vec::with_capacity(n),
        rho1: Vec::with_capacity(n),
        rho2: Vec::with_capacity(n),
        rho: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        w: Vec::with_capacity(n),
    };
    for i in 0..n {
        let p = prim1(&q[G + i], &setup.phases);
        out.x.push(xc(i));
        out.alpha1.push(p.alpha1);
        out.rho1.push(p.rho1);
        out.rho2.push(p.rho2);
        out.rho.push(p.rho);
        out.u.push(p.u[0]);
        out.w.push(p.w[0]);
    }
    Ok(out)
}

#[inline]
fn axpy(a: &[f64; NC], h: f64, b: &[f64; NC]) -> [f64; NC] {
    let mut r = [0.0; NC];
    for k in 0..NC {
        r[k] = a[k] + h * b[k];
    }
    r
}

/// Planar reference setup for the 1D Riemann problem.
pub fn rp1d_reference() -> Setup1d {
    let case = crate::cases::setup(crate::cases::CaseKind::Rp1d);
    let phases = case.phases;
    Setup1d {
        phases,
        geometry: Geometry::Planar,
        x_lo: -1.0,
        x_hi: 1.0,
        t_end: 0.25,
        cfl: 0.25,
        bc_lo: EndBc::Transmissive,
        bc_hi: EndBc::Transmissive,
        init: Box::new(move |x| case.eval(x, 0.0)),
    }
}

/// Radial reference setup for the circular explosion.
pub fn explosion_radial_reference() -> Setup1d {
    let case = crate::cases::setup(crate::cases::CaseKind::Explosion);
    let phases = case.phases;
    Setup1d {
        phases,
        geometry: Geometry::Cylindrical,
        x_lo: 0.0,
        x_hi: 1.0,
        t_end: 0.1,
        cfl: 0.25,
        bc_lo: EndBc::Reflective,
        bc_hi: EndBc::Transmissive,
        init: Box::new(|r| crate::cases::explosion_state(r < 0.5)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases;
    use crate::eos::EosSpec;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_state_is_a_fixed_point_in_both_geometries() {
        for geometry in [Geometry::Planar, Geometry::Cylindrical] {
            let setup = Setup1d {
                phases: PhasePair { eos1: EosSpec::ideal(1.4), eos2: EosSpec::ideal(2.0) },
                geometry,
                x_lo: if geometry == Geometry::Cylindrical { 0.0 } else { -1.0 },
                x_hi: 1.0,
                t_end: 0.05,
                cfl: 0.4,
                bc_lo: if geometry == Geometry::Cylindrical {
                    EndBc::Reflective
                } else {
                    EndBc::Transmissive
                },
                bc_hi: EndBc::Transmissive,
                init: Box::new(|_| PointState {
                    alpha1: 0.4,
                    rho1: 1.3,
                    rho2: 0.8,
                    u: [0.0, 0.0],
                    w: [0.0, 0.0],
                }),
            };
            let p = solve(&setup, 64).unwrap();
            for i in 0..64 {
                assert_relative_eq!(p.alpha1[i], 0.4, epsilon = 1e-13);
                assert_relative_eq!(p.rho1[i], 1.3, epsilon = 1e-13);
                assert_relative_eq!(p.rho2[i], 0.8, epsilon = 1e-13);
                assert_relative_eq!(p.u[i], 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn mirrored_initial_data_gives_mirrored_solution() {
        let mk = |flip: bool| -> Setup1d {
            Setup1d {
                phases: PhasePair { eos1: EosSpec::ideal(1.4), eos2: EosSpec::ideal(2.0) },
                geometry: Geometry::Planar,
                x_lo: -1.0,
                x_hi: 1.0,
                t_end: 0.2,
                cfl: 0.3,
                bc_lo: EndBc::Transmissive,
                bc_hi: EndBc::Transmissive,
                init: Box::new(move |x| {
                    let xx = if flip { -x } else { x };
                    let s = if xx < 0.0 {
                        cases::RP1_LEFT
                    } else {
                        cases::RP1_RIGHT
                    };
                    let sign = if flip { -1.0 } else { 1.0 };
                    let [alpha1, rho1, rho2, u1, u2] = s;
                    let m1 = alpha1 * rho1;
                    let m2 = (1.0 - alpha1) * rho2;
                    PointState {
                        alpha1,
                        rho1,
                        rho2,
                        u: [sign * (m1 * u1 + m2 * u2) / (m1 + m2), 0.0],
                        w: [sign * (u1 - u2), 0.0],
                    }
                }),
            }
        };
        let n = 400;
        let a = solve(&mk(false), n).unwrap();
        let b = solve(&mk(true), n).unwrap();
        for i in 0..n {
            let j = n - 1 - i;
            assert_relative_eq!(a.rho[i], b.rho[j], epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(a.u[i], -b.u[j], epsilon = 1e-12, max_relative = 1e-12);
            assert_relative_eq!(a.w[i], -b.w[j], epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    /// Radially weighted phase masses are conserved while no wave reaches
    /// the outer boundary.
    #[test]
    fn radial_mass_conservation() {
        let setup = explosion_radial_reference();
        let n = 800;
        let dx = 1.0 / n as f64;
        let mass = |p: &Profile| -> (f64, f64) {
            let mut m1 = 0.0;
            let mut m2 = 0.0;
            for i in 0..n {
                let r = p.x[i];
                m1 += r * p.alpha1[i] * p.rho1[i] * dx;
                m2 += r * (1.0 - p.alpha1[i]) * p.rho2[i] * dx;
            }
            (m1, m2)
        };
        // initial masses from the initial profile (t_end -> 0 run)
        let mut s0 = explosion_radial_reference();
        s0.t_end = 1e-9;
        let p0 = solve(&s0, n).unwrap();
        let (m1_0, m2_0) = mass(&p0);
        let p1 = solve(&setup, n).unwrap();
        let (m1_1, m2_1) = mass(&p1);
        assert_relative_eq!(m1_1, m1_0, max_relative = 1e-10);
        assert_relative_eq!(m2_1, m2_0, max_relative = 1e-10);
    }

    /// Far from the axis the cylindrical terms are O(L/R) corrections; the
    /// two geometries agree when the annulus radius is huge.
    #[test]
    fn cylindrical_tends_to_planar_far_from_axis() {
        let big_r = 1.0e9;
        let mk = |geometry: Geometry, off: f64| -> Setup1d {
            Setup1d {
                phases: PhasePair { eos1: EosSpec::ideal(1.4), eos2: EosSpec::ideal(2.0) },
                geometry,
                x_lo: off,
                x_hi: off + 2.0,
                t_end: 0.1,
                cfl: 0.3,
                bc_lo: EndBc::Transmissive,
                bc_hi: EndBc::Transmissive,
                init: Box::new(move |x| {
                    if x - off < 1.0 {
                        cases::explosion_state(true)
                    } else {
                        cases::explosion_state(false)
                    }
                }),
            }
        };
        let n = 200;
        let pl = solve(&mk(Geometry::Planar, 0.0), n).unwrap();
        let cy = solve(&mk(Geometry::Cylindrical, big_r), n).unwrap();
        for i in 0..n {
            assert_relative_eq!(pl.rho[i], cy.rho[i], max_relative = 1e-6, epsilon = 1e-6);
        }
    }

    /// Self-convergence of the Riemann-problem reference: the L1 distance
    /// between consecutive refinements decreases monotonically.
    #[test]
    fn rp1d_reference_self_converges() {
        let meshes = [250usize, 500, 1000, 2000];
        let mut profiles = Vec::new();
        for &n in &meshes {
            profiles.push(solve(&rp1d_reference(), n).unwrap());
        }
        let mut dists = Vec::new();
        for k in 0..meshes.len() - 1 {
            let (coarse, fine) = (&profiles[k], &profiles[k + 1]);
            let dx = 2.0 / meshes[k] as f64;
            let mut l1 = 0.0;
            for i in 0..meshes[k] {
                // fine mesh refines by 2: average the two children
                let f = 0.5 * (fine.rho[2 * i] + fine.rho[2 * i + 1]);
                l1 += (coarse.rho[i] - f).abs() * dx;
            }
            dists.push(l1);
        }
        for k in 1..dists.len() {
            assert!(
                dists[k] < dists[k - 1],
                "self-convergence stalled: {dists:?}"
            );
        }
    }
}
