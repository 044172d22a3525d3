//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured values. Criteria 3 and 4 are asserted exactly as
//! specified and are expected to fail at the pinned desk-scale meshes; the
//! printed analysis shows the same scheme reaching the published orders one
//! refinement later (see `notes` in the repository history for the full
//! account).
//!
//! Run with `cargo test --test acceptance -- --nocapture --test-threads=1`
//! to see the lines in order.

use twophase::boundary::{fill_center, Bc, BcSpec, WallSym};
use twophase::cases::{self, CaseKind};
use twophase::config::RunConfig;
use twophase::diag;
use twophase::driver;
use twophase::eos::EosSpec;
use twophase::grid::{Field, StaggeredGrid};
use twophase::model::{self, PhasePair};
use twophase::ops;
use twophase::refsol;
use twophase::solver::{PointState, SchemeParams, Simulation};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion:2}: {verdict} - {detail}");
    eprintln!("criterion {criterion:2}: {verdict} - {detail}");
}

/// Criterion 1: discrete curl of a corner gradient stays below
/// 1e-13 * max|grad| for 100 random center fields on a 64x64 grid.
#[test]
fn criterion_01_discrete_involution() {
    let g = StaggeredGrid::new(64, 64, [0.0, 0.0], [1.0, 1.0]);
    let bc = BcSpec::per_axis(Bc::Periodic, Bc::Periodic);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let mut phi = Field::centers(&g);
        phi.fill(0.0);
        for j in 0..64 {
            for i in 0..64 {
                phi.set(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        fill_center(&mut phi, &bc, WallSym::Scalar);
        let mut wx = Field::vertices(&g);
        let mut wy = Field::vertices(&g);
        ops::corner_gradient(&g, &phi, &mut wx, &mut wy, 0);
        let gmax = wx.max_abs_interior().max(wy.max_abs_interior());
        let mut curl = Field::centers(&g);
        ops::center_curl(&g, &wx, &wy, &mut curl, 0);
        worst = worst.max(curl.max_abs_interior() / gmax);
    }
    let pass = worst <= 1e-13;
    report(1, pass, &format!("max |curl(grad phi)| / max|grad phi| = {worst:.3e} (<= 1e-13)"));
    assert!(pass);
}

fn run_curl_history(case: CaseKind, nx: usize, ny: usize, t_end: f64, curl_free: bool) -> f64 {
    let mut cfg = RunConfig::for_case(case);
    cfg.nx = nx;
    cfg.ny = ny;
    cfg.t_end = t_end;
    cfg.curl_free = curl_free;
    let mut sim = cfg.build_simulation().unwrap();
    let summary = driver::run_in_memory(&mut sim, t_end).unwrap();
    summary.max_curl_l1
}

/// Criterion 2: structure preservation in evolution. Vortex (128^2, t<=5)
/// and Kelvin-Helmholtz (128x256, t<=2): curl L1 below 1e-11 at every step
/// with the staggered scheme, above 1e-6 with the collocated one.
#[test]
fn criterion_02_curl_preservation_in_evolution() {
    let vortex_on = run_curl_history(CaseKind::Vortex, 128, 128, 5.0, true);
    let vortex_off = run_curl_history(CaseKind::Vortex, 128, 128, 5.0, false);
    let kh_on = run_curl_history(CaseKind::KelvinHelmholtz, 128, 256, 2.0, true);
    let kh_off = run_curl_history(CaseKind::KelvinHelmholtz, 128, 256, 2.0, false);
    let pass = vortex_on <= 1e-11 && kh_on <= 1e-11 && vortex_off > 1e-6 && kh_off > 1e-6;
    report(
        2,
        pass,
        &format!(
            "max curl L1: vortex on/off = {vortex_on:.2e}/{vortex_off:.2e}, kh on/off = {kh_on:.2e}/{kh_off:.2e}"
        ),
    );
    assert!(pass);
}

/// Criterion 3 (expected FAIL at the pinned meshes): vortex EOC ladder
/// {64^2, 128^2, 256^2} at t = 1 with L2 orders >= 1.8 for alpha1, rho1,
/// rho2 and >= 1.7 for the velocity components.
///
/// The minmod limiter clips the smooth vortex extrema, and at 6 cells per
/// core radius the ladder is pre-asymptotic: measured orders are about
/// 1.70/1.70/1.72/1.48/1.48 on the finest pair. One refinement later
/// (256 -> 512, printed below) the same code measures 1.88/1.86/1.86/1.73/
/// 1.73, matching the published 192 -> 768 row to +-0.02, which pins the
/// implementation; the thresholds are unreachable at the stated meshes.
#[test]
fn criterion_03_vortex_convergence_order() {
    let cfg = RunConfig::for_case(CaseKind::Vortex); // t_end = 1
    let table = driver::convergence_study(&cfg, &[64, 128, 256, 512]).unwrap();
    println!("{}", table.format());
    eprintln!("{}", table.format());
    // the spec ladder is the first three meshes; its finest pair is row 1
    let o = table.orders[1];
    let asymptotic = table.orders[2];
    let pass = o[0] >= 1.8 && o[1] >= 1.8 && o[2] >= 1.8 && o[3] >= 1.7 && o[4] >= 1.7;
    report(
        3,
        pass,
        &format!(
            "orders at 128->256: alpha {:.2}, rho1 {:.2}, rho2 {:.2}, u {:.2}/{:.2} \
             (need 1.8/1.8/1.8/1.7/1.7; the 256->512 pair gives {:.2}/{:.2}/{:.2}/{:.2}/{:.2})",
            o[0], o[1], o[2], o[3], o[4],
            asymptotic[0], asymptotic[1], asymptotic[2], asymptotic[3], asymptotic[4]
        ),
    );
    assert!(
        pass,
        "orders at the pinned ladder fall short: {o:?}; asymptotic pair reaches {asymptotic:?}"
    );
}

/// Criterion 4 (expected FAIL at the pinned mesh): vortex at 128^2, t = 10,
/// Linf(rho - rho_exact) <= 2e-2.
///
/// The error concentrates at the vortex core (a smooth density minimum about
/// 6 cells wide at this mesh), where the minmod limiter reduces to first
/// order and the core fills in; measured Linf is about 0.17 and scales down
/// roughly with dx^1.5 (0.06 at 256^2). The bound would need roughly 512^2.
#[test]
fn criterion_04_vortex_stationarity() {
    let mut cfg = RunConfig::for_case(CaseKind::Vortex);
    cfg.nx = 128;
    cfg.ny = 128;
    cfg.t_end = 10.0;
    let mut sim = cfg.build_simulation().unwrap();
    driver::run_in_memory(&mut sim, cfg.t_end).unwrap();
    let mut linf = 0.0f64;
    let mut stats = model::ClampStats::default();
    for j in 0..128 {
        for i in 0..128 {
            let s = sim.state_at(i, j);
            let w = sim.w_at_center(i, j);
            let p = model::primitives_from_conserved(&s, w, &sim.phases, &mut stats);
            let e = cases::exact_vortex(sim.grid.xc(i), sim.grid.yc(j));
            let rho_e = e.alpha1 * e.rho1 + (1.0 - e.alpha1) * e.rho2;
            linf = linf.max((p.rho - rho_e).abs());
        }
    }
    let pass = linf <= 2e-2;
    report(4, pass, &format!("Linf(rho - exact) at t=10, 128^2 = {linf:.3e} (<= 2e-2)"));
    assert!(pass, "core dissipation at 128^2 leaves Linf = {linf:.3e}");
}

/// Maximum drawdown (largest drop below the running maximum) of `v` over
/// the window, plus the window's total range.
fn drawdown(x: &[f64], v: &[f64], xlo: f64, xhi: f64) -> (f64, f64) {
    let mut run_max = f64::NEG_INFINITY;
    let mut dd = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (xx, vv) in x.iter().zip(v) {
        if *xx < xlo || *xx > xhi {
            continue;
        }
        run_max = run_max.max(*vv);
        dd = dd.max(run_max - *vv);
        lo = lo.min(*vv);
        hi = hi.max(*vv);
    }
    (dd, hi - lo)
}

/// Criterion 5: 1D Riemann problem at n = 3000 against the self-converged
/// n = 24000 reference: L1(rho) <= 1e-2 and the shock inside the phase-1
/// rarefaction present (monotonicity break in the zoom window).
#[test]
fn criterion_05_riemann_problem() {
    // 2D solver in its 1D-degenerate mode
    let mut cfg = RunConfig::for_case(CaseKind::Rp1d);
    cfg.nx = 3000;
    let mut sim = cfg.build_simulation().unwrap();
    driver::run_in_memory(&mut sim, cfg.t_end).unwrap();
    let n = 3000usize;
    let mut x = Vec::with_capacity(n);
    let mut rho = Vec::with_capacity(n);
    let mut rho1 = Vec::with_capacity(n);
    let mut stats = model::ClampStats::default();
    for i in 0..n as isize {
        let s = sim.state_at(i, 0);
        let w = sim.w_at_center(i, 0);
        let p = model::primitives_from_conserved(&s, w, &sim.phases, &mut stats);
        x.push(sim.grid.xc(i));
        rho.push(p.rho);
        rho1.push(p.rho1);
    }

    let reference = refsol::solve(&refsol::rp1d_reference(), 24000).unwrap();
    // project the reference onto the coarse mesh (8 children per cell)
    let dx = 2.0 / n as f64;
    let mut l1 = 0.0;
    for i in 0..n {
        let avg: f64 = reference.rho[8 * i..8 * i + 8].iter().sum::<f64>() / 8.0;
        l1 += (rho[i] - avg).abs() * dx;
    }

    // shock inside the right-going rarefaction of phase 1: the window
    // x in [0.15, 0.45] rises overall but contains a localized drop
    let (dd, range) = drawdown(&x, &rho1, 0.15, 0.45);
    let feature = dd >= 0.01 && range > 0.2;
    let pass = l1 <= 1e-2 && feature;
    report(
        5,
        pass,
        &format!("L1(rho) vs reference = {l1:.3e} (<= 1e-2); rarefaction window drawdown = {dd:.3} (>= 0.01)"),
    );
    assert!(pass);
}

/// Criterion 6: circular explosion, 2D 400^2 at t = 0.1 against the radial
/// reference on 12800 cells; L1 error of rho along the x-axis cut within 2%
/// of the reference L1 norm.
#[test]
fn criterion_06_circular_explosion() {
    let mut cfg = RunConfig::for_case(CaseKind::Explosion);
    cfg.nx = 400;
    cfg.ny = 400;
    let mut sim = cfg.build_simulation().unwrap();
    driver::run_in_memory(&mut sim, cfg.t_end).unwrap();

    let reference = refsol::solve(&refsol::explosion_radial_reference(), 12800).unwrap();
    let j = 200isize; // row just above the axis, y = dy/2
    let y = sim.grid.yc(j);
    let mut stats = model::ClampStats::default();
    let mut l1 = 0.0;
    let mut l1_ref = 0.0;
    for i in 0..400isize {
        let s = sim.state_at(i, j);
        let w = sim.w_at_center(i, j);
        let p = model::primitives_from_conserved(&s, w, &sim.phases, &mut stats);
        let r = (sim.grid.xc(i).powi(2) + y * y).sqrt();
        let rho_ref = diag::interp_profile(&reference.x, &reference.rho, r);
        l1 += (p.rho - rho_ref).abs() * sim.grid.dx;
        l1_ref += rho_ref.abs() * sim.grid.dx;
    }
    let ratio = l1 / l1_ref;
    let pass = ratio <= 0.02;
    report(6, pass, &format!("L1(rho) along the axis cut = {:.3e} of reference ({ratio:.4} <= 0.02)", l1));
    assert!(pass);
}

/// Criterion 7: dambreak at 480x240 to t = 0.4 with walls on all sides:
/// curl L1 below 1e-11 throughout and total water mass drift below 1e-10.
#[test]
fn criterion_07_dambreak_walls() {
    let cfg = RunConfig::for_case(CaseKind::Dambreak);
    let mut sim = cfg.build_simulation().unwrap();
    let summary = driver::run_in_memory(&mut sim, cfg.t_end).unwrap();
    let drift = (summary.final_totals.mass2 - summary.initial_totals.mass2).abs()
        / summary.initial_totals.mass2;
    let pass = summary.max_curl_l1 <= 1e-11 && drift <= 1e-10;
    report(
        7,
        pass,
        &format!(
            "max curl L1 = {:.3e} (<= 1e-11), water mass drift = {drift:.3e} (<= 1e-10)",
            summary.max_curl_l1
        ),
    );
    assert!(pass);
}

/// Criterion 8: periodic Kelvin-Helmholtz, 1000 steps, gravity off:
/// per-phase masses and momentum components drift below 1e-11 relative.
#[test]
fn criterion_08_conservation_suite() {
    let cfg = RunConfig::for_case(CaseKind::KelvinHelmholtz);
    let mut sim = cfg.build_simulation().unwrap();
    let t0 = sim.totals();
    // momentum normalization: total |rho u| at t = 0
    let mut mom_scale = 0.0;
    let mut stats = model::ClampStats::default();
    for j in 0..sim.grid.ny as isize {
        for i in 0..sim.grid.nx as isize {
            let s = sim.state_at(i, j);
            let w = sim.w_at_center(i, j);
            let p = model::primitives_from_conserved(&s, w, &sim.phases, &mut stats);
            mom_scale += p.rho * (p.u[0].powi(2) + p.u[1].powi(2)).sqrt();
        }
    }
    mom_scale *= sim.grid.cell_area();
    for _ in 0..1000 {
        sim.step_to(f64::INFINITY).unwrap();
    }
    let t1 = sim.totals();
    let rel = |a: f64, b: f64, scale: f64| (b - a).abs() / scale.max(a.abs());
    let d_m1 = rel(t0.mass1, t1.mass1, 0.0);
    let d_m2 = rel(t0.mass2, t1.mass2, 0.0);
    let d_px = rel(t0.momx, t1.momx, mom_scale);
    let d_py = rel(t0.momy, t1.momy, mom_scale);
    let pass = d_m1 <= 1e-11 && d_m2 <= 1e-11 && d_px <= 1e-11 && d_py <= 1e-11;
    report(
        8,
        pass,
        &format!("relative drifts over 1000 steps: m1 {d_m1:.2e}, m2 {d_m2:.2e}, momx {d_px:.2e}, momy {d_py:.2e}"),
    );
    assert!(pass);
}

/// Criterion 9: EOS consistency, p = rho^2 de/drho and a^2 = dp/drho
/// against central differences, 100 random densities per EOS.
#[test]
fn criterion_09_eos_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let all = [
        EosSpec::ideal(1.4),
        EosSpec::ideal(2.0),
        EosSpec::stiffened(2.0, 1.0, 1000.0, 20.0),
    ];
    let mut worst_p = 0.0f64;
    let mut worst_a = 0.0f64;
    for eos in all {
        for _ in 0..100 {
            let rho: f64 = rng.gen_range(0.1..2000.0);
            let h = 1e-5 * rho;
            let dedr = (eos.internal_energy(rho + h) - eos.internal_energy(rho - h)) / (2.0 * h);
            let p = eos.pressure(rho);
            worst_p = worst_p.max((p - rho * rho * dedr).abs() / p.abs().max(1.0));
            let dpdr = (eos.pressure(rho + h) - eos.pressure(rho - h)) / (2.0 * h);
            let a2 = eos.sound_speed(rho).powi(2);
            worst_a = worst_a.max((a2 - dpdr).abs() / a2);
        }
    }
    let pass = worst_p <= 1e-6 && worst_a <= 1e-6;
    report(9, pass, &format!("max rel FD residual: pressure {worst_p:.2e}, sound speed {worst_a:.2e} (<= 1e-6)"));
    assert!(pass);
}

/// Independent barotropic Euler oracle: MUSCL-Hancock with minmod slopes
/// and the Rusanov flux for the system (rho, rho u), p = rho^gamma.
mod euler_oracle {
    pub fn minmod(a: f64, b: f64) -> f64 {
        if a * b <= 0.0 {
            0.0
        } else if a.abs() <= b.abs() {
            a
        } else {
            b
        }
    }

    pub struct Euler1d {
        pub gamma: f64,
        pub rho: Vec<f64>,
        pub mom: Vec<f64>,
        pub dx: f64,
    }

    impl Euler1d {
        fn flux(&self, rho: f64, mom: f64) -> [f64; 2] {
            let u = mom / rho;
            [mom, mom * u + rho.powf(self.gamma)]
        }

        fn smax(&self, rho: f64, mom: f64) -> f64 {
            let a = (self.gamma * rho.powf(self.gamma - 1.0)).sqrt();
            (mom / rho).abs() + a
        }

        pub fn step(&mut self, cfl: f64, t_left: f64) -> f64 {
            let n = self.rho.len();
            let mut smax = 0.0f64;
            for i in 0..n {
                smax = smax.max(self.smax(self.rho[i], self.mom[i]));
            }
            let dt = (cfl * self.dx / smax).min(t_left);
            // transmissive ghosts via index clamping
            let at = |v: &Vec<f64>, i: isize| v[i.clamp(0, n as isize - 1) as usize];
            let mut sr = vec![0.0; n];
            let mut sm = vec![0.0; n];
            for i in 0..n as isize {
                sr[i as usize] = minmod(
                    (at(&self.rho, i + 1) - at(&self.rho, i)) / self.dx,
                    (at(&self.rho, i) - at(&self.rho, i - 1)) / self.dx,
                );
                sm[i as usize] = minmod(
                    (at(&self.mom, i + 1) - at(&self.mom, i)) / self.dx,
                    (at(&self.mom, i) - at(&self.mom, i - 1)) / self.dx,
                );
            }
            let mut east = vec![[0.0f64; 2]; n];
            let mut west = vec![[0.0f64; 2]; n];
            for i in 0..n {
                let (re, me) = (self.rho[i] + 0.5 * self.dx * sr[i], self.mom[i] + 0.5 * self.dx * sm[i]);
                let (rw, mw) = (self.rho[i] - 0.5 * self.dx * sr[i], self.mom[i] - 0.5 * self.dx * sm[i]);
                let fe = self.flux(re, me);
                let fw = self.flux(rw, mw);
                let dtq = [-(fe[0] - fw[0]) / self.dx, -(fe[1] - fw[1]) / self.dx];
                east[i] = [re + 0.5 * dt * dtq[0], me + 0.5 * dt * dtq[1]];
                west[i] = [rw + 0.5 * dt * dtq[0], mw + 0.5 * dt * dtq[1]];
            }
            let mut fluxes = vec![[0.0f64; 2]; n + 1];
            for f in 0..=n {
                let qm = if f == 0 { west[0] } else { east[f - 1] };
                let qp = if f == n { east[n - 1] } else { west[f] };
                let s = self.smax(qm[0], qm[1]).max(self.smax(qp[0], qp[1]));
                let fm = self.flux(qm[0], qm[1]);
                let fp = self.flux(qp[0], qp[1]);
                fluxes[f] = [
                    0.5 * (fm[0] + fp[0]) - 0.5 * s * (qp[0] - qm[0]),
                    0.5 * (fm[1] + fp[1]) - 0.5 * s * (qp[1] - qm[1]),
                ];
            }
            for i in 0..n {
                self.rho[i] -= dt / self.dx * (fluxes[i + 1][0] - fluxes[i][0]);
                self.mom[i] -= dt / self.dx * (fluxes[i + 1][1] - fluxes[i][1]);
            }
            dt
        }
    }
}

/// Criterion 10: single-phase limit (alpha1 = 1 - eps, identical ideal EOS,
/// w = 0) on a Sod-like barotropic shock tube matches the independent Euler
/// oracle to L1 <= 1e-3.
#[test]
fn criterion_10_single_phase_reduction() {
    let gamma = 1.4;
    let n = 400usize;
    let t_end = 0.2;
    let sod = |x: f64| -> (f64, f64) {
        if x < 0.0 {
            (1.0, 0.0)
        } else {
            (0.5, 0.0)
        }
    };

    // two-phase solver in the single-phase limit, 1D-degenerate grid
    let phases = PhasePair { eos1: EosSpec::ideal(gamma), eos2: EosSpec::ideal(gamma) };
    let dy = 2.0 / n as f64;
    let grid = StaggeredGrid::new(n, 1, [-1.0, 0.0], [2.0, dy]);
    let bc = BcSpec::per_axis(Bc::Transmissive, Bc::Periodic);
    let scheme = SchemeParams { cfl: 0.4, curl_free: true, first_order: false, gravity: [0.0, 0.0] };
    let mut sim = Simulation::new(grid, phases, bc, scheme).unwrap();
    sim.init_with(|x, _| {
        let (rho, u) = sod(x);
        PointState {
            alpha1: 1.0 - model::EPS_ALPHA,
            rho1: rho,
            rho2: rho,
            u: [u, 0.0],
            w: [0.0, 0.0],
        }
    });
    driver::run_in_memory(&mut sim, t_end).unwrap();

    // independent Euler run on the same mesh
    let mut euler = euler_oracle::Euler1d {
        gamma,
        rho: (0..n).map(|i| sod(grid.xc(i as isize)).0).collect(),
        mom: vec![0.0; n],
        dx: grid.dx,
    };
    let mut t = 0.0;
    while t < t_end - 1e-13 {
        t += euler.step(0.4, t_end - t);
    }

    let mut l1 = 0.0;
    for i in 0..n {
        let s = sim.state_at(i as isize, 0);
        l1 += ((s.m1 + s.m2) - euler.rho[i]).abs() * grid.dx;
    }
    let pass = l1 <= 1e-3;
    report(10, pass, &format!("L1(rho) vs independent Euler oracle = {l1:.3e} (<= 1e-3)"));
    assert!(pass);
}

/// Sanity companion to criterion 2: a rough curl-free field from
/// `init_w_from_potential` keeps machine-zero curl through evolution on the
/// boundary families the scheme is compatible with (periodic and walls).
#[test]
fn potential_initialized_runs_stay_curl_free() {
    for (case, nx, ny) in [(CaseKind::Vortex, 48, 48), (CaseKind::Dambreak, 48, 24)] {
        let mut cfg = RunConfig::for_case(case);
        cfg.nx = nx;
        cfg.ny = ny;
        let mut sim = cfg.build_simulation().unwrap();
        sim.init_w_from_potential(|x, y| 0.05 * (3.0 * x).sin() * (2.0 * y).cos());
        let mut worst = 0.0f64;
        for _ in 0..20 {
            sim.step_to(f64::INFINITY).unwrap();
            worst = worst.max(sim.curl_l1());
        }
        let wmax = sim.w.wx.max_abs_interior().max(sim.w.wy.max_abs_interior()).max(1.0);
        assert!(worst <= 1e-11 * wmax, "{case:?}: curl L1 grew to {worst:.3e}");
    }
}
