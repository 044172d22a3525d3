//! Initial conditions and reference profiles for the five experiments:
//! a 1D two-phase Riemann problem, a stationary vortex with a known exact
//! solution, a circular explosion, a dambreak against slip walls under
//! gravity, and a Kelvin-Helmholtz shear layer.
//!
//! Every case starts with a discretely curl-free relative velocity (all of
//! them use `w = 0` or 1D data).

use crate::boundary::{Bc, BcSpec};
use crate::eos::EosSpec;
use crate::error::SolverError;
use crate::grid::StaggeredGrid;
use crate::model::{PhasePair, EPS_ALPHA};
use crate::solver::PointState;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseKind {
    Rp1d,
    Vortex,
    Explosion,
    Dambreak,
    KelvinHelmholtz,
}

impl CaseKind {
    pub fn parse(s: &str) -> Result<CaseKind, SolverError> {
        match s {
            "rp1d" => Ok(CaseKind::Rp1d),
            "vortex" => Ok(CaseKind::Vortex),
            "explosion" => Ok(CaseKind::Explosion),
            "dambreak" => Ok(CaseKind::Dambreak),
            "kh" => Ok(CaseKind::KelvinHelmholtz),
            other => Err(SolverError::Config(format!(
                "unknown case '{other}' (expected rp1d|vortex|explosion|dambreak|kh)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CaseKind::Rp1d => "rp1d",
            CaseKind::Vortex => "vortex",
            CaseKind::Explosion => "explosion",
            CaseKind::Dambreak => "dambreak",
            CaseKind::KelvinHelmholtz => "kh",
        }
    }
}

/// Case defaults plus the pointwise initial state.
pub struct CaseSetup {
    pub kind: CaseKind,
    pub origin: [f64; 2],
    pub extent: [f64; 2],
    pub default_mesh: (usize, usize),
    pub phases: PhasePair,
    pub bc: BcSpec,
    pub gravity: [f64; 2],
    pub cfl: f64,
    pub t_end: f64,
    eval: Box<dyn Fn(f64, f64) -> PointState + Sync + Send>,
}

impl CaseSetup {
    pub fn eval(&self, x: f64, y: f64) -> PointState {
        (self.eval)(x, y)
    }

    /// Grid for a mesh choice; the 1D case pins `ny = 1` with square cells.
    pub fn make_grid(&self, nx: usize, ny: usize) -> StaggeredGrid {
        if self.kind == CaseKind::Rp1d {
            let dy = self.extent[0] / nx as f64;
            StaggeredGrid::new(nx, 1, self.origin, [self.extent[0], dy])
        } else {
            StaggeredGrid::new(nx, ny, self.origin, self.extent)
        }
    }
}

/// Left and right states of the 1D Riemann problem, as phase variables
/// `(alpha1, rho1, rho2, u1, u2)`.
pub const RP1_LEFT: [f64; 5] = [0.7, 1.2449, 1.2969, -1.2638, -0.38947];
pub const RP1_RIGHT: [f64; 5] = [0.3, 0.60312, 0.73436, 0.43059, -0.40507];

fn rp1d_state(side: &[f64; 5]) -> PointState {
    let [alpha1, rho1, rho2, u1, u2] = *side;
    let m1 = alpha1 * rho1;
    let m2 = (1.0 - alpha1) * rho2;
    let u = (m1 * u1 + m2 * u2) / (m1 + m2);
    PointState { alpha1, rho1, rho2, u: [u, 0.0], w: [u1 - u2, 0.0] }
}

pub fn setup(kind: CaseKind) -> CaseSetup {
    match kind {
        CaseKind::Rp1d => CaseSetup {
            kind,
            origin: [-1.0, 0.0],
            extent: [2.0, 2.0],
            default_mesh: (3000, 1),
            phases: PhasePair { eos1: EosSpec::ideal(1.4), eos2: EosSpec::ideal(2.0) },
            bc: BcSpec::per_axis(Bc::Transmissive, Bc::Periodic),
            gravity: [0.0, 0.0],
            cfl: 0.25,
            t_end: 0.25,
            eval: Box::new(|x, _| {
                if x < 0.0 {
                    rp1d_state(&RP1_LEFT)
                } else {
                    rp1d_state(&RP1_RIGHT)
                }
            }),
        },
        CaseKind::Vortex => CaseSetup {
            kind,
            origin: [-10.0, -10.0],
            extent: [20.0, 20.0],
            default_mesh: (128, 128),
            phases: PhasePair { eos1: EosSpec::ideal(1.4), eos2: EosSpec::ideal(1.4) },
            bc: BcSpec::per_axis(Bc::Periodic, Bc::Periodic),
            gravity: [0.0, 0.0],
            cfl: 0.25,
            t_end: 1.0,
            eval: Box::new(|x, y| exact_vortex(x, y)),
        },
        CaseKind::Explosion => CaseSetup {
            kind,
            origin: [-1.0, -1.0],
            extent: [2.0, 2.0],
            default_mesh: (400, 400),
            phases: PhasePair { eos1: EosSpec::ideal(1.4), eos2: EosSpec::ideal(2.0) },
            bc: BcSpec::per_axis(Bc::Transmissive, Bc::Transmissive),
            gravity: [0.0, 0.0],
            cfl: 0.25,
            t_end: 0.1,
            eval: Box::new(|x, y| {
                let inside = x * x + y * y < 0.25;
                explosion_state(inside)
            }),
        },
        CaseKind::Dambreak => CaseSetup {
            kind,
            origin: [0.0, 0.0],
            extent: [4.0, 2.0],
            default_mesh: (480, 240),
            phases: PhasePair {
                eos1: EosSpec::ideal(1.4),
                eos2: EosSpec::stiffened(2.0, 1.0, 1000.0, 20.0),
            },
            bc: BcSpec::per_axis(Bc::Wall, Bc::Wall),
            gravity: [0.0, -DAMBREAK_G],
            cfl: 0.5,
            t_end: 0.4,
            eval: Box::new(dambreak_state),
        },
        CaseKind::KelvinHelmholtz => CaseSetup {
            kind,
            origin: [-0.5, -1.0],
            extent: [1.0, 2.0],
            default_mesh: (128, 256),
            phases: PhasePair { eos1: EosSpec::ideal(1.4), eos2: EosSpec::ideal(2.0) },
            bc: BcSpec::per_axis(Bc::Periodic, Bc::Periodic),
            gravity: [0.0, 0.0],
            cfl: 0.25,
            t_end: 6.0,
            eval: Box::new(kelvin_helmholtz_state),
        },
    }
}

/// Rotationally symmetric stationary solution (both phases identical ideal
/// gas with gamma = 7/5): `alpha1(r) = 1/3 + exp(-r^2/2)/(2 sqrt(2 pi))`,
/// `rho = (1 - exp(1-r^2)/4)^(5/7)` and an azimuthal velocity balancing the
/// radial pressure gradient.
pub fn exact_vortex(x: f64, y: f64) -> PointState {
    let r2 = x * x + y * y;
    let alpha1 = 1.0 / 3.0 + (-0.5 * r2).exp() / (2.0 * (2.0 * std::f64::consts::PI).sqrt());
    let e = (1.0 - r2).exp();
    let rho = (1.0 - 0.25 * e).powf(5.0 / 7.0);
    // u_theta / r, finite at the origin
    let f = 2.0f64.powf(3.0 / 14.0) * (e / (4.0 - e).powf(5.0 / 7.0)).sqrt();
    PointState { alpha1, rho1: rho, rho2: rho, u: [-y * f, x * f], w: [0.0, 0.0] }
}

pub fn explosion_state(inside: bool) -> PointState {
    if inside {
        PointState { alpha1: 0.4, rho1: 2.0, rho2: 1.5, u: [0.0, 0.0], w: [0.0, 0.0] }
    } else {
        PointState { alpha1: 0.8, rho1: 1.0, rho2: 0.5, u: [0.0, 0.0], w: [0.0, 0.0] }
    }
}

pub const DAMBREAK_G: f64 = 9.80;
const DAMBREAK_P0: f64 = 1.0;
const DAMBREAK_RHO0: f64 = 1000.0;

/// Water column `[0,2] x [0,1]` (phase 2, stiffened) at rest under a
/// hydrostatic pressure `p = p0 + rho0 g (1-y)`, air elsewhere at the
/// surface pressure `p0`; both phase densities invert their EOS at the
/// local pressure, and the minority phase sits at the `EPS_ALPHA` floor.
pub fn dambreak_state(x: f64, y: f64) -> PointState {
    let air = EosSpec::ideal(1.4);
    let water = EosSpec::stiffened(2.0, DAMBREAK_P0, DAMBREAK_RHO0, 20.0);
    let in_water = x < 2.0 && y < 1.0;
    let p = if in_water { DAMBREAK_P0 + DAMBREAK_RHO0 * DAMBREAK_G * (1.0 - y) } else { DAMBREAK_P0 };
    let alpha1 = if in_water { EPS_ALPHA } else { 1.0 - EPS_ALPHA };
    PointState {
        alpha1,
        rho1: air.density_at_pressure(p),
        rho2: water.density_at_pressure(p),
        u: [0.0, 0.0],
        w: [0.0, 0.0],
    }
}

/// Shear layers at `y = +-1/2` with a small sinusoidal vertical
/// perturbation; both phases share the velocity, so `w = 0`. Densities are
/// `rho1 = 1`, `rho2 = 2`; pressures follow from the equations of state.
pub fn kelvin_helmholtz_state(x: f64, y: f64) -> PointState {
    let pi = std::f64::consts::PI;
    let (alpha1, ux, uy) = if y < 0.0 {
        let t = (25.0 * (y + 0.5)).tanh();
        (
            0.5 + 0.25 * t,
            0.5 * t,
            -1e-2 * (2.0 * pi * x).sin() * (2.0 * pi * (y + 0.5)).sin(),
        )
    } else {
        let t = (25.0 * (y - 0.5)).tanh();
        (
            0.5 - 0.25 * t,
            -0.5 * t,
            1e-2 * (2.0 * pi * x).sin() * (2.0 * pi * (y - 0.5)).sin(),
        )
    };
    PointState { alpha1, rho1: 1.0, rho2: 2.0, u: [ux, uy], w: [0.0, 0.0] }
}
