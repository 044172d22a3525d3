//! Mixture closures, physical fluxes, non-conservative products, sources and
//! wave speeds of the barotropic two-phase system.
//!
//! The cell-centered conserved vector is `(alpha1, alpha1*rho1, alpha2*rho2,
//! rho*ux, rho*uy)`; the relative velocity `w = u1 - u2` lives on the vertex
//! lattice and enters here only through interpolated values. The flux of the
//! centered subsystem splits into a convective/pressure part `F^b` evaluated
//! at cell or face states and a relative-velocity part `F^v` evaluated at
//! vertices.

use crate::eos::EosSpec;

/// Volume-fraction clamp applied when converting to primitives. Initial data
/// with pure phases sits at `alpha in {eps, 1-eps}`; conserved variables are
/// never altered by this clamp.
pub const EPS_ALPHA: f64 = 1e-3;

/// Floor applied to the phase densities after the division by the volume
/// fraction.
pub const DENSITY_FLOOR: f64 = 1e-10;

pub const N_COMP: usize = 5;

/// Per-cell conserved vector `(alpha1, m1, m2, mom_x, mom_y)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CenterState {
    pub alpha1: f64,
    /// Partial density `alpha1 * rho1`.
    pub m1: f64,
    /// Partial density `alpha2 * rho2`.
    pub m2: f64,
    /// Mixture momentum `rho * u`.
    pub mom: [f64; 2],
}

impl CenterState {
    #[inline]
    pub fn to_array(self) -> [f64; N_COMP] {
        [self.alpha1, self.m1, self.m2, self.mom[0], self.mom[1]]
    }

    #[inline]
    pub fn from_array(a: [f64; N_COMP]) -> Self {
        CenterState { alpha1: a[0], m1: a[1], m2: a[2], mom: [a[3], a[4]] }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.alpha1.is_finite()
            && self.m1.is_finite()
            && self.m2.is_finite()
            && self.mom[0].is_finite()
            && self.mom[1].is_finite()
    }
}

/// The two phase equations of state. Phase 1 is the `alpha1` phase.
#[derive(Debug, Clone, Copy)]
pub struct PhasePair {
    pub eos1: EosSpec,
    pub eos2: EosSpec,
}

/// Primitive state at one point, with the two phase evaluations attached.
#[derive(Debug, Clone, Copy, Default)]
pub struct Primitives {
    pub alpha1: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub rho: f64,
    /// Mass fractions `c1 = m1/rho`, `c2 = m2/rho`.
    pub c1: f64,
    pub c2: f64,
    pub u: [f64; 2],
    pub w: [f64; 2],
    pub p1: f64,
    pub p2: f64,
    /// Mixture pressure `alpha1*p1 + alpha2*p2`.
    pub p: f64,
    pub a1: f64,
    pub a2: f64,
    /// Phase chemical potentials.
    pub mu1: f64,
    pub mu2: f64,
    /// Phase internal energies.
    pub e1: f64,
    pub e2: f64,
}

/// Counters for the robustness interventions of one conversion pass.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClampStats {
    /// Cells whose raw volume fraction fell outside `[eps, 1-eps]`.
    pub clamped_alpha: u64,
    /// Cells where a phase density hit the floor.
    pub floored_density: u64,
}

impl ClampStats {
    pub fn merge(&mut self, other: ClampStats) {
        self.clamped_alpha += other.clamped_alpha;
        self.floored_density += other.floored_density;
    }
}

/// Converts conserved variables plus a collocated `w` to primitives.
///
/// The volume fraction is clamped into `[EPS_ALPHA, 1-EPS_ALPHA]` and the
/// phase densities floored; both interventions are counted in `stats`.
#[inline]
pub fn primitives_from_conserved(
    s: &CenterState,
    w: [f64; 2],
    phases: &PhasePair,
    stats: &mut ClampStats,
) -> Primitives {
    let mut alpha = s.alpha1;
    if !(EPS_ALPHA..=1.0 - EPS_ALPHA).contains(&alpha) {
        stats.clamped_alpha += 1;
        alpha = alpha.clamp(EPS_ALPHA, 1.0 - EPS_ALPHA);
    }
    let mut rho1 = s.m1 / alpha;
    let mut rho2 = s.m2 / (1.0 - alpha);
    if rho1 < DENSITY_FLOOR {
        stats.floored_density += 1;
        rho1 = DENSITY_FLOOR;
    }
    if rho2 < DENSITY_FLOOR {
        stats.floored_density += 1;
        rho2 = DENSITY_FLOOR;
    }
    let m1 = alpha * rho1;
    let m2 = (1.0 - alpha) * rho2;
    let rho = m1 + m2;
    let c1 = m1 / rho;
    let c2 = m2 / rho;
    let u = [s.mom[0] / rho, s.mom[1] / rho];
    let e1 = phases.eos1.eval(rho1);
    let e2 = phases.eos2.eval(rho2);
    Primitives {
        alpha1: alpha,
        rho1,
        rho2,
        rho,
        c1,
        c2,
        u,
        w,
        p1: e1.p,
        p2: e2.p,
        p: alpha * e1.p + (1.0 - alpha) * e2.p,
        a1: e1.a2.sqrt(),
        a2: e2.a2.sqrt(),
        mu1: e1.mu,
        mu2: e2.mu,
        e1: e1.e,
        e2: e2.e,
    }
}

impl Primitives {
    /// Phase-1 velocity `u + c2*w`.
    #[inline]
    pub fn u1(&self) -> [f64; 2] {
        [self.u[0] + self.c2 * self.w[0], self.u[1] + self.c2 * self.w[1]]
    }

    /// Phase-2 velocity `u - c1*w`.
    #[inline]
    pub fn u2(&self) -> [f64; 2] {
        [self.u[0] - self.c1 * self.w[0], self.u[1] - self.c1 * self.w[1]]
    }

    /// Conserved vector of this state.
    pub fn to_conserved(&self) -> CenterState {
        let m1 = self.alpha1 * self.rho1;
        let m2 = (1.0 - self.alpha1) * self.rho2;
        CenterState {
            alpha1: self.alpha1,
            m1,
            m2,
            mom: [self.rho * self.u[0], self.rho * self.u[1]],
        }
    }
}

/// Scalar `phi = mu1 - mu2 - (c1-c2)/2 * |w|^2` driving the relative velocity.
#[inline]
pub fn phi(prim: &Primitives) -> f64 {
    let w2 = prim.w[0] * prim.w[0] + prim.w[1] * prim.w[1];
    prim.mu1 - prim.mu2 - 0.5 * (prim.c1 - prim.c2) * w2
}

/// Potential `w.u + phi` whose corner gradient drives the vertex update.
#[inline]
pub fn gv_potential(prim: &Primitives) -> f64 {
    prim.w[0] * prim.u[0] + prim.w[1] * prim.u[1] + phi(prim)
}

/// Convective/pressure flux `F^b` in direction `dir` (0 = x, 1 = y).
///
/// Rows: `(0, m1*u_k, m2*u_k, rho*u_i*u_k + p*delta_ik, .)`.
#[inline]
pub fn flux_b(prim: &Primitives, dir: usize) -> [f64; N_COMP] {
    let uk = prim.u[dir];
    let m1 = prim.alpha1 * prim.rho1;
    let m2 = (1.0 - prim.alpha1) * prim.rho2;
    let mut f = [0.0; N_COMP];
    f[1] = m1 * uk;
    f[2] = m2 * uk;
    f[3] = prim.rho * prim.u[0] * uk;
    f[4] = prim.rho * prim.u[1] * uk;
    f[3 + dir] += prim.p;
    f
}

/// Relative-velocity flux `F^v` in direction `dir`, evaluated at vertices.
///
/// Rows: `(0, m1*c2*w_k, -m2*c1*w_k, c1*c2*rho*w_i*w_k, .)`.
#[inline]
pub fn flux_v(prim: &Primitives, dir: usize) -> [f64; N_COMP] {
    let wk = prim.w[dir];
    let m1 = prim.alpha1 * prim.rho1;
    let m2 = (1.0 - prim.alpha1) * prim.rho2;
    let cc = prim.c1 * prim.c2 * prim.rho;
    [0.0, m1 * prim.c2 * wk, -m2 * prim.c1 * wk, cc * prim.w[0] * wk, cc * prim.w[1] * wk]
}

/// Gravity source `S^b = (0, 0, 0, rho*g_x, rho*g_y)`.
#[inline]
pub fn source_b(prim: &Primitives, g: [f64; 2]) -> [f64; N_COMP] {
    [0.0, 0.0, 0.0, prim.rho * g[0], prim.rho * g[1]]
}

/// The distinct wave speeds in direction `dir`:
/// `{u2_d - a2, u1_d - a1, u_d, u2_d + a2, u1_d + a1}`.
#[inline]
pub fn eigenvalues(prim: &Primitives, dir: usize) -> [f64; 5] {
    let u1 = prim.u1()[dir];
    let u2 = prim.u2()[dir];
    [u2 - prim.a2, u1 - prim.a1, prim.u[dir], u2 + prim.a2, u1 + prim.a1]
}

/// Largest absolute wave speed in direction `dir`.
#[inline]
pub fn max_signal_speed(prim: &Primitives, dir: usize) -> f64 {
    eigenvalues(prim, dir).iter().fold(0.0f64, |m, l| m.max(l.abs()))
}

/// Total energy density `E = rho|u|^2/2 + rho (c1 e1 + c2 e2 + c1 c2 |w|^2 / 2)`.
///
/// Diagnostic only; the scheme does not evolve it.
#[inline]
pub fn total_energy(prim: &Primitives) -> f64 {
    let u2 = prim.u[0] * prim.u[0] + prim.u[1] * prim.u[1];
    let w2 = prim.w[0] * prim.w[0] + prim.w[1] * prim.w[1];
    0.5 * prim.rho * u2
        + prim.rho * (prim.c1 * prim.e1 + prim.c2 * prim.e2 + 0.5 * prim.c1 * prim.c2 * w2)
}
