//! Barotropic equations of state for the two phases.
//!
//! Each phase is closed by either an ideal gas law `p = rho^gamma` or a
//! stiffened gas law referenced to `(p0, rho0, c0)`, the usual model for a
//! weakly compressible liquid. All quantities are functions of density
//! alone; there is no temperature equation.

use crate::error::SolverError;

/// Barotropic equation of state for a single phase.
///
/// `p0`, `rho0` and `c0` are only meaningful for the stiffened variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EosSpec {
    IdealGas { gamma: f64 },
    StiffenedGas { gamma: f64, p0: f64, rho0: f64, c0: f64 },
}

impl EosSpec {
    pub fn ideal(gamma: f64) -> Self {
        EosSpec::IdealGas { gamma }
    }

    pub fn stiffened(gamma: f64, p0: f64, rho0: f64, c0: f64) -> Self {
        EosSpec::StiffenedGas { gamma, p0, rho0, c0 }
    }

    pub fn gamma(&self) -> f64 {
        match *self {
            EosSpec::IdealGas { gamma } => gamma,
            EosSpec::StiffenedGas { gamma, .. } => gamma,
        }
    }

    /// Checks the parameter invariants (`gamma > 1`, positive references).
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: String| Err(SolverError::Config(msg));
        match *self {
            EosSpec::IdealGas { gamma } => {
                if gamma <= 1.0 {
                    return bad(format!("ideal gas requires gamma > 1, got {gamma}"));
                }
            }
            EosSpec::StiffenedGas { gamma, rho0, c0, .. } => {
                if gamma <= 1.0 {
                    return bad(format!("stiffened gas requires gamma > 1, got {gamma}"));
                }
                if rho0 <= 0.0 || c0 <= 0.0 {
                    return bad(format!(
                        "stiffened gas requires rho0 > 0 and c0 > 0, got rho0={rho0}, c0={c0}"
                    ));
                }
            }
        }
        Ok(())
    }

    /// Specific internal energy `e(rho)`.
    pub fn internal_energy(&self, rho: f64) -> f64 {
        debug_assert!(rho > 0.0, "non-positive density {rho}");
        match *self {
            EosSpec::IdealGas { gamma } => rho.powf(gamma - 1.0) / (gamma - 1.0),
            EosSpec::StiffenedGas { gamma, p0, rho0, c0 } => {
                let c0s = c0 * c0;
                c0s / (gamma * (gamma - 1.0)) * (rho / rho0).powf(gamma - 1.0)
                    + (rho0 * c0s - gamma * p0) / (gamma * rho)
            }
        }
    }

    /// Pressure `p(rho) = rho^2 de/drho`.
    pub fn pressure(&self, rho: f64) -> f64 {
        debug_assert!(rho > 0.0, "non-positive density {rho}");
        match *self {
            EosSpec::IdealGas { gamma } => rho.powf(gamma),
            EosSpec::StiffenedGas { gamma, p0, rho0, c0 } => {
                p0 + rho0 * c0 * c0 / gamma * ((rho / rho0).powf(gamma) - 1.0)
            }
        }
    }

    /// Sound speed `a = sqrt(dp/drho)`.
    pub fn sound_speed(&self, rho: f64) -> f64 {
        debug_assert!(rho > 0.0, "non-positive density {rho}");
        match *self {
            EosSpec::IdealGas { gamma } => (gamma * rho.powf(gamma - 1.0)).sqrt(),
            EosSpec::StiffenedGas { gamma, rho0, c0, .. } => {
                c0 * (rho / rho0).powf(0.5 * (gamma - 1.0))
            }
        }
    }

    /// Chemical potential `mu = e + p/rho`.
    pub fn chemical_potential(&self, rho: f64) -> f64 {
        self.internal_energy(rho) + self.pressure(rho) / rho
    }

    /// Density at a given pressure (inverse of [`EosSpec::pressure`]).
    ///
    /// Used by case generators that prescribe hydrostatic pressure profiles.
    pub fn density_at_pressure(&self, p: f64) -> f64 {
        match *self {
            EosSpec::IdealGas { gamma } => p.powf(1.0 / gamma),
            EosSpec::StiffenedGas { gamma, p0, rho0, c0 } => {
                rho0 * (1.0 + gamma * (p - p0) / (rho0 * c0 * c0)).powf(1.0 / gamma)
            }
        }
    }

    /// One-pass evaluation of `(e, p, a, mu)` sharing the `powf` calls.
    ///
    /// Identical to composing the individual operations; the flux kernels go
    /// through this to avoid recomputing `rho^gamma` several times per cell.
    #[inline]
    pub fn eval(&self, rho: f64) -> PhaseEval {
        match *self {
            EosSpec::IdealGas { gamma } => {
                let p = rho.powf(gamma);
                // rho^(gamma-1) = p / rho
                let rg1 = p / rho;
                let e = rg1 / (gamma - 1.0);
                PhaseEval { e, p, a2: gamma * rg1, mu: e + rg1 }
            }
            EosSpec::StiffenedGas { gamma, p0, rho0, c0 } => {
                let c0s = c0 * c0;
                let rg = (rho / rho0).powf(gamma);
                let rg1 = rg / (rho / rho0);
                let p = p0 + rho0 * c0s / gamma * (rg - 1.0);
                let e = c0s / (gamma * (gamma - 1.0)) * rg1 + (rho0 * c0s - gamma * p0) / (gamma * rho);
                PhaseEval { e, p, a2: c0s * rg1, mu: e + p / rho }
            }
        }
    }
}

/// Bundle of per-phase quantities at one density.
#[derive(Debug, Clone, Copy)]
pub struct PhaseEval {
    pub e: f64,
    pub p: f64,
    /// Squared sound speed `dp/drho`.
    pub a2: f64,
    pub mu: f64,
}
