//! Run configuration: flat `key = value` text with optional `[section]`
//! headers (a section prefixes its keys with `section.`). Every case
//! provides defaults for the domain, mesh, EOS pair, boundary conditions,
//! CFL number and final time; config keys override them. The resolved
//! configuration is echoed into the output directory for reproducibility.

use crate::boundary::{Bc, BcSpec};
use crate::cases::{self, CaseKind};
use crate::eos::EosSpec;
use crate::error::SolverError;
use crate::model::PhasePair;
use crate::solver::{SchemeParams, Simulation};
use std::path::PathBuf;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub case: CaseKind,
    pub nx: usize,
    pub ny: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub bc: BcSpec,
    pub curl_free: bool,
    pub first_order: bool,
    pub output_dir: PathBuf,
    /// Simulated-time interval between snapshots (none: final only).
    pub output_every: Option<f64>,
    /// Steps between diagnostics rows.
    pub diag_every: u64,
    pub workers: Option<usize>,
    pub phases: PhasePair,
    pub gravity: [f64; 2],
}

impl RunConfig {
    /// Per-case defaults.
    pub fn for_case(case: CaseKind) -> Self {
        let s = cases::setup(case);
        RunConfig {
            case,
            nx: s.default_mesh.0,
            ny: s.default_mesh.1,
            cfl: s.cfl,
            t_end: s.t_end,
            bc: s.bc,
            curl_free: true,
            first_order: false,
            output_dir: default_output_dir(),
            output_every: None,
            diag_every: 1,
            workers: None,
            phases: s.phases,
            gravity: s.gravity,
        }
    }

    pub fn from_text(text: &str) -> Result<Self, SolverError> {
        let kv = parse_kv(text)?;
        let case_str = kv
            .iter()
            .find(|(k, _)| k == "case")
            .map(|(_, v)| v.clone())
            .ok_or_else(|| SolverError::Config("config needs a 'case' key".into()))?;
        let mut cfg = RunConfig::for_case(CaseKind::parse(&case_str)?);
        for (k, v) in &kv {
            if k != "case" {
                cfg.apply_override(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_override(&mut self, key: &str, value: &str) -> Result<(), SolverError> {
        let bad = |what: &str| {
            Err(SolverError::Config(format!("invalid value '{value}' for key '{key}' ({what})")))
        };
        match key {
            "case" => self.copy_case_defaults(CaseKind::parse(value)?),
            "nx" => match value.parse() {
                Ok(v) => self.nx = v,
                Err(_) => return bad("expected integer"),
            },
            "ny" => match value.parse() {
                Ok(v) => self.ny = v,
                Err(_) => return bad("expected integer"),
            },
            "cfl" => match value.parse() {
                Ok(v) => self.cfl = v,
                Err(_) => return bad("expected float"),
            },
            "t_end" => match value.parse() {
                Ok(v) => self.t_end = v,
                Err(_) => return bad("expected float"),
            },
            "bc.x" => {
                let (lo, hi) = parse_bc_pair(value)?;
                self.bc.xlo = lo;
                self.bc.xhi = hi;
            }
            "bc.y" => {
                let (lo, hi) = parse_bc_pair(value)?;
                self.bc.ylo = lo;
                self.bc.yhi = hi;
            }
            "curl_free" => self.curl_free = parse_on_off(value)?,
            "first_order" => self.first_order = parse_on_off(value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "output_every" => match value.parse() {
                Ok(v) => self.output_every = Some(v),
                Err(_) => return bad("expected float"),
            },
            "diag_every" => match value.parse() {
                Ok(v) => self.diag_every = v,
                Err(_) => return bad("expected integer"),
            },
            "workers" => match value.parse() {
                Ok(v) => self.workers = Some(v),
                Err(_) => return bad("expected integer"),
            },
            "gravity.x" => match value.parse() {
                Ok(v) => self.gravity[0] = v,
                Err(_) => return bad("expected float"),
            },
            "gravity.y" => match value.parse() {
                Ok(v) => self.gravity[1] = v,
                Err(_) => return bad("expected float"),
            },
            _ if key.starts_with("phase1.") || key.starts_with("phase2.") => {
                let field = &key[7..];
                let eos = if key.starts_with("phase1.") {
                    &mut self.phases.eos1
                } else {
                    &mut self.phases.eos2
                };
                apply_eos_override(eos, field, value)?;
            }
            other => {
                return Err(SolverError::Config(format!("unknown config key '{other}'")));
            }
        }
        Ok(())
    }

    fn copy_case_defaults(&mut self, case: CaseKind) {
        let keep_out = self.output_dir.clone();
        *self = RunConfig::for_case(case);
        self.output_dir = keep_out;
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(SolverError::Config(format!("cfl must be in (0,1], got {}", self.cfl)));
        }
        if !(self.t_end > 0.0) {
            return Err(SolverError::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        // ny = 1 is the 1D-degenerate mode used by the Riemann problem
        if self.nx < 4 || (self.ny < 4 && self.ny != 1) {
            return Err(SolverError::Config(format!(
                "mesh too small: nx = {}, ny = {} (need >= 4, or ny = 1)",
                self.nx, self.ny
            )));
        }
        if self.diag_every == 0 {
            return Err(SolverError::Config("diag_every must be >= 1".into()));
        }
        if let Some(o) = self.output_every {
            if !(o > 0.0) {
                return Err(SolverError::Config("output_every must be positive".into()));
            }
        }
        self.bc.validate()?;
        self.phases.eos1.validate()?;
        self.phases.eos2.validate()?;
        Ok(())
    }

    /// Builds and initializes the simulation this config describes.
    pub fn build_simulation(&self) -> Result<Simulation, SolverError> {
        self.validate()?;
        let setup = cases::setup(self.case);
        let grid = setup.make_grid(self.nx, self.ny);
        let scheme = SchemeParams {
            cfl: self.cfl,
            curl_free: self.curl_free,
            first_order: self.first_order,
            gravity: self.gravity,
        };
        let mut sim = Simulation::new(grid, self.phases, self.bc, scheme)?;
        sim.init_with(|x, y| setup.eval(x, y));
        Ok(sim)
    }

    /// Echo of every resolved value, parseable by [`RunConfig::from_text`].
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let bc_str = |lo: Bc, hi: Bc| {
            if lo == hi {
                bc_name(lo).to_string()
            } else {
                format!("{},{}", bc_name(lo), bc_name(hi))
            }
        };
        s.push_str(&format!("case = {}\n", self.case.name()));
        s.push_str(&format!("nx = {}\nny = {}\n", self.nx, self.ny));
        s.push_str(&format!("cfl = {}\nt_end = {}\n", self.cfl, self.t_end));
        s.push_str(&format!("bc.x = {}\n", bc_str(self.bc.xlo, self.bc.xhi)));
        s.push_str(&format!("bc.y = {}\n", bc_str(self.bc.ylo, self.bc.yhi)));
        s.push_str(&format!("curl_free = {}\n", if self.curl_free { "on" } else { "off" }));
        s.push_str(&format!("first_order = {}\n", if self.first_order { "on" } else { "off" }));
        s.push_str(&format!("output_dir = {}\n", self.output_dir.display()));
        if let Some(o) = self.output_every {
            s.push_str(&format!("output_every = {o}\n"));
        }
        s.push_str(&format!("diag_every = {}\n", self.diag_every));
        if let Some(w) = self.workers {
            s.push_str(&format!("workers = {w}\n"));
        }
        s.push_str(&format!("gravity.x = {}\ngravity.y = {}\n", self.gravity[0], self.gravity[1]));
        for (name, eos) in [("phase1", &self.phases.eos1), ("phase2", &self.phases.eos2)] {
            match *eos {
                EosSpec::IdealGas { gamma } => {
                    s.push_str(&format!("{name}.eos = ideal\n{name}.gamma = {gamma}\n"));
                }
                EosSpec::StiffenedGas { gamma, p0, rho0, c0 } => {
                    s.push_str(&format!(
                        "{name}.eos = stiffened\n{name}.gamma = {gamma}\n{name}.p0 = {p0}\n{name}.rho0 = {rho0}\n{name}.c0 = {c0}\n"
                    ));
                }
            }
        }
        s
    }
}

fn bc_name(bc: Bc) -> &'static str {
    match bc {
        Bc::Periodic => "periodic",
        Bc::Wall => "wall",
        Bc::Transmissive => "transmissive",
    }
}

fn parse_bc_pair(value: &str) -> Result<(Bc, Bc), SolverError> {
    match value.split_once(',') {
        Some((lo, hi)) => Ok((Bc::parse(lo.trim())?, Bc::parse(hi.trim())?)),
        None => {
            let b = Bc::parse(value)?;
            Ok((b, b))
        }
    }
}

fn parse_on_off(value: &str) -> Result<bool, SolverError> {
    match value {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        other => Err(SolverError::Config(format!("expected on|off, got '{other}'"))),
    }
}

fn apply_eos_override(eos: &mut EosSpec, field: &str, value: &str) -> Result<(), SolverError> {
    let parse = |v: &str| -> Result<f64, SolverError> {
        v.parse().map_err(|_| SolverError::Config(format!("expected float, got '{v}'")))
    };
    match field {
        "eos" => {
            *eos = match value {
                "ideal" => EosSpec::ideal(eos.gamma()),
                "stiffened" => match *eos {
                    EosSpec::StiffenedGas { .. } => *eos,
                    EosSpec::IdealGas { gamma } => EosSpec::stiffened(gamma, 0.0, 1.0, 1.0),
                },
                other => {
                    return Err(SolverError::Config(format!(
                        "unknown EOS kind '{other}' (expected ideal|stiffened)"
                    )))
                }
            };
        }
        "gamma" => {
            let v = parse(value)?;
            match eos {
                EosSpec::IdealGas { gamma } => *gamma = v,
                EosSpec::StiffenedGas { gamma, .. } => *gamma = v,
            }
        }
        "p0" | "rho0" | "c0" => {
            let v = parse(value)?;
            match eos {
                EosSpec::StiffenedGas { p0, rho0, c0, .. } => match field {
                    "p0" => *p0 = v,
                    "rho0" => *rho0 = v,
                    _ => *c0 = v,
                },
                EosSpec::IdealGas { .. } => {
                    return Err(SolverError::Config(format!(
                        "'{field}' applies to the stiffened EOS; set .eos = stiffened first"
                    )))
                }
            }
        }
        other => {
            return Err(SolverError::Config(format!("unknown EOS field '{other}'")));
        }
    }
    Ok(())
}

/// Parses `key = value` lines; `[section]` headers prefix following keys
/// with `section.`; `#` starts a comment.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>, SolverError> {
    let mut out = Vec::new();
    let mut section = String::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            section = line[1..line.len() - 1].trim().to_string();
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            SolverError::Config(format!("line {}: expected 'key = value', got '{raw}'", lineno + 1))
        })?;
        let key = if section.is_empty() {
            k.trim().to_string()
        } else {
            format!("{}.{}", section, k.trim())
        };
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

pub fn default_output_dir() -> PathBuf {
    std::env::var_os("TWOPHASE_OUTPUT_DIR").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out"))
}
