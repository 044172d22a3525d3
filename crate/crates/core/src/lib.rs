//! Finite volume solver for compressible barotropic two-phase flow with an
//! exactly curl-free discretization of the relative velocity.
//!
//! The conserved variables live at cell centers and are advanced with a
//! path-conservative MUSCL-Hancock scheme (Rusanov flux, minmod limiter);
//! the relative velocity lives at cell vertices and is advanced with
//! compatible corner-gradient/curl operators that keep its discrete curl at
//! machine zero, including at slip walls.

pub mod boundary;
pub mod cases;
pub mod config;
pub mod diag;
pub mod driver;
pub mod eos;
pub mod error;
pub mod grid;
pub mod model;
pub mod muscl;
pub mod ops;
pub mod output;
pub mod refsol;
pub mod solver;
pub mod wsolver;

pub use error::SolverError;
