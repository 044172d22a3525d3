//! Ghost-layer fills for periodic, transmissive and slip-wall boundaries.
//!
//! Walls mirror the interior with the wall-normal vector component negated;
//! scalar fields whose corner gradient feeds the vertex update get a plain
//! zero-gradient mirror (`f_ghost = f_interior`), which pins the wall-normal
//! component of that gradient to zero on wall vertices. Corner ghosts are
//! produced by running the y pass over the already-filled x ghost columns,
//! so a wall/wall corner carries the diagonal interior value.

use crate::error::SolverError;
use crate::grid::{Field, Lattice, VertexVel, GHOST};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bc {
    Periodic,
    Wall,
    Transmissive,
}

impl Bc {
    pub fn parse(s: &str) -> Result<Bc, SolverError> {
        match s {
            "periodic" => Ok(Bc::Periodic),
            "wall" => Ok(Bc::Wall),
            "transmissive" => Ok(Bc::Transmissive),
            other => Err(SolverError::Config(format!(
                "unknown boundary condition '{other}' (expected periodic|wall|transmissive)"
            ))),
        }
    }
}

/// Boundary condition per domain side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BcSpec {
    pub xlo: Bc,
    pub xhi: Bc,
    pub ylo: Bc,
    pub yhi: Bc,
}

impl BcSpec {
    pub fn per_axis(x: Bc, y: Bc) -> Self {
        BcSpec { xlo: x, xhi: x, ylo: y, yhi: y }
    }

    /// Periodicity must pair up across an axis; anything else may mix.
    pub fn validate(&self) -> Result<(), SolverError> {
        for (lo, hi, axis) in [(self.xlo, self.xhi, "x"), (self.ylo, self.yhi, "y")] {
            if (lo == Bc::Periodic) != (hi == Bc::Periodic) {
                return Err(SolverError::Config(format!(
                    "axis {axis}: periodic on one side requires periodic on the opposite side"
                )));
            }
        }
        Ok(())
    }

    pub fn x_periodic(&self) -> bool {
        self.xlo == Bc::Periodic
    }

    pub fn y_periodic(&self) -> bool {
        self.ylo == Bc::Periodic
    }
}

/// How a component transforms under a wall mirror.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WallSym {
    /// Copied across walls on both axes.
    Scalar,
    /// Negated across x walls (wall-normal there), copied across y walls.
    VecX,
    /// Negated across y walls, copied across x walls.
    VecY,
}

impl WallSym {
    #[inline]
    fn sign_x(self) -> f64 {
        if self == WallSym::VecX {
            -1.0
        } else {
            1.0
        }
    }

    #[inline]
    fn sign_y(self) -> f64 {
        if self == WallSym::VecY {
            -1.0
        } else {
            1.0
        }
    }
}

const G: isize = GHOST as isize;

/// Fills the ghost layers of a center-lattice field.
pub fn fill_center(f: &mut Field, bc: &BcSpec, sym: WallSym) {
    assert_eq!(f.lat, Lattice::Center);
    let (ni, nj) = (f.ni as isize, f.nj as isize);
    let (sx, sy) = (sym.sign_x(), sym.sign_y());
    // x pass over interior rows
    for j in 0..nj {
        match bc.xlo {
            Bc::Periodic => {
                for gx in 1..=G {
                    f.set(-gx, j, f.at(ni - gx, j));
                }
            }
            Bc::Wall => {
                for gx in 1..=G {
                    f.set(-gx, j, sx * f.at(gx - 1, j));
                }
            }
            Bc::Transmissive => {
                for gx in 1..=G {
                    f.set(-gx, j, f.at(0, j));
                }
            }
        }
        match bc.xhi {
            Bc::Periodic => {
                for gx in 0..G {
                    f.set(ni + gx, j, f.at(gx, j));
                }
            }
            Bc::Wall => {
                for gx in 0..G {
                    f.set(ni + gx, j, sx * f.at(ni - 1 - gx, j));
                }
            }
            Bc::Transmissive => {
                for gx in 0..G {
                    f.set(ni + gx, j, f.at(ni - 1, j));
                }
            }
        }
    }
    // y pass over all columns, including the fresh x ghosts
    for i in -G..ni + G {
        match bc.ylo {
            Bc::Periodic => {
                for gy in 1..=G {
                    f.set(i, -gy, f.at(i, nj - gy));
                }
            }
            Bc::Wall => {
                for gy in 1..=G {
                    f.set(i, -gy, sy * f.at(i, gy - 1));
                }
            }
            Bc::Transmissive => {
                for gy in 1..=G {
                    f.set(i, -gy, f.at(i, 0));
                }
            }
        }
        match bc.yhi {
            Bc::Periodic => {
                for gy in 0..G {
                    f.set(i, nj + gy, f.at(i, gy));
                }
            }
            Bc::Wall => {
                for gy in 0..G {
                    f.set(i, nj + gy, sy * f.at(i, nj - 1 - gy));
                }
            }
            Bc::Transmissive => {
                for gy in 0..G {
                    f.set(i, nj + gy, f.at(i, nj - 1));
                }
            }
        }
    }
}

/// Fills the ghost layers of a vertex-lattice field.
///
/// Periodic axes identify the seam vertices (`hi` copies `lo`); walls mirror
/// about the wall vertex line and zero the wall-normal component on it.
pub fn fill_vertex(f: &mut Field, bc: &BcSpec, sym: WallSym) {
    assert_eq!(f.lat, Lattice::Vertex);
    let (ni, nj) = (f.ni as isize, f.nj as isize);
    let (nvx, nvy) = (ni - 1, nj - 1); // index of the last interior vertex
    let (sx, sy) = (sym.sign_x(), sym.sign_y());
    for j in 0..nj {
        match bc.xlo {
            Bc::Periodic => {
                // seam: vertex nvx is the same point as vertex 0
                f.set(nvx, j, f.at(0, j));
                for gx in 1..=G {
                    f.set(-gx, j, f.at(nvx - gx, j));
                }
            }
            Bc::Wall => {
                if sym == WallSym::VecX {
                    f.set(0, j, 0.0);
                }
                for gx in 1..=G {
                    f.set(-gx, j, sx * f.at(gx, j));
                }
            }
            Bc::Transmissive => {
                for gx in 1..=G {
                    f.set(-gx, j, f.at(0, j));
                }
            }
        }
        match bc.xhi {
            Bc::Periodic => {
                for gx in 1..=G {
                    f.set(nvx + gx, j, f.at(gx, j));
                }
            }
            Bc::Wall => {
                if sym == WallSym::VecX {
                    f.set(nvx, j, 0.0);
                }
                for gx in 1..=G {
                    f.set(nvx + gx, j, sx * f.at(nvx - gx, j));
                }
            }
            Bc::Transmissive => {
                for gx in 1..=G {
                    f.set(nvx + gx, j, f.at(nvx, j));
                }
            }
        }
    }
    for i in -G..ni + G {
        match bc.ylo {
            Bc::Periodic => {
                f.set(i, nvy, f.at(i, 0));
                for gy in 1..=G {
                    f.set(i, -gy, f.at(i, nvy - gy));
                }
            }
            Bc::Wall => {
                if sym == WallSym::VecY {
                    f.set(i, 0, 0.0);
                }
                for gy in 1..=G {
                    f.set(i, -gy, sy * f.at(i, gy));
                }
            }
            Bc::Transmissive => {
                for gy in 1..=G {
                    f.set(i, -gy, f.at(i, 0));
                }
            }
        }
        match bc.yhi {
            Bc::Periodic => {
                for gy in 1..=G {
                    f.set(i, nvy + gy, f.at(i, gy));
                }
            }
            Bc::Wall => {
                if sym == WallSym::VecY {
                    f.set(i, nvy, 0.0);
                }
                for gy in 1..=G {
                    f.set(i, nvy + gy, sy * f.at(i, nvy - gy));
                }
            }
            Bc::Transmissive => {
                for gy in 1..=G {
                    f.set(i, nvy + gy, f.at(i, nvy));
                }
            }
        }
    }
}

/// Fills both relative-velocity components, including the wall projection of
/// the wall-normal component.
pub fn fill_vertex_vel(w: &mut VertexVel, bc: &BcSpec) {
    fill_vertex(&mut w.wx, bc, WallSym::VecX);
    fill_vertex(&mut w.wy, bc, WallSym::VecY);
}
