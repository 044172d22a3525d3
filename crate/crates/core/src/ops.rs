//! Compatible discrete operators on the staggered lattice.
//!
//! The corner gradient maps center scalars to vertex vectors and the curl
//! maps vertex vectors back to center scalars; their composition vanishes
//! identically, cell by cell, which is what keeps the relative velocity
//! curl-free under the vertex update. The divergence and the vector
//! Laplacian are built from the same corner stencils so that the
//! stabilization term cannot break that identity.

use crate::grid::{center_from_vertices, Field, Lattice, StaggeredGrid};

/// x-part of the corner gradient of a center field, at vertex `(i, j)`.
#[inline]
pub fn corner_dx(f: &Field, i: isize, j: isize, dx: f64) -> f64 {
    debug_assert_eq!(f.lat, Lattice::Center);
    0.5 * (f.at(i, j) - f.at(i - 1, j) + f.at(i, j - 1) - f.at(i - 1, j - 1)) / dx
}

/// y-part of the corner gradient of a center field, at vertex `(i, j)`.
#[inline]
pub fn corner_dy(f: &Field, i: isize, j: isize, dy: f64) -> f64 {
    debug_assert_eq!(f.lat, Lattice::Center);
    0.5 * (f.at(i, j) - f.at(i, j - 1) + f.at(i - 1, j) - f.at(i - 1, j - 1)) / dy
}

/// Corner gradient of a center scalar, written to two vertex fields.
///
/// `ring` extends the computed window past the interior vertices; the source
/// must be valid one cell further out.
pub fn corner_gradient(grid: &StaggeredGrid, phi: &Field, gx: &mut Field, gy: &mut Field, ring: usize) {
    let (dx, dy) = (grid.dx, grid.dy);
    gx.compute_ring(ring, |i, j| corner_dx(phi, i, j, dx));
    gy.compute_ring(ring, |i, j| corner_dy(phi, i, j, dy));
}

/// z-component of the discrete curl of a vertex vector field at cell `(p, q)`.
///
/// Average-of-differences over the four corner vertices of the cell.
#[inline]
pub fn center_curl_at(wx: &Field, wy: &Field, p: isize, q: isize, dx: f64, dy: f64) -> f64 {
    0.5 * (wy.at(p + 1, q + 1) - wy.at(p, q + 1) + wy.at(p + 1, q) - wy.at(p, q)) / dx
        - 0.5 * (wx.at(p + 1, q + 1) - wx.at(p + 1, q) + wx.at(p, q + 1) - wx.at(p, q)) / dy
}

/// Discrete curl of a vertex field on the center lattice.
pub fn center_curl(grid: &StaggeredGrid, wx: &Field, wy: &Field, out: &mut Field, ring: usize) {
    debug_assert_eq!(wx.lat, Lattice::Vertex);
    let (dx, dy) = (grid.dx, grid.dy);
    out.compute_ring(ring, |p, q| center_curl_at(wx, wy, p, q, dx, dy));
}

/// Discrete divergence of a vertex field, back on the vertex lattice.
///
/// The field is first interpolated to cell centers (4-point mean) and the
/// corner-difference stencil is applied to the interpolated components. The
/// center-valued components are returned in `cx`/`cy` for reuse.
pub fn vertex_divergence(
    grid: &StaggeredGrid,
    wx: &Field,
    wy: &Field,
    cx: &mut Field,
    cy: &mut Field,
    out: &mut Field,
    ring: usize,
) {
    center_from_vertices(wx, cx, ring + 1);
    center_from_vertices(wy, cy, ring + 1);
    let (dx, dy) = (grid.dx, grid.dy);
    let cx_ref = &*cx;
    let cy_ref = &*cy;
    out.compute_ring(ring, |i, j| corner_dx(cx_ref, i, j, dx) + corner_dy(cy_ref, i, j, dy));
}

/// Discrete vector Laplacian `grad(div w) - curl(curl w)` at vertices.
///
/// The grad-of-div part takes the vertex divergence, interpolates it to
/// centers and applies the corner gradient; the curl-curl part is the
/// rotated corner gradient `(d_y c, -d_x c)` of the center curl `c`, the one
/// composition that vanishes exactly on compatible gradient fields.
pub struct LaplacianScratch {
    pub cx: Field,
    pub cy: Field,
    pub div_v: Field,
    pub div_c: Field,
    pub curl_c: Field,
}

impl LaplacianScratch {
    pub fn new(grid: &StaggeredGrid) -> Self {
        LaplacianScratch {
            cx: Field::centers(grid),
            cy: Field::centers(grid),
            div_v: Field::vertices(grid),
            div_c: Field::centers(grid),
            curl_c: Field::centers(grid),
        }
    }
}

pub fn vertex_laplacian(
    grid: &StaggeredGrid,
    wx: &Field,
    wy: &Field,
    scratch: &mut LaplacianScratch,
    out_x: &mut Field,
    out_y: &mut Field,
) {
    let (dx, dy) = (grid.dx, grid.dy);
    vertex_divergence(grid, wx, wy, &mut scratch.cx, &mut scratch.cy, &mut scratch.div_v, 1);
    center_from_vertices(&scratch.div_v, &mut scratch.div_c, 1);
    center_curl(grid, wx, wy, &mut scratch.curl_c, 1);
    let dc = &scratch.div_c;
    let cc = &scratch.curl_c;
    out_x.compute_ring(0, |i, j| corner_dx(dc, i, j, dx) - corner_dy(cc, i, j, dy));
    out_y.compute_ring(0, |i, j| corner_dy(dc, i, j, dy) + corner_dx(cc, i, j, dx));
}
