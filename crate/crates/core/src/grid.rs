//! Staggered Cartesian lattice and ghost-padded fields.
//!
//! Cell centers `(x_p, y_q)` carry the conserved variables; cell vertices
//! (corners of the cells, `(nx+1) x (ny+1)` of them) carry the relative
//! velocity. Both lattices are padded with `GHOST` layers so that the MUSCL
//! stencils and the corner operators can be evaluated up to the boundary.
//!
//! Index convention: interior centers are `0..nx`, interior vertices
//! `0..=nx`; vertex `i` sits between centers `i-1` and `i`, so the vertex at
//! half-index `p+1/2` of the scheme is vertex `p+1` here. Ghost indices are
//! negative or `>= n`.

/// Ghost-layer width. Two layers serve the MUSCL slopes of the first ghost
/// ring and the corner operators near boundaries.
pub const GHOST: usize = 2;

/// Uniform Cartesian grid of `nx x ny` cells over `[x0, x0+lx] x [y0, y0+ly]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaggeredGrid {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub lx: f64,
    pub ly: f64,
    pub dx: f64,
    pub dy: f64,
}

impl StaggeredGrid {
    pub fn new(nx: usize, ny: usize, origin: [f64; 2], extent: [f64; 2]) -> Self {
        assert!(nx >= 1 && ny >= 1, "grid needs at least one cell per direction");
        assert!(extent[0] > 0.0 && extent[1] > 0.0, "domain extents must be positive");
        StaggeredGrid {
            nx,
            ny,
            x0: origin[0],
            y0: origin[1],
            lx: extent[0],
            ly: extent[1],
            dx: extent[0] / nx as f64,
            dy: extent[1] / ny as f64,
        }
    }

    /// x of cell center `p` (interior for `0 <= p < nx`, ghosts beyond).
    #[inline]
    pub fn xc(&self, p: isize) -> f64 {
        self.x0 + (p as f64 + 0.5) * self.dx
    }

    #[inline]
    pub fn yc(&self, q: isize) -> f64 {
        self.y0 + (q as f64 + 0.5) * self.dy
    }

    /// x of vertex `i` (domain corner lattice: `x0 + i*dx`).
    #[inline]
    pub fn xv(&self, i: isize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    #[inline]
    pub fn yv(&self, j: isize) -> f64 {
        self.y0 + j as f64 * self.dy
    }

    /// Cell area `dx*dy`.
    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    /// `h = max(dx, dy)`, the length scale of the artificial viscosity.
    #[inline]
    pub fn h(&self) -> f64 {
        self.dx.max(self.dy)
    }
}

/// Which lattice a field is bound to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lattice {
    Center,
    Vertex,
}

/// Ghost-padded 2D scalar array bound to one of the two lattices.
///
/// Ghost entries are poisoned with NaN on construction; they are only valid
/// after a boundary fill (or an explicit extended-range computation).
#[derive(Debug, Clone)]
pub struct Field {
    pub lat: Lattice,
    /// Interior node counts (centers: `nx`; vertices: `nx+1`).
    pub ni: usize,
    pub nj: usize,
    stride: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn centers(grid: &StaggeredGrid) -> Self {
        Self::new(Lattice::Center, grid.nx, grid.ny)
    }

    pub fn vertices(grid: &StaggeredGrid) -> Self {
        Self::new(Lattice::Vertex, grid.nx + 1, grid.ny + 1)
    }

    fn new(lat: Lattice, ni: usize, nj: usize) -> Self {
        let stride = ni + 2 * GHOST;
        let rows = nj + 2 * GHOST;
        Field { lat, ni, nj, stride, data: vec![f64::NAN, ].repeat(stride * rows) }
    }

    #[inline]
    pub fn stride(&self) -> usize {
        self.stride
    }

    #[inline]
    fn offset(&self, i: isize, j: isize) -> usize {
        debug_assert!(i >= -(GHOST as isize) && i < (self.ni + GHOST) as isize);
        debug_assert!(j >= -(GHOST as isize) && j < (self.nj + GHOST) as isize);
        (j + GHOST as isize) as usize * self.stride + (i + GHOST as isize) as usize
    }

    #[inline]
    pub fn at(&self, i: isize, j: isize) -> f64 {
        self.data[self.offset(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: isize, j: isize, v: f64) {
        let k = self.offset(i, j);
        self.data[k] = v;
    }

    /// Fills every entry (interior and ghosts).
    pub fn fill(&mut self, v: f64) {
        self.data.fill(v);
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Row-parallel map over an index window extending `ring` nodes past the
    /// interior on every side. The closure receives `(i, j)` node indices.
    pub fn compute_ring<F>(&mut self, ring: usize, f: F)
    where
        F: Fn(isize, isize) -> f64 + Sync,
    {
        use rayon::prelude::*;
        assert!(ring <= GHOST);
        let ni = self.ni as isize;
        let nj = self.nj as isize;
        let r = ring as isize;
        let stride = self.stride;
        self.data.par_chunks_mut(stride).enumerate().for_each(|(row, slice)| {
            let j = row as isize - GHOST as isize;
            if j < -r || j >= nj + r {
                return;
            }
            for i in -r..ni + r {
                slice[(i + GHOST as isize) as usize] = f(i, j);
            }
        });
    }

    /// Maximum absolute value over interior nodes.
    pub fn max_abs_interior(&self) -> f64 {
        let mut m: f64 = 0.0;
        for j in 0..self.nj as isize {
            for i in 0..self.ni as isize {
                m = m.max(self.at(i, j).abs());
            }
        }
        m
    }
}

/// Interpolates a center field to vertices: each interior (or `ring`-extended)
/// vertex gets the arithmetic mean of its 4 surrounding cell centers.
pub fn vertex_from_centers(src: &Field, dst: &mut Field, ring: usize) {
    assert_eq!(src.lat, Lattice::Center);
    assert_eq!(dst.lat, Lattice::Vertex);
    debug_assert!(src.at(-1, -1).is_finite(), "ghost layers not filled");
    dst.compute_ring(ring, |i, j| {
        0.25 * (src.at(i - 1, j - 1) + src.at(i, j - 1) + src.at(i - 1, j) + src.at(i, j))
    });
}

/// Interpolates a vertex field to centers: mean of the 4 corner vertices.
pub fn center_from_vertices(src: &Field, dst: &mut Field, ring: usize) {
    assert_eq!(src.lat, Lattice::Vertex);
    assert_eq!(dst.lat, Lattice::Center);
    if ring > 0 {
        debug_assert!(src.at(-1, -1).is_finite(), "ghost layers not filled");
    }
    dst.compute_ring(ring, |p, q| {
        0.25 * (src.at(p, q) + src.at(p + 1, q) + src.at(p, q + 1) + src.at(p + 1, q + 1))
    });
}

/// Relative-velocity components on the vertex lattice.
#[derive(Debug, Clone)]
pub struct VertexVel {
    pub wx: Field,
    pub wy: Field,
}

impl VertexVel {
    pub fn zeros(grid: &StaggeredGrid) -> Self {
        let mut wx = Field::vertices(grid);
        let mut wy = Field::vertices(grid);
        wx.fill(0.0);
        wy.fill(0.0);
        VertexVel { wx, wy }
    }
}
