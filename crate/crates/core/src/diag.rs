//! Curl-error norms, conservation totals, error norms and convergence
//! orders.
//!
//! Reductions run row by row in index order, so diagnostics are
//! bit-reproducible regardless of the worker count used by the solver
//! stages.

use crate::grid::{Field, StaggeredGrid, VertexVel};
use crate::model::{self, CenterState, ClampStats, PhasePair};
use crate::ops;

/// Area-weighted L1 norm of the discrete curl of a vertex field:
/// `sum_cells |curl_h(w)| dx dy` over the interior.
pub fn curl_error_l1(grid: &StaggeredGrid, w: &VertexVel) -> f64 {
    let (dx, dy) = (grid.dx, grid.dy);
    let mut total = 0.0;
    for q in 0..grid.ny as isize {
        let mut row = 0.0;
        for p in 0..grid.nx as isize {
            row += ops::center_curl_at(&w.wx, &w.wy, p, q, dx, dy).abs();
        }
        total += row;
    }
    total * grid.cell_area()
}

/// Same norm for a cell-centered `w` (the non-structure-preserving variant),
/// using plain second-order central differences. Boundary-adjacent cells use
/// ghost values, so the fields must be filled.
pub fn curl_error_l1_centered(grid: &StaggeredGrid, wcx: &Field, wcy: &Field) -> f64 {
    let (dx, dy) = (grid.dx, grid.dy);
    let mut total = 0.0;
    for q in 0..grid.ny as isize {
        let mut row = 0.0;
        for p in 0..grid.nx as isize {
            let c = (wcy.at(p + 1, q) - wcy.at(p - 1, q)) / (2.0 * dx)
                - (wcx.at(p, q + 1) - wcx.at(p, q - 1)) / (2.0 * dy);
            row += c.abs();
        }
        total += row;
    }
    total * grid.cell_area()
}

/// Conserved totals over the interior (cell sums times cell area).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Totals {
    pub mass1: f64,
    pub mass2: f64,
    pub momx: f64,
    pub momy: f64,
    pub energy: f64,
}

pub fn conservation_totals(
    grid: &StaggeredGrid,
    q: &[Field; model::N_COMP],
    wcx: &Field,
    wcy: &Field,
    phases: &PhasePair,
) -> Totals {
    let mut t = Totals { mass1: 0.0, mass2: 0.0, momx: 0.0, momy: 0.0, energy: 0.0 };
    let mut stats = ClampStats::default();
    for j in 0..grid.ny as isize {
        let (mut m1, mut m2, mut px, mut py, mut en) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..grid.nx as isize {
            let s = CenterState {
                alpha1: q[0].at(i, j),
                m1: q[1].at(i, j),
                m2: q[2].at(i, j),
                mom: [q[3].at(i, j), q[4].at(i, j)],
            };
            m1 += s.m1;
            m2 += s.m2;
            px += s.mom[0];
            py += s.mom[1];
            let p = model::primitives_from_conserved(
                &s,
                [wcx.at(i, j), wcy.at(i, j)],
                phases,
                &mut stats,
            );
            en += model::total_energy(&p);
        }
        t.mass1 += m1;
        t.mass2 += m2;
        t.momx += px;
        t.momy += py;
        t.energy += en;
    }
    let a = grid.cell_area();
    Totals { mass1: t.mass1 * a, mass2: t.mass2 * a, momx: t.momx * a, momy: t.momy * a, energy: t.energy * a }
}

/// Discrete error norms with cell-area weights.
#[derive(Debug, Clone, Copy)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Norms of `numeric - exact` over paired samples, each weighted by `area`.
pub fn error_norms(numeric: &[f64], exact: &[f64], area: f64) -> Norms {
    assert_eq!(numeric.len(), exact.len());
    let mut l1 = 0.0;
    let mut l2 = 0.0;
    let mut linf: f64 = 0.0;
    for (a, b) in numeric.iter().zip(exact) {
        let d = (a - b).abs();
        l1 += d;
        l2 += d * d;
        linf = linf.max(d);
    }
    Norms { l1: l1 * area, l2: (l2 * area).sqrt(), linf }
}

/// Experimental convergence orders from per-mesh errors on a refinement
/// ladder: `order_k = log(e_k / e_{k+1}) / log(h_k / h_{k+1})`.
pub fn eoc(errors: &[f64], hs: &[f64]) -> Vec<f64> {
    assert_eq!(errors.len(), hs.len());
    assert!(errors.len() >= 2, "convergence order needs at least two meshes");
    errors
        .windows(2)
        .zip(hs.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}

/// Linear interpolation of a sampled profile at `x`, clamped to the ends.
pub fn interp_profile(xs: &[f64], vals: &[f64], x: f64) -> f64 {
    debug_assert_eq!(xs.len(), vals.len());
    if x <= xs[0] {
        return vals[0];
    }
    if x >= xs[xs.len() - 1] {
        return vals[vals.len() - 1];
    }
    let k = xs.partition_point(|&v| v < x).max(1);
    let (x0, x1) = (xs[k - 1], xs[k]);
    let t = (x - x0) / (x1 - x0);
    vals[k - 1] * (1.0 - t) + vals[k] * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{fill_center, Bc, BcSpec, WallSym};
    use crate::grid::GHOST;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn curl_l1_of_rigid_rotation_is_curl_times_area() {
        let g = StaggeredGrid::new(20, 20, [-1.0, -1.0], [2.0, 2.0]);
        let mut w = VertexVel::zeros(&g);
        w.wx.compute_ring(0, |_, j| -g.yv(j));
        w.wy.compute_ring(0, |i, _| g.xv(i));
        // |curl| = 2 uniformly over area 4
        assert_relative_eq!(curl_error_l1(&g, &w), 8.0, epsilon = 1e-12);
        let wz = VertexVel::zeros(&g);
        assert_eq!(curl_error_l1(&g, &wz), 0.0);
    }

    #[test]
    fn curl_l1_of_gradient_field_is_machine_zero() {
        let g = StaggeredGrid::new(24, 24, [0.0, 0.0], [1.0, 1.0]);
        let bc = BcSpec::per_axis(Bc::Periodic, Bc::Periodic);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut psi = Field::centers(&g);
        psi.fill(0.0);
        for j in 0..g.ny as isize {
            for i in 0..g.nx as isize {
                psi.set(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        fill_center(&mut psi, &bc, WallSym::Scalar);
        let mut w = VertexVel::zeros(&g);
        ops::corner_gradient(&g, &psi, &mut w.wx, &mut w.wy, 0);
        let scale = w.wx.max_abs_interior() / g.dx;
        assert!(curl_error_l1(&g, &w) <= 1e-13 * scale);
    }

    #[test]
    fn curl_l1_is_absolutely_homogeneous() {
        let g = StaggeredGrid::new(16, 16, [0.0, 0.0], [1.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut w = VertexVel::zeros(&g);
        for j in 0..=g.ny as isize {
            for i in 0..=g.nx as isize {
                w.wx.set(i, j, rng.gen_range(-1.0..1.0));
                w.wy.set(i, j, rng.gen_range(-1.0..1.0));
            }
        }
        let base = curl_error_l1(&g, &w);
        for &a in &[-3.0, 0.5, 7.25] {
            let mut ws = VertexVel::zeros(&g);
            ws.wx.compute_ring(0, |i, j| a * w.wx.at(i, j));
            ws.wy.compute_ring(0, |i, j| a * w.wy.at(i, j));
            assert_relative_eq!(curl_error_l1(&g, &ws), a.abs() * base, max_relative = 1e-12);
        }
    }

    #[test]
    fn totals_of_uniform_state() {
        use crate::eos::EosSpec;
        let g = StaggeredGrid::new(10, 5, [0.0, 0.0], [2.0, 1.0]);
        let phases = PhasePair { eos1: EosSpec::ideal(1.4), eos2: EosSpec::ideal(1.4) };
        let mut q = [
            Field::centers(&g),
            Field::centers(&g),
            Field::centers(&g),
            Field::centers(&g),
            Field::centers(&g),
        ];
        q[0].compute_ring(GHOST, |_, _| 0.5);
        q[1].compute_ring(GHOST, |_, _| 0.5);
        q[2].compute_ring(GHOST, |_, _| 0.5);
        q[3].compute_ring(GHOST, |_, _| 1.0);
        q[4].compute_ring(GHOST, |_, _| 0.0);
        let mut wcx = Field::centers(&g);
        let mut wcy = Field::centers(&g);
        wcx.compute_ring(GHOST, |_, _| 0.0);
        wcy.compute_ring(GHOST, |_, _| 0.0);
        let t = conservation_totals(&g, &q, &wcx, &wcy, &phases);
        // uniform values times domain area 2
        assert_relative_eq!(t.mass1, 1.0, epsilon = 1e-12);
        assert_relative_eq!(t.mass2, 1.0, epsilon = 1e-12);
        assert_relative_eq!(t.momx, 2.0, epsilon = 1e-12);
        assert_relative_eq!(t.momy, 0.0, epsilon = 1e-15);
        // E = 0.5*rho*u^2 + rho*e = 0.5 + 2.5 per unit area
        assert_relative_eq!(t.energy, 6.0, epsilon = 1e-12);
    }

    #[test]
    fn error_norm_examples() {
        let a = vec![1.0, 2.0, 3.0];
        let n = error_norms(&a, &a, 0.1);
        assert_eq!((n.l1, n.l2, n.linf), (0.0, 0.0, 0.0));
        // constant offset c over area A: L1 = c*A
        let b = vec![1.5, 2.5, 3.5];
        let n = error_norms(&b, &a, 0.1);
        assert_relative_eq!(n.l1, 0.5 * 0.3, epsilon = 1e-14);
        assert_relative_eq!(n.linf, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn eoc_examples() {
        // 4x error drop under 2x refinement: order 2
        let o = eoc(&[4.0, 1.0], &[1.0, 0.5]);
        assert_relative_eq!(o[0], 2.0, epsilon = 1e-12);
        // published vortex pair: alpha errors 1.92e-4 -> 1.46e-5 over 192 -> 768
        let o = eoc(&[1.92e-4, 1.46e-5], &[1.0 / 192.0, 1.0 / 768.0]);
        assert_relative_eq!(o[0], 1.86, epsilon = 5e-3);
        // equal errors: order 0
        let o = eoc(&[1.0, 1.0], &[1.0, 0.5]);
        assert_relative_eq!(o[0], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn eoc_of_exact_second_order_sequence() {
        let hs: Vec<f64> = (0..5).map(|k| 0.1 / (1 << k) as f64).collect();
        let errs: Vec<f64> = hs.iter().map(|h| 3.7 * h * h).collect();
        for o in eoc(&errs, &hs) {
            assert_relative_eq!(o, 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn profile_interpolation() {
        let xs = vec![0.0, 1.0, 2.0];
        let vs = vec![0.0, 10.0, 0.0];
        assert_relative_eq!(interp_profile(&xs, &vs, 0.5), 5.0);
        assert_relative_eq!(interp_profile(&xs, &vs, 1.5), 5.0);
        assert_relative_eq!(interp_profile(&xs, &vs, -1.0), 0.0);
        assert_relative_eq!(interp_profile(&xs, &vs, 3.0), 0.0);
    }
}
