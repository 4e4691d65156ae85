//! Tensor-polar grid on a disk and fixed-rule kernel assembly.
//!
//! Nodes sit on rings graded toward the boundary circle (where the Dirichlet
//! data lives) times a uniform angle set; values interpolate bilinearly in
//! `(ρ, θ)` with angular wraparound and a center blend inside the first
//! ring. Assembly integrates the interpolant against the kernel with fixed,
//! deterministic panels: Gauss nodes over dyadic radial panels reaching down
//! to the quadratic-model core at `d/64`, and Gauss panels in the angle
//! aligned with the grid's angular cells. Every quadrature weight and every
//! interpolation weight is nonnegative, so rows keep the M-matrix sign
//! pattern structurally, independent of resolution.

use super::{power_partition, DiscreteOperator, SolverGrid, Stencil, GRADING_EXPONENT};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::quad;
use crate::special::{self, KernelParams};
use nalgebra::DMatrix;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct PolarGrid {
    pub center: Vec<f64>,
    pub radius: f64,
    /// Ring radii `r_1 < … < r_J = R`; the outermost ring carries data.
    pub radii: Vec<f64>,
    pub angle_count: usize,
    unknown: Vec<usize>,
    known: Vec<usize>,
}

impl PolarGrid {
    pub fn ball(domain: &Domain, rings: usize, angles: usize) -> Result<PolarGrid> {
        PolarGrid::ball_graded(domain, rings, angles, GRADING_EXPONENT)
    }

    /// Polar ball grid with an explicit radial grading exponent `gamma ≥ 1`
    /// toward the rim (1 is uniform).
    pub fn ball_graded(
        domain: &Domain,
        rings: usize,
        angles: usize,
        gamma: f64,
    ) -> Result<PolarGrid> {
        let (center, radius) = match domain {
            Domain::Ball { center, radius } if center.len() == 2 => (center.clone(), *radius),
            _ => {
                return Err(Error::UnsupportedDomain {
                    op: "polar grid",
                    domain: domain.kind_name().to_string(),
                })
            }
        };
        if rings < 2 || angles < 4 {
            return Err(Error::InvalidParameter(format!(
                "polar grid needs at least 2 rings and 4 angles, got {rings} and {angles}"
            )));
        }
        if !(gamma >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "grading exponent must be at least 1, got {gamma}"
            )));
        }
        let nodes = power_partition(0.0, radius, rings, gamma, false);
        let radii: Vec<f64> = nodes[1..].to_vec();
        let j_data = rings;
        let mut unknown = vec![0usize];
        let mut known = Vec::with_capacity(angles);
        for j in 1..=rings {
            for k in 0..angles {
                let idx = 1 + (j - 1) * angles + k;
                if j == j_data {
                    known.push(idx);
                } else {
                    unknown.push(idx);
                }
            }
        }
        Ok(PolarGrid {
            center,
            radius,
            radii,
            angle_count: angles,
            unknown,
            known,
        })
    }

    pub fn node_count(&self) -> usize {
        1 + self.radii.len() * self.angle_count
    }

    pub fn unknown_indices(&self) -> &[usize] {
        &self.unknown
    }

    pub fn known_indices(&self) -> &[usize] {
        &self.known
    }

    /// Ring (1-based) and angle slot of a non-center node index.
    fn ring_angle(&self, idx: usize) -> (usize, usize) {
        let q = idx - 1;
        (q / self.angle_count + 1, q % self.angle_count)
    }

    pub fn node_position(&self, idx: usize) -> [f64; 2] {
        if idx == 0 {
            return [self.center[0], self.center[1]];
        }
        let (j, k) = self.ring_angle(idx);
        let r = self.radii[j - 1];
        let th = 2.0 * std::f64::consts::PI * k as f64 / self.angle_count as f64;
        [
            self.center[0] + r * th.cos(),
            self.center[1] + r * th.sin(),
        ]
    }

    pub fn node_distance(&self, idx: usize) -> f64 {
        if idx == 0 {
            return self.radius;
        }
        let (j, _) = self.ring_angle(idx);
        self.radius - self.radii[j - 1]
    }

    pub(crate) fn stencil(&self, point: &[f64]) -> Stencil {
        let y0 = point[0] - self.center[0];
        let y1 = point[1] - self.center[1];
        let rho = (y0 * y0 + y1 * y1).sqrt().min(self.radius);
        let k_count = self.angle_count;
        let two_pi = 2.0 * std::f64::consts::PI;
        let mut theta = y1.atan2(y0);
        if theta < 0.0 {
            theta += two_pi;
        }
        let ta_raw = theta / two_pi * k_count as f64;
        let k0 = (ta_raw.floor() as usize) % k_count;
        let t_a = ta_raw - ta_raw.floor();
        let k1 = (k0 + 1) % k_count;

        let mut st = Stencil::new();
        let r1 = self.radii[0];
        if rho <= r1 {
            // Triangle-fan patch: barycentric interpolation on the wedge
            // (center, ring-1 node k0, ring-1 node k1). Exact on affine
            // fields with nonnegative weights inside the inscribed polygon;
            // the sliver between chord and arc clamps to the chord (pure
            // angular interpolation), keeping weights nonnegative there too.
            let dtheta = two_pi / k_count as f64;
            let alpha = t_a * dtheta;
            let sin_d = dtheta.sin();
            let lam_b = rho * (dtheta - alpha).sin() / (r1 * sin_d);
            let lam_c = rho * alpha.sin() / (r1 * sin_d);
            let lam_a = 1.0 - lam_b - lam_c;
            if lam_a >= 0.0 {
                st.push(0, lam_a);
                st.push(1 + k0, lam_b);
                st.push(1 + k1, lam_c);
            } else {
                let t = lam_c / (lam_b + lam_c);
                st.push(1 + k0, 1.0 - t);
                st.push(1 + k1, t);
            }
            return st;
        }
        let hi = self
            .radii
            .partition_point(|&r| r < rho)
            .clamp(1, self.radii.len() - 1);
        let lo = hi - 1;
        let t_r = ((rho - self.radii[lo]) / (self.radii[hi] - self.radii[lo])).clamp(0.0, 1.0);
        let base_lo = 1 + lo * k_count;
        let base_hi = 1 + hi * k_count;
        st.push(base_lo + k0, (1.0 - t_r) * (1.0 - t_a));
        st.push(base_lo + k1, (1.0 - t_r) * t_a);
        st.push(base_hi + k0, t_r * (1.0 - t_a));
        st.push(base_hi + k1, t_r * t_a);
        st
    }
}

/// Assemble the collocation matrix for a polar grid.
pub fn assemble_polar(grid: &PolarGrid, params: &KernelParams) -> Result<DiscreteOperator> {
    if params.n != 2 {
        return Err(Error::InvalidParameter(format!(
            "polar assembly is two-dimensional, got kernel dimension {}",
            params.n
        )));
    }
    let s = params.s;
    let c_norm = special::normalization_constant(params);
    let n_all = grid.node_count();
    let pi = std::f64::consts::PI;

    // Angular rule on [0, π]: Gauss-8 panels aligned with the grid's angular
    // cells so interpolation kinks sit on panel boundaries where possible.
    // An even panel count keeps π/2 (where a probe pair crosses the node's
    // own ring line) on a boundary too.
    let ang_panels = {
        let p = (grid.angle_count / 2).max(12);
        p + p % 2
    };
    let mut ang_nodes: Vec<(f64, f64, f64)> = Vec::with_capacity(8 * ang_panels);
    for p in 0..ang_panels {
        let lo = pi * p as f64 / ang_panels as f64;
        let hi = pi * (p + 1) as f64 / ang_panels as f64;
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for &(t, w) in quad::gauss_8() {
            let phi = mid + half * t;
            ang_nodes.push((phi.cos(), phi.sin(), w * half));
        }
    }

    let rows: Vec<Vec<f64>> = grid
        .unknown
        .par_iter()
        .map(|&i| {
            let xi = grid.node_position(i);
            let d = grid.node_distance(i);
            let mut row = vec![0.0; n_all];
            let add_ring = |rho: f64, scale: f64, row: &mut Vec<f64>| {
                for &(cp, sp, wa) in &ang_nodes {
                    let cw = scale * wa;
                    row[i] += 2.0 * cw;
                    for &sgn in &[1.0f64, -1.0] {
                        let p = [xi[0] + sgn * rho * cp, xi[1] + sgn * rho * sp];
                        let st = grid.stencil(&p);
                        for k in 0..st.len {
                            row[st.idx[k]] -= cw * st.w[k];
                        }
                    }
                }
            };

            // Quadratic-model core out to the nearest interpolation kink:
            // inside the node's cell star the interpolant is smooth, so the
            // paired average is genuinely even in ρ there and the model
            // A(ρ) ≈ A(y_core)(ρ/y_core)² carries the right curvature. A
            // fixed fraction of d instead would sample across the kink at
            // the node and inject an O(h) consistency error at every row.
            let y_core = {
                let (h_in, h_out) = if i == 0 {
                    (grid.radii[0], grid.radii[0])
                } else {
                    let (j, _) = grid.ring_angle(i);
                    let inner = if j >= 2 {
                        grid.radii[j - 1] - grid.radii[j - 2]
                    } else {
                        grid.radii[0]
                    };
                    (inner, grid.radii[j] - grid.radii[j - 1])
                };
                let h_ang = if i == 0 {
                    grid.radii[0]
                } else {
                    let (j, _) = grid.ring_angle(i);
                    2.0 * grid.radii[j - 1] * (pi / grid.angle_count as f64).sin()
                };
                h_in.min(h_out).min(h_ang).min(d)
            };
            add_ring(y_core, y_core.powf(-2.0 * s) / (2.0 - 2.0 * s), &mut row);
            // Doubling panels from the core cut out to the horizon d.
            let mut cuts = vec![y_core];
            let mut cur = y_core;
            while cur < d {
                cur = (2.0 * cur).min(d);
                cuts.push(cur);
            }
            for w in cuts.windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                let half = 0.5 * (w[1] - w[0]);
                for &(t, wq) in quad::gauss_8() {
                    let rho = mid + half * t;
                    add_ring(rho, wq * half * rho.powf(-1.0 - 2.0 * s), &mut row);
                }
            }

            let pref = c_norm * d.powf(2.0 * s - 2.0);
            row.iter_mut().for_each(|v| *v *= pref);
            row
        })
        .collect();

    let nu = grid.unknown.len();
    let nk = grid.known.len();
    let mut a = DMatrix::zeros(nu, nu);
    let mut b = DMatrix::zeros(nu, nk);
    for (r, row) in rows.iter().enumerate() {
        for (cidx, &j) in grid.unknown.iter().enumerate() {
            a[(r, cidx)] = row[j];
        }
        for (cidx, &j) in grid.known.iter().enumerate() {
            b[(r, cidx)] = row[j];
        }
    }
    Ok(DiscreteOperator {
        a,
        b,
        grid: SolverGrid::Polar(grid.clone()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Affine, Constant, FnField};
    use crate::solver::SolveMethod;

    fn unit_disk() -> Domain {
        Domain::ball(vec![0.0, 0.0], 1.0).unwrap()
    }

    #[test]
    fn grid_layout() {
        let g = PolarGrid::ball(&unit_disk(), 6, 8).unwrap();
        assert_eq!(g.node_count(), 1 + 6 * 8);
        assert_eq!(g.unknown_indices().len(), 1 + 5 * 8);
        assert_eq!(g.known_indices().len(), 8);
        assert!((g.radii.last().unwrap() - 1.0).abs() < 1e-15);
        // Boundary grading: outermost ring gap smaller than the innermost.
        let gaps: Vec<f64> = g.radii.windows(2).map(|w| w[1] - w[0]).collect();
        assert!(gaps.last().unwrap() < gaps.first().unwrap());
    }

    #[test]
    fn stencil_weights_are_a_partition_of_unity() {
        let g = PolarGrid::ball(&unit_disk(), 5, 8).unwrap();
        for &p in &[
            [0.0, 0.0],
            [0.01, 0.02],
            [0.3, 0.4],
            [-0.7, 0.1],
            [0.0, 0.999],
            [0.0, -0.5],
        ] {
            let st = g.stencil(&p);
            let total: f64 = st.w[..st.len].iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "weights {:?}", &st.w[..st.len]);
            assert!(st.w[..st.len].iter().all(|&w| w >= -1e-15));
        }
    }

    #[test]
    fn interpolation_reproduces_nodal_radial_field() {
        let g = PolarGrid::ball(&unit_disk(), 8, 12).unwrap();
        // Radial piecewise-linear data interpolates exactly on rays through
        // nodes.
        let values: Vec<f64> = (0..g.node_count())
            .map(|i| {
                let p = g.node_position(i);
                1.0 - (p[0] * p[0] + p[1] * p[1]).sqrt()
            })
            .collect();
        let sg = SolverGrid::Polar(g.clone());
        for &rho in &[0.1, 0.35, 0.8] {
            let th: f64 = 2.0 * std::f64::consts::PI / 12.0; // through node line
            let p = [rho * th.cos(), rho * th.sin()];
            let v = sg.interpolate(&values, &p);
            assert!((v - (1.0 - rho)).abs() < 1e-12);
        }
    }

    #[test]
    fn sign_pattern_holds_across_s() {
        let g = PolarGrid::ball(&unit_disk(), 6, 8).unwrap();
        for &s in &[0.3, 0.5, 0.75] {
            let params = KernelParams::new(2, s).unwrap();
            let op = assemble_polar(&g, &params).unwrap();
            let rep = op.monotonicity_diagnostics();
            assert!(rep.sign_pattern_ok, "{rep:?} at s = {s}");
        }
    }

    #[test]
    fn torsion_residual_shrinks_at_center() {
        let params = KernelParams::new(2, 0.5).unwrap();
        let u = FnField(|x: &[f64]| (1.0 - x[0] * x[0] - x[1] * x[1]) / 4.0);
        let mut center_errs = Vec::new();
        for &(rings, angles) in &[(40usize, 8usize), (80, 8)] {
            let g = PolarGrid::ball(&unit_disk(), rings, angles).unwrap();
            let op = assemble_polar(&g, &params).unwrap();
            let r = op.apply_to_samples(&u);
            center_errs.push((r[0] - 1.0).abs());
        }
        assert!(
            center_errs[1] < center_errs[0],
            "center residuals {center_errs:?}"
        );
        assert!(center_errs[1] < 8e-3, "{center_errs:?}");
    }

    #[test]
    fn affine_residual_small_in_the_bulk() {
        // Bilinear polar interpolation is not exact on affine fields (the
        // angular direction is curved), so bulk rows carry an O(Δθ²)-type
        // residual that must vanish under refinement. Rows hugging the
        // boundary see the full angular cell width across a tiny horizon and
        // are legitimately worse; they are excluded here and controlled by
        // their large diagonals in actual solves.
        let params = KernelParams::new(2, 0.6).unwrap();
        let u = Affine {
            c: 0.3,
            b: vec![1.0, -0.5],
        };
        let mut errs = Vec::new();
        for &(rings, angles) in &[(8usize, 8usize), (16, 16), (32, 32)] {
            let g = PolarGrid::ball(&unit_disk(), rings, angles).unwrap();
            let op = assemble_polar(&g, &params).unwrap();
            let r = op.apply_to_samples(&u);
            // Antipodal cancellation makes the center row exact for an even
            // angle count.
            assert!(r[0].abs() < 1e-8, "center affine residual {}", r[0]);
            let worst_bulk = grid_bulk_rows(&g)
                .map(|(row, _)| r[row].abs())
                .fold(0.0f64, f64::max);
            errs.push(worst_bulk);
        }
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "{errs:?}");
    }

    /// Rows of unknown nodes at least R/4 from the boundary.
    fn grid_bulk_rows(g: &PolarGrid) -> impl Iterator<Item = (usize, usize)> + '_ {
        g.unknown_indices()
            .iter()
            .enumerate()
            .filter(|&(_, &node)| g.node_distance(node) >= 0.25 * g.radius)
            .map(|(row, &node)| (row, node))
    }

    #[test]
    #[ignore]
    fn diag_scan() {
        for &s in &[0.3, 0.5, 0.7] {
            let params = KernelParams::new(2, s).unwrap();
            let exact = |p: &[f64]| (1.0 - p[0] * p[0] - p[1] * p[1]) / 4.0;
            for &(rings, angles) in &[(40usize, 8usize), (80, 8), (160, 8), (320, 8)] {
                let t0 = std::time::Instant::now();
                let g = PolarGrid::ball(&unit_disk(), rings, angles).unwrap();
                let op = assemble_polar(&g, &params).unwrap();
                let t_asm = t0.elapsed().as_secs_f64();
                let r = op.apply_to_samples(&FnField(exact));
                let worst_res = r.iter().fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
                let t1 = std::time::Instant::now();
                let sol = op
                    .solve_dirichlet(&Constant(1.0), &Constant(0.0), SolveMethod::Auto)
                    .unwrap();
                let t_solve = t1.elapsed().as_secs_f64();
                let sol_err = (0..g.node_count())
                    .map(|i| {
                        let p = g.node_position(i);
                        (sol.node_values[i] - exact(&p)).abs()
                    })
                    .fold(0.0f64, f64::max);
                let aff = op.apply_to_samples(&Affine {
                    c: 0.3,
                    b: vec![1.0, -0.5],
                });
                let aff_res = aff.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                println!(
                    "s={s} rings={rings} angles={angles} res0={:.3e} worst_res={worst_res:.3e} aff={aff_res:.3e} sol_err={sol_err:.3e} asm={t_asm:.2}s solve={t_solve:.2}s",
                    (r[0] - 1.0).abs()
                );
            }
        }
    }

    #[test]
    fn dirichlet_solve_approximates_ball_torsion() {
        // The torsion problem is radial, so the angle count does not limit
        // accuracy; ring refinement drives the error down first-order.
        let params = KernelParams::new(2, 0.5).unwrap();
        let exact = |p: &[f64]| (1.0 - p[0] * p[0] - p[1] * p[1]) / 4.0;
        let mut errs = Vec::new();
        for &(rings, angles) in &[(40usize, 8usize), (80, 8)] {
            let g = PolarGrid::ball(&unit_disk(), rings, angles).unwrap();
            let op = assemble_polar(&g, &params).unwrap();
            let sol = op
                .solve_dirichlet(&Constant(1.0), &Constant(0.0), SolveMethod::Auto)
                .unwrap();
            // rhs is O(1); the factorization residual must sit far below the
            // discretization error.
            assert!(sol.report.residual_max < 1e-6, "{}", sol.report.residual_max);
            let err = (0..g.node_count())
                .map(|i| {
                    let p = g.node_position(i);
                    (sol.node_values[i] - exact(&p)).abs()
                })
                .fold(0.0f64, f64::max);
            errs.push(err);
        }
        assert!(errs[1] < errs[0], "{errs:?}");
        assert!(errs[1] < 4e-3, "{errs:?}");
    }
}
