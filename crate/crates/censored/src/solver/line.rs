//! One-dimensional grids and exact kernel-moment assembly.
//!
//! On a line grid the interpolant restricted to any pairing radius interval
//! between breakpoints is affine in the radius, so every matrix entry is a
//! combination of the closed-form kernel moments
//!
//! ```text
//!   M0 = ∫ r^(-1-2s) dr ,   M1 = ∫ r^(-2s) dr
//! ```
//!
//! over cells, both evaluated by the cancellation-stable power difference
//! (including the logarithmic case 2s = 1). No quadrature error enters; the
//! only approximation is the interpolant itself plus the quadratic pairing
//! model on the self cell.

use super::{power_partition, DiscreteOperator, SolverGrid, Stencil, GRADING_EXPONENT};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::quad::power_diff;
use crate::special::{self, KernelParams};
use nalgebra::DMatrix;

#[derive(Debug, Clone)]
pub struct LineGrid {
    /// All nodes, ascending, data nodes included.
    pub xs: Vec<f64>,
    /// Indices of interior unknowns.
    pub unknown: Vec<usize>,
    /// Indices of Dirichlet data nodes.
    pub known: Vec<usize>,
    /// Boundary distance at each node.
    pub dist: Vec<f64>,
    pub domain: Domain,
}

impl LineGrid {
    /// Grid on an interval with `m` interior unknowns, power-graded toward
    /// both endpoints with the default exponent.
    pub fn interval(domain: &Domain, m: usize) -> Result<LineGrid> {
        LineGrid::interval_graded(domain, m, GRADING_EXPONENT)
    }

    /// Grid on an interval with `m` interior unknowns and grading exponent
    /// `gamma ≥ 1` (1 is uniform; larger values concentrate nodes at the
    /// endpoints).
    pub fn interval_graded(domain: &Domain, m: usize, gamma: f64) -> Result<LineGrid> {
        let (a, b) = match domain {
            Domain::Interval { a, b } => (*a, *b),
            _ => {
                return Err(Error::UnsupportedDomain {
                    op: "line grid",
                    domain: domain.kind_name().to_string(),
                })
            }
        };
        if m < 3 {
            return Err(Error::InvalidParameter(
                "interval grid needs at least 3 interior nodes".into(),
            ));
        }
        if !(gamma >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "grading exponent must be at least 1, got {gamma}"
            )));
        }
        let mid = 0.5 * (a + b);
        let cells_left = (m + 1).div_ceil(2);
        let cells_right = m + 1 - cells_left;
        let mut xs = power_partition(a, mid, cells_left, gamma, true);
        let right = power_partition(mid, b, cells_right, gamma, false);
        xs.extend_from_slice(&right[1..]);
        let last = xs.len() - 1;
        let dist: Vec<f64> = xs.iter().map(|&x| (x - a).min(b - x)).collect();
        Ok(LineGrid {
            unknown: (1..last).collect(),
            known: vec![0, last],
            xs,
            dist,
            domain: domain.clone(),
        })
    }

    /// Grid for the half-line section: unknowns on (0, 1) graded toward the
    /// boundary at 0, Dirichlet data at 0 and on [1, 2]. The boundary
    /// distance is the coordinate itself, so every interaction interval
    /// `(0, 2x)` stays inside the meshed range.
    pub fn half_line_section(m: usize) -> Result<LineGrid> {
        LineGrid::half_line_section_graded(m, GRADING_EXPONENT)
    }

    /// Half-line section grid with an explicit grading exponent `gamma ≥ 1`
    /// toward the boundary at 0.
    pub fn half_line_section_graded(m: usize, gamma: f64) -> Result<LineGrid> {
        if m < 3 {
            return Err(Error::InvalidParameter(
                "half-line grid needs at least 3 interior nodes".into(),
            ));
        }
        if !(gamma >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "grading exponent must be at least 1, got {gamma}"
            )));
        }
        let mut xs = power_partition(0.0, 1.0, m + 1, gamma, true);
        let tail_cells = (m / 2).max(4);
        let tail = power_partition(1.0, 2.0, tail_cells, 1.0, true);
        xs.extend_from_slice(&tail[1..]);
        let dist = xs.clone();
        let unknown: Vec<usize> = (1..=m).collect();
        let known: Vec<usize> = std::iter::once(0)
            .chain(m + 1..xs.len())
            .collect();
        Ok(LineGrid {
            xs,
            unknown,
            known,
            dist,
            domain: Domain::half_line_section(),
        })
    }

    /// Two-point interpolation stencil at a coordinate inside the mesh.
    pub(crate) fn stencil(&self, x: f64) -> Stencil {
        let xs = &self.xs;
        let last = xs.len() - 1;
        let mut st = Stencil::new();
        if x <= xs[0] {
            st.push(0, 1.0);
            return st;
        }
        if x >= xs[last] {
            st.push(last, 1.0);
            return st;
        }
        let hi = xs.partition_point(|&v| v <= x);
        let lo = hi - 1;
        let h = xs[hi] - xs[lo];
        let t = (x - xs[lo]) / h;
        st.push(lo, 1.0 - t);
        st.push(hi, t);
        st
    }
}

/// Assemble the collocation matrix for a line grid.
pub fn assemble_line(grid: &LineGrid, params: &KernelParams) -> Result<DiscreteOperator> {
    if params.n != 1 {
        return Err(Error::InvalidParameter(format!(
            "line assembly is one-dimensional, got kernel dimension {}",
            params.n
        )));
    }
    let s = params.s;
    let c = special::normalization_constant(params);
    let xs = &grid.xs;
    let n_all = xs.len();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(grid.unknown.len());

    for &i in &grid.unknown {
        let xi = xs[i];
        let d = grid.dist[i];
        if !(d > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "unknown node at {xi} has nonpositive boundary distance"
            )));
        }
        let mut row = vec![0.0; n_all];

        // Pairing-radius breakpoints: every node distance below d, then d.
        let mut bp: Vec<f64> = xs
            .iter()
            .map(|&xk| (xk - xi).abs())
            .filter(|&t| t > 1e-14 * d && t < d * (1.0 - 1e-14))
            .collect();
        bp.push(d);
        bp.sort_by(|p, q| p.partial_cmp(q).unwrap());
        bp.dedup_by(|p, q| (*p - *q).abs() <= 1e-14 * d);

        // Self cell (0, y1): quadratic pairing model with curvature sampled
        // at y1. Finite for every s, exact on quadratic nodal data up to the
        // interpolation error of the samples themselves.
        let y1 = bp[0];
        let core_scale = y1.powf(-2.0 * s) / (2.0 - 2.0 * s);
        row[i] += 2.0 * core_scale;
        for &sgn in &[1.0, -1.0] {
            let st = grid.stencil(xi + sgn * y1);
            for k in 0..st.len {
                row[st.idx[k]] -= core_scale * st.w[k];
            }
        }

        // Remaining cells: the interpolant at xi ± r is affine in r within
        // each cell, contributing through the two kernel moments.
        for w in bp.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let m0 = power_diff(lo, hi, -2.0 * s);
            let m1 = power_diff(lo, hi, 1.0 - 2.0 * s);
            row[i] += 2.0 * m0;
            let r_mid = 0.5 * (lo + hi);
            for &sgn in &[1.0, -1.0] {
                let p = xi + sgn * r_mid;
                let cell_hi = xs.partition_point(|&v| v <= p);
                let cell_lo = cell_hi - 1;
                let h = xs[cell_hi] - xs[cell_lo];
                // u(xi + sgn r) = u_lo (xs_hi - xi - sgn r)/h
                //              + u_hi (xi + sgn r - xs_lo)/h.
                let (a_lo, b_lo) = ((xs[cell_hi] - xi) / h, -sgn / h);
                let (a_hi, b_hi) = ((xi - xs[cell_lo]) / h, sgn / h);
                row[cell_lo] -= a_lo * m0 + b_lo * m1;
                row[cell_hi] -= a_hi * m0 + b_hi * m1;
            }
        }

        let pref = c * d.powf(2.0 * s - 2.0);
        row.iter_mut().for_each(|v| *v *= pref);
        rows.push(row);
    }

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
        grid: SolverGrid::Line(grid.clone()),
    })
}
