//! Numerical laboratory for the isotropically censored nonlocal operator
//!
//! ```text
//!                                          ⌠        u(x) - u(y)
//!   L u(x) = C(n,s) · d(x)^(2s-2) · P.V.   ⎮        ───────────── dy
//!                                          ⌡B(x,d(x)) |x - y|^(n+2s)
//! ```
//!
//! where `d(x)` is the distance from `x` to the boundary of the domain, so the
//! interaction radius shrinks to zero at the boundary, and `C(n,s)` is the
//! normalization that makes `L` act like `-Δ` on quadratics (`L|x|² = -2n`).
//! All evaluations use the symmetrized form
//!
//! ```text
//!   L u(x) = (C(n,s)/2) · d(x)^(2s-2) · ∫_{B(0,d(x))}
//!            (2u(x) - u(x+y) - u(x-y)) / |y|^(n+2s) dy ,
//! ```
//!
//! which needs no principal value for `C²` fields.
//!
//! The crate provides:
//!
//! * [`special`] — the normalization constant, the one-parameter family
//!   `psi(p,t)` controlling how `L` acts on powers of the distance, and the
//!   coefficient `a(p)` with its derivative series;
//! * [`domain`] — intervals, balls, half-spaces, the half-line section used for
//!   1-d boundary profiles, and a `C^{1,1}` smoothed distance;
//! * [`operator`] — adaptive pointwise evaluation of `L u(x)`, the half-space
//!   reduction to a 1-d profile integral, and boundary-limit diagnostics;
//! * [`barrier`] — torsion fields, exterior-ball distance powers, and a
//!   certified boundary barrier construction;
//! * [`solver`] — collocation discretizations on graded 1-d grids and polar
//!   grids for the 2-d ball, with monotonicity diagnostics and convergence
//!   studies;
//! * [`stochastic`] — a censored jump-diffusion sampler whose small jumps are
//!   compensated by a Brownian term, estimating Dirichlet solutions à la
//!   Feynman–Kac;
//! * [`analysis`] — boundary quotient profiles, `u/d ≈ c₀ + K d^α` fits,
//!   oscillation-decay measurements, and weighted L¹ norms.
//!
//! Scalar points are passed as `&[f64]` slices; the slice length is the
//! dimension (1, 2, or 3 throughout).

// Guards are written `!(x > 0.0)` rather than `x <= 0.0` on purpose: the
// negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod barrier;
pub mod domain;
pub mod error;
pub mod field;
pub mod operator;
pub mod quad;
pub mod solver;
pub mod special;
pub mod stochastic;

pub(crate) mod vecn;

pub use error::Error;
pub use quad::{QuadResult, QuadratureSpec};
pub use special::KernelParams;
