//! Torsion and boundary barrier fields, with numerical certification.
//!
//! The geometric setting is a domain with an exterior tangent ball: the
//! boundary passes through the origin with inward normal `e_n`, and the ball
//! of radius `b` centered at `-b e_n` lies outside. Two distance fields
//! organize everything:
//!
//! * `d_B(y) = |y + b e_n| - b`, distance to the exterior ball, and
//! * `d_T(z) = (z + b e_n)·v - b`, distance to the plane tangent to that
//!   ball at the point of `∂B` nearest a chosen anchor `x`, where
//!   `v = (x + b e_n)/|x + b e_n|`.
//!
//! Powers of `d_T` are exactly tractable: with `t = d(x)/d_T(x) ∈ (0, 1]`,
//!
//! ```text
//!   L (d_T^p)(x) = -ψ(p, t) · d_T(x)^(p-2) ,
//! ```
//!
//! by scaling `y = d_T(x) z` and rotating `v` onto `e_n` inside the
//! isotropic kernel. Powers of `d_B` inherit this up to a curvature gap
//! `0 ≤ d_B - d_T ≤ |transverse|²/(2b)` on interaction balls, which is small
//! on collars whose size is a fraction of `b`. The barrier built here,
//!
//! ```text
//!   φ = (2 d_B - d_B^p) / r0 ,
//! ```
//!
//! vanishes at the tangency point, is nonnegative where `d_B ≤ 2`, exceeds 1
//! on the shell `{r0 ≤ d_B ≤ 2r0}`, grows at most linearly on the inward
//! ray, and is certified numerically to satisfy `L φ ≥ threshold` on a
//! geometric collar of near-boundary points.

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::operator;
use crate::quad::QuadratureSpec;
use crate::special::KernelParams;
use crate::vecn;

/// `φ(x) = (M² - |x|²) / (2n)`: maps to the constant 1 under the operator on
/// any domain, and stays nonnegative on domains contained in the ball of
/// radius `M` about the origin.
#[derive(Debug, Clone)]
pub struct TorsionField {
    pub m: f64,
    pub n: usize,
}

impl TorsionField {
    pub fn new(m: f64, n: usize) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) || !(1..=3).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "torsion field needs m > 0 and n in 1..=3, got m = {m}, n = {n}"
            )));
        }
        Ok(TorsionField { m, n })
    }

    /// Smallest valid `m` for a given bounded domain: the far radius of the
    /// domain seen from the origin.
    pub fn enclosing(domain: &Domain) -> Result<Self> {
        let n = domain.dim();
        let m = match domain {
            Domain::Interval { a, b } => a.abs().max(b.abs()),
            Domain::Ball { center, radius } => vecn::norm(center) + radius,
            _ => {
                return Err(Error::UnsupportedDomain {
                    op: "torsion enclosing radius",
                    domain: domain.kind_name().to_string(),
                })
            }
        };
        TorsionField::new(m, n)
    }
}

impl ScalarField for TorsionField {
    fn eval(&self, x: &[f64]) -> f64 {
        (self.m * self.m - vecn::dot(x, x)) / (2.0 * self.n as f64)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(x.iter().map(|c| -c / self.n as f64).collect())
    }

    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = x.len();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            h[i * n + i] = -1.0 / self.n as f64;
        }
        Some(h)
    }

    fn smoothness_note(&self) -> &'static str {
        "quadratic polynomial"
    }
}

/// `d_B(y) = |y + b e_n| - b`, distance to the exterior tangent ball.
pub fn exterior_ball_distance(b: f64, y: &[f64]) -> f64 {
    let n = y.len();
    let mut w2 = 0.0;
    for (i, &c) in y.iter().enumerate() {
        let t = if i == n - 1 { c + b } else { c };
        w2 += t * t;
    }
    w2.sqrt() - b
}

/// `d_B(y)^p`, clamped to zero on the ball side so closure evaluations under
/// rounding stay defined.
#[derive(Debug, Clone)]
pub struct ExteriorBallPower {
    pub b: f64,
    pub p: f64,
}

impl ExteriorBallPower {
    pub fn new(b: f64, p: f64) -> Result<Self> {
        if !(b > 0.0 && p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exterior ball power needs b > 0 and p > 0, got b = {b}, p = {p}"
            )));
        }
        Ok(ExteriorBallPower { b, p })
    }
}

impl ScalarField for ExteriorBallPower {
    fn eval(&self, y: &[f64]) -> f64 {
        exterior_ball_distance(self.b, y).max(0.0).powf(self.p)
    }

    fn gradient(&self, y: &[f64]) -> Option<Vec<f64>> {
        let n = y.len();
        let mut w: Vec<f64> = y.to_vec();
        w[n - 1] += self.b;
        let r = vecn::norm(&w);
        let d = r - self.b;
        if d <= 0.0 {
            return None;
        }
        let c = self.p * d.powf(self.p - 1.0) / r;
        Some(w.iter().map(|&wi| c * wi).collect())
    }

    fn hessian(&self, y: &[f64]) -> Option<Vec<f64>> {
        let n = y.len();
        let mut w: Vec<f64> = y.to_vec();
        w[n - 1] += self.b;
        let r = vecn::norm(&w);
        let d = r - self.b;
        if d <= 0.0 {
            return None;
        }
        // D²(d^p) = p(p-1) d^(p-2) v v' + p d^(p-1) (I - v v')/r with v = w/r.
        let c1 = self.p * (self.p - 1.0) * d.powf(self.p - 2.0);
        let c2 = self.p * d.powf(self.p - 1.0) / r;
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let vij = w[i] * w[j] / (r * r);
                h[i * n + j] = (c1 - c2) * vij + if i == j { c2 } else { 0.0 };
            }
        }
        Some(h)
    }

    fn smoothness_note(&self) -> &'static str {
        "smooth off the exterior sphere; fractional powers kink at zero distance"
    }
}

/// `max(d_T, 0)^p` for the tangent plane anchored at `x`.
#[derive(Debug, Clone)]
pub struct TangentPlanePower {
    pub b: f64,
    pub p: f64,
    /// Unit normal of the tilted plane, pointing into the domain.
    pub v: Vec<f64>,
}

impl TangentPlanePower {
    /// Frame anchored at `x`: `v = (x + b e_n)/|x + b e_n|`.
    pub fn anchored_at(b: f64, p: f64, x: &[f64]) -> Result<Self> {
        if !(b > 0.0 && p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tangent plane power needs b > 0 and p > 0, got b = {b}, p = {p}"
            )));
        }
        let n = x.len();
        let mut v: Vec<f64> = x.to_vec();
        v[n - 1] += b;
        let r = vecn::norm(&v);
        if r == 0.0 {
            return Err(Error::InvalidParameter(
                "anchor coincides with the exterior ball center".into(),
            ));
        }
        v.iter_mut().for_each(|c| *c /= r);
        Ok(TangentPlanePower { b, p, v })
    }

    pub fn plane_distance(&self, z: &[f64]) -> f64 {
        let n = z.len();
        let mut acc = 0.0;
        for (i, &c) in z.iter().enumerate() {
            let t = if i == n - 1 { c + self.b } else { c };
            acc += t * self.v[i];
        }
        acc - self.b
    }
}

impl ScalarField for TangentPlanePower {
    fn eval(&self, z: &[f64]) -> f64 {
        self.plane_distance(z).max(0.0).powf(self.p)
    }

    fn gradient(&self, z: &[f64]) -> Option<Vec<f64>> {
        let dt = self.plane_distance(z);
        if dt <= 0.0 {
            return None;
        }
        let c = self.p * dt.powf(self.p - 1.0);
        Some(self.v.iter().map(|&vi| c * vi).collect())
    }

    fn hessian(&self, z: &[f64]) -> Option<Vec<f64>> {
        let dt = self.plane_distance(z);
        if dt <= 0.0 {
            return None;
        }
        let n = z.len();
        let c = self.p * (self.p - 1.0) * dt.powf(self.p - 2.0);
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                h[i * n + j] = c * self.v[i] * self.v[j];
            }
        }
        Some(h)
    }

    fn smoothness_note(&self) -> &'static str {
        "power of an affine function, smooth where positive"
    }
}

/// Curvature gap between ball and tangent-plane distances at `z`, anchored
/// at `x`: returns `(d_B(z) - d_T(z), |transverse part of z - x|²/(2b))`.
/// On interaction balls `B_{d(x)}(x)` the gap lies in `[0, bound]`.
pub fn tangent_comparison_gap(b: f64, x: &[f64], z: &[f64]) -> Result<(f64, f64)> {
    let plane = TangentPlanePower::anchored_at(b, 1.0, x)?;
    let gap = exterior_ball_distance(b, z) - plane.plane_distance(z);
    let dz = vecn::sub(z, x);
    let along = vecn::dot(&dz, &plane.v);
    let trans2 = vecn::dot(&dz, &dz) - along * along;
    Ok((gap, trans2.max(0.0) / (2.0 * b)))
}

/// Collar of near-boundary sample points around the tangency origin:
/// radii `r0·2^(-i)` for 10 dyadic levels, fanned over 5 polar angles
/// `γ_j = j·0.45π/4` off the inward normal (n ≥ 2; on the line only the
/// normal ray exists). All points are interior to the half-space.
pub fn collar_points(r0: f64, n: usize) -> Vec<Vec<f64>> {
    collar_points_dense(r0, n, 10)
}

/// Collar sample with an explicit dyadic depth: `levels` radii per ray.
pub fn collar_points_dense(r0: f64, n: usize, levels: usize) -> Vec<Vec<f64>> {
    let angles: &[f64] = if n == 1 { &[0.0] } else { &[0.0, 1.0, 2.0, 3.0, 4.0] };
    let mut pts = Vec::new();
    for j in angles {
        let gamma = j * 0.45 * std::f64::consts::PI / 4.0;
        let (sg, cg) = gamma.sin_cos();
        for i in 0..levels {
            let rho = r0 * 0.5f64.powi(i as i32);
            let mut x = vec![0.0; n];
            x[n - 1] = rho * cg;
            if n >= 2 {
                x[0] = rho * sg;
            }
            pts.push(x);
        }
    }
    pts
}

/// Outcome of the exponent search for the ball-distance power.
#[derive(Debug, Clone)]
pub struct ExponentChoice {
    pub p: f64,
    /// Worst collar value of `(-L d_B^p) / d_B^(p-2)`.
    pub margin: f64,
    /// Every exponent tried, with its margin, in trial order.
    pub tried: Vec<(f64, f64)>,
}

const MARGIN_THRESHOLD: f64 = 0.5;

/// Select the largest exponent `p = 2 - 2^(-k)` whose normalized operator
/// margin on a reference collar stays at or above 0.5. Larger exponents give
/// sharper boundary growth control, so trials descend from `p` nearest 2.
pub fn choose_exponent(
    b: f64,
    params: &KernelParams,
    spec: &QuadratureSpec,
) -> Result<ExponentChoice> {
    if !(b > 0.0) {
        return Err(Error::InvalidParameter("exterior ball radius must be positive".into()));
    }
    let domain = Domain::half_space(params.n)?;
    let pts = collar_points(0.5 * b, params.n);
    let mut tried = Vec::new();
    for k in (1..=6).rev() {
        let p = 2.0 - 0.5f64.powi(k);
        let field = ExteriorBallPower::new(b, p)?;
        let evals = operator::apply_batch(&domain, &field, &pts, params, spec);
        let mut margin = f64::INFINITY;
        for (pt, ev) in pts.iter().zip(evals) {
            let ev = ev?;
            let db = exterior_ball_distance(b, pt);
            margin = margin.min(-ev.value / db.powf(p - 2.0));
        }
        tried.push((p, margin));
        if margin >= MARGIN_THRESHOLD {
            return Ok(ExponentChoice { p, margin, tried });
        }
    }
    Err(Error::Certification(format!(
        "no exponent in the dyadic family reached margin {MARGIN_THRESHOLD}; tried {tried:?}"
    )))
}

/// The barrier `φ = (2 d_B - d_B^p)/r0` together with its construction data.
#[derive(Debug, Clone)]
pub struct BoundaryBarrier {
    pub b: f64,
    pub p: f64,
    pub r0: f64,
}

impl BoundaryBarrier {
    /// Linear growth constant on the inward normal ray: `φ ≤ C d` there.
    pub fn ray_growth_constant(&self) -> f64 {
        2.0 / self.r0
    }
}

impl ScalarField for BoundaryBarrier {
    fn eval(&self, y: &[f64]) -> f64 {
        let d = exterior_ball_distance(self.b, y).max(0.0);
        (2.0 * d - d.powf(self.p)) / self.r0
    }

    fn smoothness_note(&self) -> &'static str {
        "barrier: smooth off the exterior sphere"
    }
}

/// One certified collar evaluation.
#[derive(Debug, Clone)]
pub struct CollarRow {
    pub point: Vec<f64>,
    pub operator_value: f64,
    pub error_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct CertificationReport {
    pub threshold: f64,
    pub min_value: f64,
    pub rows: Vec<CollarRow>,
    pub passed: bool,
}

/// Evaluate `L φ` on the barrier's own collar and compare with a threshold.
pub fn certify_barrier(
    barrier: &BoundaryBarrier,
    params: &KernelParams,
    spec: &QuadratureSpec,
    threshold: f64,
) -> Result<CertificationReport> {
    certify_barrier_sampled(barrier, params, spec, threshold, 10)
}

/// Certification against a collar sample of explicit dyadic depth.
pub fn certify_barrier_sampled(
    barrier: &BoundaryBarrier,
    params: &KernelParams,
    spec: &QuadratureSpec,
    threshold: f64,
    collar_levels: usize,
) -> Result<CertificationReport> {
    if collar_levels == 0 {
        return Err(Error::InvalidParameter(
            "collar sample needs at least one level".into(),
        ));
    }
    let domain = Domain::half_space(params.n)?;
    let pts = collar_points_dense(barrier.r0, params.n, collar_levels);
    let evals = operator::apply_batch(&domain, barrier, &pts, params, spec);
    let mut rows = Vec::with_capacity(pts.len());
    let mut min_value = f64::INFINITY;
    for (pt, ev) in pts.into_iter().zip(evals) {
        let ev = ev?;
        min_value = min_value.min(ev.value);
        rows.push(CollarRow {
            point: pt,
            operator_value: ev.value,
            error_estimate: ev.error_estimate,
        });
    }
    Ok(CertificationReport {
        threshold,
        min_value,
        passed: min_value >= threshold,
        rows,
    })
}

/// Overrides for the barrier construction: fix the exponent or collar size
/// instead of searching, and set the collar sample density.
#[derive(Debug, Clone)]
pub struct BarrierOptions {
    /// Exponent override; `None` runs the exponent search.
    pub p: Option<f64>,
    /// Collar size override; `None` runs the dyadic descent.
    pub r0: Option<f64>,
    /// Dyadic depth of the certification sample per ray.
    pub collar_levels: usize,
}

impl Default for BarrierOptions {
    fn default() -> Self {
        BarrierOptions {
            p: None,
            r0: None,
            collar_levels: 10,
        }
    }
}

/// Build the boundary barrier: pick the exponent, then the largest dyadic
/// collar size `r0 = 2^(-k)` whose certification clears `1 - slack`.
pub fn build_boundary_barrier(
    b: f64,
    params: &KernelParams,
    spec: &QuadratureSpec,
    slack: f64,
) -> Result<(BoundaryBarrier, CertificationReport)> {
    build_boundary_barrier_with(b, params, spec, slack, &BarrierOptions::default())
}

/// Barrier construction with explicit options. With an `r0` override the
/// single certification report is returned even when it fails (the caller
/// inspects `passed`); with the dyadic search, exhausting all sizes is a
/// certification error as in [`build_boundary_barrier`].
pub fn build_boundary_barrier_with(
    b: f64,
    params: &KernelParams,
    spec: &QuadratureSpec,
    slack: f64,
    opts: &BarrierOptions,
) -> Result<(BoundaryBarrier, CertificationReport)> {
    if !(0.0..1.0).contains(&slack) {
        return Err(Error::InvalidParameter(format!(
            "slack must lie in [0, 1), got {slack}"
        )));
    }
    let p = match opts.p {
        Some(p) => {
            if !(p > 0.0 && p < 2.0) {
                return Err(Error::InvalidParameter(format!(
                    "barrier exponent must lie in (0, 2), got {p}"
                )));
            }
            p
        }
        None => choose_exponent(b, params, spec)?.p,
    };
    let threshold = 1.0 - slack;
    if let Some(r0) = opts.r0 {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "collar size must be positive and finite, got {r0}"
            )));
        }
        let barrier = BoundaryBarrier { b, p, r0 };
        let report =
            certify_barrier_sampled(&barrier, params, spec, threshold, opts.collar_levels)?;
        return Ok((barrier, report));
    }
    let mut last_failure = None;
    for k in 1..=12 {
        let barrier = BoundaryBarrier {
            b,
            p,
            r0: 0.5f64.powi(k),
        };
        let report =
            certify_barrier_sampled(&barrier, params, spec, threshold, opts.collar_levels)?;
        if report.passed {
            return Ok((barrier, report));
        }
        last_failure = Some((barrier.r0, report.min_value));
    }
    Err(Error::Certification(format!(
        "no dyadic collar size certified at threshold {threshold}; last failure {last_failure:?}"
    )))
}
