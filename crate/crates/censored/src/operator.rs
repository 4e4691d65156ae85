//! Pointwise evaluation of the censored operator.
//!
//! For an interior point `x` with boundary distance `d = d(x)` the operator
//! is computed in the symmetrized form
//!
//! ```text
//!   L u(x) = (C/2) d^(2s-2) ∫_{|y|<d} (2u(x) - u(x+y) - u(x-y)) |y|^(-n-2s) dy ,
//! ```
//!
//! reduced to a radial integral of spherical averages
//!
//! ```text
//!   W = ∫₀^d A(r) r^(-1-2s) dr ,
//!   A(r) = ∫_{S^(n-1)} (2u(x) - u(x+rω) - u(x-rω)) dσ(ω) ,
//! ```
//!
//! so that `L u(x) = (C/2) d^(2s-2) W`. The paired difference `A` has an even
//! Taylor expansion at `r = 0`, which the radial engine uses to bridge the
//! kernel singularity without catastrophic cancellation. Error estimates fold
//! in the rounding noise of the pairing, which grows like `d^(-2)` in the
//! final value as `x` approaches the boundary.

use std::cell::Cell;

use crate::domain::{Domain, SmoothedDistance};
use crate::error::{Error, Result};
use crate::field::{ScalarField, SmoothedDistanceField};
use crate::quad::{self, QuadratureSpec};
use crate::special::{self, KernelParams};

/// Result of one operator evaluation, with an a-posteriori error estimate.
#[derive(Debug, Clone, Copy)]
pub struct OperatorEvaluation {
    pub value: f64,
    pub error_estimate: f64,
    pub converged: bool,
    pub refinement_depth_used: u32,
}

/// Convergence bookkeeping shared by the nested angular integrals.
struct AngularState {
    all_converged: Cell<bool>,
    max_depth: Cell<u32>,
}

impl AngularState {
    fn new() -> Self {
        AngularState {
            all_converged: Cell::new(true),
            max_depth: Cell::new(0),
        }
    }

    fn record(&self, converged: bool, depth: u32) {
        if !converged {
            self.all_converged.set(false);
        }
        self.max_depth.set(self.max_depth.get().max(depth));
    }
}

/// `2u(x) - u(x + r·dir) - u(x - r·dir)` without heap allocation.
fn paired_difference(
    u: &dyn ScalarField,
    x: &[f64],
    dir: &[f64; 3],
    r: f64,
    two_ux: f64,
) -> f64 {
    let n = x.len();
    let mut plus = [0.0f64; 3];
    let mut minus = [0.0f64; 3];
    for i in 0..n {
        plus[i] = x[i] + r * dir[i];
        minus[i] = x[i] - r * dir[i];
    }
    two_ux - u.eval(&plus[..n]) - u.eval(&minus[..n])
}

/// Spherical average of the paired difference, including the full sphere
/// measure: n = 1 sums the two directions, n ≥ 2 integrates over the sphere
/// using the y → -y symmetry of the paired integrand.
fn sphere_paired_average(
    u: &dyn ScalarField,
    x: &[f64],
    r: f64,
    two_ux: f64,
    ang_spec: &QuadratureSpec,
    state: &AngularState,
) -> f64 {
    match x.len() {
        1 => 2.0 * paired_difference(u, x, &[1.0, 0.0, 0.0], r, two_ux),
        2 => {
            let f = |theta: f64| {
                paired_difference(u, x, &[theta.cos(), theta.sin(), 0.0], r, two_ux)
            };
            let res = quad::integrate_adaptive(&f, &quad::pi_breakpoints(), ang_spec);
            state.record(res.converged, res.depth_used);
            2.0 * res.value
        }
        3 => {
            // Upper hemisphere doubled; azimuth handled by the periodic rule.
            let f = |theta: f64| {
                let (st, ct) = theta.sin_cos();
                let g = |phi: f64| {
                    let (sp, cp) = phi.sin_cos();
                    paired_difference(u, x, &[st * cp, st * sp, ct], r, two_ux)
                };
                let ring = quad::integrate_periodic(&g, 2.0 * std::f64::consts::PI, ang_spec);
                state.record(ring.converged, ring.depth_used);
                st * ring.value
            };
            let half_pi = 0.5 * std::f64::consts::PI;
            let bp = [0.0, 0.25 * half_pi, 0.5 * half_pi, 0.75 * half_pi, half_pi];
            let res = quad::integrate_adaptive(&f, &bp, ang_spec);
            state.record(res.converged, res.depth_used);
            2.0 * res.value
        }
        n => unreachable!("unsupported dimension {n}"),
    }
}

/// Magnitude scale of `u` over the interaction ball, for noise floors.
fn field_scale(u: &dyn ScalarField, x: &[f64], d: f64) -> f64 {
    let n = x.len();
    let mut m = u.eval(x).abs();
    let mut probe = [0.0f64; 3];
    for i in 0..n {
        for sign in [-1.0, 1.0] {
            probe[..n].copy_from_slice(x);
            probe[i] += sign * d * (1.0 - 1e-12);
            m = m.max(u.eval(&probe[..n]).abs());
        }
    }
    m.max(1.0)
}

fn angular_spec(spec: &QuadratureSpec, noise_one: f64, measure: f64) -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: noise_one * measure,
        rel_tol: (0.5 * spec.rel_tol).max(1e-13),
        max_refinement_depth: spec.max_refinement_depth,
    }
}

fn check_dims(domain: &Domain, params: &KernelParams) -> Result<()> {
    if domain.dim() != params.n {
        return Err(Error::InvalidParameter(format!(
            "kernel dimension {} does not match {} dimension {}",
            params.n,
            domain.kind_name(),
            domain.dim()
        )));
    }
    Ok(())
}

/// Evaluate `L u` at one interior point.
pub fn apply_pointwise(
    domain: &Domain,
    u: &dyn ScalarField,
    x: &[f64],
    params: &KernelParams,
    spec: &QuadratureSpec,
) -> Result<OperatorEvaluation> {
    spec.validate()?;
    check_dims(domain, params)?;
    let d = domain.distance(x)?;
    if d <= 0.0 {
        return Err(Error::InvalidParameter(
            "operator evaluation needs strictly positive boundary distance".into(),
        ));
    }
    let n = params.n;
    let s = params.s;
    let two_ux = 2.0 * u.eval(x);
    let scale = field_scale(u, x, d);
    let noise_one = 4.0 * f64::EPSILON * scale;
    let measure = special::unit_sphere_area(n);
    let ang_spec = angular_spec(spec, noise_one, measure);
    let state = AngularState::new();

    let a_fn = |r: f64| sphere_paired_average(u, x, r, two_ux, &ang_spec, &state);
    // Factor 2 safety on the per-evaluation noise of the spherical average.
    let w = quad::integrate_radial_paired(&a_fn, d, s, spec, 2.0 * noise_one * measure);

    let pref = 0.5 * special::normalization_constant(params) * d.powf(2.0 * s - 2.0);
    Ok(OperatorEvaluation {
        value: pref * w.value,
        error_estimate: pref * w.error_estimate,
        converged: w.converged && state.all_converged.get(),
        refinement_depth_used: w.depth_used.max(state.max_depth.get()),
    })
}

/// Evaluate `L u` at many points in parallel. Each point's quadrature is
/// sequential and independent, so results are bitwise reproducible and in
/// input order regardless of thread count.
pub fn apply_batch(
    domain: &Domain,
    u: &dyn ScalarField,
    points: &[Vec<f64>],
    params: &KernelParams,
    spec: &QuadratureSpec,
) -> Vec<Result<OperatorEvaluation>> {
    use rayon::prelude::*;
    points
        .par_iter()
        .map(|x| apply_pointwise(domain, u, x, params, spec))
        .collect()
}

/// Truncated evaluation over the annulus `eps < |y| < d`, the symmetric
/// principal-value exclusion. Pairing `y ↔ -y` makes the one-sided form
/// `∫ (u(x) - u(x+y))` over the annulus identical to the symmetrized one;
/// the omitted core contributes `O(eps^(2-2s))`, so values converge to
/// `apply_pointwise` at that rate as `eps → 0`.
pub fn apply_pointwise_truncated(
    domain: &Domain,
    u: &dyn ScalarField,
    x: &[f64],
    params: &KernelParams,
    spec: &QuadratureSpec,
    eps: f64,
) -> Result<OperatorEvaluation> {
    spec.validate()?;
    check_dims(domain, params)?;
    let d = domain.distance(x)?;
    if d <= 0.0 {
        return Err(Error::InvalidParameter(
            "operator evaluation needs strictly positive boundary distance".into(),
        ));
    }
    if !(eps > 0.0 && eps < d) {
        return Err(Error::InvalidParameter(format!(
            "exclusion radius must lie in (0, d) = (0, {d}), got {eps}"
        )));
    }
    let n = params.n;
    let s = params.s;
    let two_ux = 2.0 * u.eval(x);
    let scale = field_scale(u, x, d);
    let noise_one = 4.0 * f64::EPSILON * scale;
    let measure = special::unit_sphere_area(n);
    let ang_spec = angular_spec(spec, noise_one, measure);
    let state = AngularState::new();

    let f = |r: f64| {
        sphere_paired_average(u, x, r, two_ux, &ang_spec, &state) * r.powf(-1.0 - 2.0 * s)
    };
    let mut w = quad::integrate_adaptive(&f, &quad::radial_breakpoints(eps, d), spec);
    w.error_estimate += 2.0 * noise_one * measure * (eps.powf(-2.0 * s) - d.powf(-2.0 * s))
        / (2.0 * s);

    let pref = 0.5 * special::normalization_constant(params) * d.powf(2.0 * s - 2.0);
    Ok(OperatorEvaluation {
        value: pref * w.value,
        error_estimate: pref * w.error_estimate,
        converged: w.converged && state.all_converged.get(),
        refinement_depth_used: w.depth_used.max(state.max_depth.get()),
    })
}

/// Operator applied to a one-variable profile `g(x_n)` on the half-space
/// `{x_n > 0}` in `n` dimensions, using the reduction of the spherical
/// average to the polar angle:
///
/// ```text
///   A(r) = |S^(n-2)| ∫₀^π (2g(x) - g(x + r cos θ) - g(x - r cos θ)) sin^(n-2)θ dθ
/// ```
///
/// (for n = 1 the sphere is the two points ±1), and `L g(x) = (C/2) x^(2s-2) W`
/// with the usual radial integral of `A`. The profile is evaluated on `[0, 2x]`.
pub fn apply_halfspace_1d(
    profile: &dyn ScalarField,
    x: f64,
    params: &KernelParams,
    spec: &QuadratureSpec,
) -> Result<OperatorEvaluation> {
    spec.validate()?;
    if !(x > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "half-space profile evaluation needs x > 0, got {x}"
        )));
    }
    let n = params.n;
    let s = params.s;
    let g = |w: f64| profile.eval(&[w]);
    let two_gx = 2.0 * g(x);
    let mut scale = g(x).abs().max(1.0);
    for p in [0.0, 0.5 * x, 1.5 * x, 2.0 * x] {
        scale = scale.max(g(p).abs());
    }
    let noise_one = 4.0 * f64::EPSILON * scale;
    let measure = special::unit_sphere_area(n);
    let ang_spec = angular_spec(spec, noise_one, measure);
    let state = AngularState::new();

    let paired_w = |w: f64| two_gx - g(x + w) - g(x - w);
    let a_fn = |r: f64| -> f64 {
        if n == 1 {
            return 2.0 * paired_w(r);
        }
        let equator = special::unit_sphere_area(n - 1);
        let f = |theta: f64| {
            let c = theta.cos();
            let weight = if n == 2 { 1.0 } else { theta.sin() };
            paired_w(r * c) * weight
        };
        let res = quad::integrate_adaptive(&f, &quad::pi_breakpoints(), &ang_spec);
        state.record(res.converged, res.depth_used);
        equator * res.value
    };
    let w = quad::integrate_radial_paired(&a_fn, x, s, spec, 2.0 * noise_one * measure);

    let pref = 0.5 * special::normalization_constant(params) * x.powf(2.0 * s - 2.0);
    Ok(OperatorEvaluation {
        value: pref * w.value,
        error_estimate: pref * w.error_estimate,
        converged: w.converged && state.all_converged.get(),
        refinement_depth_used: w.depth_used.max(state.max_depth.get()),
    })
}

/// Operator value together with the local Laplacian, quantifying how far the
/// evaluation is from the boundary limit `L u → -Δu` as `d(x) → 0`.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryDefect {
    pub operator: OperatorEvaluation,
    pub laplacian: f64,
    /// `|L u(x) + Δu(x)|`.
    pub defect: f64,
}

pub fn boundary_limit_defect(
    domain: &Domain,
    u: &dyn ScalarField,
    x: &[f64],
    params: &KernelParams,
    spec: &QuadratureSpec,
) -> Result<BoundaryDefect> {
    let h = u
        .hessian(x)
        .ok_or(Error::MissingDerivatives("boundary_limit_defect needs an analytic Hessian"))?;
    let n = x.len();
    if h.len() != n * n {
        return Err(Error::InvalidParameter(format!(
            "hessian has {} entries, expected {}",
            h.len(),
            n * n
        )));
    }
    let lap: f64 = (0..n).map(|i| h[i * n + i]).sum();
    let ev = apply_pointwise(domain, u, x, params, spec)?;
    Ok(BoundaryDefect {
        operator: ev,
        laplacian: lap,
        defect: (ev.value + lap).abs(),
    })
}

/// One row of a smoothed-distance bound check.
#[derive(Debug, Clone)]
pub struct SmoothedBoundRow {
    pub point: Vec<f64>,
    pub evaluation: OperatorEvaluation,
    pub within_bound: bool,
}

/// Verification that `|L δ| ≤ n · Lip(∇δ)` pointwise: the paired second
/// difference of a gradient-Lipschitz field is bounded by `Lip · |y|²`, and
/// the normalization makes `(C/2) d^(2s-2) ∫ |y|² ν(y) dy = n` exactly.
#[derive(Debug, Clone)]
pub struct SmoothedBoundReport {
    pub bound: f64,
    pub rows: Vec<SmoothedBoundRow>,
    pub all_within: bool,
}

pub fn smoothed_distance_bound_check(
    sd: &SmoothedDistance,
    points: &[Vec<f64>],
    params: &KernelParams,
    spec: &QuadratureSpec,
) -> Result<SmoothedBoundReport> {
    let domain = sd.domain().clone();
    let bound = params.n as f64 * sd.gradient_lipschitz_bound();
    let field = SmoothedDistanceField::new(sd.clone());
    let mut rows = Vec::with_capacity(points.len());
    let mut all_within = true;
    for p in points {
        let ev = apply_pointwise(&domain, &field, p, params, spec)?;
        let ok = ev.value.abs() <= bound * (1.0 + 1e-9) + ev.error_estimate;
        all_within &= ok;
        rows.push(SmoothedBoundRow {
            point: p.clone(),
            evaluation: ev,
            within_bound: ok,
        });
    }
    Ok(SmoothedBoundReport {
        bound,
        rows,
        all_within,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Affine, FnField, Monomial, Quadratic, SineWave};
    use approx::assert_relative_eq;

    fn torsion(m: f64, n: usize) -> FnField<impl Fn(&[f64]) -> f64 + Sync> {
        FnField(move |x: &[f64]| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            (m * m - r2) / (2.0 * n as f64)
        })
    }

    #[test]
    fn interval_torsion_maps_to_one() {
        let dom = Domain::interval(-0.5, 0.5).unwrap();
        let u = torsion(0.5, 1);
        let spec = QuadratureSpec::default();
        for &s in &[0.3, 0.5, 0.75] {
            let params = KernelParams::new(1, s).unwrap();
            for &x in &[0.0, 0.2, -0.37, 0.45] {
                let ev = apply_pointwise(&dom, &u, &[x], &params, &spec).unwrap();
                assert_relative_eq!(ev.value, 1.0, epsilon = 1e-9);
                assert!(ev.error_estimate < 1e-7);
            }
        }
    }

    #[test]
    fn ball_torsion_maps_to_one_in_2d() {
        let dom = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let u = torsion(1.0, 2);
        let spec = QuadratureSpec::default();
        for &s in &[0.5, 0.75] {
            let params = KernelParams::new(2, s).unwrap();
            for xy in [[0.0, 0.0], [0.3, 0.4], [-0.7, 0.1]] {
                let ev = apply_pointwise(&dom, &u, &xy, &params, &spec).unwrap();
                assert_relative_eq!(ev.value, 1.0, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn ball_torsion_maps_to_one_in_3d() {
        let dom = Domain::ball(vec![0.0, 0.0, 0.0], 1.0).unwrap();
        let u = torsion(1.0, 3);
        let spec = QuadratureSpec {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_refinement_depth: 40,
        };
        let params = KernelParams::new(3, 0.6).unwrap();
        let ev = apply_pointwise(&dom, &u, &[0.2, -0.3, 0.4], &params, &spec).unwrap();
        assert_relative_eq!(ev.value, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn squared_norm_maps_to_minus_two_n() {
        // The identity needs no containing ball: it holds on any domain.
        let spec = QuadratureSpec::default();
        let dom1 = Domain::interval(0.0, 2.0).unwrap();
        let p1 = KernelParams::new(1, 0.4).unwrap();
        let ev = apply_pointwise(&dom1, &Quadratic, &[0.7], &p1, &spec).unwrap();
        assert_relative_eq!(ev.value, -2.0, epsilon = 1e-9);

        let dom2 = Domain::ball(vec![0.5, -0.5], 1.5).unwrap();
        let p2 = KernelParams::new(2, 0.7).unwrap();
        let ev = apply_pointwise(&dom2, &Quadratic, &[0.9, -0.2], &p2, &spec).unwrap();
        assert_relative_eq!(ev.value, -4.0, epsilon = 1e-8);
    }

    #[test]
    fn affine_fields_are_annihilated() {
        let spec = QuadratureSpec::default();
        let dom1 = Domain::interval(0.0, 1.0).unwrap();
        let p1 = KernelParams::new(1, 0.6).unwrap();
        let u1 = Affine {
            c: -0.4,
            b: vec![2.1],
        };
        let ev = apply_pointwise(&dom1, &u1, &[0.3], &p1, &spec).unwrap();
        assert!(ev.value.abs() <= 1e-9, "got {}", ev.value);
        assert!(ev.value.abs() <= ev.error_estimate + 1e-12);

        let dom2 = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let p2 = KernelParams::new(2, 0.35).unwrap();
        let u2 = Affine {
            c: 1.0,
            b: vec![-0.7, 0.4],
        };
        let ev = apply_pointwise(&dom2, &u2, &[0.25, -0.1], &p2, &spec).unwrap();
        assert!(ev.value.abs() <= 1e-9, "got {}", ev.value);
    }

    #[test]
    fn halfspace_profile_quadratic_and_cubic() {
        let spec = QuadratureSpec::default();
        for n in 1..=3usize {
            for &s in &[0.3, 0.6] {
                let params = KernelParams::new(n, s).unwrap();
                for &x in &[0.5, 1.3] {
                    let sq = apply_halfspace_1d(&Monomial { p: 2.0 }, x, &params, &spec).unwrap();
                    assert_relative_eq!(sq.value, -2.0, epsilon = 1e-8);
                    let cu = apply_halfspace_1d(&Monomial { p: 3.0 }, x, &params, &spec).unwrap();
                    assert_relative_eq!(cu.value, -6.0 * x, epsilon = 1e-7 * x.max(1.0));
                    let li = apply_halfspace_1d(&Monomial { p: 1.0 }, x, &params, &spec).unwrap();
                    assert!(li.value.abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn halfspace_monomial_matches_power_coefficient() {
        // L (x_n)^p = a(p) x^(p-2) with a(p) from the special-function side:
        // two independent integration pipelines must agree.
        let spec = QuadratureSpec::default();
        for &(n, s, p) in &[(1usize, 0.75, 2.6), (2, 0.5, 1.5), (3, 0.3, 2.2)] {
            let params = KernelParams::new(n, s).unwrap();
            let a = special::a_coeff(p, &params, &spec).unwrap();
            let ev = apply_halfspace_1d(&Monomial { p }, 1.0, &params, &spec).unwrap();
            assert_relative_eq!(ev.value, a.value, epsilon = 1e-8);
        }
    }

    #[test]
    fn truncated_evaluations_converge_at_censoring_rate() {
        // |L u - L_eps u| = O(eps^(2-2s)): successive halvings of eps must
        // shrink the defect by about 2^(2-2s).
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let s = 0.6;
        let params = KernelParams::new(1, s).unwrap();
        let spec = QuadratureSpec::default();
        let x = [0.3];
        let full = apply_pointwise(&dom, &SineWave, &x, &params, &spec).unwrap();
        let d = dom.distance(&x).unwrap();
        let mut defects = Vec::new();
        for k in 3..=6 {
            let eps = d * 0.5f64.powi(k);
            let tr = apply_pointwise_truncated(&dom, &SineWave, &x, &params, &spec, eps).unwrap();
            defects.push((tr.value - full.value).abs());
        }
        for w in defects.windows(2) {
            let rate = (w[0] / w[1]).log2();
            assert!(
                (rate - (2.0 - 2.0 * s)).abs() < 0.15,
                "observed rate {rate}, expected {}",
                2.0 - 2.0 * s
            );
        }
    }

    #[test]
    fn boundary_defect_is_zero_for_torsion() {
        // For the torsion field L u = 1 = -Δu everywhere, so the boundary
        // defect vanishes identically, not just in the limit.
        let dom = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let params = KernelParams::new(2, 0.5).unwrap();
        let spec = QuadratureSpec::default();
        let m = 1.0;
        let u = FnField(move |x: &[f64]| (m * m - x.iter().map(|c| c * c).sum::<f64>()) / 4.0);
        // Closure fields carry no Hessian; check against the known Laplacian.
        let ev = apply_pointwise(&dom, &u, &[0.6, 0.0], &params, &spec).unwrap();
        assert_relative_eq!(ev.value, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn boundary_defect_shrinks_near_boundary() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let params = KernelParams::new(1, 0.7).unwrap();
        let spec = QuadratureSpec::default();
        let mut prev = f64::INFINITY;
        for &d in &[0.2, 0.1, 0.05, 0.025] {
            let bd = boundary_limit_defect(&dom, &SineWave, &[1.0 - d], &params, &spec).unwrap();
            assert!(
                bd.defect < prev * 0.95 + 1e-12,
                "defect {} did not shrink from {prev} at d = {d}",
                bd.defect
            );
            prev = bd.defect;
        }
        assert!(prev < 0.05);
    }

    #[test]
    fn missing_hessian_is_reported() {
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let params = KernelParams::new(1, 0.5).unwrap();
        let spec = QuadratureSpec::default();
        let u = FnField(|x: &[f64]| x[0].sin());
        let err = boundary_limit_defect(&dom, &u, &[0.5], &params, &spec).unwrap_err();
        assert!(matches!(err, Error::MissingDerivatives(_)));
    }

    #[test]
    fn smoothed_distance_stays_within_curvature_bound() {
        let spec = QuadratureSpec::default();

        let dom1 = Domain::interval(0.0, 1.0).unwrap();
        let sd1 = SmoothedDistance::new(&dom1, 0.25).unwrap();
        let p1 = KernelParams::new(1, 0.5).unwrap();
        let pts1: Vec<Vec<f64>> = [0.05, 0.2, 0.35, 0.5].iter().map(|&x| vec![x]).collect();
        let rep = smoothed_distance_bound_check(&sd1, &pts1, &p1, &spec).unwrap();
        assert!(rep.all_within);
        assert_relative_eq!(rep.bound, 8.0, epsilon = 1e-12);

        let dom2 = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let sd2 = SmoothedDistance::new(&dom2, 0.3).unwrap();
        let p2 = KernelParams::new(2, 0.7).unwrap();
        let pts2: Vec<Vec<f64>> = [[0.0, 0.0], [0.5, 0.0], [0.0, 0.85]]
            .iter()
            .map(|p| p.to_vec())
            .collect();
        let rep = smoothed_distance_bound_check(&sd2, &pts2, &p2, &spec).unwrap();
        assert!(rep.all_within);
    }

    #[test]
    fn batch_matches_pointwise_bitwise() {
        let dom = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let params = KernelParams::new(2, 0.5).unwrap();
        let spec = QuadratureSpec::default();
        let u = torsion(1.0, 2);
        let pts: Vec<Vec<f64>> = vec![
            vec![0.0, 0.0],
            vec![0.3, 0.4],
            vec![-0.5, 0.2],
            vec![0.1, -0.8],
            vec![0.6, 0.6],
        ];
        let batch = apply_batch(&dom, &u, &pts, &params, &spec);
        for (p, res) in pts.iter().zip(batch) {
            let single = apply_pointwise(&dom, &u, p, &params, &spec).unwrap();
            let b = res.unwrap();
            assert_eq!(single.value.to_bits(), b.value.to_bits());
        }
    }

    #[test]
    fn scaling_and_translation_covariance() {
        // v(y) = u((y - c)/λ) on the scaled domain: L v(λx + c) = λ⁻² L u(x).
        let spec = QuadratureSpec::default();
        let params = KernelParams::new(1, 0.45).unwrap();
        let dom = Domain::interval(0.0, 1.0).unwrap();
        let x = [0.6];
        let base = apply_pointwise(&dom, &SineWave, &x, &params, &spec).unwrap();

        let (lambda, c) = (2.0, 0.5);
        let scaled_dom = Domain::interval(c, c + lambda).unwrap();
        let v = FnField(move |y: &[f64]| ((y[0] - c) / lambda).sin());
        let y = [lambda * x[0] + c];
        let scaled = apply_pointwise(&scaled_dom, &v, &y, &params, &spec).unwrap();
        assert_relative_eq!(
            scaled.value,
            base.value / (lambda * lambda),
            epsilon = 1e-9
        );
    }

    #[test]
    fn dimension_mismatch_and_outside_points_error() {
        let dom = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        let spec = QuadratureSpec::default();
        let p1 = KernelParams::new(1, 0.5).unwrap();
        assert!(apply_pointwise(&dom, &Quadratic, &[0.0, 0.0], &p1, &spec).is_err());
        let p2 = KernelParams::new(2, 0.5).unwrap();
        assert!(apply_pointwise(&dom, &Quadratic, &[2.0, 0.0], &p2, &spec).is_err());
        // Boundary points have zero interaction radius.
        assert!(apply_pointwise(&dom, &Quadratic, &[1.0, 0.0], &p2, &spec).is_err());
    }
}
