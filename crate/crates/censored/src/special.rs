//! Kernel normalization and the distance-power response functions.
//!
//! The operator is normalized so that it matches `-Δ` on quadratics. The
//! normalization constant is characterized by
//!
//! ```text
//!   C(n,s)⁻¹ = (1/2) r^(2s-2) ∫_{B_r} y_n² / |y|^(n+2s) dy      (any r > 0)
//! ```
//!
//! and has the closed form `C(n,s) = 2n(2-2s)/|S^(n-1)|`. The response of the
//! half-space operator to powers of the distance is carried by
//!
//! ```text
//!   ψ(p,t) = (C(n,s)/2) t^(2s-2) ∫_{B_t} ((1+z_n)^p + (1-z_n)^p - 2)
//!            / |z|^(n+2s) dz ,     t ∈ (0,1] ,
//! ```
//!
//! with `ψ(2,t) = 2` for every t (the quadratic sees the full normalization),
//! and by the monomial coefficient `a(p) = -ψ(p,1)` so that the half-space
//! operator maps `x_n^p ↦ a(p) x_n^(p-2)`. `ψ_p` is `∂ψ/∂p` (the same
//! integral against the log-weighted numerator) and `a_prime_series` sums the
//! expansion of `a'(p)` in closed form.
//!
//! All integrands here have explicit small-argument series, so the radial
//! quadrature runs cancellation-free down to `r = 0` (see [`crate::quad`]).

use std::cell::Cell;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{
    integrate_adaptive, integrate_power_weighted, pi_breakpoints, QuadResult, QuadratureSpec,
};

/// Dimension and order of the kernel `|y|^(-n-2s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub n: usize,
    pub s: f64,
}

impl KernelParams {
    pub fn new(n: usize, s: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "dimension n must be 1, 2, or 3, got {n}"
            )));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "order s must lie strictly in (0,1), got {s}"
            )));
        }
        Ok(KernelParams { n, s })
    }
}

/// Surface measure of the unit sphere `S^(n-1)` in `R^n`; `|S^0| = 2`.
pub fn unit_sphere_area(n: usize) -> f64 {
    assert!(n >= 1, "sphere dimension needs n >= 1");
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// Γ(k/2) for positive integer k, in closed form (integer and half-integer
/// arguments only, so no general gamma implementation is needed).
fn gamma_half(k: usize) -> f64 {
    if k % 2 == 0 {
        // Γ(m) = (m-1)!
        let m = k / 2;
        (1..m).map(|i| i as f64).product()
    } else {
        // Γ(m + 1/2) = √π Π_{i=1}^m (i - 1/2)
        let m = (k - 1) / 2;
        let mut w = PI.sqrt();
        for i in 1..=m {
            w *= i as f64 - 0.5;
        }
        w
    }
}

/// Closed-form normalization `C(n,s) = 2n(2-2s)/|S^(n-1)|`.
pub fn normalization_constant(params: &KernelParams) -> f64 {
    2.0 * params.n as f64 * (2.0 - 2.0 * params.s) / unit_sphere_area(params.n)
}

/// `∫_{B_t} φ(y_n) y_n² / |y|^(n+2s) dy` by reduction to (radius, polar angle):
/// the radial part carries the `r^(1-2s)` weight; the angular part is
/// `∫₀^π φ(r cos θ) cos²θ sin^(n-2)θ dθ` scaled by `|S^(n-2)|` (n ≥ 2).
fn raw_moment(
    phi: &dyn Fn(f64) -> f64,
    t: f64,
    params: &KernelParams,
    spec: &QuadratureSpec,
) -> QuadResult {
    let s = params.s;
    match params.n {
        1 => {
            let mut r = integrate_power_weighted(phi, t, s, spec);
            r.value *= 2.0;
            r.error_estimate *= 2.0;
            r
        }
        n => {
            let sphere = unit_sphere_area(n - 1);
            let radial_weight = t.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s);
            let ang_spec = QuadratureSpec {
                abs_tol: 0.2 * spec.abs_tol / radial_weight.max(1e-300),
                rel_tol: 0.5 * spec.rel_tol,
                max_refinement_depth: spec.max_refinement_depth,
            };
            let ang_err = Cell::new(0.0f64);
            let ang_depth = Cell::new(0u32);
            let bp = pi_breakpoints();
            let a_fn = |r: f64| -> f64 {
                let integrand = |theta: f64| {
                    let ct = theta.cos();
                    let st = theta.sin();
                    phi(r * ct) * ct * ct * st.powi((n - 2) as i32)
                };
                let res = integrate_adaptive(&integrand, &bp, &ang_spec);
                ang_err.set(ang_err.get().max(res.error_estimate));
                ang_depth.set(ang_depth.get().max(res.depth_used));
                res.value
            };
            let mut rad = integrate_power_weighted(&a_fn, t, s, spec);
            rad.value *= sphere;
            rad.error_estimate = sphere * (rad.error_estimate + ang_err.get() * radial_weight);
            rad.depth_used = rad.depth_used.max(ang_depth.get());
            rad.converged = rad.error_estimate <= spec.tolerance_for(rad.value);
            rad
        }
    }
}

/// Normalization recovered from its defining integral at radius `r` — the
/// independent check that the closed form and the kernel agree. The defining
/// moment is r-independent; passing several radii exercises that too.
pub fn normalization_constant_integral_form(
    params: &KernelParams,
    r: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    spec.validate()?;
    if !(r > 0.0) {
        return Err(Error::InvalidParameter("radius must be positive".into()));
    }
    let raw = raw_moment(&|_| 1.0, r, params, spec);
    let half_pref = 0.5 * r.powf(2.0 * params.s - 2.0);
    let inv_c = half_pref * raw.value;
    let value = 1.0 / inv_c;
    // |dC| = C² · d(C^-1)
    let error_estimate = value * value * half_pref * raw.error_estimate;
    Ok(QuadResult {
        value,
        error_estimate,
        converged: raw.converged,
        depth_used: raw.depth_used,
    })
}

// ---------------------------------------------------------------------------
// Paired power numerators, cancellation-free near w = 0
// ---------------------------------------------------------------------------

/// Generalized binomial coefficients `binom(p, k)` for k = 0..=kmax.
fn binom_row(p: f64, kmax: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(kmax + 1);
    let mut b = 1.0;
    row.push(b);
    for k in 1..=kmax {
        b *= (p - (k as f64 - 1.0)) / k as f64;
        row.push(b);
    }
    row
}

/// `((1+w)^p + (1-w)^p - 2) / w²`. Odd powers cancel, so for small |w| the
/// even binomial series `2 Σ_{m≥1} binom(p,2m) w^(2m-2)` is exact where the
/// direct form would lose all significant digits.
fn paired_power_over_w2(p: f64, w: f64) -> f64 {
    let aw = w.abs();
    if aw < 0.25 {
        let w2 = w * w;
        let mut acc = 0.0;
        let mut wpow = 1.0; // w^(2m-2)
        let mut b = 1.0; // binom(p, k), advanced to k = 2m
        let mut k = 0usize;
        for m in 1..=40 {
            while k < 2 * m {
                b *= (p - k as f64) / (k as f64 + 1.0);
                k += 1;
            }
            let term = 2.0 * b * wpow;
            acc += term;
            if term.abs() <= 1e-18 * acc.abs().max(1e-300) {
                break;
            }
            wpow *= w2;
        }
        acc
    } else {
        ((1.0 + w).powf(p) + (1.0 - w).powf(p) - 2.0) / (w * w)
    }
}

/// `((1+w)^p ln(1+w) + (1-w)^p ln(1-w)) / w²`, the ∂/∂p of the numerator
/// above. Near w = 0 the mixed series with coefficients
/// `c_k = Σ_{j=1}^k (-1)^(j+1)/j · binom(p, k-j)` keeps only even k.
fn paired_power_log_over_w2(p: f64, w: f64) -> f64 {
    let aw = w.abs();
    if aw < 0.25 {
        const KMAX: usize = 40;
        let binoms = binom_row(p, KMAX);
        let w2 = w * w;
        let mut acc = 0.0;
        let mut wpow = 1.0;
        for m in 1..=KMAX / 2 {
            let k = 2 * m;
            let mut c = 0.0;
            for j in 1..=k {
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                c += sign / j as f64 * binoms[k - j];
            }
            acc += 2.0 * c * wpow;
            wpow *= w2;
        }
        acc
    } else {
        ((1.0 + w).powf(p) * w.ln_1p() + (1.0 - w).powf(p) * (-w).ln_1p()) / (w * w)
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "t must lie in (0,1], got {t}"
        )));
    }
    Ok(())
}

/// `ψ(p,t)`: the response of the censored half-space operator to the distance
/// power `d^p`, evaluated at relative depth `t = d_U/d_T ∈ (0,1]`.
/// `ψ(2,t) = 2` identically; `ψ(0,t) = ψ(1,t) = 0`.
pub fn psi(p: f64, t: f64, params: &KernelParams, spec: &QuadratureSpec) -> Result<QuadResult> {
    spec.validate()?;
    check_t(t)?;
    if !(p >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "power p must be nonnegative, got {p}"
        )));
    }
    let c = normalization_constant(params);
    let pref = 0.5 * c * t.powf(2.0 * params.s - 2.0);
    let mut raw = raw_moment(&|w| paired_power_over_w2(p, w), t, params, spec);
    raw.value *= pref;
    raw.error_estimate *= pref;
    Ok(raw)
}

/// `ψ_p(p,t) = ∂ψ/∂p`: same integral against the log-weighted numerator.
/// Nonnegative for p > 0, which yields the Lipschitz bound
/// `|ψ(p,t) - 2| ≤ max ψ_p · |p - 2|`.
pub fn psi_p(p: f64, t: f64, params: &KernelParams, spec: &QuadratureSpec) -> Result<QuadResult> {
    spec.validate()?;
    check_t(t)?;
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "psi_p needs p > 0, got {p}"
        )));
    }
    let c = normalization_constant(params);
    let pref = 0.5 * c * t.powf(2.0 * params.s - 2.0);
    let mut raw = raw_moment(&|w| paired_power_log_over_w2(p, w), t, params, spec);
    raw.value *= pref;
    raw.error_estimate *= pref;
    Ok(raw)
}

/// Monomial coefficient: the half-space operator maps `x_n^p ↦ a(p) x_n^(p-2)`
/// with `a(p) = -ψ(p,1)`. Pinned values: a(0) = a(1) = 0, a(2) = -2, a(3) = -6.
pub fn a_coeff(p: f64, params: &KernelParams, spec: &QuadratureSpec) -> Result<QuadResult> {
    let mut r = psi(p, 1.0, params, spec)?;
    r.value = -r.value;
    Ok(r)
}

/// Partial sum of the expansion of `a'(p)` in dimension one,
///
/// ```text
///   a'(p) = (2-2s) Σ_{m≥1} Σ_{ℓ=1}^{2m} (-1)^ℓ / (ℓ (m-s)) · binom(p, 2m-ℓ) ,
/// ```
///
/// returning `(partial_sum, |last_group|)` so callers can judge truncation.
/// The m-th group decays like m⁻⁴ for integer p (second differences of 1/ℓ),
/// so a few dozen terms give ~1e-6 truncation.
pub fn a_prime_series(p: f64, s: f64, terms: usize) -> Result<(f64, f64)> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "order s must lie strictly in (0,1), got {s}"
        )));
    }
    if terms == 0 {
        return Err(Error::InvalidParameter("need at least one term".into()));
    }
    if !(p >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "power p must be nonnegative, got {p}"
        )));
    }
    let c = 2.0 - 2.0 * s;
    let binoms = binom_row(p, 2 * terms - 1);
    let mut total = 0.0;
    let mut last = 0.0;
    for m in 1..=terms {
        let mut g = 0.0;
        for l in 1..=2 * m {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            g += sign / (l as f64 * (m as f64 - s)) * binoms[2 * m - l];
        }
        g *= c;
        total += g;
        last = g.abs();
    }
    Ok((total, last))
}

/// Slope of `p ↦ ψ(p,t)` at `p = 0`:
/// `(C/2) t^(2s-2) ∫_{B_t} ln(1 - y_n²)/|y|^(n+2s) dy ≤ 0`.
/// Uniformly bounded in t on [0.05, 1], which controls how fast small powers
/// de-tune the operator.
pub fn psi_small_q_slope(
    t: f64,
    params: &KernelParams,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    spec.validate()?;
    check_t(t)?;
    let c = normalization_constant(params);
    let pref = 0.5 * c * t.powf(2.0 * params.s - 2.0);
    // ln(1-w²)/w² evaluated through ln_1p: exact for tiny w, -∞-integrable at |w| → 1.
    let phi = |w: f64| {
        if w == 0.0 {
            -1.0
        } else {
            (-w * w).ln_1p() / (w * w)
        }
    };
    let mut raw = raw_moment(&phi, t, params, spec);
    raw.value *= pref;
    raw.error_estimate *= pref;
    Ok(raw)
}
