//! Adaptive Gauss–Legendre quadrature tuned for radial kernel integrals.
//!
//! Every integral in this crate reduces to one of three shapes:
//!
//! 1. a generic 1-d integral over a partition (`integrate_adaptive`),
//! 2. `∫₀ᵗ φ(r) r^(1-2s) dr` with `φ` smooth and exactly evaluable down to
//!    `r = 0` (`integrate_power_weighted`) — the special-function path,
//! 3. `∫₀ᵗ A(r) r^(-1-2s) dr` where `A(r) = O(r²)` is a paired second
//!    difference of a field (`integrate_radial_paired`) — the operator path.
//!
//! Near `r = 0` the integrands are steep (`r^(1-2s)` is not integrable to
//! machine accuracy by plain bisection once `s > 1/2`), so both radial
//! routines treat a core interval `[0, r_c]` specially:
//!
//! * shape 2 substitutes `v = r^(2-2s)`, which turns `φ(r) r^(1-2s) dr` into
//!   `φ(r(v)) dv / (2-2s)` with a smooth integrand;
//! * shape 3 cannot evaluate `A(r)/r²` at tiny radii without catastrophic
//!   cancellation (`A` is a difference of nearly equal field values), so the
//!   core uses the two-term even model `A(r) ≈ A₂ (r/r_c)² + A₄ (r/r_c)⁴`
//!   fitted from `A(r_c)` and `A(r_c/2)`; paired differences of smooth fields
//!   have only even Taylor terms, making this fourth-order accurate. The
//!   rounding-noise floor of the cancellation is added to the reported error
//!   estimate rather than hidden.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Accuracy request for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Absolute tolerance on the integral value.
    pub abs_tol: f64,
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Maximum number of bisection generations applied to any panel.
    pub max_refinement_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_refinement_depth: 40,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= 0.0) || !(self.rel_tol >= 0.0) {
            return Err(Error::InvalidParameter(
                "quadrature tolerances must be nonnegative".into(),
            ));
        }
        if self.abs_tol == 0.0 && self.rel_tol == 0.0 {
            return Err(Error::InvalidParameter(
                "at least one quadrature tolerance must be positive".into(),
            ));
        }
        if self.max_refinement_depth == 0 || self.max_refinement_depth > 60 {
            return Err(Error::InvalidParameter(
                "max_refinement_depth must be in 1..=60".into(),
            ));
        }
        Ok(())
    }

    /// Target for the combined error estimate given the current value.
    pub(crate) fn tolerance_for(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Value of an integral together with an error estimate and diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Estimated absolute error (embedded-rule differences plus, for paired
    /// integrands, the cancellation noise floor).
    pub error_estimate: f64,
    /// Whether the estimate met `max(abs_tol, rel_tol·|value|)`.
    pub converged: bool,
    /// Deepest bisection generation that was actually used.
    pub depth_used: u32,
}

impl QuadResult {
    fn combine(parts: &[QuadResult], spec: &QuadratureSpec) -> QuadResult {
        let value: f64 = parts.iter().map(|p| p.value).sum();
        let error_estimate: f64 = parts.iter().map(|p| p.error_estimate).sum();
        let depth_used = parts.iter().map(|p| p.depth_used).max().unwrap_or(0);
        QuadResult {
            value,
            error_estimate,
            converged: error_estimate <= spec.tolerance_for(value),
            depth_used,
        }
    }
}

// ---------------------------------------------------------------------------
// Gauss–Legendre nodes
// ---------------------------------------------------------------------------

/// Nodes and weights on [-1, 1], computed once by Newton iteration on the
/// Legendre recurrence (no tables to mistype).
fn gauss_rule(order: usize) -> Vec<(f64, f64)> {
    let n = order;
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-like initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (pn, pn1) = legendre_pair(n, x);
            let dp = (n as f64) * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (pn, pn1) = legendre_pair(n, x);
        let dp = (n as f64) * (x * pn - pn1) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    // Enforce exact ± symmetry of the computed roots.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (rule[i].0 - rule[j].0);
        let w = 0.5 * (rule[i].1 + rule[j].1);
        rule[i] = (x, w);
        rule[j] = (-x, w);
    }
    if n % 2 == 1 {
        rule[n / 2].0 = 0.0;
    }
    rule
}

/// (P_n(x), P_{n-1}(x)) by upward recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

pub(crate) fn gauss_8() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_rule(8))
}

fn gauss_16() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| gauss_rule(16))
}

/// Nodes and weights of the composite 8-point Gauss rule on [lo, hi] split
/// into equal panels.
pub(crate) fn gauss_panels(lo: f64, hi: f64, panels: usize) -> Vec<(f64, f64)> {
    let width = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity(8 * panels);
    for p in 0..panels {
        let a = lo + p as f64 * width;
        let c = a + 0.5 * width;
        let h = 0.5 * width;
        for &(x, w) in gauss_8() {
            out.push((c + h * x, w * h));
        }
    }
    out
}

/// 16-point Gauss value on [a, b] with the |G16 - G8| embedded error estimate.
fn panel_eval(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut i8 = 0.0;
    for &(x, w) in gauss_8() {
        i8 += w * f(c + h * x);
    }
    let mut i16 = 0.0;
    for &(x, w) in gauss_16() {
        i16 += w * f(c + h * x);
    }
    (i16 * h, (i16 - i8).abs() * h)
}

// ---------------------------------------------------------------------------
// Adaptive driver
// ---------------------------------------------------------------------------

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    depth: u32,
}

const MAX_PANELS: usize = 4096;

/// Adaptive integration of `f` over the partition given by `breakpoints`
/// (sorted, at least two entries). The worst panel is bisected until the
/// summed error estimate meets the spec or the depth/panel budget runs out.
pub fn integrate_adaptive(
    f: &dyn Fn(f64) -> f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> QuadResult {
    assert!(
        breakpoints.len() >= 2,
        "need at least one panel to integrate"
    );
    let mut panels: Vec<Panel> = Vec::with_capacity(64);
    let mut value = 0.0;
    let mut err = 0.0;
    for w in breakpoints.windows(2) {
        let (a, b) = (w[0], w[1]);
        debug_assert!(b > a, "breakpoints must be strictly increasing");
        let (v, e) = panel_eval(f, a, b);
        value += v;
        err += e;
        panels.push(Panel {
            a,
            b,
            value: v,
            err: e,
            depth: 0,
        });
    }

    loop {
        if err <= spec.tolerance_for(value) || panels.len() >= MAX_PANELS {
            break;
        }
        // Worst panel that may still be split; ties resolve to the lowest
        // index so refinement is deterministic.
        let mut worst: Option<usize> = None;
        for (i, p) in panels.iter().enumerate() {
            if p.depth < spec.max_refinement_depth
                && worst.map_or(true, |w| p.err > panels[w].err)
            {
                worst = Some(i);
            }
        }
        let Some(i) = worst else { break };
        if panels[i].err == 0.0 {
            break;
        }
        let Panel {
            a, b, value: pv, err: pe, depth,
        } = panels[i];
        let m = 0.5 * (a + b);
        let (v1, e1) = panel_eval(f, a, m);
        let (v2, e2) = panel_eval(f, m, b);
        value += v1 + v2 - pv;
        err += e1 + e2 - pe;
        panels[i] = Panel {
            a,
            b: m,
            value: v1,
            err: e1,
            depth: depth + 1,
        };
        panels.insert(
            i + 1,
            Panel {
                a: m,
                b,
                value: v2,
                err: e2,
                depth: depth + 1,
            },
        );
    }

    // Re-sum in panel order to shed the incremental-update rounding drift.
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let err: f64 = panels.iter().map(|p| p.err).sum();
    QuadResult {
        value,
        error_estimate: err,
        converged: err <= spec.tolerance_for(value),
        depth_used: panels.iter().map(|p| p.depth).max().unwrap_or(0),
    }
}

// ---------------------------------------------------------------------------
// Radial integrals
// ---------------------------------------------------------------------------

/// Strictly increasing breakpoints covering `[lo, t]`: doubling panels away
/// from the singular end at 0, plus panels graded toward the outer radius `t`
/// (fields are often only Hölder where the interaction ball meets the
/// boundary).
pub(crate) fn radial_breakpoints(lo: f64, t: f64) -> Vec<f64> {
    let mut bp = Vec::with_capacity(24);
    let mut r = lo;
    while r < 0.5 * t {
        bp.push(r);
        r *= 2.0;
    }
    bp.push(0.5 * t);
    for j in 2..=6 {
        bp.push(t * (1.0 - 0.5f64.powi(j)));
    }
    bp.push(t);
    bp.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * t);
    bp
}

/// `∫₀ᵗ φ(r) r^(1-2s) dr` for `φ` smooth and exactly evaluable at arbitrarily
/// small radii (no cancellation). Used by the special-function integrals,
/// where the paired kernel numerator has an explicit series form near 0.
pub fn integrate_power_weighted(
    phi: &dyn Fn(f64) -> f64,
    t: f64,
    s: f64,
    spec: &QuadratureSpec,
) -> QuadResult {
    assert!(t > 0.0 && s > 0.0 && s < 1.0);
    let q = 2.0 - 2.0 * s;
    let rc = t * 0.5f64.powi(8);
    // Core by substitution v = r^(2-2s): ∫₀^rc φ r^(1-2s) dr = (1/q)∫₀^vc φ(v^(1/q)) dv.
    let vc = rc.powf(q);
    let inner = |v: f64| phi(v.powf(1.0 / q)) / q;
    let core_spec = QuadratureSpec {
        abs_tol: 0.25 * spec.abs_tol,
        ..*spec
    };
    let core = integrate_adaptive(&inner, &[0.0, 0.5 * vc, vc], &core_spec);
    let outer_f = |r: f64| phi(r) * r.powf(1.0 - 2.0 * s);
    let outer = integrate_adaptive(&outer_f, &radial_breakpoints(rc, t), spec);
    QuadResult::combine(&[core, outer], spec)
}

/// `∫₀ᵗ A(r) r^(-1-2s) dr` where `A` is a paired second difference of a field:
/// `A(r) = O(r²)` with only even Taylor terms, but evaluating it at tiny `r`
/// cancels catastrophically. `noise_floor` is the caller's estimate of the
/// absolute rounding noise in one evaluation of `A` (≈ 4·ε·max|field values|).
pub fn integrate_radial_paired(
    a_fn: &dyn Fn(f64) -> f64,
    t: f64,
    s: f64,
    spec: &QuadratureSpec,
    noise_floor: f64,
) -> QuadResult {
    assert!(t > 0.0 && s > 0.0 && s < 1.0);
    // Bridge radius balancing the fit's truncation error (shrinks like rc⁴
    // relative to the total) against noise amplification by the r^(-1-2s)
    // weight (grows like rc^(-2s) in absolute terms).
    let rc = t * 0.5f64.powi(6);
    let g1 = a_fn(rc);
    let g2 = a_fn(0.5 * rc);
    // A(r) ≈ A2 (r/rc)² + A4 (r/rc)⁴ fitted at rc and rc/2.
    let a2 = (16.0 * g2 - g1) / 3.0;
    let a4 = (4.0 * g1 - 16.0 * g2) / 3.0;
    let w2 = rc.powf(-2.0 * s) / (2.0 - 2.0 * s);
    let w4 = rc.powf(-2.0 * s) / (4.0 - 2.0 * s);
    let core_value = a2 * w2 + a4 * w4;
    // Model error: the dropped sixth-order term is conservatively bounded by
    // half the fourth-order contribution. Noise error: the fit amplifies the
    // evaluation noise by at most (16+1)/3 per coefficient.
    let core_err = 0.5 * (a4 * w4).abs() + noise_floor * (17.0 / 3.0) * (w2 + w4);
    let core = QuadResult {
        value: core_value,
        error_estimate: core_err,
        converged: true,
        depth_used: 0,
    };
    let outer_f = |r: f64| a_fn(r) * r.powf(-1.0 - 2.0 * s);
    let mut outer = integrate_adaptive(&outer_f, &radial_breakpoints(rc, t), spec);
    // Noise picked up across the outer range: ∫ noise·r^(-1-2s) dr.
    outer.error_estimate +=
        noise_floor * (rc.powf(-2.0 * s) - t.powf(-2.0 * s)) / (2.0 * s);
    QuadResult::combine(&[core, outer], spec)
}

/// Breakpoint seeds for angular integrals over [0, π], graded toward both
/// poles where reduced integrands often lose smoothness.
pub fn pi_breakpoints() -> Vec<f64> {
    let pi = std::f64::consts::PI;
    let mut bp = vec![0.0];
    for j in [7, 5, 3, 2].iter() {
        bp.push(pi * 0.5f64.powi(*j));
    }
    bp.push(0.5 * pi);
    for j in [2, 3, 5, 7].iter() {
        bp.push(pi * (1.0 - 0.5f64.powi(*j)));
    }
    bp.push(pi);
    bp
}

/// Periodic trapezoid rule with doubling, for smooth periodic integrands
/// (the azimuthal direction on the sphere). Spectrally accurate, so a few
/// doublings suffice; the error estimate is the last doubling difference.
pub fn integrate_periodic(
    f: &dyn Fn(f64) -> f64,
    period: f64,
    spec: &QuadratureSpec,
) -> QuadResult {
    let mut n = 16usize;
    let eval = |n: usize| -> f64 {
        let h = period / n as f64;
        (0..n).map(|j| f(j as f64 * h)).sum::<f64>() * h
    };
    let mut prev = eval(n);
    let mut depth = 0;
    loop {
        n *= 2;
        depth += 1;
        let cur = eval(n);
        let err = (cur - prev).abs();
        if err <= spec.tolerance_for(cur) || n >= 2048 {
            return QuadResult {
                value: cur,
                error_estimate: err,
                converged: err <= spec.tolerance_for(cur),
                depth_used: depth,
            };
        }
        prev = cur;
    }
}

/// `(bᑫ - aᑫ)/q` evaluated stably, including the `q → 0` limit `ln(b/a)`.
/// This is `∫ₐᵇ y^(q-1) dy`, the workhorse moment for exact 1-d assembly.
pub(crate) fn power_diff(a: f64, b: f64, q: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if q.abs() < 1e-8 {
        let (la, lb) = (a.ln(), b.ln());
        if q == 0.0 {
            return lb - la;
        }
        // (e^(q·lb) - e^(q·la))/q via expm1 keeps accuracy through q → 0.
        ((q * lb).exp_m1() - (q * la).exp_m1()) / q
    } else {
        (b.powf(q) - a.powf(q)) / q
    }
}
