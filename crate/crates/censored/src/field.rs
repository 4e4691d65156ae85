//! Scalar fields the operator acts on.
//!
//! Fields report optional analytic derivatives; evaluators that need them
//! (boundary-limit defects, barrier certification) fail loudly through
//! `Error::MissingDerivatives` instead of silently differencing.

use crate::domain::SmoothedDistance;
use crate::vecn;

pub trait ScalarField: Sync {
    fn eval(&self, x: &[f64]) -> f64;

    /// Analytic gradient, if available.
    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let _ = x;
        None
    }

    /// Analytic Hessian in row-major order, if available.
    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        let _ = x;
        None
    }

    /// Short description used in diagnostics and reports.
    fn smoothness_note(&self) -> &'static str {
        "unspecified smoothness"
    }
}

/// Closure wrapper for ad-hoc fields in tests and the command line.
pub struct FnField<F: Fn(&[f64]) -> f64 + Sync>(pub F);

impl<F: Fn(&[f64]) -> f64 + Sync> ScalarField for FnField<F> {
    fn eval(&self, x: &[f64]) -> f64 {
        (self.0)(x)
    }

    fn smoothness_note(&self) -> &'static str {
        "closure field, derivatives unavailable"
    }
}

/// `u(x) = c`.
pub struct Constant(pub f64);

impl ScalarField for Constant {
    fn eval(&self, _x: &[f64]) -> f64 {
        self.0
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0; x.len()])
    }

    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0; x.len() * x.len()])
    }

    fn smoothness_note(&self) -> &'static str {
        "constant"
    }
}

/// `u(x) = c + b·x`, annihilated by the operator at every interior point.
pub struct Affine {
    pub c: f64,
    pub b: Vec<f64>,
}

impl ScalarField for Affine {
    fn eval(&self, x: &[f64]) -> f64 {
        self.c + vecn::dot(&self.b, x)
    }

    fn gradient(&self, _x: &[f64]) -> Option<Vec<f64>> {
        Some(self.b.clone())
    }

    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(vec![0.0; x.len() * x.len()])
    }

    fn smoothness_note(&self) -> &'static str {
        "affine"
    }
}

/// `u(x) = |x|²`; the operator maps it to the constant `-2n`.
pub struct Quadratic;

impl ScalarField for Quadratic {
    fn eval(&self, x: &[f64]) -> f64 {
        vecn::dot(x, x)
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        Some(x.iter().map(|c| 2.0 * c).collect())
    }

    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = x.len();
        let mut h = vec![0.0; n * n];
        for i in 0..n {
            h[i * n + i] = 2.0;
        }
        Some(h)
    }

    fn smoothness_note(&self) -> &'static str {
        "squared norm"
    }
}

/// `u(x) = (x_n)^p` on the half-space, the homogeneous profile family.
pub struct Monomial {
    pub p: f64,
}

impl ScalarField for Monomial {
    fn eval(&self, x: &[f64]) -> f64 {
        let xn = *x.last().expect("monomial needs at least one coordinate");
        if xn == 0.0 && self.p == 0.0 {
            1.0
        } else {
            xn.powf(self.p)
        }
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = x.len();
        let xn = x[n - 1];
        let mut g = vec![0.0; n];
        g[n - 1] = self.p * xn.powf(self.p - 1.0);
        Some(g)
    }

    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = x.len();
        let xn = x[n - 1];
        let mut h = vec![0.0; n * n];
        h[n * n - 1] = self.p * (self.p - 1.0) * xn.powf(self.p - 2.0);
        Some(h)
    }

    fn smoothness_note(&self) -> &'static str {
        "normal-coordinate power, smooth away from the boundary face"
    }
}

/// `u(x) = sin(x_1)`, a generic analytic field for convergence checks.
pub struct SineWave;

impl ScalarField for SineWave {
    fn eval(&self, x: &[f64]) -> f64 {
        x[0].sin()
    }

    fn gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut g = vec![0.0; x.len()];
        g[0] = x[0].cos();
        Some(g)
    }

    fn hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = x.len();
        let mut h = vec![0.0; n * n];
        h[0] = -x[0].sin();
        Some(h)
    }

    fn smoothness_note(&self) -> &'static str {
        "analytic"
    }
}

/// The smoothed distance `δ` viewed as a field. Signed distance is clamped
/// at zero so closure-boundary evaluations under rounding stay defined.
pub struct SmoothedDistanceField {
    sd: SmoothedDistance,
}

impl SmoothedDistanceField {
    pub fn new(sd: SmoothedDistance) -> Self {
        SmoothedDistanceField { sd }
    }

    pub fn inner(&self) -> &SmoothedDistance {
        &self.sd
    }
}

impl ScalarField for SmoothedDistanceField {
    fn eval(&self, x: &[f64]) -> f64 {
        let d = self
            .sd
            .domain()
            .signed_distance(x)
            .expect("point arity mismatch in smoothed distance field")
            .max(0.0);
        self.sd.d0() * SmoothedDistance::chi(d / self.sd.d0())
    }

    fn smoothness_note(&self) -> &'static str {
        "C^{1,1}: gradient Lipschitz, second derivatives bounded a.e."
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quadratic_derivatives() {
        let q = Quadratic;
        let x = [0.5, -1.0, 2.0];
        assert_relative_eq!(q.eval(&x), 0.25 + 1.0 + 4.0);
        assert_eq!(q.gradient(&x).unwrap(), vec![1.0, -2.0, 4.0]);
        let h = q.hessian(&x).unwrap();
        assert_eq!(h[0], 2.0);
        assert_eq!(h[4], 2.0);
        assert_eq!(h[8], 2.0);
        assert_eq!(h[1], 0.0);
    }

    #[test]
    fn monomial_uses_last_coordinate() {
        let m = Monomial { p: 1.5 };
        assert_relative_eq!(m.eval(&[7.0, 4.0]), 8.0);
        let g = m.gradient(&[7.0, 4.0]).unwrap();
        assert_relative_eq!(g[1], 3.0);
        assert_eq!(g[0], 0.0);
    }

    #[test]
    fn fn_field_wraps_closures() {
        let f = FnField(|x: &[f64]| x[0] * x[1]);
        assert_relative_eq!(f.eval(&[3.0, 4.0]), 12.0);
        assert!(f.gradient(&[3.0, 4.0]).is_none());
    }

    #[test]
    fn smoothed_distance_field_matches_direct_eval() {
        let dom = crate::domain::Domain::interval(0.0, 1.0).unwrap();
        let sd = SmoothedDistance::new(&dom, 0.25).unwrap();
        let f = SmoothedDistanceField::new(sd.clone());
        for &x in &[0.05, 0.25, 0.4, 0.5, 0.77, 1.0] {
            assert_relative_eq!(f.eval(&[x]), sd.eval(&[x]).unwrap(), epsilon = 1e-15);
        }
    }
}
