//! Domains, boundary distance, and the smoothed distance field.
//!
//! Every evaluation of the operator needs `d(x) = dist(x, ∂Ω)`: it is both
//! the interaction radius and (through `d^(2s-2)`) the strength prefactor.
//! The supported geometries keep `d` in closed form:
//!
//! * `Interval(a,b)` in 1-d and `Ball(c,R)` in 1/2/3-d (bounded);
//! * `HalfSpace` in n-d, `d(x) = x_n`;
//! * `HalfLineSection`, the 1-d profile geometry `(0,∞)` with `d(x) = x`,
//!   used when half-space fields depend on the normal coordinate only.

use crate::error::{Error, Result};
use crate::vecn;

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// Open interval (a, b) on the line.
    Interval { a: f64, b: f64 },
    /// Open ball of given center and radius; dimension = center.len().
    Ball { center: Vec<f64>, radius: f64 },
    /// Upper half-space {x_n > 0} in `dim` dimensions.
    HalfSpace { dim: usize },
    /// The half-line (0, ∞) of normal coordinates; distance is to 0 only.
    /// One-dimensional by construction: points are the profile coordinate.
    HalfLineSection,
}

/// Bounds that exist only for bounded domains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryConstants {
    pub diameter: Option<f64>,
    pub inradius: Option<f64>,
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Domain> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidParameter(format!(
                "interval needs finite a < b, got ({a}, {b})"
            )));
        }
        Ok(Domain::Interval { a, b })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Domain> {
        if center.is_empty() || center.len() > 3 {
            return Err(Error::InvalidParameter(format!(
                "ball center must have 1..=3 coordinates, got {}",
                center.len()
            )));
        }
        if !(radius > 0.0 && radius.is_finite()) || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(
                "ball needs finite center and positive radius".into(),
            ));
        }
        Ok(Domain::Ball { center, radius })
    }

    pub fn half_space(dim: usize) -> Result<Domain> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "half-space dimension must be 1..=3, got {dim}"
            )));
        }
        Ok(Domain::HalfSpace { dim })
    }

    pub fn half_line_section() -> Domain {
        Domain::HalfLineSection
    }

    /// Arity of point slices for this domain.
    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Ball { center, .. } => center.len(),
            Domain::HalfSpace { dim } => *dim,
            Domain::HalfLineSection => 1,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, Domain::Interval { .. } | Domain::Ball { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Domain::Interval { .. } => "interval",
            Domain::Ball { .. } => "ball",
            Domain::HalfSpace { .. } => "half-space",
            Domain::HalfLineSection => "half-line-section",
        }
    }

    fn check_arity(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "point has {} coordinates, {} needs {}",
                x.len(),
                self.kind_name(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Signed distance to the boundary: positive inside, negative outside.
    /// (For the half-line section the far end is open; only 0 counts.)
    pub fn signed_distance(&self, x: &[f64]) -> Result<f64> {
        self.check_arity(x)?;
        Ok(match self {
            Domain::Interval { a, b } => (x[0] - a).min(b - x[0]),
            Domain::Ball { center, radius } => radius - vecn::dist(x, center),
            Domain::HalfSpace { dim } => x[dim - 1],
            Domain::HalfLineSection => x[0],
        })
    }

    /// Distance to the boundary for points in the closure; errors outside.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        let d = self.signed_distance(x)?;
        // A strictly negative signed distance beyond rounding slack is a
        // genuine outside point; tiny negatives from arithmetic clamp to 0.
        let scale = self.length_scale();
        if d < -1e-12 * scale {
            return Err(Error::OutsideDomain {
                point: x.to_vec(),
                context: format!("{} distance query", self.kind_name()),
            });
        }
        Ok(d.max(0.0))
    }

    pub fn is_inside(&self, x: &[f64]) -> bool {
        self.signed_distance(x).map(|d| d > 0.0).unwrap_or(false)
    }

    /// Unit inward normal at a boundary point (within rounding slack).
    pub fn inward_normal(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.check_arity(z)?;
        let d = self.signed_distance(z)?;
        let scale = self.length_scale();
        if d.abs() > 1e-9 * scale {
            return Err(Error::InvalidParameter(format!(
                "inward_normal needs a boundary point; signed distance is {d:e}"
            )));
        }
        Ok(match self {
            Domain::Interval { a, b } => {
                if (z[0] - a).abs() <= (b - z[0]).abs() {
                    vec![1.0]
                } else {
                    vec![-1.0]
                }
            }
            Domain::Ball { center, .. } => {
                let mut v = vecn::sub(center, z);
                let n = vecn::norm(&v);
                if n == 0.0 {
                    return Err(Error::InvalidParameter(
                        "degenerate boundary point at ball center".into(),
                    ));
                }
                v.iter_mut().for_each(|c| *c /= n);
                v
            }
            Domain::HalfSpace { dim } => {
                let mut v = vec![0.0; *dim];
                v[*dim - 1] = 1.0;
                v
            }
            Domain::HalfLineSection => vec![1.0],
        })
    }

    pub fn geometry_constants(&self) -> GeometryConstants {
        match self {
            Domain::Interval { a, b } => GeometryConstants {
                diameter: Some(b - a),
                inradius: Some(0.5 * (b - a)),
            },
            Domain::Ball { radius, .. } => GeometryConstants {
                diameter: Some(2.0 * radius),
                inradius: Some(*radius),
            },
            _ => GeometryConstants {
                diameter: None,
                inradius: None,
            },
        }
    }

    /// A positive length used to scale rounding slack.
    fn length_scale(&self) -> f64 {
        match self {
            Domain::Interval { a, b } => (b - a).max(a.abs().max(b.abs())),
            Domain::Ball { center, radius } => {
                radius.max(center.iter().fold(0.0f64, |m, c| m.max(c.abs())))
            }
            _ => 1.0,
        }
    }
}

/// `C^{1,1}` regularization of the boundary distance:
/// `δ(x) = d₀ · χ(d(x)/d₀)` with the ramp
///
/// ```text
///   χ(t) = t                    t ∈ [0, 1]
///   χ(t) = 4/3 - (2-t)³/3       t ∈ [1, 2]
///   χ(t) = 4/3                  t ≥ 2 ,
/// ```
///
/// so `δ = d` near the boundary, `δ` caps at `(4/3) d₀` in the interior, and
/// `χ ∈ C^{1,1}` (χ' = (2-t)² on the middle piece matches values and slopes
/// at both knots, with χ'' continuous at 2 and bounded by 2 overall).
#[derive(Debug, Clone)]
pub struct SmoothedDistance {
    domain: Domain,
    d0: f64,
}

impl SmoothedDistance {
    /// `d0` must be positive and, for bounded domains, at most half the
    /// inradius, so the non-capped region never reaches the distance ridge
    /// where `∇d` jumps.
    pub fn new(domain: &Domain, d0: f64) -> Result<Self> {
        if !(d0 > 0.0 && d0.is_finite()) {
            return Err(Error::InvalidParameter(
                "smoothing scale d0 must be positive".into(),
            ));
        }
        if let Some(inr) = domain.geometry_constants().inradius {
            if d0 > 0.5 * inr {
                return Err(Error::InvalidParameter(format!(
                    "d0 = {d0} exceeds half the inradius {inr}"
                )));
            }
        }
        Ok(SmoothedDistance {
            domain: domain.clone(),
            d0,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn d0(&self) -> f64 {
        self.d0
    }

    pub fn chi(t: f64) -> f64 {
        if t <= 1.0 {
            t
        } else if t < 2.0 {
            let w = 2.0 - t;
            4.0 / 3.0 - w * w * w / 3.0
        } else {
            4.0 / 3.0
        }
    }

    pub fn chi_prime(t: f64) -> f64 {
        if t <= 1.0 {
            1.0
        } else if t < 2.0 {
            let w = 2.0 - t;
            w * w
        } else {
            0.0
        }
    }

    /// Interior cap value `(4/3) d₀`.
    pub fn cap(&self) -> f64 {
        4.0 / 3.0 * self.d0
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let d = self.domain.distance(x)?;
        Ok(self.d0 * Self::chi(d / self.d0))
    }

    /// Lipschitz bound for `∇δ`: `|χ''|/d₀ ≤ 2/d₀` plus the curvature of the
    /// underlying distance where the ramp is active. For the ball the active
    /// region `{d < 2d₀}` has `|D²d| ≤ 1/(R-d)`, and `χ'(d/d₀)/(R-d)` is
    /// maximized at `d = d₀`; flat-boundary domains contribute nothing (their
    /// distance ridge lies in the capped region by the `d0` precondition).
    pub fn gradient_lipschitz_bound(&self) -> f64 {
        let base = 2.0 / self.d0;
        let extra = match &self.domain {
            Domain::Ball { radius, .. } => 1.0 / (radius - self.d0),
            _ => 0.0,
        };
        base + extra
    }
}
