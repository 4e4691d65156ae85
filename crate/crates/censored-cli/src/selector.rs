//! Named field selectors shared by the `apply`, `solve`, `mc` and `analyze`
//! subcommands.
//!
//! Grammar (value of the `f`, `g` or `field` config keys):
//!
//! * `constant:<v>`        — the constant field `v`;
//! * `torsion`             — `(m² − |x|²)/(2n)` with `m` enclosing the domain,
//!   the field the operator maps to exactly 1;
//! * `quadratic`           — `|x|²`, mapped to the constant `−2n`;
//! * `affine:<c>,<b1>[,<b2>[,<b3>]]` — `c + b·x`, harmonic for the operator;
//! * `monomial:<p>`        — `(x_last)^p`, the boundary power profile;
//! * `sine`                — `sin(x_1)`, a generic analytic field.

use censored::barrier::TorsionField;
use censored::domain::Domain;
use censored::field::{Affine, Constant, Monomial, Quadratic, ScalarField, SineWave};

/// Parse a selector. `domain` is needed only by `torsion` (for the enclosing
/// radius); selectors that don't use it ignore it.
pub fn parse_field(
    selector: &str,
    domain: Option<&Domain>,
) -> Result<Box<dyn ScalarField>, String> {
    let (name, arg) = match selector.find(':') {
        Some(pos) => (&selector[..pos], Some(&selector[pos + 1..])),
        None => (selector, None),
    };
    match (name, arg) {
        ("constant", Some(v)) => {
            let v: f64 = v
                .parse()
                .map_err(|_| format!("constant selector needs a number, got `{v}`"))?;
            Ok(Box::new(Constant(v)))
        }
        ("constant", None) => Err("constant selector needs a value: `constant:<v>`".into()),
        ("torsion", None) => {
            let d = domain.ok_or("torsion selector needs a domain in the config")?;
            let t = TorsionField::enclosing(d).map_err(|e| e.to_string())?;
            Ok(Box::new(t))
        }
        ("quadratic", None) => Ok(Box::new(Quadratic)),
        ("affine", Some(args)) => {
            let parts: Vec<f64> = args
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| format!("affine coefficient `{t}` is not a number"))
                })
                .collect::<Result<_, _>>()?;
            if parts.len() < 2 || parts.len() > 4 {
                return Err(format!(
                    "affine selector needs `affine:<c>,<b1>[,<b2>[,<b3>]]`, got {} values",
                    parts.len()
                ));
            }
            Ok(Box::new(Affine {
                c: parts[0],
                b: parts[1..].to_vec(),
            }))
        }
        ("affine", None) => Err("affine selector needs coefficients: `affine:<c>,<b1>,...`".into()),
        ("monomial", Some(p)) => {
            let p: f64 = p
                .parse()
                .map_err(|_| format!("monomial exponent `{p}` is not a number"))?;
            if !(p >= 0.0 && p.is_finite()) {
                return Err(format!("monomial exponent must be finite and >= 0, got {p}"));
            }
            Ok(Box::new(Monomial { p }))
        }
        ("monomial", None) => Err("monomial selector needs an exponent: `monomial:<p>`".into()),
        ("sine", None) => Ok(Box::new(SineWave)),
        ("torsion" | "quadratic" | "sine", Some(_)) => {
            Err(format!("selector `{name}` takes no argument"))
        }
        _ => Err(format!(
            "unknown field selector `{selector}` (expected constant:<v>, torsion, quadratic, affine:<c>,<b...>, monomial:<p> or sine)"
        )),
    }
}

/// Gradient/Hessian spot check: the affine dimension must match the domain.
pub fn check_field_dim(selector: &str, field: &dyn ScalarField, dim: usize) -> Result<(), String> {
    // Only the affine selector carries an intrinsic dimension.
    if selector.starts_with("affine:") {
        let g = field
            .gradient(&vec![0.0; dim])
            .expect("affine fields have gradients");
        if g.len() != dim {
            return Err(format!(
                "affine selector has {} direction coefficients, domain dimension is {dim}",
                g.len()
            ));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_selector_kind() {
        let ball = Domain::ball(vec![0.0, 0.0], 1.0).unwrap();
        assert_eq!(parse_field("constant:2.5", None).unwrap().eval(&[9.0]), 2.5);
        let t = parse_field("torsion", Some(&ball)).unwrap();
        assert!((t.eval(&[0.0, 0.0]) - 0.25).abs() < 1e-15);
        assert_eq!(parse_field("quadratic", None).unwrap().eval(&[3.0, 4.0]), 25.0);
        let a = parse_field("affine:1,2,3", None).unwrap();
        assert_eq!(a.eval(&[1.0, 1.0]), 6.0);
        assert_eq!(parse_field("monomial:2", None).unwrap().eval(&[0.5, 3.0]), 9.0);
        assert!((parse_field("sine", None).unwrap().eval(&[0.0]) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed_selectors() {
        assert!(parse_field("constant", None).is_err());
        assert!(parse_field("torsion", None).is_err());
        assert!(parse_field("affine:1", None).is_err());
        assert!(parse_field("monomial:-1", None).is_err());
        assert!(parse_field("mystery", None).is_err());
        assert!(parse_field("sine:1", None).is_err());
    }

    #[test]
    fn affine_dimension_check_matches_domain() {
        let f = parse_field("affine:0,1,1", None).unwrap();
        assert!(check_field_dim("affine:0,1,1", f.as_ref(), 2).is_ok());
        assert!(check_field_dim("affine:0,1,1", f.as_ref(), 1).is_err());
    }
}
