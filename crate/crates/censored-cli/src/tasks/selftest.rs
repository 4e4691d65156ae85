//! `selftest`: the exact-oracle suite. Every check compares a computed
//! quantity against a value known in closed form, at deterministic
//! seed-driven sample points. One row per check; exit status 4 if any fails.
//!
//! Checks:
//!
//! * `normalization_consistency` — closed-form constant against its defining
//!   integral, over (n, s) ∈ {1,2,3} × {0.25, 0.5, 0.75} and three radii;
//! * `psi_at_two` — `psi(2, t) = 2` for ten values of `t`;
//! * `monomial_coefficients` — `a(0) = a(1) = 0`, `a(2) = −2`, `a(3) = −6`;
//! * `torsion_identity` — the operator maps the torsion field to exactly 1,
//!   at random interior points of the unit ball in 1-d and 2-d;
//! * `affine_harmonicity` — affine fields are annihilated pointwise;
//! * `scaling_identity` — `L` on a dilated domain equals the dilation rule
//!   `r^{-2} L` on the original;
//! * `translation_identity` — `L` commutes with translations.

use crate::config::{fmt_f64, Config};
use crate::output::Sink;
use crate::tasks::{close_config, output_key, quad_spec_keys};
use crate::RunError;
use censored::barrier::TorsionField;
use censored::domain::Domain;
use censored::field::{Affine, FnField, SineWave};
use censored::operator::apply_pointwise;
use censored::special::{
    a_coeff, normalization_constant, normalization_constant_integral_form, psi,
};
use censored::{KernelParams, QuadratureSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct CheckRow {
    name: &'static str,
    worst_error: f64,
    tolerance: f64,
}

impl CheckRow {
    fn passed(&self) -> bool {
        self.worst_error <= self.tolerance
    }
}

pub fn run(mut cfg: Config) -> Result<u8, RunError> {
    cfg.task_key("selftest");
    let seed = cfg.u64_or("seed", 0);
    let trials = cfg.usize_or("trials", 4, |v| {
        if v >= 1 {
            Ok(())
        } else {
            Err("at least one trial point is needed".into())
        }
    });
    let spec = quad_spec_keys(&mut cfg);
    let target = output_key(&mut cfg);
    let echo = close_config(cfg)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = vec![
        normalization_check(&spec)?,
        psi_check(&spec)?,
        monomial_check(&spec)?,
        torsion_check(&spec, trials, &mut rng)?,
        affine_check(&spec, trials, &mut rng)?,
        scaling_check(&spec, trials, &mut rng)?,
        translation_check(&spec, trials, &mut rng)?,
    ];

    let mut sink = Sink::for_target(&target)?;
    sink.header(&echo)?;
    sink.columns(&["check", "status", "worst_error", "tolerance"])?;
    let mut all_passed = true;
    for row in &rows {
        let ok = row.passed();
        all_passed &= ok;
        sink.row(&[
            row.name.to_string(),
            if ok { "pass" } else { "fail" }.to_string(),
            fmt_f64(row.worst_error),
            fmt_f64(row.tolerance),
        ])?;
    }
    sink.report_line("report_passed", all_passed.to_string())?;
    sink.flush()?;
    Ok(if all_passed { 0 } else { 4 })
}

fn normalization_check(spec: &QuadratureSpec) -> Result<CheckRow, RunError> {
    let mut worst = 0.0f64;
    for n in 1..=3usize {
        for s in [0.25, 0.5, 0.75] {
            let params = KernelParams::new(n, s)?;
            let closed = normalization_constant(&params);
            for r in [0.5, 1.0, 2.0] {
                let integral = normalization_constant_integral_form(&params, r, spec)?;
                worst = worst.max((closed - integral.value).abs() / closed.abs());
            }
        }
    }
    Ok(CheckRow {
        name: "normalization_consistency",
        worst_error: worst,
        tolerance: 1e-10,
    })
}

fn psi_check(spec: &QuadratureSpec) -> Result<CheckRow, RunError> {
    let mut worst = 0.0f64;
    for n in [1usize, 2] {
        for s in [0.25, 0.5, 0.75] {
            let params = KernelParams::new(n, s)?;
            for i in 1..=10 {
                let t = i as f64 / 10.0;
                let val = psi(2.0, t, &params, spec)?;
                worst = worst.max((val.value - 2.0).abs());
            }
        }
    }
    Ok(CheckRow {
        name: "psi_at_two",
        worst_error: worst,
        tolerance: 1e-8,
    })
}

fn monomial_check(spec: &QuadratureSpec) -> Result<CheckRow, RunError> {
    let mut worst = 0.0f64;
    for n in [1usize, 2] {
        for s in [0.25, 0.5, 0.75] {
            let params = KernelParams::new(n, s)?;
            for (p, expected) in [(0.0, 0.0), (1.0, 0.0), (2.0, -2.0), (3.0, -6.0)] {
                let val = a_coeff(p, &params, spec)?;
                worst = worst.max((val.value - expected).abs());
            }
        }
    }
    Ok(CheckRow {
        name: "monomial_coefficients",
        worst_error: worst,
        tolerance: 1e-8,
    })
}

/// Random interior point of the unit ball, kept away from the rim so the
/// censored integrals stay cheap.
fn ball_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-0.85..0.85)).collect();
        if x.iter().map(|c| c * c).sum::<f64>() < 0.72 {
            return x;
        }
    }
}

fn torsion_check(
    spec: &QuadratureSpec,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<CheckRow, RunError> {
    let mut worst = 0.0f64;
    for n in [1usize, 2] {
        let domain = Domain::ball(vec![0.0; n], 1.0)?;
        let params = KernelParams::new(n, 0.5)?;
        let torsion = TorsionField::enclosing(&domain)?;
        for _ in 0..trials {
            let x = ball_point(n, rng);
            let ev = apply_pointwise(&domain, &torsion, &x, &params, spec)?;
            worst = worst.max((ev.value - 1.0).abs());
        }
    }
    Ok(CheckRow {
        name: "torsion_identity",
        worst_error: worst,
        tolerance: 1e-6,
    })
}

fn affine_check(
    spec: &QuadratureSpec,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<CheckRow, RunError> {
    let mut worst = 0.0f64;
    for n in [1usize, 2] {
        let domain = Domain::ball(vec![0.0; n], 1.0)?;
        let params = KernelParams::new(n, 0.6)?;
        let field = Affine {
            c: 0.7,
            b: (0..n).map(|i| 1.0 - 0.4 * i as f64).collect(),
        };
        for _ in 0..trials {
            let x = ball_point(n, rng);
            let ev = apply_pointwise(&domain, &field, &x, &params, spec)?;
            worst = worst.max(ev.value.abs());
        }
    }
    Ok(CheckRow {
        name: "affine_harmonicity",
        worst_error: worst,
        tolerance: 1e-8,
    })
}

fn scaling_check(
    spec: &QuadratureSpec,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<CheckRow, RunError> {
    let mut worst = 0.0f64;
    let r = 2.0;
    // 1-d: sine on (−0.5, 0.5) against its dilation on (−1, 1).
    let base = Domain::interval(-0.5, 0.5)?;
    let scaled = Domain::interval(-1.0, 1.0)?;
    let params = KernelParams::new(1, 0.5)?;
    let u = SineWave;
    let v = FnField(move |y: &[f64]| (y[0] / r).sin());
    for _ in 0..trials {
        let x = rng.random_range(-0.45..0.45);
        let lhs = apply_pointwise(&scaled, &v, &[r * x], &params, spec)?;
        let rhs = apply_pointwise(&base, &u, &[x], &params, spec)?;
        worst = worst.max((lhs.value - rhs.value / (r * r)).abs());
    }
    // 2-d: the same rule on balls.
    let base2 = Domain::ball(vec![0.0, 0.0], 1.0)?;
    let scaled2 = Domain::ball(vec![0.0, 0.0], r)?;
    let params2 = KernelParams::new(2, 0.7)?;
    let u2 = FnField(|y: &[f64]| (y[0] + 0.5 * y[1]).sin());
    let v2 = FnField(move |y: &[f64]| (y[0] / r + 0.5 * y[1] / r).sin());
    for _ in 0..trials {
        let x = ball_point(2, rng);
        let xs: Vec<f64> = x.iter().map(|c| r * c).collect();
        let lhs = apply_pointwise(&scaled2, &v2, &xs, &params2, spec)?;
        let rhs = apply_pointwise(&base2, &u2, &x, &params2, spec)?;
        worst = worst.max((lhs.value - rhs.value / (r * r)).abs());
    }
    Ok(CheckRow {
        name: "scaling_identity",
        worst_error: worst,
        tolerance: 1e-8,
    })
}

fn translation_check(
    spec: &QuadratureSpec,
    trials: usize,
    rng: &mut ChaCha8Rng,
) -> Result<CheckRow, RunError> {
    let mut worst = 0.0f64;
    // 1-d shift.
    let z = 0.3;
    let base = Domain::interval(-0.5, 0.5)?;
    let moved = Domain::interval(-0.5 + z, 0.5 + z)?;
    let params = KernelParams::new(1, 0.5)?;
    let u = SineWave;
    let v = FnField(move |y: &[f64]| (y[0] - z).sin());
    for _ in 0..trials {
        let x = rng.random_range(-0.45..0.45);
        let lhs = apply_pointwise(&moved, &v, &[x + z], &params, spec)?;
        let rhs = apply_pointwise(&base, &u, &[x], &params, spec)?;
        worst = worst.max((lhs.value - rhs.value).abs());
    }
    // 2-d shift.
    let zv = [0.2, -0.1];
    let base2 = Domain::ball(vec![0.0, 0.0], 1.0)?;
    let moved2 = Domain::ball(zv.to_vec(), 1.0)?;
    let params2 = KernelParams::new(2, 0.35)?;
    let u2 = FnField(|y: &[f64]| (y[0] + 0.5 * y[1]).sin());
    let v2 = FnField(move |y: &[f64]| (y[0] - zv[0] + 0.5 * (y[1] - zv[1])).sin());
    for _ in 0..trials {
        let x = ball_point(2, rng);
        let xz: Vec<f64> = x.iter().zip(zv).map(|(c, w)| c + w).collect();
        let lhs = apply_pointwise(&moved2, &v2, &xz, &params2, spec)?;
        let rhs = apply_pointwise(&base2, &u2, &x, &params2, spec)?;
        worst = worst.max((lhs.value - rhs.value).abs());
    }
    Ok(CheckRow {
        name: "translation_identity",
        worst_error: worst,
        tolerance: 1e-8,
    })
}
