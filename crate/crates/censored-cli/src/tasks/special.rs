//! `special`: tabulate the normalization constant (closed form against its
//! defining integral), the distance-power response `psi(p, t)`, and the
//! monomial coefficient `a(p)`.

use crate::config::{fmt_f64, Config};
use crate::output::Sink;
use crate::tasks::{close_config, output_key, quad_spec_keys};
use crate::RunError;
use censored::special::{
    a_coeff, normalization_constant, normalization_constant_integral_form, psi,
};
use censored::KernelParams;

pub fn run(mut cfg: Config) -> Result<u8, RunError> {
    cfg.task_key("special");
    let n = cfg.usize_or("n", 1, |v| {
        if (1..=3).contains(&v) {
            Ok(())
        } else {
            Err(format!("dimension must be 1, 2 or 3, got {v}"))
        }
    });
    let s = cfg.s_key(0.5);
    let items_raw = cfg.str_or("items", "normalization psi a");
    let p_values = cfg.f64_list_or("p_values", &[0.0, 1.0, 2.0, 3.0]);
    let t_values = cfg.f64_list_or("t_values", &[0.25, 0.5, 0.75, 1.0]);
    let r_values = cfg.f64_list_or("r_values", &[1.0]);
    let spec = quad_spec_keys(&mut cfg);
    let target = output_key(&mut cfg);

    let mut items = Vec::new();
    for tok in items_raw.split_whitespace() {
        match tok {
            "normalization" | "psi" | "a" => items.push(tok.to_string()),
            other => cfg.violation(format!(
                "`items`: unknown item `{other}` (expected normalization, psi, a)"
            )),
        }
    }
    for t in &t_values {
        if !(*t > 0.0 && *t <= 1.0) {
            cfg.violation(format!("`t_values`: t must lie in (0, 1], got {t}"));
        }
    }
    for r in &r_values {
        if !(*r > 0.0 && r.is_finite()) {
            cfg.violation(format!("`r_values`: radius must be positive, got {r}"));
        }
    }
    let echo = close_config(cfg)?;

    let params = KernelParams::new(n, s)?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    for item in &items {
        match item.as_str() {
            "normalization" => {
                let closed = normalization_constant(&params);
                for &r in &r_values {
                    let integral = normalization_constant_integral_form(&params, r, &spec)?;
                    rows.push(vec![
                        "normalization".into(),
                        format!("n={n} s={} r={}", fmt_f64(s), fmt_f64(r)),
                        fmt_f64(closed),
                        fmt_f64((closed - integral.value).abs() + integral.error_estimate),
                    ]);
                }
            }
            "psi" => {
                for &p in &p_values {
                    for &t in &t_values {
                        let res = psi(p, t, &params, &spec)?;
                        rows.push(vec![
                            "psi".into(),
                            format!("n={n} s={} p={} t={}", fmt_f64(s), fmt_f64(p), fmt_f64(t)),
                            fmt_f64(res.value),
                            fmt_f64(res.error_estimate),
                        ]);
                    }
                }
            }
            "a" => {
                for &p in &p_values {
                    let res = a_coeff(p, &params, &spec)?;
                    rows.push(vec![
                        "a".into(),
                        format!("n={n} s={} p={}", fmt_f64(s), fmt_f64(p)),
                        fmt_f64(res.value),
                        fmt_f64(res.error_estimate),
                    ]);
                }
            }
            _ => unreachable!("items validated above"),
        }
    }

    let mut sink = Sink::for_target(&target)?;
    sink.header(&echo)?;
    sink.columns(&["name", "parameters", "value", "error_estimate"])?;
    for row in &rows {
        sink.row(row)?;
    }
    sink.flush()?;
    Ok(0)
}
