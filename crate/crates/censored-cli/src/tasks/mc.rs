//! `mc`: estimate Dirichlet solutions at chosen points with the censored
//! jump-diffusion sampler.

use crate::config::{fmt_f64, Config};
use crate::output::Sink;
use crate::selector::{check_field_dim, parse_field};
use crate::tasks::{close_config, output_key};
use crate::RunError;
use censored::stochastic::{estimate_solution, JumpConfig};
use censored::KernelParams;

pub fn run(mut cfg: Config) -> Result<u8, RunError> {
    cfg.task_key("mc");
    let domain = cfg.domain_key();
    let dim = domain.as_ref().map_or(1, |d| d.dim());
    let s = cfg.s_key(0.5);
    let f_sel = cfg.str_or("f", "constant:1");
    let points = cfg.points_key("points", dim);
    let paths = cfg.usize_or("paths", 10_000, |v| {
        if v >= 1 {
            Ok(())
        } else {
            Err("path count must be positive".into())
        }
    });
    let epsilon = cfg.f64_or("epsilon", 0.05, |v| {
        if v > 0.0 && v < 1.0 {
            Ok(())
        } else {
            Err(format!("epsilon must lie in (0, 1), got {v}"))
        }
    });
    let seed = cfg.u64_or("seed", 0);
    let c_dt = cfg.f64_or("c_dt", 0.02, |v| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(format!("Euler factor must be positive, got {v}"))
        }
    });
    let c_clock = cfg.f64_or("c_clock", 0.25, |v| {
        if v > 0.0 {
            Ok(())
        } else {
            Err(format!("clock cap must be positive, got {v}"))
        }
    });
    let boundary_layer = cfg.f64_opt("boundary_layer", |v| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(format!("absorption layer must be positive, got {v}"))
        }
    });
    let max_steps = cfg.usize_or("max_steps", 1_000_000, |v| {
        if v >= 1 {
            Ok(())
        } else {
            Err("step cap must be positive".into())
        }
    });
    let target = output_key(&mut cfg);

    let field = match parse_field(&f_sel, domain.as_ref()) {
        Ok(f) => match check_field_dim(&f_sel, f.as_ref(), dim) {
            Ok(()) => Some(f),
            Err(why) => {
                cfg.violation(format!("`f`: {why}"));
                None
            }
        },
        Err(why) => {
            cfg.violation(format!("`f`: {why}"));
            None
        }
    };
    let echo = close_config(cfg)?;

    let domain = domain.expect("validated");
    let points = points.expect("validated");
    let field = field.expect("validated");
    let params = KernelParams::new(dim, s)?;
    let mut jump = JumpConfig::new(epsilon, seed)?;
    jump.max_steps = max_steps;
    jump.boundary_layer = boundary_layer;
    jump.c_dt = c_dt;
    jump.c_clock = c_clock;

    let mut rows = Vec::with_capacity(points.len());
    let mut flagged = 0usize;
    for pt in &points {
        let stats = estimate_solution(&domain, field.as_ref(), pt, paths, &jump, &params)?;
        if stats.flagged {
            flagged += 1;
        }
        let mut row: Vec<String> = pt.iter().map(|c| fmt_f64(*c)).collect();
        row.push(fmt_f64(stats.estimate));
        row.push(fmt_f64(stats.std_error));
        row.push(fmt_f64(stats.mean_steps));
        row.push(fmt_f64(stats.truncated_fraction));
        rows.push(row);
    }

    let mut sink = Sink::for_target(&target)?;
    sink.header(&echo)?;
    let coord_names = ["x1", "x2", "x3"];
    let mut cols: Vec<&str> = coord_names[..dim].to_vec();
    cols.extend(["estimate", "std_error", "mean_steps", "truncated_fraction"]);
    sink.columns(&cols)?;
    for row in &rows {
        sink.row(row)?;
    }
    sink.report_line("report_flagged_points", flagged.to_string())?;
    sink.flush()?;
    Ok(0)
}
