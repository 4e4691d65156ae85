//! `barrier`: build the exterior-ball boundary barrier on the half-space and
//! certify the operator lower bound on a collar sample. Exit status 4 when
//! the certification fails.

use crate::config::{fmt_f64, Config};
use crate::output::Sink;
use crate::tasks::{close_config, output_key, quad_spec_keys};
use crate::RunError;
use censored::barrier::{build_boundary_barrier_with, BarrierOptions};
use censored::KernelParams;

pub fn run(mut cfg: Config) -> Result<u8, RunError> {
    cfg.task_key("barrier");
    let n = cfg.usize_or("n", 2, |v| {
        if (1..=3).contains(&v) {
            Ok(())
        } else {
            Err(format!("dimension must be 1, 2 or 3, got {v}"))
        }
    });
    let s = cfg.s_key(0.5);
    let b = cfg.f64_or("b", 1.0, |v| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(format!("exterior ball radius must be positive, got {v}"))
        }
    });
    let p = cfg.f64_opt("p", |v| {
        if v > 0.0 && v < 2.0 {
            Ok(())
        } else {
            Err(format!("barrier exponent must lie in (0, 2), got {v}"))
        }
    });
    let r0 = cfg.f64_opt("r0", |v| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(format!("collar size must be positive, got {v}"))
        }
    });
    let collar_levels = cfg.usize_or("collar_levels", 10, |v| {
        if v >= 1 {
            Ok(())
        } else {
            Err("collar sample needs at least one level".into())
        }
    });
    let slack = cfg.f64_or("slack", 0.1, |v| {
        if (0.0..1.0).contains(&v) {
            Ok(())
        } else {
            Err(format!("slack must lie in [0, 1), got {v}"))
        }
    });
    let spec = quad_spec_keys(&mut cfg);
    let target = output_key(&mut cfg);
    let echo = close_config(cfg)?;

    let params = KernelParams::new(n, s)?;
    let opts = BarrierOptions {
        p,
        r0,
        collar_levels,
    };
    let (barrier, report) = build_boundary_barrier_with(b, &params, &spec, slack, &opts)?;

    let mut sink = Sink::for_target(&target)?;
    sink.header(&echo)?;
    let coord_names = ["x1", "x2", "x3"];
    let mut cols: Vec<&str> = coord_names[..n].to_vec();
    cols.extend(["operator_value", "error_estimate"]);
    sink.columns(&cols)?;
    for row in &report.rows {
        let mut cells: Vec<String> = row.point.iter().map(|c| fmt_f64(*c)).collect();
        cells.push(fmt_f64(row.operator_value));
        cells.push(fmt_f64(row.error_estimate));
        sink.row(&cells)?;
    }
    sink.report_line("report_p", fmt_f64(barrier.p))?;
    sink.report_line("report_r0", fmt_f64(barrier.r0))?;
    sink.report_line("report_collar_points", report.rows.len().to_string())?;
    sink.report_line("report_threshold", fmt_f64(report.threshold))?;
    sink.report_line("report_min_value", fmt_f64(report.min_value))?;
    sink.report_line(
        "report_ray_growth_constant",
        fmt_f64(barrier.ray_growth_constant()),
    )?;
    sink.report_line("report_passed", report.passed.to_string())?;
    sink.flush()?;
    Ok(if report.passed { 0 } else { 4 })
}
