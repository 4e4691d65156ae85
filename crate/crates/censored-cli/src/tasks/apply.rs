//! `apply`: evaluate the operator pointwise on a named field.

use crate::config::{fmt_f64, Config};
use crate::output::Sink;
use crate::selector::{check_field_dim, parse_field};
use crate::tasks::{close_config, output_key, quad_spec_keys};
use crate::RunError;
use censored::operator::apply_batch;
use censored::KernelParams;

pub fn run(mut cfg: Config) -> Result<u8, RunError> {
    cfg.task_key("apply");
    let domain = cfg.domain_key();
    let dim = domain.as_ref().map_or(1, |d| d.dim());
    let s = cfg.s_key(0.5);
    let selector = cfg.str_or("field", "torsion");
    let points = cfg.points_key("points", dim);
    let spec = quad_spec_keys(&mut cfg);
    let target = output_key(&mut cfg);

    let field = match parse_field(&selector, domain.as_ref()) {
        Ok(f) => {
            if let Err(why) = check_field_dim(&selector, f.as_ref(), dim) {
                cfg.violation(format!("`field`: {why}"));
                None
            } else {
                Some(f)
            }
        }
        Err(why) => {
            cfg.violation(format!("`field`: {why}"));
            None
        }
    };
    let echo = close_config(cfg)?;

    let domain = domain.expect("validated");
    let points = points.expect("validated");
    let field = field.expect("validated");
    let params = KernelParams::new(dim, s)?;

    let evals = apply_batch(&domain, field.as_ref(), &points, &params, &spec);
    let mut rows = Vec::with_capacity(points.len());
    for (pt, ev) in points.iter().zip(evals) {
        let ev = ev?;
        let mut row: Vec<String> = pt.iter().map(|c| fmt_f64(*c)).collect();
        row.push(fmt_f64(ev.value));
        row.push(fmt_f64(ev.error_estimate));
        rows.push(row);
    }

    let mut sink = Sink::for_target(&target)?;
    sink.header(&echo)?;
    let coord_names = ["x1", "x2", "x3"];
    let mut cols: Vec<&str> = coord_names[..dim].to_vec();
    cols.push("value");
    cols.push("error_estimate");
    sink.columns(&cols)?;
    for row in &rows {
        sink.row(row)?;
    }
    sink.flush()?;
    Ok(0)
}
