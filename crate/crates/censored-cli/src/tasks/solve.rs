//! `solve`: Dirichlet collocation solve on a graded grid, with the solution
//! table (node coordinates, u, d, u/d), a report trailer, and an optional
//! coordinate-format matrix dump.

use crate::config::{fmt_f64, Config};
use crate::output::Sink;
use crate::selector::{check_field_dim, parse_field};
use crate::tasks::{close_config, output_key};
use crate::RunError;
use censored::domain::Domain;
use censored::solver::{assemble_line, assemble_polar, LineGrid, PolarGrid, SolveMethod};
use censored::KernelParams;
use std::io::Write;

pub fn run(mut cfg: Config) -> Result<u8, RunError> {
    cfg.task_key("solve");
    let domain = cfg.domain_key();
    let dim = domain.as_ref().map_or(1, |d| d.dim());
    let s = cfg.s_key(0.5);
    let f_sel = cfg.str_or("f", "constant:1");
    let g_sel = cfg.str_or("g", "constant:0");
    let grading = cfg.f64_or("grading", 2.0, |v| {
        if v >= 1.0 && v.is_finite() {
            Ok(())
        } else {
            Err(format!("grading exponent must be at least 1, got {v}"))
        }
    });
    let method_raw = cfg.str_or("method", "auto");
    let matrix_file = cfg.str_opt("matrix_file");
    let target = output_key(&mut cfg);

    // Grid knobs by domain kind; the irrelevant family is rejected, not
    // silently ignored.
    let is_ball = matches!(domain, Some(Domain::Ball { .. }));
    let (grid_m, grid_rings, grid_angles);
    if is_ball {
        grid_rings = cfg.usize_or("grid_rings", 40, |v| {
            if v >= 2 {
                Ok(())
            } else {
                Err(format!("ball grid needs at least 2 rings, got {v}"))
            }
        });
        grid_angles = cfg.usize_or("grid_angles", 8, |v| {
            if v >= 4 {
                Ok(())
            } else {
                Err(format!("ball grid needs at least 4 angles, got {v}"))
            }
        });
        grid_m = 0;
        cfg.reject_if_present("grid_m", "applies to one-dimensional domains only");
    } else {
        grid_m = cfg.usize_or("grid_m", 200, |v| {
            if v >= 3 {
                Ok(())
            } else {
                Err(format!("line grid needs at least 3 interior nodes, got {v}"))
            }
        });
        grid_rings = 0;
        grid_angles = 0;
        cfg.reject_if_present("grid_rings", "applies to ball domains only");
        cfg.reject_if_present("grid_angles", "applies to ball domains only");
    }

    let method = match method_raw.as_str() {
        "auto" => SolveMethod::Auto,
        "dense" => SolveMethod::DenseLu,
        "jacobi" => SolveMethod::DampedJacobi,
        other => {
            cfg.violation(format!(
                "`method`: expected auto, dense or jacobi, got `{other}`"
            ));
            SolveMethod::Auto
        }
    };

    let f = match parse_field(&f_sel, domain.as_ref()) {
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
    let g = match parse_field(&g_sel, domain.as_ref()) {
        Ok(g) => match check_field_dim(&g_sel, g.as_ref(), dim) {
            Ok(()) => Some(g),
            Err(why) => {
                cfg.violation(format!("`g`: {why}"));
                None
            }
        },
        Err(why) => {
            cfg.violation(format!("`g`: {why}"));
            None
        }
    };
    let echo = close_config(cfg)?;

    let domain = domain.expect("validated");
    let f = f.expect("validated");
    let g = g.expect("validated");
    let params = KernelParams::new(dim, s)?;

    let op = match &domain {
        Domain::Ball { .. } => {
            let grid = PolarGrid::ball_graded(&domain, grid_rings, grid_angles, grading)?;
            assemble_polar(&grid, &params)?
        }
        Domain::Interval { .. } => {
            let grid = LineGrid::interval_graded(&domain, grid_m, grading)?;
            assemble_line(&grid, &params)?
        }
        Domain::HalfLineSection => {
            let grid = LineGrid::half_line_section_graded(grid_m, grading)?;
            assemble_line(&grid, &params)?
        }
        Domain::HalfSpace { .. } => {
            return Err(censored::Error::UnsupportedDomain {
                op: "Dirichlet solve",
                domain: domain.kind_name().to_string(),
            }
            .into())
        }
    };

    let mono = op.monotonicity_diagnostics();
    let solution = op.solve_dirichlet(f.as_ref(), g.as_ref(), method)?;

    if let Some(path) = &matrix_file {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        for (r, c, v) in op.matrix_triplets() {
            writeln!(w, "{r}, {c}, {v}")?;
        }
        w.flush()?;
    }

    let grid = &solution.grid;
    let mut rows = Vec::with_capacity(grid.node_count());
    for idx in 0..grid.node_count() {
        let pos = grid.node_position(idx);
        let u = solution.node_values[idx];
        let d = grid.node_distance(idx);
        let mut row: Vec<String> = pos.iter().map(|c| fmt_f64(*c)).collect();
        row.push(fmt_f64(u));
        row.push(fmt_f64(d));
        row.push(fmt_f64(u / d));
        rows.push(row);
    }

    let mut sink = Sink::for_target(&target)?;
    sink.header(&echo)?;
    let coord_names = ["x1", "x2"];
    let mut cols: Vec<&str> = coord_names[..dim].to_vec();
    cols.extend(["u", "d", "u_over_d"]);
    sink.columns(&cols)?;
    for row in &rows {
        sink.row(row)?;
    }
    sink.report_line("report_method", &solution.report.method)?;
    sink.report_line("report_residual_max", fmt_f64(solution.report.residual_max))?;
    sink.report_line(
        "report_iterations",
        solution
            .report
            .iterations
            .map_or("none".to_string(), |i| i.to_string()),
    )?;
    sink.report_line("report_nodes", grid.node_count().to_string())?;
    sink.report_line("report_unknowns", grid.unknown_indices().len().to_string())?;
    sink.report_line("report_min_diagonal", fmt_f64(mono.min_diagonal))?;
    sink.report_line("report_max_off_diagonal", fmt_f64(mono.max_off_diagonal))?;
    sink.report_line("report_min_total_row_sum", fmt_f64(mono.min_total_row_sum))?;
    sink.report_line("report_max_total_row_sum", fmt_f64(mono.max_total_row_sum))?;
    sink.report_line("report_sign_pattern_ok", mono.sign_pattern_ok.to_string())?;
    sink.flush()?;
    Ok(0)
}
