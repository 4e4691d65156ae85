//! Subcommand implementations. Each `run` consumes a parsed config, builds
//! the complete row list in memory, and only then opens the sink and writes
//! header + rows — a failed run never leaves a partial output file.

pub mod analyze;
pub mod apply;
pub mod barrier;
pub mod mc;
pub mod selftest;
pub mod solve;
pub mod special;

use crate::config::Config;
use crate::RunError;
use censored::QuadratureSpec;

/// Shared quadrature knobs: `quad_abs_tol`, `quad_rel_tol`, `quad_max_depth`.
pub(crate) fn quad_spec_keys(cfg: &mut Config) -> QuadratureSpec {
    let abs_tol = cfg.f64_or("quad_abs_tol", 1e-10, |v| {
        if v >= 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(format!("quadrature tolerance must be nonnegative, got {v}"))
        }
    });
    let rel_tol = cfg.f64_or("quad_rel_tol", 1e-10, |v| {
        if v >= 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(format!("quadrature tolerance must be nonnegative, got {v}"))
        }
    });
    let max_refinement_depth = cfg.usize_or("quad_max_depth", 40, |v| {
        if (1..=60).contains(&v) {
            Ok(())
        } else {
            Err(format!("refinement depth must lie in 1..=60, got {v}"))
        }
    }) as u32;
    if abs_tol == 0.0 && rel_tol == 0.0 {
        cfg.violation("at least one of quad_abs_tol, quad_rel_tol must be positive");
    }
    QuadratureSpec {
        abs_tol,
        rel_tol,
        max_refinement_depth,
    }
}

/// Shared `output` key: `stdout` (default) or a file path.
pub(crate) fn output_key(cfg: &mut Config) -> String {
    cfg.str_or("output", "stdout")
}

/// Finish the config, mapping violations onto the config exit path.
pub(crate) fn close_config(
    cfg: Config,
) -> Result<std::collections::BTreeMap<String, String>, RunError> {
    cfg.finish().map_err(RunError::Config)
}
