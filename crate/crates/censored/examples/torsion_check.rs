//! End-to-end smoke run: applies the operator to the exact torsion field,
//! solves the interval Dirichlet problem, and cross-checks the Monte Carlo
//! estimator against the deterministic solution.
//!
//!     cargo run --release --example torsion_check

use censored::barrier::TorsionField;
use censored::domain::Domain;
use censored::field::Constant;
use censored::operator::apply_pointwise;
use censored::analysis::{
    boundary_quotient_profile, default_alpha_grid, fit_boundary_expansion, geometric_depths,
    BoundaryRay,
};
use censored::solver::{assemble_line, LineGrid, SolveMethod};
use censored::stochastic::{estimate_solution, JumpConfig};
use censored::{KernelParams, QuadratureSpec};

fn main() -> Result<(), censored::Error> {
    let domain = Domain::interval(-0.5, 0.5)?;
    let params = KernelParams::new(1, 0.5)?;

    // The operator applied to the exact torsion function returns 1.
    let torsion = TorsionField::enclosing(&domain)?;
    let spec = QuadratureSpec::default();
    let lt = apply_pointwise(&domain, &torsion, &[0.2], &params, &spec)?;
    println!("L(torsion)(0.2)      = {:.12}   (exact 1)", lt.value);

    // Dirichlet solve for f = 1, g = 0 against the closed form (0.25-x^2)/2.
    let grid = LineGrid::interval(&domain, 201)?;
    let op = assemble_line(&grid, &params)?;
    let sol = op.solve_dirichlet(&Constant(1.0), &Constant(0.0), SolveMethod::Auto)?;
    let err = (sol.eval(&[0.0]) - 0.125).abs();
    println!("solve u(0)           = {:.12}   (exact 0.125, err {err:.2e})", sol.eval(&[0.0]));

    // Monte Carlo estimate of the same value.
    let config = JumpConfig::new(0.05, 7)?;
    let stats = estimate_solution(&domain, &Constant(1.0), &[0.0], 20_000, &config, &params)?;
    println!(
        "monte carlo u(0)     = {:.6} ± {:.6}  ({} paths, {:.0} steps/path)",
        stats.estimate, stats.std_error, stats.paths, stats.mean_steps
    );
    let z = (stats.estimate - 0.125) / stats.std_error;
    println!("z-score vs exact     = {z:+.2}");

    // Boundary expansion of the numerical solution: u/d = c0 + K d^alpha
    // with exact values c0 = 1/2, alpha = 1.
    let ray = BoundaryRay::new(&domain, vec![-0.5], vec![1.0])?;
    let depths = geometric_depths(5e-3, 0.125, 16);
    let profile = boundary_quotient_profile(&sol, &domain, &ray, &depths)?;
    let report = fit_boundary_expansion(&profile, &default_alpha_grid())?;
    println!(
        "boundary fit         : c0 = {:.4} (exact 0.5), alpha = {:?}, residual {:.1e}",
        report.c0, report.alpha_hat, report.fit_residual
    );
    Ok(())
}
