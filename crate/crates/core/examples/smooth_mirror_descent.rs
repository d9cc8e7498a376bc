// Mirror descent with noisy gradients on a relatively smooth quartic (P2).

use bregopt::driver::{self, Schedule, SolverConfig, TstarMode};
use bregopt::envelope::{self, EnvelopeOptions};
use bregopt::problems;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = problems::p2();
    let c = p.constants();
    println!("τ = {:.4}  M = {:.4}  σ = {}", c.tau, c.smooth_m, c.sigma);
    for alpha in [0.25, 0.5, 1.0] {
        let mut config = SolverConfig::for_problem(&p, 2000, 11);
        config.schedule = Schedule::ConstantAlpha { alpha };
        let trace = driver::run(&p, &config)?;
        let m = driver::metrics(&p, &trace, TstarMode::Full)?;
        let report = envelope::stationarity(&p, &p.phi, &trace.returned_point, trace.lambda, &EnvelopeOptions::default())?;
        println!(
            "α = {alpha:4}  η = {:.4}  E D = {:.3e}  E ‖∇F_λ‖* = {:.3e}  at x_t*: ‖∇F_λ‖* = {:.3e}",
            trace.etas[0], m[0].1, m[1].1, report.local_dual_norm_of_gradient
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
