// Stochastic prox-linear method on robust phase retrieval (P1).
//
// The Bregman kernel grows like `x⁴`, which is what makes the composite
// `|a²x² − b|` relatively weakly convex without a global Lipschitz gradient.

use bregopt::driver::{self, SolverConfig, TstarMode};
use bregopt::problems;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = problems::p1();
    println!("{}: λ = {:.4}, x0 = {}", p.description, p.default_lambda(), p.x0[0]);
    for horizon in [64, 1024] {
        let config = SolverConfig::for_problem(&p, horizon, 7);
        let trace = driver::run(&p, &config)?;
        let m = driver::metrics(&p, &trace, TstarMode::Full)?;
        println!(
            "T = {horizon:5}  η = {:.4}  x_T+1 = {:+.4}  F = {:.4}  E D(x̂, x_t*) = {:.3e}",
            trace.etas[0],
            trace.iterates.last().unwrap()[0],
            p.objective(trace.iterates.last().unwrap()),
            m[0].1
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
