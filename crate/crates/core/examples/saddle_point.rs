// Robust least squares as a saddle problem (P5): the model maximizes
// `⟨a + w, x⟩` over a small ball of perturbations `w`.

use bregopt::driver::{self, SolverConfig};
use bregopt::problems;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = problems::p5();
    let opt = p.optimum.clone().expect("P5 records its optimum");
    let config = SolverConfig::for_problem(&p, 5000, 5);
    let trace = driver::run(&p, &config)?;
    let last = trace.iterates.last().unwrap();
    println!("x* = [{:+.4}, {:+.4}]  F* = {:.6}", opt.x_star[0], opt.x_star[1], opt.f_star);
    println!("x_T = [{:+.4}, {:+.4}]  F = {:.6}", last[0], last[1], p.objective(last));
    let oracle = problems::brute_force_min(&p, (-2.0, 2.0), 1e-3)?;
    println!("brute force: {:.6} by {:?}", oracle.value, oracle.method);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
