// Entropic mirror descent on the simplex (P3), and the strongly convex
// variant with an entropy penalty (P4), against their theoretical bounds.

use bregopt::driver::{self, SolverConfig, TstarMode};
use bregopt::problems;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p3 = problems::p3();
    for horizon in [100, 1000, 10_000] {
        let config = SolverConfig::for_problem(&p3, horizon, 1);
        let trace = driver::run(&p3, &config)?;
        let gap = driver::metrics(&p3, &trace, TstarMode::Draw)?[0].1;
        let bound = driver::convex_bound(&p3, &trace.etas)?;
        println!("P3 T = {horizon:6}  gap = {gap:.3e}  bound = {bound:.3e}");
    }

    let p4 = problems::p4();
    let mu = p4.constants().mu;
    for horizon in [100, 1000, 10_000] {
        let config = SolverConfig::for_problem(&p4, horizon, 1);
        let trace = driver::run(&p4, &config)?;
        let gap = driver::metrics(&p4, &trace, TstarMode::Draw)?[0].1;
        let bound = driver::strongly_convex_bound(&p4, horizon, mu)?;
        println!("P4 T = {horizon:6}  gap = {gap:.3e}  bound = {bound:.3e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
