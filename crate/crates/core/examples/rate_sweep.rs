// A rate sweep with its log-log fit, written as CSV to stdout.

use bregopt::driver::{self, SolverConfig, SweepOptions, TstarMode};
use bregopt::problems;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = problems::p3();
    let opts = SweepOptions {
        horizons: vec![64, 256, 1024],
        n_seeds: 5,
        base_seed: 100,
        mode: TstarMode::Draw,
        threads: None,
        template: SolverConfig::for_problem(&p, 0, 0),
    };
    let res = driver::sweep(&p, &opts)?;
    for s in &res.summary {
        println!("T = {:5}  mean = {:.4e} ± {:.1e}", s.horizon, s.mean, s.std_error);
    }
    println!("{}", serde_json::to_string(&res.fit)?);
    driver::write_csv(&res.rows[..3], std::io::stdout())?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
