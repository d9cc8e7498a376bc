// The Bregman–Moreau envelope as a stationarity measure on a nonsmooth
// weakly convex function, with the two evaluation paths side by side.

use bregopt::envelope::{self, EnvelopeOptions, EnvelopePath, FnComposite};
use bregopt::legendre::build_poly_legendre;
use bregopt::numdiff;
use bregopt::subproblem::Regularizer;
use nalgebra::dvector;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // F(x) = |x₁² − 1| + ½x₂², weakly convex relative to Φ = ½‖x‖² + ¼‖x‖⁴.
    let problem = FnComposite {
        dim: 2,
        f: |x: &bregopt::Point| (x[0] * x[0] - 1.0).abs() + 0.5 * x[1] * x[1],
        grad: |x: &bregopt::Point| dvector![2.0 * x[0] * (x[0] * x[0] - 1.0).signum(), x[1]],
        hessian: None,
        regularizer: Regularizer::zero(),
        weak: 2.0,
    };
    let phi = build_poly_legendre(&[1.0, 0.0, 1.0])?;
    let lambda = 0.25;
    let opts = EnvelopeOptions::default();
    for x in [dvector![2.0, 1.0], dvector![1.2, -0.3], dvector![1.0, 0.0]] {
        let r = envelope::stationarity(&problem, &phi, &x, lambda, &opts)?;
        let fd = numdiff::gradient(|y| envelope::envelope_value(&problem, &phi, y, lambda, EnvelopePath::Direct, &opts).unwrap(), &x);
        println!(
            "x = [{:+.2}, {:+.2}]  x̂ = [{:+.4}, {:+.4}]  D = {:.3e}  ‖∇F_λ‖* = {:.3e}  direct − conjugate = {:+.1e}  FD error = {:.1e}",
            x[0],
            x[1],
            r.prox_point[0],
            r.prox_point[1],
            r.divergence,
            r.local_dual_norm_of_gradient,
            r.envelope_value_direct - r.envelope_value_conjugate,
            (fd - &r.envelope_gradient).norm()
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
