// Bregman geometry of the Legendre functions built for polynomial growth.
//
// Prints divergences, the local norm, and the growth lower bound
// `D(x, y) >= (p(|x|) + p(|y|))/2 |x − y|²` on a few pairs.

use bregopt::legendre::{build_composite_legendre, build_poly_legendre, eval_poly, LegendreFunction};
use bregopt::Point;
use nalgebra::dvector;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let p = [1.0, 0.0, 2.0];
    let phi = build_poly_legendre(&p)?;
    let pairs = [(dvector![1.0, 0.5], dvector![-0.3, 2.0]), (dvector![3.0, 0.0], dvector![2.5, 0.1])];
    for (x, y) in &pairs {
        let d = phi.bregman(x, y)?;
        let lower = 0.5 * (eval_poly(&p, x.norm()) + eval_poly(&p, y.norm())) * (x - y).norm_squared();
        println!("D = {d:.6}  growth bound = {lower:.6}  slack = {:.3e}", d - lower);
        assert!(d >= lower - 1e-12);
    }

    // Inner maps with ‖∇c(x)‖ <= sqrt(q(‖x‖)) get Φ built from both p and q.
    let composite = build_composite_legendre(&[1.0], &[0.0, 0.0, 4.0])?;
    let x = dvector![2.0];
    println!("composite Φ(2) = {}, ∇Φ(2) = {}", composite.value(&x), composite.gradient(&x)?[0]);

    let entropy = LegendreFunction::shannon_entropy();
    let u = Point::from_element(4, 0.25);
    let e = dvector![0.7, 0.1, 0.1, 0.1];
    println!("KL(e ‖ uniform) = {:.6}", entropy.bregman(&e, &u)?);
    println!("‖(1,1,1,1)‖*_u = {:.6}", entropy.local_dual_norm(&u, &Point::from_element(4, 1.0))?);

    let v = dvector![0.3, -1.2];
    let back = phi.gradient_inverse(&phi.gradient(&v)?)?;
    println!("mirror map round trip error = {:.2e}", (back - v).norm());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
