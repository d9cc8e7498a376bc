//! Central finite differences used by the validation checks.
//!
//! The step is `h = ε^{1/3} (1 + ‖x‖)`, the usual balance between truncation
//! and rounding error for central differences.

use crate::Point;

pub fn step(x: &Point) -> f64 {
    f64::EPSILON.cbrt() * (1.0 + x.norm())
}

/// Central-difference gradient of a scalar function.
pub fn gradient<F: Fn(&Point) -> f64>(f: F, x: &Point) -> Point {
    let h = step(x);
    let mut g = Point::zeros(x.len());
    let mut y = x.clone();
    for i in 0..x.len() {
        y[i] = x[i] + h;
        let fp = f(&y);
        y[i] = x[i] - h;
        let fm = f(&y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    g
}

/// Central-difference derivative of a scalar function along `v`.
pub fn directional<F: Fn(&Point) -> f64>(f: F, x: &Point, v: &Point) -> f64 {
    let h = step(x) / v.norm().max(1.0);
    (f(&(x + v * h)) - f(&(x - v * h))) / (2.0 * h)
}

/// Central-difference Jacobian-vector product of a vector field along `v`.
pub fn directional_jacobian<G: Fn(&Point) -> Point>(g: G, x: &Point, v: &Point) -> Point {
    let h = step(x) / v.norm().max(1.0);
    (g(&(x + v * h)) - g(&(x - v * h))) / (2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn quadratic_gradient() {
        let g = gradient(|x| x[0] * x[0] + 3.0 * x[1], &dvector![1.5, -2.0]);
        assert!((g - dvector![3.0, 3.0]).norm() < 1e-8);
    }

    #[test]
    fn directional_matches_gradient() {
        let f = |x: &Point| (x[0] * x[1]).sin();
        let x = dvector![0.3, 0.7];
        let v = dvector![1.0, -2.0];
        let d = directional(f, &x, &v);
        assert!((d - gradient(f, &x).dot(&v)).abs() < 1e-8);
    }
}
