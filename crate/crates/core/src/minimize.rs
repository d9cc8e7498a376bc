//! Small dense convex minimizers for the inner problems.
//!
//! The feasible set is an affine slice (all of `R^d` or the unit simplex),
//! optionally intersected with a Euclidean ball and with the open positive
//! orthant. Work happens in reduced coordinates `y = base + Z u`, and the method
//! is picked from the reduced dimension and the smoothness of the objective:
//!
//! * one reduced coordinate: bisection on the sign of the derivative,
//! * smooth objectives: damped Newton with Armijo backtracking,
//! * otherwise: the central-cut ellipsoid method in factored form. Near a kink
//!   it stalls once the kink coordinate reaches f64 resolution, so its answers
//!   are good to about `1e-9` and callers certify them.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots;
use crate::Point;

/// Convex objective with first-order (and optionally second-order) access.
pub trait Objective {
    fn dim(&self) -> usize;
    /// Objective value, `+∞` outside the domain.
    fn value(&self, y: &Point) -> f64;
    /// Any subgradient at a point of finite value.
    fn subgradient(&self, y: &Point) -> Point;
    fn hessian(&self, _y: &Point) -> Option<DMatrix<f64>> {
        None
    }
    /// Twice continuously differentiable on the interior of its domain.
    fn smooth(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Constraint {
    Free,
    Simplex,
    Ball {
        #[serde(with = "crate::decimal::scalar")]
        radius: f64,
    },
}

impl Constraint {
    pub fn contains(&self, y: &Point, tol: f64) -> bool {
        match self {
            Constraint::Free => y.iter().all(|v| v.is_finite()),
            Constraint::Simplex => y.iter().all(|&v| v >= -tol) && (y.sum() - 1.0).abs() <= tol * y.len() as f64,
            Constraint::Ball { radius } => y.norm() <= radius * (1.0 + tol),
        }
    }

    /// Euclidean projection onto the set.
    pub fn project(&self, y: &Point) -> Point {
        match self {
            Constraint::Free => y.clone(),
            Constraint::Ball { radius } => {
                let n = y.norm();
                if n <= *radius {
                    y.clone()
                } else {
                    y * (radius / n)
                }
            }
            Constraint::Simplex => {
                // Sort-based projection onto {y >= 0, Σ y = 1}.
                let mut s: Vec<f64> = y.iter().copied().collect();
                s.sort_by(|a, b| b.total_cmp(a));
                let mut cum = 0.0;
                let mut theta = 0.0;
                for (i, &v) in s.iter().enumerate() {
                    cum += v;
                    let t = (cum - 1.0) / (i as f64 + 1.0);
                    if v - t > 0.0 {
                        theta = t;
                    }
                }
                y.map(|v| (v - theta).max(0.0))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimizeOptions {
    pub max_iter: usize,
    /// Relative resolution of the returned point.
    pub xtol: f64,
    /// Radius of the initial ellipsoid around the start point.
    pub radius: Option<f64>,
    /// Restrict to the open positive orthant.
    pub positive: bool,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions { max_iter: 200_000, xtol: 1e-14, radius: None, positive: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Closed,
    Bisection,
    Newton,
    Ellipsoid,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub point: Point,
    pub value: f64,
    pub iterations: usize,
    pub method: Method,
}

struct Reduced<'a> {
    obj: &'a dyn Objective,
    base: Point,
    basis: DMatrix<f64>,
    ball: Option<f64>,
    positive: bool,
}

impl Reduced<'_> {
    fn lift(&self, u: &DVector<f64>) -> Point {
        &self.base + &self.basis * u
    }

    fn feasible(&self, y: &Point) -> bool {
        if self.positive && y.iter().any(|&v| v <= 0.0) {
            return false;
        }
        match self.ball {
            Some(r) => y.norm() <= r,
            None => true,
        }
    }

    fn value(&self, u: &DVector<f64>) -> f64 {
        let y = self.lift(u);
        if !self.feasible(&y) {
            return f64::INFINITY;
        }
        self.obj.value(&y)
    }

    fn gradient(&self, u: &DVector<f64>) -> DVector<f64> {
        self.basis.tr_mul(&self.obj.subgradient(&self.lift(u)))
    }

    /// A cut separating an infeasible `y` from the feasible set.
    fn feasibility_cut(&self, y: &Point) -> Option<DVector<f64>> {
        if self.positive {
            let (i, v) = y.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1))?;
            if *v <= 0.0 {
                let mut e = Point::zeros(y.len());
                e[i] = -1.0;
                return Some(self.basis.tr_mul(&e));
            }
        }
        if let Some(r) = self.ball {
            let n = y.norm();
            if n > r {
                return Some(self.basis.tr_mul(&(y / n)));
            }
        }
        None
    }
}

/// Minimizes `obj` over the constraint set, starting from `start`.
pub fn minimize(obj: &dyn Objective, constraint: Constraint, start: &Point, opts: MinimizeOptions) -> Result<Minimum> {
    let d = obj.dim();
    if start.len() != d {
        return Err(Error::InvalidConfig(format!("start has dimension {} but objective has {d}", start.len())));
    }
    let (base, basis, ball) = match constraint {
        Constraint::Free => (start.clone(), DMatrix::identity(d, d), None),
        Constraint::Ball { radius } => (constraint.project(start), DMatrix::identity(d, d), Some(radius)),
        Constraint::Simplex => {
            let inside = start.iter().all(|&v| v > 0.0) && (start.sum() - 1.0).abs() < 1e-9;
            let base = if inside { start / start.sum() } else { Point::from_element(d, 1.0 / d as f64) };
            let mut z = DMatrix::zeros(d, d.saturating_sub(1));
            for j in 0..d.saturating_sub(1) {
                z[(j, j)] = 1.0;
                z[(d - 1, j)] = -1.0;
            }
            (base, z, None)
        }
    };
    let red = Reduced { obj, base, basis, ball, positive: opts.positive || constraint == Constraint::Simplex };
    let n = red.basis.ncols();
    if n == 0 {
        let value = obj.value(&red.base);
        return Ok(Minimum { point: red.base, value, iterations: 0, method: Method::Closed });
    }
    if !red.value(&DVector::zeros(n)).is_finite() {
        return Err(Error::DomainViolation("start point has infinite objective value".into()));
    }
    if n == 1 {
        return Ok(bisection(&red, opts));
    }
    if obj.smooth() && ball.is_none() && obj.hessian(&red.base).is_some() {
        if let Some(m) = newton(&red, opts) {
            return Ok(m);
        }
    }
    ellipsoid(&red, opts)
}

fn bisection(red: &Reduced<'_>, opts: MinimizeOptions) -> Minimum {
    let at = |u: f64| DVector::from_element(1, u);
    let deriv = |u: f64| red.gradient(&at(u))[0];
    let finite = |u: f64| red.value(&at(u)).is_finite();
    let scale = 1.0 + red.base.norm();
    let mut evals = 0;

    // Walk outwards until the derivative changes sign or the domain ends.
    let mut search = |sign: f64| -> (f64, bool) {
        let mut inner = 0.0;
        let mut step = scale;
        for _ in 0..200 {
            let u = sign * step;
            evals += 1;
            if !finite(u) {
                // Shrink towards the last feasible point until feasible again.
                let mut lo_t = inner;
                let mut hi_t = u;
                for _ in 0..2000 {
                    let mid = 0.5 * (lo_t + hi_t);
                    if mid == lo_t || mid == hi_t {
                        break;
                    }
                    if finite(mid) && sign * deriv(mid) > 0.0 {
                        return (mid, true);
                    }
                    if finite(mid) {
                        lo_t = mid;
                    } else {
                        hi_t = mid;
                    }
                }
                return (lo_t, false);
            }
            if sign * deriv(u) > 0.0 {
                return (u, true);
            }
            inner = u;
            step *= 2.0;
        }
        (inner, false)
    };

    let d0 = deriv(0.0);
    if d0 == 0.0 {
        let point = red.lift(&at(0.0));
        return Minimum { value: red.obj.value(&point), point, iterations: 0, method: Method::Bisection };
    }
    let (lo, hi, boundary) = if d0 < 0.0 {
        let (hi, found) = search(1.0);
        (0.0, hi, (!found).then_some(hi))
    } else {
        let (lo, found) = search(-1.0);
        (lo, 0.0, (!found).then_some(lo))
    };
    if let Some(u) = boundary {
        let point = red.lift(&at(u));
        return Minimum { value: red.obj.value(&point), point, iterations: evals, method: Method::Bisection };
    }
    let root = roots::bisect_decreasing(|u| -deriv(u), lo, hi, opts.max_iter.min(5000));
    let point = red.lift(&at(root.x));
    Minimum { value: red.obj.value(&point), point, iterations: evals + root.iterations, method: Method::Bisection }
}

fn newton(red: &Reduced<'_>, opts: MinimizeOptions) -> Option<Minimum> {
    let n = red.basis.ncols();
    let mut u = DVector::zeros(n);
    let mut f = red.value(&u);
    let mut stalls = 0;
    for it in 1..=opts.max_iter.min(500) {
        let y = red.lift(&u);
        let g = red.gradient(&u);
        let h = red.basis.tr_mul(&(red.obj.hessian(&y)? * &red.basis));
        let p = match h.clone().cholesky() {
            Some(ch) => -ch.solve(&g),
            None => {
                // Regularize an indefinite or singular Hessian.
                let shift = 1e-10 * (1.0 + h.norm());
                -(h + DMatrix::identity(n, n) * shift).cholesky()?.solve(&g)
            }
        };
        let slope = g.dot(&p);
        if !(slope < 0.0) {
            return Some(Minimum { point: y, value: f, iterations: it, method: Method::Newton });
        }
        if -slope <= 1e-10 * (1.0 + f.abs()) {
            // The predicted decrease is below the rounding floor of f, so the
            // full step is judged by the gradient instead.
            let cand = &u + &p;
            let fc = red.value(&cand);
            if stalls < 8 && fc.is_finite() && red.gradient(&cand).norm() < g.norm() {
                stalls += 1;
                u = cand;
                f = fc;
                continue;
            }
            return Some(Minimum { point: y, value: f, iterations: it, method: Method::Newton });
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..80 {
            let cand = &u + &p * t;
            let fc = red.value(&cand);
            if fc.is_finite() && fc <= f + 1e-4 * t * slope {
                accepted = Some((cand, fc));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, fc)) = accepted else {
            return Some(Minimum { point: y, value: f, iterations: it, method: Method::Newton });
        };
        let step = (&cand - &u).norm();
        u = cand;
        f = fc;
        if step <= opts.xtol * (1.0 + u.norm()) {
            let point = red.lift(&u);
            return Some(Minimum { point, value: f, iterations: it, method: Method::Newton });
        }
    }
    None
}

fn ellipsoid(red: &Reduced<'_>, opts: MinimizeOptions) -> Result<Minimum> {
    let n = red.basis.ncols();
    let nf = n as f64;
    let r0 = opts.radius.unwrap_or_else(|| 100.0 * (1.0 + red.base.norm()));
    let mut c = DVector::zeros(n);
    // Factored shape P = B Bᵀ keeps the thin directions accurate.
    let mut b_mat = DMatrix::identity(n, n) * r0;
    let mut best: Option<(DVector<f64>, f64)> = None;
    let scale = nf / (nf * nf - 1.0).sqrt();
    let shrink = ((nf - 1.0) / (nf + 1.0)).sqrt() - 1.0;
    let mut width = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let y = red.lift(&c);
        let fy = red.value(&c);
        let g = if fy.is_finite() {
            if best.as_ref().is_none_or(|(_, fb)| fy <= *fb) {
                best = Some((c.clone(), fy));
            }
            red.gradient(&c)
        } else {
            match red.feasibility_cut(&y) {
                Some(cut) => cut,
                None => {
                    return Err(Error::Unsolvable(format!("objective is infinite at feasible point {y:?}")));
                }
            }
        };
        let bg = b_mat.tr_mul(&g);
        let bg_norm = bg.norm();
        if !(bg_norm > 0.0) || !bg_norm.is_finite() {
            // Zero subgradient (exact minimizer) or a numerically collapsed shape.
            break;
        }
        let gt = bg / bg_norm;
        let step = &b_mat * &gt;
        c -= &step / (nf + 1.0);
        b_mat = (&b_mat + &step * gt.transpose() * shrink) * scale;
        width = b_mat.norm();
        if width <= opts.xtol * (1.0 + c.norm()) {
            let fc = red.value(&c);
            if fc.is_finite() && best.as_ref().is_none_or(|(_, fb)| fc <= *fb + 1e-12 * (1.0 + fb.abs())) {
                return Ok(Minimum { point: red.lift(&c), value: fc, iterations: it, method: Method::Ellipsoid });
            }
            break;
        }
        if it == opts.max_iter {
            return Err(Error::InnerSolver { iterations: it, residual: width });
        }
    }
    match best {
        Some((u, f)) => Ok(Minimum { point: red.lift(&u), value: f, iterations: 0, method: Method::Ellipsoid }),
        None => Err(Error::Unsolvable(format!("no feasible point found (ellipsoid width {width:e})"))),
    }
}

/// Golden-section search for a unimodal function on `[lo, hi]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    while hi - lo > tol * (1.0 + lo.abs().max(hi.abs())) {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        }
        if a >= b {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    struct Quad {
        h: DMatrix<f64>,
        c: Point,
    }

    impl Objective for Quad {
        fn dim(&self) -> usize {
            self.c.len()
        }
        fn value(&self, y: &Point) -> f64 {
            0.5 * y.dot(&(&self.h * y)) - self.c.dot(y)
        }
        fn subgradient(&self, y: &Point) -> Point {
            &self.h * y - &self.c
        }
        fn hessian(&self, _y: &Point) -> Option<DMatrix<f64>> {
            Some(self.h.clone())
        }
        fn smooth(&self) -> bool {
            true
        }
    }

    /// `Σ |y_i − t_i| + ½‖y‖²`
    struct Kinked {
        t: Point,
    }

    impl Objective for Kinked {
        fn dim(&self) -> usize {
            self.t.len()
        }
        fn value(&self, y: &Point) -> f64 {
            (y - &self.t).abs().sum() + 0.5 * y.norm_squared()
        }
        fn subgradient(&self, y: &Point) -> Point {
            (y - &self.t).map(|v| if v > 0.0 { 1.0 } else if v < 0.0 { -1.0 } else { 0.0 }) + y
        }
    }

    #[test]
    fn newton_solves_quadratic() {
        let q = Quad { h: DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]), c: dvector![1.0, -1.0] };
        let m = minimize(&q, Constraint::Free, &dvector![5.0, 5.0], MinimizeOptions::default()).unwrap();
        let exact = q.h.clone().lu().solve(&q.c).unwrap();
        assert_eq!(m.method, Method::Newton);
        assert!((m.point - exact).norm() < 1e-14);
    }

    #[test]
    fn ellipsoid_finds_kink() {
        // Minimizer: y_i = t_i where |t_i| <= 1, else sign(t_i).
        let k = Kinked { t: dvector![0.5, 3.0, -2.0] };
        let m = minimize(&k, Constraint::Free, &dvector![0.0, 0.0, 0.0], MinimizeOptions::default()).unwrap();
        assert_eq!(m.method, Method::Ellipsoid);
        assert!((&m.point - dvector![0.5, 1.0, -1.0]).norm() < 1e-8, "{} after {}", m.point, m.iterations);
    }

    #[test]
    fn bisection_in_one_dimension() {
        let k = Kinked { t: dvector![3.0] };
        let m = minimize(&k, Constraint::Free, &dvector![-10.0], MinimizeOptions::default()).unwrap();
        assert!((m.point[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn simplex_constraint() {
        // Linear cost on the 2-simplex: the reduced problem is one-dimensional.
        let q = Quad { h: DMatrix::identity(2, 2), c: dvector![1.0, 0.0] };
        let m = minimize(&q, Constraint::Simplex, &dvector![0.5, 0.5], MinimizeOptions::default()).unwrap();
        assert!((m.point[0] - 1.0).abs() < 1e-12 && m.point[1].abs() < 1e-12);
    }

    #[test]
    fn ball_constraint() {
        let k = Kinked { t: dvector![5.0, 0.0] };
        let m = minimize(&k, Constraint::Ball { radius: 1.0 }, &dvector![0.0, 0.0], MinimizeOptions::default()).unwrap();
        assert!((&m.point - dvector![1.0, 0.0]).norm() < 1e-9, "{}", m.point);
    }

    #[test]
    fn simplex_projection() {
        let p = Constraint::Simplex.project(&dvector![0.5, 0.5, 0.5]);
        assert!((p - dvector![1.0, 1.0, 1.0] / 3.0).norm() < 1e-15);
        let p = Constraint::Simplex.project(&dvector![2.0, 0.0]);
        assert_eq!(p, dvector![1.0, 0.0]);
    }

    #[test]
    fn golden_section_on_parabola() {
        let (x, _) = golden_section(|x| (x - 1.25).powi(2), -3.0, 4.0, 1e-12);
        assert!((x - 1.25).abs() < 1e-6);
    }
}
