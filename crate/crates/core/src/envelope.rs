//! The Bregman–Moreau envelope
//!
//! ```text
//! F_λ(x)      = inf_y { F(y) + (1/λ) D_Φ(y, x) }
//! prox_λF(x)  = argmin of the same problem
//! ∇F_λ(x)     = (1/λ) ∇²Φ(x) (x − prox_λF(x))
//! ```
//!
//! `D_Φ(prox_λF(x), x)` is the stationarity measure the solvers drive to
//! zero. The envelope value has two evaluation paths: the infimum at the prox
//! point, and the conjugate identity
//! `F_λ(x) = −(F + Φ/λ)*(∇Φ(x)/λ) − Φ(x)/λ + ⟨∇Φ(x), x⟩/λ`, whose conjugate is
//! evaluated by its own minimization.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::legendre::LegendreFunction;
use crate::minimize::{self, Constraint, MinimizeOptions, Objective};
use crate::subproblem::{self, Regularizer};
use crate::Point;

/// `F = f + r` with exact evaluation of `f`.
pub trait Composite: Sync {
    fn dim(&self) -> usize;
    fn f_value(&self, x: &Point) -> f64;
    fn f_subgradient(&self, x: &Point) -> Point;
    fn f_hessian(&self, _x: &Point) -> Option<DMatrix<f64>> {
        None
    }
    fn f_smooth(&self) -> bool {
        false
    }
    fn regularizer(&self) -> &Regularizer;
    /// `τ + ρ`: `F` is this weakly convex relative to `Φ`.
    fn weak_convexity(&self) -> f64 {
        0.0
    }
    /// Closed-form prox point when the structure allows one.
    fn exact_prox(&self, _phi: &LegendreFunction, _x: &Point, _lambda: f64) -> Option<Result<Point>> {
        None
    }

    fn value(&self, x: &Point) -> f64 {
        let r = self.regularizer().value(x);
        if r.is_finite() {
            self.f_value(x) + r
        } else {
            f64::INFINITY
        }
    }
}

/// A composite built from closures, mostly for tests and examples.
pub struct FnComposite<F, G> {
    pub dim: usize,
    pub f: F,
    pub grad: G,
    pub hessian: Option<fn(&Point) -> DMatrix<f64>>,
    pub regularizer: Regularizer,
    pub weak: f64,
}

impl<F, G> Composite for FnComposite<F, G>
where
    F: Fn(&Point) -> f64 + Sync,
    G: Fn(&Point) -> Point + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn f_value(&self, x: &Point) -> f64 {
        (self.f)(x)
    }
    fn f_subgradient(&self, x: &Point) -> Point {
        (self.grad)(x)
    }
    fn f_hessian(&self, x: &Point) -> Option<DMatrix<f64>> {
        self.hessian.map(|h| h(x))
    }
    fn f_smooth(&self) -> bool {
        self.hessian.is_some()
    }
    fn regularizer(&self) -> &Regularizer {
        &self.regularizer
    }
    fn weak_convexity(&self) -> f64 {
        self.weak
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopePath {
    Direct,
    Conjugate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnvelopeOptions {
    /// Relative tolerance on the three-point certificate.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        EnvelopeOptions { tol: 1e-8, max_iter: 200_000 }
    }
}

/// `F(y) + (1/λ)(Φ(y) − ⟨s, y⟩)`; with `s = ∇Φ(x)` it equals the prox
/// objective up to a constant, and its infimum is `−(F + Φ/λ)*(s/λ)`.
struct EnvelopeObjective<'a> {
    problem: &'a dyn Composite,
    phi: &'a LegendreFunction,
    s: Point,
    lambda: f64,
    /// Subtract `Φ(x) + ⟨s, y − x⟩` so the value is `F(y) + D(y, x)/λ`.
    center: Option<&'a Point>,
}

impl EnvelopeObjective<'_> {
    fn shift(&self, y: &Point) -> f64 {
        match self.center {
            Some(x) => self.phi.value(x) + self.s.dot(&(y - x)),
            None => self.s.dot(y),
        }
    }
}

impl Objective for EnvelopeObjective<'_> {
    fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn value(&self, y: &Point) -> f64 {
        let p = self.problem.regularizer().penalty_value(y);
        let phi = self.phi.value(y);
        if !p.is_finite() || !phi.is_finite() {
            return f64::INFINITY;
        }
        // D(y, x) is formed in one place so both paths share no arithmetic.
        let tail = match self.center {
            Some(x) => match self.phi.bregman(y, x) {
                Ok(d) => d,
                Err(_) => return f64::INFINITY,
            },
            None => phi - self.shift(y),
        };
        self.problem.f_value(y) + p + tail / self.lambda
    }

    fn subgradient(&self, y: &Point) -> Point {
        let r = self.problem.regularizer();
        let pen = r.penalty_subgradient(y).unwrap_or_else(|_| Point::zeros(y.len()));
        let gphi = self.phi.gradient(y).unwrap_or_else(|_| Point::zeros(y.len()));
        self.problem.f_subgradient(y) + pen + (gphi - &self.s) / self.lambda
    }

    fn hessian(&self, y: &Point) -> Option<DMatrix<f64>> {
        let h = self.problem.f_hessian(y)?;
        let hp = self.problem.regularizer().penalty_hessian(y)?;
        Some(h + hp + self.phi.hessian(y).ok()? / self.lambda)
    }

    fn smooth(&self) -> bool {
        self.problem.f_smooth() && self.problem.regularizer().penalty_smooth()
    }
}

fn check_lambda(problem: &dyn Composite, phi: &LegendreFunction, x: &Point, lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!("λ must be positive, got {lambda}")));
    }
    if lambda * problem.weak_convexity() >= 1.0 {
        return Err(Error::InvalidConfig(format!("λ (τ + ρ) = {} must be below 1", lambda * problem.weak_convexity())));
    }
    if !phi.is_interior(x) {
        return Err(Error::DomainViolation(format!("{x:?} is not interior to dom Φ")));
    }
    Ok(())
}

fn solve(obj: &EnvelopeObjective, phi: &LegendreFunction, x: &Point, opts: &EnvelopeOptions) -> Result<minimize::Minimum> {
    let constraint = obj.problem.regularizer().constraint;
    let start = if obj.problem.regularizer().value(x).is_finite() { x.clone() } else { constraint.project(x) };
    let start = if phi.is_interior(&start) { start } else { start.map(|v| v.max(1e-3)) };
    let mopts = MinimizeOptions { max_iter: opts.max_iter, positive: phi.is_orthant_domain(), ..Default::default() };
    minimize::minimize(obj, constraint, &start, mopts)
}

/// `prox_λF(x)` with `Φ` as the distance, certified by the three-point inequality.
pub fn bregman_prox_point(problem: &dyn Composite, phi: &LegendreFunction, x: &Point, lambda: f64, opts: &EnvelopeOptions) -> Result<Point> {
    check_lambda(problem, phi, x, lambda)?;
    let (xhat, iterations) = match problem.exact_prox(phi, x, lambda) {
        Some(p) => (p?, 0),
        None => {
            let obj = EnvelopeObjective { problem, phi, s: phi.gradient(x)?, lambda, center: Some(x) };
            let m = solve(&obj, phi, x, opts)?;
            (m.point, m.iterations)
        }
    };
    let g = |y: &Point| lambda * problem.value(y);
    let probes = subproblem::certificate_probes(problem.regularizer(), phi, x, &xhat);
    let report = subproblem::check_three_point(g, phi, x, &xhat, &probes, lambda * problem.weak_convexity())?;
    if !report.passes(opts.tol) {
        return Err(Error::InnerSolver { iterations, residual: report.min_residual });
    }
    Ok(xhat)
}

pub fn envelope_value(
    problem: &dyn Composite,
    phi: &LegendreFunction,
    x: &Point,
    lambda: f64,
    path: EnvelopePath,
    opts: &EnvelopeOptions,
) -> Result<f64> {
    match path {
        EnvelopePath::Direct => {
            let xhat = bregman_prox_point(problem, phi, x, lambda, opts)?;
            Ok(problem.value(&xhat) + phi.bregman(&xhat, x)? / lambda)
        }
        EnvelopePath::Conjugate => {
            check_lambda(problem, phi, x, lambda)?;
            let s = phi.gradient(x)?;
            let obj = EnvelopeObjective { problem, phi, s: s.clone(), lambda, center: None };
            let m = solve(&obj, phi, x, opts)?;
            // m.value = −(F + Φ/λ)*(s/λ)
            Ok(m.value - phi.value(x) / lambda + s.dot(x) / lambda)
        }
    }
}

/// `(1/λ) ∇²Φ(x) (x − x̂)` given the prox point `x̂`.
pub fn envelope_gradient_at(phi: &LegendreFunction, x: &Point, xhat: &Point, lambda: f64) -> Result<Point> {
    Ok(phi.hessian_apply(x, &(x - xhat))? / lambda)
}

pub fn envelope_gradient(problem: &dyn Composite, phi: &LegendreFunction, x: &Point, lambda: f64, opts: &EnvelopeOptions) -> Result<Point> {
    let xhat = bregman_prox_point(problem, phi, x, lambda, opts)?;
    envelope_gradient_at(phi, x, &xhat, lambda)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnvelopeReport {
    #[serde(with = "crate::decimal::point")]
    pub prox_point: Point,
    /// `D_Φ(x̂, x)`
    pub divergence: f64,
    pub envelope_value_direct: f64,
    pub envelope_value_conjugate: f64,
    #[serde(with = "crate::decimal::point")]
    pub envelope_gradient: Point,
    pub local_dual_norm_of_gradient: f64,
    /// `√D − (λ/√2) ‖∇F_λ‖*_x`; absent when `Φ` is not known to be 1-strongly convex here.
    pub lower_bound_check: Option<f64>,
}

/// Whether the declared modulus makes `Φ` 1-strongly convex on the feasible set.
fn one_strongly_convex(phi: &LegendreFunction, r: &Regularizer) -> bool {
    let Some(sc) = phi.strong_convexity() else {
        return false;
    };
    // The entropy bound (Pinsker) needs both points on the simplex.
    if phi.entropy_scale().is_some() && r.constraint != Constraint::Simplex {
        return false;
    }
    sc.modulus >= 1.0
}

/// All stationarity diagnostics at `x`.
pub fn stationarity(problem: &dyn Composite, phi: &LegendreFunction, x: &Point, lambda: f64, opts: &EnvelopeOptions) -> Result<EnvelopeReport> {
    let xhat = bregman_prox_point(problem, phi, x, lambda, opts)?;
    let divergence = phi.bregman(&xhat, x)?;
    let direct = problem.value(&xhat) + divergence / lambda;
    let conjugate = envelope_value(problem, phi, x, lambda, EnvelopePath::Conjugate, opts)?;
    let gradient = envelope_gradient_at(phi, x, &xhat, lambda)?;
    let local = phi.local_dual_norm(x, &gradient)?;
    let lower_bound_check =
        one_strongly_convex(phi, problem.regularizer()).then(|| divergence.sqrt() - lambda / std::f64::consts::SQRT_2 * local);
    Ok(EnvelopeReport {
        prox_point: xhat,
        divergence,
        envelope_value_direct: direct,
        envelope_value_conjugate: conjugate,
        envelope_gradient: gradient,
        local_dual_norm_of_gradient: local,
        lower_bound_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre::build_poly_legendre;
    use crate::minimize::golden_section;
    use crate::numdiff;
    use nalgebra::dvector;

    fn half_norm() -> impl Composite {
        FnComposite {
            dim: 2,
            f: |x: &Point| 0.5 * x.norm_squared(),
            grad: |x: &Point| x.clone(),
            hessian: Some(|x: &Point| DMatrix::identity(x.len(), x.len())),
            regularizer: Regularizer::zero(),
            weak: 0.0,
        }
    }

    #[test]
    fn half_norm_examples() {
        let p = half_norm();
        let phi = LegendreFunction::euclidean();
        let x = dvector![2.0, 0.0];
        let o = EnvelopeOptions::default();
        let xhat = bregman_prox_point(&p, &phi, &x, 1.0, &o).unwrap();
        assert!((&xhat - &x / 2.0).norm() < 1e-14);
        let v = envelope_value(&p, &phi, &x, 1.0, EnvelopePath::Direct, &o).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        let c = envelope_value(&p, &phi, &x, 1.0, EnvelopePath::Conjugate, &o).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        let g = envelope_gradient(&p, &phi, &x, 1.0, &o).unwrap();
        assert!((g - dvector![1.0, 0.0]).norm() < 1e-14);
        let rep = stationarity(&p, &phi, &x, 1.0, &o).unwrap();
        assert!((rep.divergence - 0.5).abs() < 1e-14);
        assert!(rep.lower_bound_check.unwrap().abs() < 1e-12);
        let at_min = stationarity(&p, &phi, &Point::zeros(2), 1.0, &o).unwrap();
        assert!(at_min.divergence < 1e-28 && at_min.envelope_gradient.norm() < 1e-14);
    }

    #[test]
    fn constant_function_envelope() {
        let p = FnComposite {
            dim: 2,
            f: |_: &Point| 3.0,
            grad: |x: &Point| Point::zeros(x.len()),
            hessian: Some(|x: &Point| DMatrix::zeros(x.len(), x.len())),
            regularizer: Regularizer::zero(),
            weak: 0.0,
        };
        let phi = build_poly_legendre(&[1.0, 1.0]).unwrap();
        let o = EnvelopeOptions::default();
        for x in [dvector![0.3, -1.0], dvector![2.0, 2.0]] {
            for path in [EnvelopePath::Direct, EnvelopePath::Conjugate] {
                assert!((envelope_value(&p, &phi, &x, 0.7, path, &o).unwrap() - 3.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn piecewise_prox_matches_golden_section() {
        let p = FnComposite {
            dim: 1,
            f: |x: &Point| (x[0] - 1.0).abs() + 0.5 * (x[0] + 1.0).abs(),
            grad: |x: &Point| dvector![(x[0] - 1.0).signum() + 0.5 * (x[0] + 1.0).signum()],
            hessian: None,
            regularizer: Regularizer::zero(),
            weak: 0.0,
        };
        let phi = build_poly_legendre(&[1.0, 0.0, 1.0]).unwrap();
        let o = EnvelopeOptions::default();
        for (x0, lambda) in [(3.0, 0.2), (-2.0, 1.0), (0.5, 0.05)] {
            let x = dvector![x0];
            let xhat = bregman_prox_point(&p, &phi, &x, lambda, &o).unwrap();
            let (t, _) = golden_section(|t| (p.f)(&dvector![t]) + phi.bregman(&dvector![t], &x).unwrap() / lambda, -5.0, 5.0, 1e-15);
            assert!((xhat[0] - t).abs() < 1e-8, "{} vs {t}", xhat[0]);
        }
    }

    #[test]
    fn gradient_formula_matches_finite_differences() {
        let p = FnComposite {
            dim: 2,
            f: |x: &Point| (x[0] * x[0] + x[1] - 1.0).powi(2) + 0.5 * x[1] * x[1],
            grad: |x: &Point| {
                let e = x[0] * x[0] + x[1] - 1.0;
                dvector![4.0 * e * x[0], 2.0 * e + x[1]]
            },
            hessian: Some(|x: &Point| {
                let e = x[0] * x[0] + x[1] - 1.0;
                DMatrix::from_row_slice(2, 2, &[8.0 * x[0] * x[0] + 4.0 * e, 4.0 * x[0], 4.0 * x[0], 3.0])
            }),
            regularizer: Regularizer::zero(),
            weak: 0.0,
        };
        let phi = build_poly_legendre(&[1.0, 0.0, 2.0]).unwrap();
        let o = EnvelopeOptions::default();
        let x = dvector![0.7, -0.4];
        let lambda = 0.05;
        let g = envelope_gradient(&p, &phi, &x, lambda, &o).unwrap();
        let fd = numdiff::gradient(|y| envelope_value(&p, &phi, y, lambda, EnvelopePath::Direct, &o).unwrap(), &x);
        assert!((&g - &fd).norm() <= 1e-5 * g.norm().max(1e-8), "{g} vs {fd}");
    }

    #[test]
    fn envelope_is_a_minorant_and_monotone_in_lambda() {
        let p = half_norm();
        let phi = LegendreFunction::euclidean();
        let o = EnvelopeOptions::default();
        let x = dvector![1.5, -0.5];
        let mut prev = p.value(&x);
        for lambda in [0.1, 0.5, 1.0, 2.0, 10.0] {
            let v = envelope_value(&p, &phi, &x, lambda, EnvelopePath::Direct, &o).unwrap();
            assert!(v <= prev + 1e-14);
            prev = v;
        }
    }

    #[test]
    fn rejects_large_lambda() {
        let p = FnComposite {
            dim: 2,
            f: |x: &Point| -x.norm_squared(),
            grad: |x: &Point| -x * 2.0,
            hessian: None,
            regularizer: Regularizer::zero(),
            weak: 2.0,
        };
        let r = bregman_prox_point(&p, &LegendreFunction::euclidean(), &dvector![1.0, 0.0], 0.5, &EnvelopeOptions::default());
        assert!(matches!(r, Err(Error::InvalidConfig(_))));
    }
}
