//! The Bregman proximal subproblem
//!
//! ```text
//! x⁺ = argmin_x { f_z(x, ξ) + r(x) + (1/η) D_Φ(x, z) }
//! ```
//!
//! solved in closed form when the model, regularizer and `Φ` fit a known
//! pattern, and otherwise by [`inner_solve`], whose answer must pass the
//! three-point inequality on a probe set before it is returned.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::decimal;
use crate::error::{Error, Result};
use crate::legendre::LegendreFunction;
use crate::minimize::{self, Constraint, MinimizeOptions, Objective};
use crate::models::LocalModel;
use crate::roots;
use crate::Point;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Penalty {
    Zero,
    /// `w ‖x‖₁`
    L1 {
        #[serde(with = "decimal::scalar")]
        weight: f64,
    },
    /// `(w/2) ‖x‖²`
    Quadratic {
        #[serde(with = "decimal::scalar")]
        weight: f64,
    },
    /// `w Ψ(x)` for a Legendre function `Ψ`
    ScaledLegendre {
        #[serde(with = "decimal::scalar")]
        weight: f64,
        phi: LegendreFunction,
    },
}

/// `r = ι_C + penalty`: an indicator of a closed convex set plus a convex penalty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regularizer {
    pub constraint: Constraint,
    pub penalty: Penalty,
}

impl Default for Regularizer {
    fn default() -> Self {
        Regularizer::zero()
    }
}

impl Regularizer {
    pub fn zero() -> Self {
        Regularizer { constraint: Constraint::Free, penalty: Penalty::Zero }
    }

    pub fn simplex() -> Self {
        Regularizer { constraint: Constraint::Simplex, penalty: Penalty::Zero }
    }

    pub fn ball(radius: f64) -> Self {
        Regularizer { constraint: Constraint::Ball { radius }, penalty: Penalty::Zero }
    }

    pub fn with_penalty(mut self, penalty: Penalty) -> Self {
        self.penalty = penalty;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.constraint == Constraint::Free && self.penalty == Penalty::Zero
    }

    /// Membership tolerance used for the indicator.
    const FEAS_TOL: f64 = 1e-9;

    pub fn penalty_value(&self, x: &Point) -> f64 {
        match &self.penalty {
            Penalty::Zero => 0.0,
            Penalty::L1 { weight } => weight * x.iter().map(|v| v.abs()).sum::<f64>(),
            Penalty::Quadratic { weight } => 0.5 * weight * x.norm_squared(),
            Penalty::ScaledLegendre { weight, phi } => {
                if *weight == 0.0 {
                    0.0
                } else {
                    weight * phi.value(x)
                }
            }
        }
    }

    /// `r(x)`, `+∞` outside the constraint set.
    pub fn value(&self, x: &Point) -> f64 {
        if !self.constraint.contains(x, Self::FEAS_TOL) {
            return f64::INFINITY;
        }
        self.penalty_value(x)
    }

    pub fn penalty_subgradient(&self, x: &Point) -> Result<Point> {
        Ok(match &self.penalty {
            Penalty::Zero => Point::zeros(x.len()),
            Penalty::L1 { weight } => x.map(|v| if v > 0.0 { *weight } else if v < 0.0 { -*weight } else { 0.0 }),
            Penalty::Quadratic { weight } => x * *weight,
            Penalty::ScaledLegendre { weight, phi } => phi.gradient(x)? * *weight,
        })
    }

    pub fn penalty_hessian(&self, x: &Point) -> Option<DMatrix<f64>> {
        let d = x.len();
        match &self.penalty {
            Penalty::Zero => Some(DMatrix::zeros(d, d)),
            Penalty::L1 { .. } => None,
            Penalty::Quadratic { weight } => Some(DMatrix::identity(d, d) * *weight),
            Penalty::ScaledLegendre { weight, phi } => phi.hessian(x).ok().map(|h| h * *weight),
        }
    }

    pub fn penalty_smooth(&self) -> bool {
        !matches!(self.penalty, Penalty::L1 { weight } if weight > 0.0)
    }

    /// `μ` such that `r − μΦ` is convex, from the structure of the penalty.
    pub fn mu_relative(&self, phi: &LegendreFunction) -> f64 {
        match &self.penalty {
            Penalty::ScaledLegendre { weight, phi: own } if own == phi => *weight,
            Penalty::ScaledLegendre { weight, phi: own } => match (own.entropy_scale(), phi.entropy_scale()) {
                (Some(a), Some(b)) => weight * a / b,
                _ => match (own.quadratic_coefficient(), phi.quadratic_coefficient()) {
                    (Some(a), Some(b)) => weight * a / b,
                    _ => 0.0,
                },
            },
            Penalty::Quadratic { weight } => phi.quadratic_coefficient().map_or(0.0, |c| weight / (2.0 * c)),
            _ => 0.0,
        }
    }

    /// `inf r` over its domain in dimension `d`.
    pub fn infimum(&self, d: usize) -> Result<f64> {
        let df = d as f64;
        match (&self.constraint, &self.penalty) {
            (_, Penalty::Zero) => Ok(0.0),
            (Constraint::Simplex, Penalty::L1 { weight }) => Ok(*weight),
            (Constraint::Simplex, Penalty::Quadratic { weight }) => Ok(0.5 * weight / df),
            (_, Penalty::L1 { .. } | Penalty::Quadratic { .. }) => Ok(0.0),
            (Constraint::Simplex, Penalty::ScaledLegendre { weight, phi }) if phi.entropy_scale().is_some() => {
                Ok(-weight * phi.entropy_scale().unwrap_or(1.0) * df.ln())
            }
            (constraint, Penalty::ScaledLegendre { weight, phi }) => {
                if *weight == 0.0 {
                    return Ok(0.0);
                }
                // Generic case: minimize Ψ numerically over the constraint set.
                struct Pen<'a>(&'a LegendreFunction, usize);
                impl Objective for Pen<'_> {
                    fn dim(&self) -> usize {
                        self.1
                    }
                    fn value(&self, y: &Point) -> f64 {
                        self.0.value(y)
                    }
                    fn subgradient(&self, y: &Point) -> Point {
                        self.0.gradient(y).unwrap_or_else(|_| Point::zeros(y.len()))
                    }
                    fn hessian(&self, y: &Point) -> Option<DMatrix<f64>> {
                        self.0.hessian(y).ok()
                    }
                    fn smooth(&self) -> bool {
                        true
                    }
                }
                let start = match constraint {
                    Constraint::Simplex => Point::from_element(d, 1.0 / df),
                    _ if phi.is_orthant_domain() => Point::from_element(d, 0.5),
                    _ => Point::zeros(d),
                };
                let opts = MinimizeOptions { positive: phi.is_orthant_domain(), ..Default::default() };
                let m = minimize::minimize(&Pen(phi, d), *constraint, &start, opts)?;
                Ok(weight * m.value)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepMethod {
    Identity,
    GradientStep,
    MirrorStep,
    EntropySimplex,
    SoftThreshold,
    Radial,
    Multiplier,
    Inner,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProxStepResult {
    pub minimizer: Point,
    pub inner_iterations: usize,
    /// Three-point residual on the certificate probes (`+∞` when no probe was run).
    pub three_point_residual: f64,
    /// `Ψ(z) − Ψ(x⁺)` for the subproblem objective `Ψ`.
    pub objective_decrease: f64,
    pub method: StepMethod,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProxOptions {
    /// Tolerance of the inner solver on the three-point residual scale.
    pub inner_tol: f64,
    pub max_iter: usize,
}

impl Default for ProxOptions {
    fn default() -> Self {
        ProxOptions { inner_tol: 1e-10, max_iter: 200_000 }
    }
}

/// Weighted sum `Φ + w Ψ` used to absorb smooth penalties into the mirror map.
fn augmented(phi: &LegendreFunction, penalty: &Penalty, eta: f64) -> Option<LegendreFunction> {
    match penalty {
        Penalty::Zero => Some(phi.clone()),
        Penalty::Quadratic { weight } if *weight == 0.0 => Some(phi.clone()),
        Penalty::Quadratic { weight } => {
            LegendreFunction::weighted_sum(vec![phi.clone(), LegendreFunction::euclidean()], vec![1.0, eta * weight]).ok()
        }
        Penalty::ScaledLegendre { weight, .. } if *weight == 0.0 => Some(phi.clone()),
        Penalty::ScaledLegendre { weight, phi: own } => {
            LegendreFunction::weighted_sum(vec![phi.clone(), own.clone()], vec![1.0, eta * weight]).ok()
        }
        Penalty::L1 { .. } => None,
    }
    .filter(|p| p.has_mirror_inverse())
}

/// Subproblem value `g(y) + D_Φ(y, z)` with `g = η (model + r)`.
fn scaled_objective<'a>(model: &'a LocalModel, r: &'a Regularizer, phi: &'a LegendreFunction, z: &Point, eta: f64) -> impl Fn(&Point) -> f64 + 'a {
    let z = z.clone();
    move |y: &Point| {
        let g = eta * (model.value(y) + r.value(y));
        if !g.is_finite() {
            return f64::INFINITY;
        }
        match phi.bregman(y, &z) {
            Ok(d) => g + d,
            Err(_) => f64::INFINITY,
        }
    }
}

/// One Bregman proximal step.
///
/// Requires `η ρ < 1` and `z` interior to `dom Φ`. The closed forms are tried
/// in order; anything else goes to [`inner_solve`].
pub fn prox_step(
    model: &LocalModel,
    r: &Regularizer,
    phi: &LegendreFunction,
    z: &Point,
    eta: f64,
    rho: f64,
    opts: &ProxOptions,
) -> Result<ProxStepResult> {
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::InvalidConfig(format!("step size must be positive, got {eta}")));
    }
    if eta * rho >= 1.0 {
        return Err(Error::InvalidConfig(format!("η ρ = {} must be below 1", eta * rho)));
    }
    if !phi.is_interior(z) {
        return Err(Error::DomainViolation(format!("center {z:?} is not interior to dom Φ")));
    }
    let done = |x: Point, method: StepMethod, iters: usize| -> ProxStepResult {
        let psi = scaled_objective(model, r, phi, z, eta);
        let decrease = psi(z) - psi(&x);
        ProxStepResult { minimizer: x, inner_iterations: iters, three_point_residual: f64::INFINITY, objective_decrease: decrease, method }
    };
    if eta < 1e-14 {
        return Ok(done(z.clone(), StepMethod::Identity, 0));
    }

    match model {
        LocalModel::Affine { slope: v, .. } => {
            let free = r.constraint == Constraint::Free;
            if free && r.penalty == Penalty::Zero {
                if let Some(c) = phi.quadratic_coefficient() {
                    let x = if c == 0.5 { z - v * eta } else { z - v * (eta / (2.0 * c)) };
                    return Ok(done(x, StepMethod::GradientStep, 0));
                }
            }
            if free {
                if let Some(psi) = augmented(phi, &r.penalty, eta) {
                    let x = psi.gradient_inverse(&(phi.gradient(z)? - v * eta))?;
                    return Ok(done(x, StepMethod::MirrorStep, 0));
                }
                if let (Penalty::L1 { weight }, Some(c)) = (&r.penalty, phi.quadratic_coefficient()) {
                    let k = eta / (2.0 * c);
                    let t = weight * k;
                    let x = (z - v * k).map(|u| u.signum() * (u.abs() - t).max(0.0));
                    return Ok(done(x, StepMethod::SoftThreshold, 0));
                }
            }
            if r.constraint == Constraint::Simplex {
                if let Some(e) = phi.entropy_scale() {
                    let extra = match &r.penalty {
                        Penalty::Zero => Some(0.0),
                        Penalty::ScaledLegendre { weight, phi: own } => own.entropy_scale().map(|s| weight * s),
                        _ => None,
                    };
                    if let Some(m) = extra {
                        return Ok(done(entropy_simplex_step(z, v, eta, e, m), StepMethod::EntropySimplex, 0));
                    }
                }
            }
            if let (Constraint::Ball { radius }, Penalty::Zero) = (&r.constraint, &r.penalty) {
                if phi.radial_terms().is_some() {
                    let mut res = prox_step_radial(v, Some(*radius), phi, z, eta)?;
                    res.objective_decrease = scaled_objective(model, r, phi, z, eta)(z) - scaled_objective(model, r, phi, z, eta)(&res.minimizer);
                    return Ok(res);
                }
            }
        }
        LocalModel::AbsAffine { base, weight, offset, slope } => {
            if r.constraint == Constraint::Free {
                if let Some(psi) = augmented(phi, &r.penalty, eta) {
                    let (x, iters) = multiplier_step(&psi, &phi.gradient(z)?, base, *weight, *offset, slope, eta)?;
                    return Ok(done(x, StepMethod::Multiplier, iters));
                }
            }
        }
    }
    inner_solve(model, r, phi, z, eta, rho, opts)
}

/// Entropic step on the simplex: `log x⁺ = (log z − η v / e) / (1 + η μ / e) + const`,
/// for `Φ = e Σ x log x` and `r = ι_Δ + μ Σ x log x`.
fn entropy_simplex_step(z: &Point, v: &Point, eta: f64, e: f64, mu_scaled: f64) -> Point {
    let denom = 1.0 + eta * mu_scaled / e;
    let logits = Point::from_fn(z.len(), |i, _| (z[i].ln() - eta * v[i] / e) / denom);
    let m = logits.max();
    let w = logits.map(|l| (l - m).exp());
    let s = w.sum();
    // Underflow would leave the interior; the true minimizer is positive.
    w.map(|x| (x / s).max(f64::MIN_POSITIVE))
}

/// `min_y w|offset + ⟨s, y − base⟩| + (1/η) D_Ψ(y, z)` via the multiplier `θ ∈ [−1, 1]`:
/// `∇Ψ(y(θ)) = ∇Φ(z) − η w θ s`, with `θ` chosen so that `θ ∈ sign(ℓ(y(θ)))`.
fn multiplier_step(
    psi: &LegendreFunction,
    grad_z: &Point,
    base: &Point,
    weight: f64,
    offset: f64,
    slope: &Point,
    eta: f64,
) -> Result<(Point, usize)> {
    let y_of = |theta: f64| psi.gradient_inverse(&(grad_z - slope * (eta * weight * theta)));
    let ell = |y: &Point| offset + slope.dot(&(y - base));
    if weight == 0.0 || slope.iter().all(|&c| c == 0.0) {
        return Ok((y_of(0.0)?, 0));
    }
    let y_hi = y_of(1.0)?;
    if ell(&y_hi) >= 0.0 {
        return Ok((y_hi, 1));
    }
    let y_lo = y_of(-1.0)?;
    if ell(&y_lo) <= 0.0 {
        return Ok((y_lo, 2));
    }
    // ℓ(y(θ)) is nonincreasing in θ; find its zero.
    let mut err = None;
    let root = roots::bisect_decreasing(
        |theta| match y_of(theta) {
            Ok(y) => ell(&y),
            Err(e) => {
                err = Some(e);
                0.0
            }
        },
        -1.0,
        1.0,
        200,
    );
    if let Some(e) = err {
        return Err(e);
    }
    Ok((y_of(root.x)?, root.iterations + 2))
}

/// Mirror step for a radial `Φ` and an affine model `⟨v, ·⟩`, optionally on a ball.
///
/// Writes `x⁺ = s u` with `u` the direction of `∇Φ(z) − ηv` and solves the
/// increasing scalar equation `Σ c_k k s^{k−1} = ‖∇Φ(z) − ηv‖`. On a ball
/// the radial objective is monotone beyond its root, so clipping `s` is exact.
pub fn prox_step_radial(v: &Point, radius: Option<f64>, phi: &LegendreFunction, z: &Point, eta: f64) -> Result<ProxStepResult> {
    if phi.radial_terms().is_none() {
        return Err(Error::NoPreimage("radial step needs a radial Legendre function".into()));
    }
    let inside = radius.is_none_or(|r| z.norm() <= r);
    let result = |x: Point, iters: usize| ProxStepResult {
        minimizer: x,
        inner_iterations: iters,
        three_point_residual: f64::INFINITY,
        objective_decrease: f64::NAN,
        method: StepMethod::Radial,
    };
    if v.iter().all(|&c| c == 0.0) && inside {
        return Ok(result(z.clone(), 0));
    }
    let target = phi.gradient(z)? - v * eta;
    let g = target.norm();
    if g == 0.0 {
        return Ok(result(Point::zeros(z.len()), 0));
    }
    let root = phi.radial_root(g)?;
    let s = match radius {
        Some(r) => root.x.min(r),
        None => root.x,
    };
    Ok(result(target * (s / g), root.iterations))
}

struct SubproblemObjective<'a> {
    model: &'a LocalModel,
    r: &'a Regularizer,
    phi: &'a LegendreFunction,
    z: Point,
    grad_z: Point,
    eta: f64,
}

impl Objective for SubproblemObjective<'_> {
    fn dim(&self) -> usize {
        self.z.len()
    }

    fn value(&self, y: &Point) -> f64 {
        let p = self.r.penalty_value(y);
        if !p.is_finite() {
            return f64::INFINITY;
        }
        match self.phi.bregman(y, &self.z) {
            Ok(d) => self.eta * (self.model.value(y) + p) + d,
            Err(_) => f64::INFINITY,
        }
    }

    fn subgradient(&self, y: &Point) -> Point {
        let pen = self.r.penalty_subgradient(y).unwrap_or_else(|_| Point::zeros(y.len()));
        let gphi = self.phi.gradient(y).unwrap_or_else(|_| Point::zeros(y.len()));
        (self.model.subgradient(y) + pen) * self.eta + gphi - &self.grad_z
    }

    fn hessian(&self, y: &Point) -> Option<DMatrix<f64>> {
        let hp = self.phi.hessian(y).ok()?;
        Some(hp + self.r.penalty_hessian(y)? * self.eta)
    }

    fn smooth(&self) -> bool {
        matches!(self.model, LocalModel::Affine { .. }) && self.r.penalty_smooth()
    }
}

/// Deterministic probes for the inner-solver certificate: the center, points
/// between the center and the answer, and small coordinate perturbations.
pub(crate) fn certificate_probes(r: &Regularizer, phi: &LegendreFunction, z: &Point, zp: &Point) -> Vec<Point> {
    let mut probes = vec![z.clone()];
    for t in [0.25, 0.5, 0.75, 1.5] {
        probes.push(zp + (z - zp) * t);
    }
    let h = 1e-3 * (1.0 + zp.norm());
    for i in 0..zp.len() {
        for sign in [-1.0, 1.0] {
            let mut p = zp.clone();
            p[i] += sign * h;
            if r.constraint == Constraint::Simplex {
                let last = (i + 1) % zp.len();
                p[last] -= sign * h;
            }
            probes.push(p);
        }
    }
    probes.retain(|p| r.value(p).is_finite() && phi.in_domain(p));
    probes
}

/// Certified iterative solve of the subproblem.
///
/// The answer must satisfy the three-point inequality on a deterministic probe
/// set to within `tol (1 + |Ψ(z)|)`; otherwise an inner-solver error is returned.
pub fn inner_solve(
    model: &LocalModel,
    r: &Regularizer,
    phi: &LegendreFunction,
    z: &Point,
    eta: f64,
    rho: f64,
    opts: &ProxOptions,
) -> Result<ProxStepResult> {
    if !phi.is_interior(z) {
        return Err(Error::DomainViolation(format!("center {z:?} is not interior to dom Φ")));
    }
    let obj = SubproblemObjective { model, r, phi, z: z.clone(), grad_z: phi.gradient(z)?, eta };
    let start = if r.value(z).is_finite() { z.clone() } else { r.constraint.project(z) };
    let start = if phi.is_interior(&start) { start } else { start.map(|v| v.max(1e-3)) };
    let mopts = MinimizeOptions { max_iter: opts.max_iter, positive: phi.is_orthant_domain(), ..Default::default() };
    let m = minimize::minimize(&obj, r.constraint, &start, mopts)?;
    let zp = m.point;
    let psi = scaled_objective(model, r, phi, z, eta);
    let psi_z = psi(z);
    let g = |y: &Point| eta * (model.value(y) + r.value(y));
    let probes = certificate_probes(r, phi, z, &zp);
    let report = check_three_point(g, phi, z, &zp, &probes, eta * rho)?;
    let limit = -opts.inner_tol * (1.0 + psi_z.abs());
    if report.min_residual < limit {
        return Err(Error::InnerSolver { iterations: m.iterations, residual: report.min_residual });
    }
    Ok(ProxStepResult {
        objective_decrease: psi_z - psi(&zp),
        minimizer: zp,
        inner_iterations: m.iterations,
        three_point_residual: report.min_residual,
        method: StepMethod::Inner,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThreePointReport {
    /// `min_x [g(x) + D(x, z)] − [g(z⁺) + D(z⁺, z) + (1 − ηρ) D(x, z⁺)]`
    pub min_residual: f64,
    /// Largest magnitude of the compared quantities, for relative tolerances.
    pub scale: f64,
    pub probes: usize,
}

impl ThreePointReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.min_residual >= -tol * (1.0 + self.scale)
    }
}

/// Evaluates the three-point inequality at each probe.
///
/// `weak` is `ηρ`; it is zero for convex `g`. Probes outside the domain of `g`
/// are skipped. With no usable probe the residual is `+∞`.
pub fn check_three_point<G: Fn(&Point) -> f64>(
    g: G,
    phi: &LegendreFunction,
    z: &Point,
    z_plus: &Point,
    probes: &[Point],
    weak: f64,
) -> Result<ThreePointReport> {
    let gp = g(z_plus);
    if !gp.is_finite() {
        return Err(Error::DomainViolation("z⁺ is outside dom g".into()));
    }
    let base = gp + phi.bregman(z_plus, z)?;
    let mut min_residual = f64::INFINITY;
    let mut scale = base.abs();
    let mut used = 0;
    for x in probes {
        let gx = g(x);
        if !gx.is_finite() || !phi.in_domain(x) {
            continue;
        }
        let lhs = gx + phi.bregman(x, z)?;
        let rhs = base + (1.0 - weak) * phi.bregman(x, z_plus)?;
        min_residual = min_residual.min(lhs - rhs);
        scale = scale.max(lhs.abs()).max(rhs.abs());
        used += 1;
    }
    Ok(ThreePointReport { min_residual, scale, probes: used })
}

/// Random probes in `dom Φ ∩ dom r` scattered around `center`.
pub fn random_probes<R: Rng + ?Sized>(r: &Regularizer, phi: &LegendreFunction, center: &Point, n: usize, rng: &mut R) -> Vec<Point> {
    let d = center.len();
    let spread = 1.0 + center.norm();
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n && attempts < 50 * n {
        attempts += 1;
        let noise = Point::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let p = match r.constraint {
            Constraint::Simplex => {
                let w = Point::from_fn(d, |i, _| center[i].max(1e-300).ln() + noise[i]);
                let m = w.max();
                let e = w.map(|v| (v - m).exp());
                &e / e.sum()
            }
            _ if phi.is_orthant_domain() => Point::from_fn(d, |i, _| center[i].max(1e-12) * noise[i].exp()),
            Constraint::Ball { .. } => r.constraint.project(&(center + &noise * spread)),
            Constraint::Free => center + &noise * spread,
        };
        if r.value(&p).is_finite() && phi.in_domain(&p) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre::build_poly_legendre;
    use crate::minimize::golden_section;
    use nalgebra::dvector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn affine(base: Point, v: Point) -> LocalModel {
        LocalModel::Affine { value: 0.0, base, slope: v }
    }

    fn opts() -> ProxOptions {
        ProxOptions::default()
    }

    #[test]
    fn euclidean_gradient_step() {
        let z = dvector![1.0, -2.0];
        let v = dvector![0.5, 0.25];
        let r = prox_step(&affine(z.clone(), v.clone()), &Regularizer::zero(), &LegendreFunction::euclidean(), &z, 0.1, 0.0, &opts()).unwrap();
        assert_eq!(r.minimizer, &z - &v * 0.1);
        assert_eq!(r.method, StepMethod::GradientStep);
    }

    #[test]
    fn poly_quadratic_step() {
        let z = dvector![1.0, 1.0];
        let v = dvector![7.0, 0.0];
        let phi = build_poly_legendre(&[1.0]).unwrap();
        let r = prox_step(&affine(z.clone(), v.clone()), &Regularizer::zero(), &phi, &z, 0.5, 0.0, &opts()).unwrap();
        assert!((r.minimizer - dvector![0.5, 1.0]).norm() < 1e-15);
    }

    #[test]
    fn entropy_simplex_matches_inner_solver() {
        let z = dvector![0.2, 0.3, 0.5];
        let v = dvector![1.0, -0.5, 0.25];
        let phi = LegendreFunction::shannon_entropy();
        let model = affine(z.clone(), v.clone());
        let r = Regularizer::simplex();
        let closed = prox_step(&model, &r, &phi, &z, 0.7, 0.0, &opts()).unwrap();
        let w = Point::from_fn(3, |i, _| z[i] * (-0.7 * v[i]).exp());
        assert!((&closed.minimizer - &w / w.sum()).norm() < 1e-15);
        let iter = inner_solve(&model, &r, &phi, &z, 0.7, 0.0, &opts()).unwrap();
        assert!(phi.bregman(&closed.minimizer, &iter.minimizer).unwrap() < 1e-8);
    }

    #[test]
    fn two_dimensional_simplex_grid_oracle() {
        // |x₁ − 0.3| type model on the 2-simplex, solved by the inner solver.
        let z = dvector![0.5, 0.5];
        let model = LocalModel::AbsAffine { base: z.clone(), weight: 1.0, offset: 0.2, slope: dvector![1.0, 0.0] };
        let phi = LegendreFunction::shannon_entropy();
        let r = Regularizer::simplex();
        let eta = 0.4;
        let res = inner_solve(&model, &r, &phi, &z, eta, 0.0, &opts()).unwrap();
        let psi = |t: f64| {
            let y = dvector![t, 1.0 - t];
            eta * model.value(&y) + phi.bregman(&y, &z).unwrap()
        };
        let mut best = (f64::INFINITY, 0.0);
        for k in 1..1000 {
            let t = k as f64 * 1e-3;
            let v = psi(t);
            if v < best.0 {
                best = (v, t);
            }
        }
        assert!((res.minimizer[0] - best.1).abs() <= 1e-3);
    }

    #[test]
    fn inner_solve_matches_golden_section() {
        // 1-D quartic Φ with an affine model: smooth and strongly convex.
        let phi = build_poly_legendre(&[1.0, 0.0, 1.0]).unwrap();
        let z = dvector![0.8];
        let model = affine(z.clone(), dvector![3.0]);
        let eta = 0.3;
        let res = inner_solve(&model, &Regularizer::zero(), &phi, &z, eta, 0.0, &opts()).unwrap();
        let (t, _) = golden_section(|t| eta * 3.0 * t + phi.bregman(&dvector![t], &z).unwrap(), -5.0, 5.0, 1e-14);
        assert!((res.minimizer[0] - t).abs() < 1e-7);
        let closed = prox_step(&model, &Regularizer::zero(), &phi, &z, eta, 0.0, &opts()).unwrap();
        assert_eq!(closed.method, StepMethod::MirrorStep);
        assert!(phi.bregman(&closed.minimizer, &res.minimizer).unwrap() < 1e-8);
    }

    #[test]
    fn zero_model_keeps_center() {
        let z = dvector![0.3, 0.4];
        let model = affine(z.clone(), dvector![0.0, 0.0]);
        let res = inner_solve(&model, &Regularizer::zero(), &LegendreFunction::euclidean(), &z, 1.0, 0.0, &opts()).unwrap();
        assert!((res.minimizer - z).norm() < 1e-14);
    }

    #[test]
    fn radial_examples() {
        let phi = build_poly_legendre(&[0.0, 0.0, 1.0]).unwrap();
        // 13 s³ = 13 gives s = 1.
        let z = Point::zeros(2);
        let r = prox_step_radial(&dvector![-13.0, 0.0], None, &phi, &z, 1.0).unwrap();
        assert!((r.minimizer - dvector![1.0, 0.0]).norm() < 1e-14);
        let z = dvector![0.3, -0.2];
        assert_eq!(prox_step_radial(&dvector![0.0, 0.0], None, &phi, &z, 1.0).unwrap().minimizer, z);
        let quad = build_poly_legendre(&[1.0]).unwrap();
        let v = dvector![1.0, 2.0];
        let a = prox_step_radial(&v, None, &quad, &z, 0.5).unwrap().minimizer;
        assert!((a - (&z - &v * (0.5 / 7.0))).norm() < 1e-15);
        let clipped = prox_step_radial(&dvector![-100.0, 0.0], Some(0.5), &phi, &Point::zeros(2), 1.0).unwrap();
        assert!((clipped.minimizer - dvector![0.5, 0.0]).norm() < 1e-15);
    }

    #[test]
    fn multiplier_step_solves_abs_model() {
        // min |x² − 1 + 2(y − 1)|-type model with the composite Φ, 1-D.
        let phi = crate::legendre::build_composite_legendre(&[1.0], &[0.0, 0.0, 4.0]).unwrap();
        let z = dvector![2.0];
        let model = LocalModel::AbsAffine { base: z.clone(), weight: 1.0, offset: 3.0, slope: dvector![4.0] };
        for eta in [0.01, 0.5, 5.0] {
            let res = prox_step(&model, &Regularizer::zero(), &phi, &z, eta, 0.0, &opts()).unwrap();
            assert_eq!(res.method, StepMethod::Multiplier);
            let (t, _) = golden_section(|t| eta * model.value(&dvector![t]) + phi.bregman(&dvector![t], &z).unwrap(), -3.0, 3.0, 1e-15);
            assert!((res.minimizer[0] - t).abs() < 1e-6, "eta {eta}: {} vs {t}", res.minimizer[0]);
        }
    }

    #[test]
    fn three_point_negative_control() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi = LegendreFunction::euclidean();
        let z = dvector![1.0, 2.0];
        let v = dvector![0.5, -1.0];
        let eta = 0.3;
        let model = affine(z.clone(), v.clone());
        let r = Regularizer::zero();
        let zp = prox_step(&model, &r, &phi, &z, eta, 0.0, &opts()).unwrap().minimizer;
        let g = |y: &Point| eta * model.value(y);
        let probes = random_probes(&r, &phi, &zp, 100, &mut rng);
        let rep = check_three_point(g, &phi, &z, &zp, &probes, 0.0).unwrap();
        assert!(rep.min_residual >= -1e-10 * (1.0 + rep.scale));
        let at_zp = check_three_point(g, &phi, &z, &zp, std::slice::from_ref(&zp), 0.0).unwrap();
        assert_eq!(at_zp.min_residual, 0.0);
        let bad = &zp + dvector![0.1, 0.0];
        let rep = check_three_point(g, &phi, &z, &bad, &probes, 0.0).unwrap();
        assert!(rep.min_residual < 0.0);
    }

    #[test]
    fn soft_threshold_and_regularized_steps() {
        let z = dvector![1.0, -0.05];
        let model = affine(z.clone(), dvector![0.0, 0.0]);
        let r = Regularizer::zero().with_penalty(Penalty::L1 { weight: 1.0 });
        let res = prox_step(&model, &r, &LegendreFunction::euclidean(), &z, 0.1, 0.0, &opts()).unwrap();
        assert!((res.minimizer - dvector![0.9, 0.0]).norm() < 1e-15);
        let rq = Regularizer::zero().with_penalty(Penalty::Quadratic { weight: 1.0 });
        let res = prox_step(&model, &rq, &LegendreFunction::euclidean(), &z, 1.0, 0.0, &opts()).unwrap();
        assert!((res.minimizer - &z * 0.5).norm() < 1e-15);
    }

    #[test]
    fn regularizer_infimum_and_mu() {
        let ent = LegendreFunction::shannon_entropy();
        let r = Regularizer::simplex().with_penalty(Penalty::ScaledLegendre { weight: 0.5, phi: ent.clone() });
        assert!((r.infimum(4).unwrap() + 0.5 * 4.0_f64.ln()).abs() < 1e-15);
        assert_eq!(r.mu_relative(&ent), 0.5);
        let orth = Regularizer::zero().with_penalty(Penalty::ScaledLegendre { weight: 1.0, phi: ent });
        assert!((orth.infimum(2).unwrap() + 2.0 / std::f64::consts::E).abs() < 1e-12);
        let q = Regularizer::zero().with_penalty(Penalty::Quadratic { weight: 2.0 });
        assert_eq!(q.mu_relative(&LegendreFunction::euclidean()), 2.0);
    }
}
