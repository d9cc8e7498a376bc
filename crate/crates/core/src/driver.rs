//! Outer loops: stochastic model-based minimization, mirror descent for
//! smooth problems, and the convex variants with averaged output.
//!
//! Every run owns a `ChaCha8Rng` seeded from the config, with the horizon as
//! its stream, so a (problem, config) pair always reproduces the same trace.
//! Three-point probes, when enabled, draw from a separate generator and never
//! perturb the iterates.

use std::time::Instant;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decimal;
use crate::envelope::{self, EnvelopeOptions};
use crate::error::{Error, Result};
use crate::models::{LocalModel, Regime};
use crate::problems::ProblemInstance;
use crate::subproblem::{self, ProxOptions, StepMethod};
use crate::Point;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// `η = 1/(λ⁻¹ + α⁻¹√(T+1))` (regime A), with `+M` in regime B, or `α/√(T+1)` (regime C).
    ConstantAlpha {
        #[serde(with = "decimal::scalar")]
        alpha: f64,
    },
    /// `η_t = 1/(μ(t+1))`.
    StronglyConvexMu {
        #[serde(with = "decimal::scalar")]
        mu: f64,
    },
    Explicit {
        #[serde(with = "decimal::vec")]
        etas: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// `None` uses the instance default.
    pub lambda: Option<f64>,
    pub schedule: Schedule,
    pub horizon: usize,
    pub seed: u64,
    pub inner_tol: f64,
    /// Random probes for a three-point check after every step; 0 disables it.
    pub check_probes: usize,
}

impl SolverConfig {
    pub fn new(horizon: usize, seed: u64, schedule: Schedule) -> Self {
        SolverConfig { lambda: None, schedule, horizon, seed, inner_tol: 1e-10, check_probes: 0 }
    }

    /// The schedule the instance declares for itself.
    pub fn for_problem(problem: &ProblemInstance, horizon: usize, seed: u64) -> Self {
        let d = &problem.defaults;
        let schedule = if d.strongly_convex {
            Schedule::StronglyConvexMu { mu: problem.constants().mu }
        } else {
            Schedule::ConstantAlpha { alpha: d.alpha }
        };
        let mut c = SolverConfig::new(horizon, seed, schedule);
        c.lambda = d.lambda;
        c
    }
}

/// The constant step for horizon `T` in each regime.
pub fn stepsize_constant(lambda: f64, alpha: f64, horizon: usize, regime: Regime, smooth_m: f64) -> Result<f64> {
    if !(alpha > 0.0) || !(lambda > 0.0) || smooth_m < 0.0 {
        return Err(Error::InvalidConfig(format!("need λ > 0, α > 0, M >= 0; got λ = {lambda}, α = {alpha}, M = {smooth_m}")));
    }
    let root = ((horizon + 1) as f64).sqrt();
    Ok(match regime {
        Regime::A => 1.0 / (1.0 / lambda + root / alpha),
        Regime::B => 1.0 / (smooth_m + 1.0 / lambda + root / alpha),
        Regime::C => alpha / root,
    })
}

/// Resolves `λ` and checks `λ(τ + ρ) < 1` outside regime C.
pub fn resolve_lambda(problem: &ProblemInstance, config: &SolverConfig) -> Result<f64> {
    let lambda = config.lambda.unwrap_or_else(|| problem.default_lambda());
    let c = problem.constants();
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidConfig(format!("λ must be positive, got {lambda}")));
    }
    if problem.regime() != Regime::C && lambda * (c.tau + c.rho) >= 1.0 {
        return Err(Error::InvalidConfig(format!("λ (τ + ρ) = {} must be below 1", lambda * (c.tau + c.rho))));
    }
    Ok(lambda)
}

/// `η_0, …, η_T` for the config, with the data-line invariants enforced.
pub fn step_sizes(problem: &ProblemInstance, config: &SolverConfig, lambda: f64) -> Result<Vec<f64>> {
    let n = config.horizon + 1;
    let regime = problem.regime();
    let c = problem.constants();
    let etas = match &config.schedule {
        Schedule::ConstantAlpha { alpha } => vec![stepsize_constant(lambda, *alpha, config.horizon, regime, c.smooth_m)?; n],
        Schedule::StronglyConvexMu { mu } => {
            if !(*mu > 0.0) {
                return Err(Error::InvalidConfig("the 1/(μ(t+1)) schedule needs μ > 0".into()));
            }
            if regime != Regime::C {
                return Err(Error::InvalidConfig("the 1/(μ(t+1)) schedule applies to regime C only".into()));
            }
            (0..n).map(|t| 1.0 / (mu * (t + 1) as f64)).collect()
        }
        Schedule::Explicit { etas } => {
            if etas.len() != n {
                return Err(Error::InvalidConfig(format!("{} step sizes given for horizon {}", etas.len(), config.horizon)));
            }
            etas.clone()
        }
    };
    if etas.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidConfig("step sizes must be positive".into()));
    }
    if regime != Regime::C {
        if etas.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidConfig("step sizes must be nonincreasing".into()));
        }
        let cap = if regime == Regime::B { lambda / (1.0 + lambda * c.smooth_m) } else { lambda };
        if etas[0] >= cap {
            return Err(Error::InvalidConfig(format!("η_0 = {} must be below {cap}", etas[0])));
        }
    }
    Ok(etas)
}

/// Normalized `P(t* = t) ∝ η_t/(1 − η_t ρ)`.
pub fn tstar_weights(etas: &[f64], rho: f64) -> Result<Vec<f64>> {
    if etas.is_empty() {
        return Err(Error::InvalidConfig("no step sizes".into()));
    }
    let raw = etas
        .iter()
        .map(|e| {
            let den = 1.0 - e * rho;
            if den <= 0.0 {
                Err(Error::InvalidConfig(format!("η ρ = {} must be below 1", e * rho)))
            } else {
                Ok(e / den)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let s: f64 = raw.iter().sum();
    Ok(raw.iter().map(|w| w / s).collect())
}

pub fn sample_tstar<R: Rng + ?Sized>(etas: &[f64], rho: f64, rng: &mut R) -> Result<usize> {
    let w = tstar_weights(etas, rho)?;
    if w.len() == 1 {
        return Ok(0);
    }
    let dist = WeightedIndex::new(&w).map_err(|e| Error::InvalidConfig(format!("t* weights: {e}")))?;
    Ok(dist.sample(rng))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub xi: usize,
    /// `f_{x_t}(x_{t+1}, ξ_t)`
    pub model_value: f64,
    /// `r(x_{t+1})`
    pub r_value: f64,
    /// `D_Φ(x_{t+1}, x_t)`
    pub step_divergence: f64,
    /// Smallest relative three-point residual over the random probes (`+∞` unchecked).
    pub three_point_residual: f64,
    pub method: StepMethod,
    pub inner_iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub problem_id: String,
    pub regime: Regime,
    pub lambda: f64,
    pub rho: f64,
    /// `x_0, …, x_{T+1}`
    #[serde(with = "decimal::points")]
    pub iterates: Vec<Point>,
    #[serde(with = "decimal::vec")]
    pub etas: Vec<f64>,
    pub steps: Vec<StepRecord>,
    pub t_star: usize,
    #[serde(with = "decimal::point")]
    pub returned_point: Point,
    /// Weighted average `Σ η_t x_t / Σ η_t` over `t = 0..T` (regime C only).
    #[serde(with = "decimal::opt_point")]
    pub averaged_point: Option<Point>,
}

impl RunTrace {
    pub fn horizon(&self) -> usize {
        self.etas.len() - 1
    }

    pub fn sampled_xi(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.xi).collect()
    }
}

fn run_rng(seed: u64, horizon: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(horizon as u64);
    rng
}

fn run_loop(problem: &ProblemInstance, config: &SolverConfig, linear_only: bool) -> Result<RunTrace> {
    problem.check()?;
    let lambda = resolve_lambda(problem, config)?;
    let etas = step_sizes(problem, config, lambda)?;
    let oracle = &problem.oracle;
    let rho = oracle.constants.rho;
    let r = &problem.regularizer;
    let phi = &problem.phi;
    let popts = ProxOptions { inner_tol: config.inner_tol, ..Default::default() };
    let mut rng = run_rng(config.seed, config.horizon);
    let mut probe_rng = run_rng(config.seed ^ 0x7072_6f62_6573, config.horizon);

    let mut x = problem.x0.clone();
    let mut iterates = Vec::with_capacity(etas.len() + 1);
    let mut steps = Vec::with_capacity(etas.len());
    iterates.push(x.clone());
    for &eta in &etas {
        let xi = oracle.sample(&mut rng);
        let model = oracle.model_at(&x, &xi)?;
        if linear_only && !matches!(model, LocalModel::Affine { .. }) {
            return Err(Error::Oracle("mirror descent needs linear models".into()));
        }
        let step = subproblem::prox_step(&model, r, phi, &x, eta, rho, &popts)?;
        let next = step.minimizer;
        if !phi.is_interior(&next) || !r.value(&next).is_finite() {
            return Err(Error::DomainViolation(format!("iterate {next:?} left int dom Φ ∩ dom r")));
        }
        let mut residual = f64::INFINITY;
        if config.check_probes > 0 {
            let probes = subproblem::random_probes(r, phi, &next, config.check_probes, &mut probe_rng);
            let g = |y: &Point| eta * (model.value(y) + r.value(y));
            let rep = subproblem::check_three_point(g, phi, &x, &next, &probes, eta * rho)?;
            residual = rep.min_residual / (1.0 + rep.scale);
            if residual < -1e-8 {
                return Err(Error::InnerSolver { iterations: step.inner_iterations, residual: rep.min_residual });
            }
        }
        steps.push(StepRecord {
            xi: xi.index,
            model_value: model.value(&next),
            r_value: r.value(&next),
            step_divergence: phi.bregman(&next, &x)?,
            three_point_residual: residual,
            method: step.method,
            inner_iterations: step.inner_iterations,
        });
        x = next;
        iterates.push(x.clone());
    }
    let t_star = sample_tstar(&etas, rho, &mut rng)?;
    Ok(RunTrace {
        problem_id: problem.id.clone(),
        regime: problem.regime(),
        lambda,
        rho,
        returned_point: iterates[t_star].clone(),
        iterates,
        etas,
        steps,
        t_star,
        averaged_point: None,
    })
}

/// Stochastic model-based minimization (regime A).
pub fn run_model_based(problem: &ProblemInstance, config: &SolverConfig) -> Result<RunTrace> {
    if problem.regime() != Regime::A {
        return Err(Error::InvalidConfig(format!("{} is a regime {} problem", problem.id, problem.regime())));
    }
    run_loop(problem, config, false)
}

/// Stochastic mirror descent with linear models built from noisy gradients (regime B).
pub fn run_mirror_descent_smooth(problem: &ProblemInstance, config: &SolverConfig) -> Result<RunTrace> {
    if problem.regime() != Regime::B {
        return Err(Error::InvalidConfig(format!("{} is a regime {} problem", problem.id, problem.regime())));
    }
    run_loop(problem, config, true)
}

/// Regime C: the same loop, plus the averaged point. With `average` the
/// weights are `η_t` (uniform for a constant step); the `1/(μ(t+1))` schedule
/// always uses the plain average.
pub fn run_convex(problem: &ProblemInstance, config: &SolverConfig, average: bool) -> Result<RunTrace> {
    if problem.regime() != Regime::C {
        return Err(Error::InvalidConfig(format!("{} is a regime {} problem", problem.id, problem.regime())));
    }
    let mut trace = run_loop(problem, config, false)?;
    if average {
        let plain = matches!(config.schedule, Schedule::StronglyConvexMu { .. });
        let mut acc = Point::zeros(problem.dimension());
        let mut total = 0.0;
        for (x, &eta) in trace.iterates.iter().zip(&trace.etas) {
            let w = if plain { 1.0 } else { eta };
            acc += x * w;
            total += w;
        }
        trace.averaged_point = Some(acc / total);
    }
    Ok(trace)
}

/// Dispatches on the regime.
pub fn run(problem: &ProblemInstance, config: &SolverConfig) -> Result<RunTrace> {
    match problem.regime() {
        Regime::A => run_model_based(problem, config),
        Regime::B => run_mirror_descent_smooth(problem, config),
        Regime::C => run_convex(problem, config, true),
    }
}

/// `(D(x*, x0) + Σ(η_t 𝖫)²/4 + η_0 (r(x0) − inf r)) / Σ η_t`.
pub fn convex_bound(problem: &ProblemInstance, etas: &[f64]) -> Result<f64> {
    let opt = problem.optimum.as_ref().ok_or_else(|| Error::InvalidConfig(format!("{} has no recorded optimum", problem.id)))?;
    let l = problem.constants().lip_bound;
    let d0 = problem.phi.bregman(&opt.x_star, &problem.x0)?;
    let r0 = problem.regularizer.value(&problem.x0) - problem.regularizer.infimum(problem.dimension())?;
    let sq: f64 = etas.iter().map(|e| (e * l).powi(2) / 4.0).sum();
    let total: f64 = etas.iter().sum();
    Ok((d0 + sq + etas[0] * r0) / total)
}

/// `(𝖫²(1 + log(T+1))/(4μ) + r(x0) − inf r + μ D(x*, x0)) / (T+1)`.
pub fn strongly_convex_bound(problem: &ProblemInstance, horizon: usize, mu: f64) -> Result<f64> {
    let opt = problem.optimum.as_ref().ok_or_else(|| Error::InvalidConfig(format!("{} has no recorded optimum", problem.id)))?;
    let l = problem.constants().lip_bound;
    let n = (horizon + 1) as f64;
    let d0 = problem.phi.bregman(&opt.x_star, &problem.x0)?;
    let r0 = problem.regularizer.value(&problem.x0) - problem.regularizer.infimum(problem.dimension())?;
    Ok((l * l * (1.0 + n.ln()) / (4.0 * mu) + r0 + mu * d0) / n)
}

/// How `E[D_Φ(x̂_{t*}, x_{t*})]` is estimated from one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TstarMode {
    /// The drawn `t*` only.
    Draw,
    /// Exact expectation over the `t*` law given the iterates.
    Full,
}

pub const BREG_DIV: &str = "breg_div_to_prox";
pub const ENV_GRAD: &str = "env_grad_local_norm";
pub const OBJ_GAP: &str = "objective_gap";

/// Offline diagnostics of a finished run, as `(metric_name, value)` pairs.
/// The first pair is the rate metric of the regime.
pub fn metrics(problem: &ProblemInstance, trace: &RunTrace, mode: TstarMode) -> Result<Vec<(&'static str, f64)>> {
    if trace.regime == Regime::C {
        let opt = problem.optimum.as_ref().ok_or_else(|| Error::InvalidConfig(format!("{} has no recorded optimum", problem.id)))?;
        let x = trace.averaged_point.as_ref().unwrap_or(&trace.returned_point);
        return Ok(vec![(OBJ_GAP, problem.objective(x) - opt.f_star)]);
    }
    let opts = EnvelopeOptions::default();
    let at = |x: &Point| -> Result<(f64, f64)> {
        let xhat = envelope::bregman_prox_point(problem, &problem.phi, x, trace.lambda, &opts)?;
        let d = problem.phi.bregman(&xhat, x)?;
        let g = envelope::envelope_gradient_at(&problem.phi, x, &xhat, trace.lambda)?;
        Ok((d, problem.phi.local_dual_norm(x, &g)?))
    };
    let (d, g) = match mode {
        TstarMode::Draw => at(&trace.returned_point)?,
        TstarMode::Full => {
            let w = tstar_weights(&trace.etas, trace.rho)?;
            let mut d = 0.0;
            let mut g = 0.0;
            for (x, wt) in trace.iterates.iter().zip(&w) {
                let (dt, gt) = at(x)?;
                d += wt * dt;
                g += wt * gt;
            }
            (d, g)
        }
    };
    Ok(vec![(BREG_DIV, d), (ENV_GRAD, g)])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub regime: Regime,
    pub problem_id: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub seed: u64,
    pub eta0: f64,
    pub lambda: f64,
    pub metric_name: String,
    pub metric_value: f64,
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    /// `None` when the metric is zero at every horizon.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r2: Option<f64>,
    pub horizons: Vec<usize>,
    pub n_seeds: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HorizonSummary {
    pub horizon: usize,
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub summary: Vec<HorizonSummary>,
    pub fit: SlopeFit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepOptions {
    pub horizons: Vec<usize>,
    pub n_seeds: usize,
    pub base_seed: u64,
    pub mode: TstarMode,
    /// Thread cap; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Config used for every cell; its horizon and seed are replaced.
    pub template: SolverConfig,
}

/// Least squares fit of `log metric = intercept + slope · log T`.
pub fn fit_loglog(horizons: &[usize], means: &[f64], n_seeds: usize) -> SlopeFit {
    let converged = means.iter().all(|m| *m == 0.0);
    let pts: Vec<(f64, f64)> =
        horizons.iter().zip(means).filter(|(_, m)| **m > 0.0).map(|(t, m)| ((*t as f64).ln(), m.ln())).collect();
    let mut fit = SlopeFit { slope: None, intercept: None, r2: None, horizons: horizons.to_vec(), n_seeds, converged };
    if converged || pts.len() < 2 {
        return fit;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    fit.slope = Some(slope);
    fit.intercept = Some(my - slope * mx);
    fit.r2 = Some(if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) });
    fit
}

/// Runs every `(T, seed)` cell, evaluates the metrics and fits the rate.
pub fn sweep(problem: &ProblemInstance, opts: &SweepOptions) -> Result<SweepResult> {
    if opts.horizons.is_empty() || opts.horizons.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("horizons must be strictly increasing".into()));
    }
    if opts.n_seeds == 0 {
        return Err(Error::InvalidConfig("need at least one seed".into()));
    }
    let cells: Vec<(usize, u64)> =
        opts.horizons.iter().flat_map(|&t| (0..opts.n_seeds as u64).map(move |s| (t, opts.base_seed + s))).collect();
    let run_cell = |&(t, seed): &(usize, u64)| -> Result<Vec<SweepRow>> {
        let mut config = opts.template.clone();
        config.horizon = t;
        config.seed = seed;
        let start = Instant::now();
        let trace = run(problem, &config)?;
        let m = metrics(problem, &trace, opts.mode)?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        Ok(m.into_iter()
            .map(|(name, value)| SweepRow {
                regime: trace.regime,
                problem_id: problem.id.clone(),
                horizon: t,
                seed,
                eta0: trace.etas[0],
                lambda: trace.lambda,
                metric_name: name.to_string(),
                metric_value: value,
                wall_ms,
            })
            .collect())
    };
    let nested: Vec<Result<Vec<SweepRow>>> = match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            pool.install(|| cells.par_iter().map(run_cell).collect())
        }
        None => cells.par_iter().map(run_cell).collect(),
    };
    let mut rows = Vec::new();
    for r in nested {
        rows.extend(r?);
    }
    rows.sort_by_key(|r| (r.horizon, r.seed));

    let primary = rows.first().map(|r| r.metric_name.clone()).unwrap_or_default();
    let summary: Vec<HorizonSummary> = opts
        .horizons
        .iter()
        .map(|&t| {
            let vals: Vec<f64> = rows.iter().filter(|r| r.horizon == t && r.metric_name == primary).map(|r| r.metric_value).collect();
            let (mean, std_error) = crate::models::mean_and_se(&vals);
            HorizonSummary { horizon: t, mean, std_error: if std_error.is_finite() { std_error } else { 0.0 } }
        })
        .collect();
    let means: Vec<f64> = summary.iter().map(|s| s.mean).collect();
    let fit = fit_loglog(&opts.horizons, &means, opts.n_seeds);
    Ok(SweepResult { rows, summary, fit })
}

pub fn write_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut r = csv::Reader::from_reader(input);
    Ok(r.deserialize().collect::<std::result::Result<Vec<SweepRow>, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::OracleData;
    use crate::problems;
    use nalgebra::dvector;

    #[test]
    fn stepsize_examples() {
        assert_eq!(stepsize_constant(1.0, 1.0, 3, Regime::A, 0.0).unwrap(), 1.0 / 3.0);
        assert!((stepsize_constant(1.0, 1.0, 3, Regime::B, 2.0).unwrap() - 0.2).abs() < 1e-16);
        assert!((stepsize_constant(1.0, 2.0, 99, Regime::C, 0.0).unwrap() - 0.2).abs() < 1e-16);
        assert!(stepsize_constant(1.0, 0.0, 3, Regime::A, 0.0).is_err());
    }

    #[test]
    fn tstar_examples() {
        let w = tstar_weights(&[0.5, 0.25], 0.0).unwrap();
        assert!((w[0] - 2.0 / 3.0).abs() < 1e-15 && (w[1] - 1.0 / 3.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_tstar(&[0.5], 0.9, &mut rng).unwrap(), 0);
        assert!(tstar_weights(&[0.5], 2.0).is_err());
        let u = tstar_weights(&[0.1; 4], 0.0).unwrap();
        assert!(u.iter().all(|p| (p - 0.25).abs() < 1e-15));
    }

    #[test]
    fn gradient_descent_reduction_is_bitwise() {
        let p = problems::quadratic_instance();
        let config = SolverConfig::for_problem(&p, 30, 7);
        let trace = run_model_based(&p, &config).unwrap();
        let eta = trace.etas[0];
        let mut x = p.x0.clone();
        for (t, xt) in trace.iterates.iter().enumerate() {
            assert_eq!(xt, &x, "iterate {t}");
            x = &x - p.oracle.f_subgradient(&x) * eta;
        }
    }

    #[test]
    fn horizon_zero_and_determinism() {
        let p = problems::p1();
        let config = SolverConfig::for_problem(&p, 0, 1);
        let trace = run(&p, &config).unwrap();
        assert_eq!(trace.steps.len(), 1);
        assert_eq!(trace.iterates.len(), 2);
        assert_eq!(trace.t_star, 0);
        assert_eq!(trace.returned_point, p.x0);
        let config = SolverConfig::for_problem(&p, 50, 9);
        assert_eq!(run(&p, &config).unwrap(), run(&p, &config).unwrap());
    }

    #[test]
    fn convex_average_examples() {
        let p = problems::p3();
        let config = SolverConfig::for_problem(&p, 0, 1);
        let trace = run_convex(&p, &config, true).unwrap();
        assert_eq!(trace.averaged_point.as_ref().unwrap(), &p.x0);
        let config = SolverConfig::for_problem(&p, 9, 1);
        let trace = run_convex(&p, &config, true).unwrap();
        let plain = trace.iterates[..10].iter().fold(Point::zeros(10), |a, x| a + x) / 10.0;
        assert!((trace.averaged_point.unwrap() - plain).norm() < 1e-15);
        let etas = step_sizes(&problems::p4(), &SolverConfig::new(2, 0, Schedule::StronglyConvexMu { mu: 1.0 }), 1.0).unwrap();
        assert_eq!(etas, vec![1.0, 0.5, 1.0 / 3.0]);
        assert!(step_sizes(&problems::p3(), &SolverConfig::new(2, 0, Schedule::StronglyConvexMu { mu: 0.0 }), 1.0).is_err());
    }

    #[test]
    fn exponentiated_gradient_iterates_stay_positive() {
        let p = problems::p3();
        let mut config = SolverConfig::for_problem(&p, 200, 3);
        config.check_probes = 20;
        let trace = run(&p, &config).unwrap();
        for x in &trace.iterates {
            assert!(x.iter().all(|v| *v > 0.0));
            assert!((x.sum() - 1.0).abs() < 1e-12);
        }
        assert!(trace.steps.iter().all(|s| s.method == StepMethod::EntropySimplex));
    }

    #[test]
    fn config_checks() {
        let p = problems::p1();
        let mut config = SolverConfig::for_problem(&p, 5, 1);
        config.lambda = Some(1.0 / p.constants().tau);
        assert!(matches!(run(&p, &config), Err(Error::InvalidConfig(_))));
        let config = SolverConfig::new(1, 1, Schedule::Explicit { etas: vec![0.01, 0.02] });
        assert!(run(&p, &config).is_err());
        let p2 = problems::p2();
        let config = SolverConfig::new(1, 1, Schedule::Explicit { etas: vec![0.5, 0.5] });
        assert!(run(&p2, &config).is_err());
    }

    #[test]
    fn slope_fit_and_csv() {
        let fit = fit_loglog(&[1, 10, 100], &[1.0, 0.1, 0.01], 1);
        assert!((fit.slope.unwrap() + 1.0).abs() < 1e-12);
        assert!((fit.r2.unwrap() - 1.0).abs() < 1e-12);
        let zero = fit_loglog(&[1, 10], &[0.0, 0.0], 3);
        assert!(zero.converged && zero.slope.is_none());

        let rows = vec![SweepRow {
            regime: Regime::A,
            problem_id: "P1".into(),
            horizon: 64,
            seed: 3,
            eta0: 0.1 + 0.2,
            lambda: 1.0 / 3.0,
            metric_name: BREG_DIV.into(),
            metric_value: 1e-7 / 3.0,
            wall_ms: 0.5,
        }];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("regime,problem_id,T,seed,eta0,lambda,metric_name,metric_value,wall_ms\n"));
        assert_eq!(read_csv(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn solved_problem_reports_converged() {
        // x0 is the minimizer of ½‖x‖² with exact gradients, so every metric is zero.
        let mut p = problems::quadratic_instance();
        p.oracle.data = OracleData::Quadratic { matrix: vec![dvector![1.0, 0.0], dvector![0.0, 1.0]], linear: dvector![0.0, 0.0] };
        p.oracle.constants.tau = 1.0;
        p.x0 = dvector![0.0, 0.0];
        let opts = SweepOptions {
            horizons: vec![4, 16],
            n_seeds: 2,
            base_seed: 0,
            mode: TstarMode::Draw,
            threads: Some(1),
            template: SolverConfig::for_problem(&p, 0, 0),
        };
        let res = sweep(&p, &opts).unwrap();
        assert!(res.fit.converged);
        assert_eq!(res.rows.len(), 2 * 2 * 2);
    }
}
