//! Registered test problems, JSON configs, brute-force ground truth and the
//! per-instance validation suite.
//!
//! | id | regime | family | Φ |
//! |----|--------|--------|---|
//! | P1 | A | prox-linear `|⟨a,x⟩² − b|`, d = 1 | composite polynomial |
//! | P2 | B | smooth quartic with Gaussian gradient noise, d = 2 | `½‖x‖² + ¼‖x‖⁴` |
//! | P3 | C | linear cost on the simplex, d = 10 | entropy |
//! | P4 | C | P3 plus `μ Σ x log x` in `r` | entropy |
//! | P5 | A | saddle `max_{‖w‖≤0.1} ⟨a + w, x⟩` plus `½‖x‖²`, d = 2 | Euclidean |
//!
//! All data are drawn once from fixed seeds and frozen into the instance, so
//! `f` is an exact finite average (or an exact formula with Gaussian noise on
//! the gradient only).

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::decimal;
use crate::envelope::Composite;
use crate::error::{Error, Result};
use crate::legendre::{build_composite_legendre, LegendreFunction};
use crate::minimize::{golden_section, Constraint};
use crate::models::{
    self, DataRow, LocalModel, ModelConstants, ModelOracle, OracleData, Regime, SampleSpace,
};
use crate::subproblem::{self, Penalty, ProxOptions, Regularizer};
use crate::Point;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    #[serde(with = "decimal::scalar")]
    pub f_star: f64,
    #[serde(with = "decimal::point")]
    pub x_star: Point,
}

/// Defaults used by the CLI and the sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunDefaults {
    #[serde(with = "decimal::scalar")]
    pub alpha: f64,
    /// Overrides the `1/(2(τ+ρ))` rule when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Use `η_t = 1/(μ(t+1))` instead of a constant step.
    #[serde(default)]
    pub strongly_convex: bool,
    pub seed: u64,
    pub horizons: Vec<usize>,
    pub seeds: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub id: String,
    pub description: String,
    pub oracle: ModelOracle,
    pub regularizer: Regularizer,
    pub phi: LegendreFunction,
    #[serde(with = "decimal::point")]
    pub x0: Point,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimum: Option<Optimum>,
    pub defaults: RunDefaults,
}

impl ProblemInstance {
    pub fn regime(&self) -> Regime {
        self.oracle.regime
    }

    pub fn dimension(&self) -> usize {
        self.oracle.dim()
    }

    pub fn constants(&self) -> &ModelConstants {
        &self.oracle.constants
    }

    /// `F(x) = f(x) + r(x)`.
    pub fn objective(&self, x: &Point) -> f64 {
        Composite::value(self, x)
    }

    /// Checks shapes and that `x0 ∈ int dom Φ ∩ dom r`.
    pub fn check(&self) -> Result<()> {
        self.oracle.validate_shape()?;
        if self.x0.len() != self.dimension() {
            return Err(Error::InvalidConfig(format!("x0 has dimension {} but data have {}", self.x0.len(), self.dimension())));
        }
        if !self.phi.is_interior(&self.x0) || !self.regularizer.value(&self.x0).is_finite() {
            return Err(Error::DomainViolation(format!("x0 = {:?} is not in int dom Φ ∩ dom r", self.x0)));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: ProblemInstance = serde_json::from_str(s)?;
        p.check()?;
        Ok(p)
    }

    /// `λ = 1/(2(τ+ρ))`, or `1` when `τ + ρ = 0`, unless the instance overrides it.
    pub fn default_lambda(&self) -> f64 {
        self.defaults.lambda.unwrap_or_else(|| {
            let s = self.oracle.constants.tau + self.oracle.constants.rho;
            if s > 0.0 {
                1.0 / (2.0 * s)
            } else {
                1.0
            }
        })
    }

    fn mean_row(&self) -> Option<Point> {
        let w = self.oracle.weights()?;
        let rows: &[Point] = match &self.oracle.data {
            OracleData::LinearCost { costs } => costs,
            OracleData::Saddle { rows, .. } => rows,
            _ => return None,
        };
        Some(rows.iter().zip(w).fold(Point::zeros(self.dimension()), |acc, (r, wi)| acc + r * *wi))
    }
}

impl Composite for ProblemInstance {
    fn dim(&self) -> usize {
        self.dimension()
    }
    fn f_value(&self, x: &Point) -> f64 {
        self.oracle.f_value(x)
    }
    fn f_subgradient(&self, x: &Point) -> Point {
        self.oracle.f_subgradient(x)
    }
    fn f_hessian(&self, x: &Point) -> Option<DMatrix<f64>> {
        self.oracle.f_hessian(x)
    }
    fn f_smooth(&self) -> bool {
        self.oracle.f_smooth()
    }
    fn regularizer(&self) -> &Regularizer {
        &self.regularizer
    }
    fn weak_convexity(&self) -> f64 {
        self.oracle.constants.tau + self.oracle.constants.rho
    }

    fn exact_prox(&self, phi: &LegendreFunction, x: &Point, lambda: f64) -> Option<Result<Point>> {
        match &self.oracle.data {
            // f is linear, so its own linearization is exact.
            OracleData::LinearCost { .. } => {
                let c = self.mean_row()?;
                let model = LocalModel::Affine { base: x.clone(), value: c.dot(x), slope: c };
                Some(subproblem::prox_step(&model, &self.regularizer, phi, x, lambda, 0.0, &ProxOptions::default()).map(|r| r.minimizer))
            }
            // ⟨ā, y⟩ + R‖y‖ + (w/2)‖y‖² + (c/λ)‖y − x‖² has a shrinkage solution.
            OracleData::Saddle { radius, .. } if self.regularizer.constraint == Constraint::Free => {
                let c = phi.quadratic_coefficient()?;
                let w = match self.regularizer.penalty {
                    Penalty::Zero => 0.0,
                    Penalty::Quadratic { weight } => weight,
                    _ => return None,
                };
                let abar = self.mean_row()?;
                let k = 0.5 * w + c / lambda;
                let v = abar - x * (2.0 * c / lambda);
                let n = v.norm();
                if n <= *radius {
                    return Some(Ok(Point::zeros(x.len())));
                }
                Some(Ok(&v * (-(n - radius) / (2.0 * k * n))))
            }
            _ => None,
        }
    }
}

fn uniform_rows(rng: &mut ChaCha8Rng, m: usize, d: usize, a: (f64, f64), b: (f64, f64)) -> Vec<DataRow> {
    (0..m)
        .map(|_| DataRow {
            a: Point::from_fn(d, |_, _| rng.random_range(a.0..a.1)),
            b: rng.random_range(b.0..b.1),
        })
        .collect()
}

fn uniform_weights(m: usize) -> Vec<f64> {
    vec![1.0 / m as f64; m]
}

fn standard_defaults(alpha: f64, seed: u64) -> RunDefaults {
    RunDefaults { alpha, lambda: None, strongly_convex: false, seed, horizons: vec![64, 256, 1024, 4096], seeds: 20 }
}

/// Robust phase retrieval in one dimension: `F(x) = mean |a_i² x² − b_i|`.
///
/// With `h = |·|` (`L1 = 1`) and `c(x) = ⟨a,x⟩² − b`, the inner map satisfies
/// `‖∇c(x) − ∇c(y)‖ <= ‖a‖² (p(‖x‖) + p(‖y‖)) ‖x − y‖` with `p = 1` and
/// `‖∇c(x)‖ <= ‖a‖² sqrt(q(‖x‖))` with `q(u) = 4u²`, so `L2 = ‖a‖²`,
/// `τ = (4/3) E[L1 L2]` and `L(ξ) = √2 L1 L2`.
pub fn p1() -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5031);
    let m = 20;
    let rows = uniform_rows(&mut rng, m, 1, (0.5, 1.5), (0.5, 1.5));
    let l2: Vec<f64> = rows.iter().map(|r| r.a.norm_squared()).collect();
    let lip: Vec<f64> = l2.iter().map(|v| 2.0_f64.sqrt() * v).collect();
    let w = uniform_weights(m);
    let tau = 4.0 / 3.0 * l2.iter().zip(&w).map(|(l, wi)| l * wi).sum::<f64>();
    let rms = lip.iter().zip(&w).map(|(l, wi)| wi * l * l).sum::<f64>().sqrt();
    let phi = build_composite_legendre(&[1.0], &[0.0, 0.0, 4.0]).expect("valid coefficients");
    let oracle = ModelOracle {
        regime: Regime::A,
        constants: ModelConstants { tau, rho: 0.0, lip_bound: rms, lip_per_sample: lip, ..Default::default() },
        sample_space: SampleSpace::Finite { weights: w },
        data: OracleData::ProxLinear { rows },
    };
    ProblemInstance {
        id: "P1".into(),
        description: "prox-linear robust phase retrieval |a²x² − b|, d = 1".into(),
        oracle,
        regularizer: Regularizer::zero(),
        phi,
        x0: Point::from_element(1, 2.0),
        optimum: None,
        defaults: standard_defaults(1.0, 1),
    }
}

/// `f(x) = mean (⟨a_i, x⟩² − b_i)²` with `G = ∇f + N(0, s² I)`.
///
/// `∇²f(x) = mean 4(3⟨a,x⟩² − b) a aᵀ`, bounded below by `−mean 4b a aᵀ` and
/// above by `12‖x‖² mean ‖a‖² a aᵀ`; with `∇²Φ ⪰ (1 + ‖x‖²) I` this gives
/// `τ` and `M` as the top eigenvalues of those two matrices.
pub fn p2() -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5032);
    let (m, d) = (20, 2);
    let rows: Vec<DataRow> = (0..m)
        .map(|_| DataRow {
            a: Point::from_fn(d, |_, _| 0.5 * rng.sample::<f64, _>(StandardNormal)),
            b: rng.random_range(0.5..1.5),
        })
        .collect();
    let top = |mat: DMatrix<f64>| SymmetricEigen::new(mat).eigenvalues.max();
    let tau = top(rows.iter().fold(DMatrix::zeros(d, d), |acc, r| acc + &r.a * r.a.transpose() * (4.0 * r.b / m as f64)));
    let smooth_m =
        12.0 * top(rows.iter().fold(DMatrix::zeros(d, d), |acc, r| acc + &r.a * r.a.transpose() * (r.a.norm_squared() / m as f64)));
    let sigma = 1.0;
    let phi = LegendreFunction::norm_power_sum(&[1.0, 0.0, 1.0]).expect("valid coefficients");
    let oracle = ModelOracle {
        regime: Regime::B,
        constants: ModelConstants { tau, rho: 0.0, smooth_m, sigma, ..Default::default() },
        sample_space: SampleSpace::Gaussian { dim: d, std: sigma / (2.0 * d as f64).sqrt() },
        data: OracleData::SmoothQuartic { rows },
    };
    ProblemInstance {
        id: "P2".into(),
        description: "smooth quartic mean (⟨a,x⟩² − b)² with Gaussian gradient noise, d = 2".into(),
        oracle,
        regularizer: Regularizer::zero(),
        phi,
        x0: Point::from_vec(vec![1.5, -1.0]),
        optimum: None,
        defaults: standard_defaults(0.5, 2),
    }
}

/// `c_{ξ,i} = (k_i + U_{ξ,i})/d` with `k` a random permutation of `0..d`, so
/// neighbouring mean costs sit about `1/d` apart.
fn linear_cost_oracle(seed: u64) -> (Vec<Point>, Vec<f64>, Point) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (m, d) = (20, 10);
    let mut levels: Vec<f64> = (0..d).map(|k| k as f64).collect();
    levels.shuffle(&mut rng);
    let costs: Vec<Point> =
        (0..m).map(|_| Point::from_fn(d, |i, _| (levels[i] + rng.random_range(0.0..1.0)) / d as f64)).collect();
    let w = uniform_weights(m);
    let mean = costs.iter().zip(&w).fold(Point::zeros(d), |acc, (c, wi)| acc + c * *wi);
    (costs, w, mean)
}

/// `L(ξ) = √2 ‖c_ξ‖_∞`: Hölder plus Pinsker on the simplex.
fn linear_cost_constants(costs: &[Point], w: &[f64]) -> ModelConstants {
    let lip: Vec<f64> = costs.iter().map(|c| 2.0_f64.sqrt() * c.amax()).collect();
    let rms = lip.iter().zip(w).map(|(l, wi)| wi * l * l).sum::<f64>().sqrt();
    ModelConstants { lip_bound: rms, lip_per_sample: lip, ..Default::default() }
}

/// `min_{x ∈ Δ} E⟨c_ξ, x⟩` by entropic mirror descent.
pub fn p3() -> ProblemInstance {
    let (costs, w, mean) = linear_cost_oracle(0x5033);
    let d = mean.len();
    let j = mean.imin();
    let mut x_star = Point::zeros(d);
    x_star[j] = 1.0;
    ProblemInstance {
        id: "P3".into(),
        description: "linear cost on the 10-simplex, entropic mirror descent".into(),
        oracle: ModelOracle {
            regime: Regime::C,
            constants: linear_cost_constants(&costs, &w),
            sample_space: SampleSpace::Finite { weights: w },
            data: OracleData::LinearCost { costs },
        },
        regularizer: Regularizer::simplex(),
        phi: LegendreFunction::shannon_entropy(),
        x0: Point::from_element(d, 1.0 / d as f64),
        optimum: Some(Optimum { f_star: mean[j], x_star }),
        defaults: standard_defaults(2.0, 3),
    }
}

/// P3 with `r = ι_Δ + μ Σ x log x`; the minimizer is `softmax(−c̄/μ)` and
/// `F* = −μ log Σ exp(−c̄/μ)`.
pub fn p4() -> ProblemInstance {
    let mu = 0.5;
    let (costs, w, mean) = linear_cost_oracle(0x5033);
    let d = mean.len();
    let shift = mean.min();
    let e = mean.map(|c| (-(c - shift) / mu).exp());
    let z = e.sum();
    let x_star = &e / z;
    let f_star = shift - mu * z.ln();
    let mut constants = linear_cost_constants(&costs, &w);
    constants.mu = mu;
    let phi = LegendreFunction::shannon_entropy();
    ProblemInstance {
        id: "P4".into(),
        description: "P3 plus μ-scaled entropy in r (relatively strongly convex)".into(),
        oracle: ModelOracle {
            regime: Regime::C,
            constants,
            sample_space: SampleSpace::Finite { weights: w },
            data: OracleData::LinearCost { costs },
        },
        regularizer: Regularizer::simplex().with_penalty(Penalty::ScaledLegendre { weight: mu, phi: phi.clone() }),
        phi,
        x0: Point::from_element(d, 1.0 / d as f64),
        optimum: Some(Optimum { f_star, x_star }),
        defaults: RunDefaults { strongly_convex: true, ..standard_defaults(1.0, 4) },
    }
}

/// `f(x) = E max_{‖w‖ <= R} ⟨a_ξ + w, x⟩ = ⟨ā, x⟩ + R‖x‖`, `r = ½‖x‖²`.
///
/// The models `⟨a_ξ + ŵ(x), ·⟩` underestimate `f` in expectation (`τ = 0`)
/// and `L(ξ) = √2 (‖a_ξ‖ + R)`.
pub fn p5() -> ProblemInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5035);
    let (m, d, radius) = (20, 2, 0.1);
    let rows: Vec<Point> = (0..m).map(|_| Point::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal))).collect();
    let w = uniform_weights(m);
    let lip: Vec<f64> = rows.iter().map(|a| 2.0_f64.sqrt() * (a.norm() + radius)).collect();
    let rms = lip.iter().zip(&w).map(|(l, wi)| wi * l * l).sum::<f64>().sqrt();
    let abar = rows.iter().zip(&w).fold(Point::zeros(d), |acc, (a, wi)| acc + a * *wi);
    let n = abar.norm();
    let x_star = if n <= radius { Point::zeros(d) } else { &abar * (-(n - radius) / n) };
    let f_star = abar.dot(&x_star) + radius * x_star.norm() + 0.5 * x_star.norm_squared();
    ProblemInstance {
        id: "P5".into(),
        description: "stochastic saddle ⟨a + w, x⟩ over the 0.1-ball plus ½‖x‖², d = 2".into(),
        oracle: ModelOracle {
            regime: Regime::A,
            constants: ModelConstants { lip_bound: rms, lip_per_sample: lip, ..Default::default() },
            sample_space: SampleSpace::Finite { weights: w },
            data: OracleData::Saddle { rows, radius },
        },
        regularizer: Regularizer::zero().with_penalty(Penalty::Quadratic { weight: 1.0 }),
        phi: LegendreFunction::euclidean(),
        x0: Point::from_vec(vec![1.0, 1.0]),
        optimum: Some(Optimum { f_star, x_star }),
        defaults: standard_defaults(1.0, 5),
    }
}

/// `f(x) = ½xᵀQx − ⟨q, x⟩` with exact gradients, Euclidean `Φ` and `r = 0`.
/// Not in the registry: it exists to pin the gradient-descent reduction.
pub fn quadratic_instance() -> ProblemInstance {
    ProblemInstance {
        id: "Q0".into(),
        description: "deterministic convex quadratic, plain gradient descent".into(),
        oracle: ModelOracle {
            regime: Regime::A,
            constants: ModelConstants::default(),
            sample_space: SampleSpace::Gaussian { dim: 2, std: 0.0 },
            data: OracleData::Quadratic {
                matrix: vec![Point::from_vec(vec![3.0, 1.0]), Point::from_vec(vec![1.0, 2.0])],
                linear: Point::from_vec(vec![1.0, -1.0]),
            },
        },
        regularizer: Regularizer::zero(),
        phi: LegendreFunction::euclidean(),
        x0: Point::from_vec(vec![2.0, -3.0]),
        optimum: None,
        defaults: standard_defaults(1.0, 0),
    }
}

pub fn registry() -> Vec<ProblemInstance> {
    vec![p1(), p2(), p3(), p4(), p5()]
}

pub fn by_id(id: &str) -> Option<ProblemInstance> {
    registry().into_iter().find(|p| p.id.eq_ignore_ascii_case(id))
}

/// A registered id, or the path of a JSON config. `BREGOPT_SEED` overrides the seed.
pub fn load(id_or_path: &str) -> Result<ProblemInstance> {
    let mut p = match by_id(id_or_path) {
        Some(p) => p,
        None => {
            let text = std::fs::read_to_string(id_or_path)
                .map_err(|e| Error::InvalidConfig(format!("{id_or_path:?} is neither a problem id nor a readable config: {e}")))?;
            ProblemInstance::from_json(&text)?
        }
    };
    if let Ok(s) = std::env::var("BREGOPT_SEED") {
        p.defaults.seed = s.trim().parse().map_err(|_| Error::InvalidConfig(format!("BREGOPT_SEED={s:?} is not an integer")))?;
    }
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Grid,
    GoldenSection,
    ProjectedDescentLong,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    #[serde(with = "decimal::point")]
    pub argmin: Point,
    pub method: OracleMethod,
    pub resolution: f64,
}

/// Brute-force `min F` independent of the prox machinery.
///
/// One dimension: grid scan at `resolution`, then golden section in the best
/// cell. Two free dimensions: grid scan, then a finer grid around the best
/// point. Otherwise: projected subgradient descent with diminishing steps for
/// `10⁶` iterations, keeping the best iterate.
pub fn brute_force_min(problem: &ProblemInstance, domain_box: (f64, f64), resolution: f64) -> Result<OracleResult> {
    let (lo, hi) = domain_box;
    if !(hi > lo) || !(resolution > 0.0) {
        return Err(Error::InvalidConfig("empty box or nonpositive resolution".into()));
    }
    if resolution > (hi - lo) / 4.0 {
        return Err(Error::InvalidConfig(format!("resolution {resolution} is too coarse for the box [{lo}, {hi}]")));
    }
    let d = problem.dimension();
    let f = |x: &Point| problem.objective(x);
    let free = problem.regularizer.constraint == Constraint::Free;
    if d == 1 && free {
        let n = ((hi - lo) / resolution).ceil() as usize;
        let (mut best, mut bv) = (lo, f64::INFINITY);
        for k in 0..=n {
            let t = lo + (hi - lo) * k as f64 / n as f64;
            let v = f(&Point::from_element(1, t));
            if v < bv {
                (best, bv) = (t, v);
            }
        }
        let h = (hi - lo) / n as f64;
        let (t, v) = golden_section(|t| f(&Point::from_element(1, t)), (best - h).max(lo), (best + h).min(hi), 1e-14);
        let (t, v) = if v <= bv { (t, v) } else { (best, bv) };
        return Ok(OracleResult { value: v, argmin: Point::from_element(1, t), method: OracleMethod::GoldenSection, resolution: 1e-14 });
    }
    if d == 2 && free {
        let n = ((hi - lo) / resolution).ceil() as usize;
        if n > 20_000 {
            return Err(Error::InvalidConfig(format!("grid of {n}² points is too fine")));
        }
        let scan = |c: &Point, half: f64, n: usize| {
            let mut best = (f64::INFINITY, c.clone());
            for i in 0..=n {
                for j in 0..=n {
                    let p = Point::from_vec(vec![
                        c[0] - half + 2.0 * half * i as f64 / n as f64,
                        c[1] - half + 2.0 * half * j as f64 / n as f64,
                    ]);
                    let v = f(&p);
                    if v < best.0 {
                        best = (v, p);
                    }
                }
            }
            best
        };
        let mid = (lo + hi) / 2.0;
        let (_, p) = scan(&Point::from_element(2, mid), (hi - lo) / 2.0, n);
        let step = (hi - lo) / n as f64;
        let (v, p) = scan(&p, step, 200);
        return Ok(OracleResult { value: v, argmin: p, method: OracleMethod::Grid, resolution: step / 100.0 });
    }
    projected_descent(problem, 1_000_000)
}

fn projected_descent(problem: &ProblemInstance, iterations: usize) -> Result<OracleResult> {
    let c = problem.regularizer.constraint;
    let f = |x: &Point| problem.objective(x);
    let mut x = c.project(&problem.x0);
    let mut best = (f(&x), x.clone());
    let floor = 1e-300;
    let mut last_step = 0.0;
    for k in 0..iterations {
        // Entropy gradients diverge at the boundary; evaluate them slightly inside.
        let inside = if problem.phi.is_orthant_domain() { x.map(|v| v.max(floor)) } else { x.clone() };
        let g = problem.f_subgradient(&inside) + problem.regularizer.penalty_subgradient(&inside)?;
        let gn = g.norm();
        if gn == 0.0 {
            break;
        }
        last_step = 0.1 / ((k + 1) as f64).sqrt();
        x = c.project(&(&x - &g * (last_step / gn)));
        let v = f(&x);
        if v < best.0 {
            best = (v, x.clone());
        }
    }
    Ok(OracleResult { value: best.0, argmin: best.1, method: OracleMethod::ProjectedDescentLong, resolution: last_step })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub problem_id: String,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Random points in `int dom Φ ∩ dom r` around `x0`.
pub fn sample_points<R: Rng + ?Sized>(problem: &ProblemInstance, n: usize, rng: &mut R) -> Vec<Point> {
    let x0 = &problem.x0;
    let d = x0.len();
    let spread = 1.0 + x0.norm();
    (0..n)
        .map(|_| {
            let z = Point::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
            match problem.regularizer.constraint {
                Constraint::Simplex => {
                    let e = Point::from_fn(d, |i, _| x0[i].ln() + 1.5 * z[i]).map(f64::exp);
                    &e / e.sum()
                }
                _ if problem.phi.is_orthant_domain() => Point::from_fn(d, |i, _| x0[i] * z[i].exp()),
                Constraint::Ball { .. } => problem.regularizer.constraint.project(&(x0 + &z * spread)),
                Constraint::Free => x0 + &z * spread,
            }
        })
        .collect()
}

/// Runs every verifier that applies to the instance's regime.
pub fn validate<R: Rng + ?Sized>(problem: &ProblemInstance, n_pairs: usize, rng: &mut R) -> ValidationReport {
    let mut checks = Vec::new();
    let mut push = |name: &str, r: Result<(bool, String)>| {
        let (pass, detail) = r.unwrap_or_else(|e| (false, e.to_string()));
        checks.push(Check { name: name.into(), pass, detail });
    };
    push("shape", problem.check().map(|_| (true, "x0 feasible, data consistent".into())));
    let phi = &problem.phi;
    let oracle = &problem.oracle;
    let xs = sample_points(problem, n_pairs, rng);
    let ys = sample_points(problem, n_pairs, rng);
    let pairs: Vec<(Point, Point)> = xs.iter().cloned().zip(ys.iter().cloned()).collect();

    push(
        "bregman_positive",
        pairs.iter().try_fold(f64::INFINITY, |m, (x, y)| phi.bregman(y, x).map(|d| m.min(d))).map(|m| (m > 0.0, format!("min D = {m:e}"))),
    );
    if let Some(sc) = phi.strong_convexity() {
        let one_strong = problem.regularizer.constraint == Constraint::Simplex || phi.entropy_scale().is_none();
        if one_strong {
            push(
                "strong_convexity",
                pairs
                    .iter()
                    .try_fold(f64::INFINITY, |m, (x, y)| {
                        let d = phi.bregman(y, x)?;
                        let n = sc.norm.norm(&(y - x));
                        Ok(m.min(d - 0.5 * sc.modulus * n * n + 1e-12 * (1.0 + phi.value(x).abs() + phi.value(y).abs())))
                    })
                    .map(|m| (m >= 0.0, format!("min slack {m:e}"))),
            );
        }
    }

    if oracle.regime != Regime::B || oracle.support().is_some() {
        push(
            "one_sided",
            pairs
                .iter()
                .map(|(x, y)| models::verify_one_sided(oracle, phi, x, y, 10_000, rng))
                .collect::<Result<Vec<_>>>()
                .map(|rs| (rs.iter().all(|r| r.pass), format!("max overshoot − bound {:e}", rs.iter().map(|r| r.mean_overshoot - r.bound_rhs).fold(f64::NEG_INFINITY, f64::max)))),
        );
    }
    if oracle.support().is_some() && !oracle.constants.lip_per_sample.is_empty() {
        push(
            "lipschitz",
            models::verify_lipschitz(oracle, phi, &pairs).map(|r| (r.pass, format!("max ratio / L(ξ) = {:.6}, rms L = {:.6}", r.max_relative, r.rms_lipschitz))),
        );
    }
    if oracle.support().is_some() && oracle.regime != Regime::B {
        let triples: Vec<_> = xs.iter().zip(&ys).zip(ys.iter().rev()).map(|((x, y1), y2)| (x.clone(), y1.clone(), y2.clone())).collect();
        push("model_convexity", models::verify_model_convexity(oracle, &triples).map(|w| (w <= 1e-12, format!("worst midpoint violation {w:e}"))));
    }
    if oracle.regime == Regime::B {
        push(
            "relative_smoothness",
            models::verify_relative_smoothness(oracle, phi, &pairs).map(|r| {
                (r.pass, format!("lower {:e}, upper {:e}", r.max_lower_violation, r.max_upper_violation))
            }),
        );
        push(
            "variance",
            xs.iter()
                .take(5)
                .map(|x| models::verify_variance(oracle, phi, x, 10_000, rng))
                .collect::<Result<Vec<_>>>()
                .map(|rs| (rs.iter().all(|r| r.pass), format!("max E‖G − ∇f‖² = {:.6} vs σ²/2 = {:.6}", rs.iter().map(|r| r.second_moment).fold(0.0, f64::max), rs[0].bound))),
        );
        push(
            "phi_one_strongly_convex",
            Ok(match phi.strong_convexity() {
                Some(sc) => (sc.modulus >= 1.0, format!("modulus {}", sc.modulus)),
                None => (false, "no declared modulus".into()),
            }),
        );
    }
    if let OracleData::Saddle { radius, .. } = &oracle.data {
        let cands: Vec<Point> = ys.iter().map(|y| y * (*radius / (y.norm() + 1e-300))).collect();
        push(
            "saddle_argmax",
            xs.iter().try_fold(true, |ok, x| models::verify_saddle_argmax(oracle, x, &cands).map(|b| ok && b)).map(|b| (b, "ŵ maximizes over the ball".into())),
        );
    }
    if oracle.regime == Regime::C && oracle.constants.mu > 0.0 {
        let mu = problem.regularizer.mu_relative(phi);
        push("relative_strong_convexity", Ok((mu >= oracle.constants.mu, format!("r is {mu}-strongly convex relative to Φ, declared μ = {}", oracle.constants.mu))));
    }
    if let Some(opt) = &problem.optimum {
        push(
            "optimum",
            Ok({
                let v = problem.objective(&opt.x_star);
                let ok = (v - opt.f_star).abs() <= 1e-10 * (1.0 + v.abs()) && xs.iter().all(|x| problem.objective(x) >= opt.f_star - 1e-12);
                (ok, format!("F(x*) = {v}, F* = {}", opt.f_star))
            }),
        );
    }

    // Three-point certificate on a few prox steps from sampled points.
    let lambda = problem.default_lambda();
    let eta = 0.5 * lambda;
    let mut worst = f64::INFINITY;
    let mut scale = 0.0_f64;
    let result = (|| -> Result<()> {
        for x in xs.iter().take(10) {
            let xi = oracle.sample(rng);
            let model = oracle.model_at(x, &xi)?;
            let step = subproblem::prox_step(&model, &problem.regularizer, phi, x, eta, oracle.constants.rho, &ProxOptions::default())?;
            let probes = subproblem::random_probes(&problem.regularizer, phi, &step.minimizer, 100, rng);
            let g = |y: &Point| eta * (model.value(y) + problem.regularizer.value(y));
            let rep = subproblem::check_three_point(g, phi, x, &step.minimizer, &probes, eta * oracle.constants.rho)?;
            worst = worst.min(rep.min_residual / (1.0 + rep.scale));
            scale = scale.max(rep.scale);
        }
        Ok(())
    })();
    push("three_point", result.map(|_| (worst >= -1e-8, format!("min relative residual {worst:e}"))));

    ValidationReport { problem_id: problem.id.clone(), checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn registry_instances_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for p in registry() {
            let rep = validate(&p, 200, &mut rng);
            for c in &rep.checks {
                assert!(c.pass, "{} {}: {}", p.id, c.name, c.detail);
            }
        }
    }

    #[test]
    fn p1_constants_match_closed_forms() {
        let p = p1();
        let OracleData::ProxLinear { rows } = &p.oracle.data else { panic!() };
        let mean_l2 = rows.iter().map(|r| r.a.norm_squared()).sum::<f64>() / rows.len() as f64;
        assert!((p.constants().tau - 4.0 / 3.0 * mean_l2).abs() < 1e-15);
        for (r, l) in rows.iter().zip(&p.constants().lip_per_sample) {
            assert_eq!(*l, 2.0_f64.sqrt() * r.a.norm_squared());
        }
        assert_eq!(p.default_lambda(), 1.0 / (2.0 * p.constants().tau));
    }

    #[test]
    fn json_round_trip_is_exact() {
        for p in registry() {
            let back = ProblemInstance::from_json(&p.to_json().unwrap()).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn brute_force_examples() {
        let p3 = p3();
        let o = brute_force_min(&p3, (0.0, 1.0), 1e-3).unwrap();
        let opt = p3.optimum.as_ref().unwrap();
        assert!((o.value - opt.f_star).abs() < 1e-6, "{} vs {}", o.value, opt.f_star);
        assert_eq!(o.argmin.imax(), opt.x_star.imax());

        let p1 = p1();
        let o = brute_force_min(&p1, (-3.0, 3.0), 1e-3).unwrap();
        // The minimum of a sum of |a²x² − b| terms sits at one of the kinks ±√b/a.
        let OracleData::ProxLinear { rows } = &p1.oracle.data else { panic!() };
        let best_kink = rows.iter().map(|r| p1.objective(&Point::from_element(1, r.b.sqrt() / r.a[0]))).fold(f64::INFINITY, f64::min);
        assert!((o.value - best_kink).abs() < 1e-12);

        let p5 = p5();
        let o = brute_force_min(&p5, (-2.0, 2.0), 1e-3).unwrap();
        assert!((o.value - p5.optimum.as_ref().unwrap().f_star).abs() < 1e-9);
        assert!(matches!(brute_force_min(&p5, (-2.0, 2.0), 1.5), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn p4_optimum_is_stationary() {
        let p = p4();
        let opt = p.optimum.as_ref().unwrap();
        let o = brute_force_min(&p, (0.0, 1.0), 1e-3).unwrap();
        assert!(o.value >= opt.f_star - 1e-12 && o.value - opt.f_star < 1e-4);
    }

    #[test]
    fn exact_prox_agrees_with_iterative_prox() {
        use crate::envelope::{self, EnvelopeOptions, FnComposite};
        let p = p5();
        let abar = p.mean_row().unwrap();
        let f = move |x: &Point| abar.dot(x) + 0.1 * x.norm();
        let g = p.oracle.clone();
        let plain = FnComposite { dim: 2, f, grad: move |x: &Point| g.f_subgradient(x), hessian: None, regularizer: p.regularizer.clone(), weak: 0.0 };
        let x = Point::from_vec(vec![0.3, -0.7]);
        let o = EnvelopeOptions::default();
        let a = envelope::bregman_prox_point(&p, &p.phi, &x, 1.0, &o).unwrap();
        let b = envelope::bregman_prox_point(&plain, &p.phi, &x, 1.0, &o).unwrap();
        assert!((a - b).norm() < 1e-7);
    }
}
