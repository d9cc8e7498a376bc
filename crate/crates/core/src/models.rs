//! Stochastic one-sided model oracles.
//!
//! A [`ModelOracle`] bundles the data of `f(x) = E_ξ f(x, ξ)`, a sampler for
//! `ξ`, the local models `f_x(·, ξ)` built at a base point, and the constants
//! `(τ, ρ, μ, 𝖫, M, σ)` claimed for them. The `verify_*` functions test those
//! claims numerically; nothing here estimates a constant implicitly.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::decimal;
use crate::error::{Error, Result};
use crate::legendre::LegendreFunction;
use crate::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    ProximalPoint,
    LinearMirror,
    ProxLinear,
    Saddle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    A,
    B,
    C,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Regime::A => "A",
            Regime::B => "B",
            Regime::C => "C",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    #[serde(with = "decimal::scalar")]
    pub tau: f64,
    #[serde(with = "decimal::scalar")]
    pub rho: f64,
    #[serde(with = "decimal::scalar")]
    pub mu: f64,
    /// `𝖫 >= sqrt(E L(ξ)²)`.
    #[serde(with = "decimal::scalar")]
    pub lip_bound: f64,
    #[serde(with = "decimal::scalar")]
    pub smooth_m: f64,
    #[serde(with = "decimal::scalar")]
    pub sigma: f64,
    /// Claimed `L(ξ)` for each support point of a finite sample space.
    #[serde(with = "decimal::vec", default)]
    pub lip_per_sample: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleSpace {
    /// `ξ` is an index drawn with the given weights.
    Finite {
        #[serde(with = "decimal::vec")]
        weights: Vec<f64>,
    },
    /// `ξ` is additive noise `N(0, std² I)` on the gradient.
    Gaussian {
        dim: usize,
        #[serde(with = "decimal::scalar")]
        std: f64,
    },
    /// `ξ` is additive noise drawn from a finite, mean-zero set of vectors.
    FiniteNoise {
        #[serde(with = "decimal::points")]
        vectors: Vec<Point>,
        #[serde(with = "decimal::vec")]
        weights: Vec<f64>,
    },
}

/// One realization of `ξ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub index: usize,
    pub noise: Option<Point>,
}

impl Sample {
    pub fn index(index: usize) -> Self {
        Sample { index, noise: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataRow {
    #[serde(with = "decimal::point")]
    pub a: Point,
    #[serde(with = "decimal::scalar")]
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleData {
    /// `f(x, ξ) = |⟨a_ξ, x⟩² − b_ξ|` with prox-linear models.
    ProxLinear { rows: Vec<DataRow> },
    /// `f(x, ξ) = |⟨a_ξ, x⟩ − b_ξ|` used as its own model.
    AbsLinear { rows: Vec<DataRow> },
    /// `f(x) = mean_i (⟨a_i, x⟩² − b_i)²` with noisy gradients.
    SmoothQuartic { rows: Vec<DataRow> },
    /// `f(x, ξ) = ⟨c_ξ, x⟩`.
    LinearCost {
        #[serde(with = "decimal::points")]
        costs: Vec<Point>,
    },
    /// `f(x) = ½⟨x, Q x⟩ − ⟨q, x⟩` with exact (or noisy) gradients.
    Quadratic {
        #[serde(with = "decimal::points")]
        matrix: Vec<Point>,
        #[serde(with = "decimal::point")]
        linear: Point,
    },
    /// `f(x, ξ) = max_{‖w‖ <= radius} ⟨a_ξ + w, x⟩`.
    Saddle {
        #[serde(with = "decimal::points")]
        rows: Vec<Point>,
        #[serde(with = "decimal::scalar")]
        radius: f64,
    },
}

/// The model `y ↦ f_x(y, ξ)` frozen at a base point.
#[derive(Clone, Debug, PartialEq)]
pub enum LocalModel {
    /// `value + ⟨slope, y − base⟩`
    Affine { base: Point, value: f64, slope: Point },
    /// `weight · |offset + ⟨slope, y − base⟩|`
    AbsAffine { base: Point, weight: f64, offset: f64, slope: Point },
}

impl LocalModel {
    /// The inner affine argument `offset + ⟨slope, y − base⟩` (or the affine value).
    pub fn affine_part(&self, y: &Point) -> f64 {
        match self {
            LocalModel::Affine { base, value, slope } => value + slope.dot(&(y - base)),
            LocalModel::AbsAffine { base, offset, slope, .. } => offset + slope.dot(&(y - base)),
        }
    }

    pub fn value(&self, y: &Point) -> f64 {
        match self {
            LocalModel::Affine { .. } => self.affine_part(y),
            LocalModel::AbsAffine { weight, .. } => weight * self.affine_part(y).abs(),
        }
    }

    /// A subgradient; at a kink of `|·|` the zero-slope selection.
    pub fn subgradient(&self, y: &Point) -> Point {
        match self {
            LocalModel::Affine { slope, .. } => slope.clone(),
            LocalModel::AbsAffine { weight, slope, .. } => {
                let s = self.affine_part(y);
                if s > 0.0 {
                    slope * *weight
                } else if s < 0.0 {
                    slope * -*weight
                } else {
                    Point::zeros(slope.len())
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            LocalModel::Affine { slope, .. } | LocalModel::AbsAffine { slope, .. } => slope.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelOracle {
    pub regime: Regime,
    pub constants: ModelConstants,
    pub sample_space: SampleSpace,
    pub data: OracleData,
}

fn sign0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl ModelOracle {
    pub fn family(&self) -> ModelFamily {
        match self.data {
            OracleData::ProxLinear { .. } => ModelFamily::ProxLinear,
            OracleData::AbsLinear { .. } => ModelFamily::ProximalPoint,
            OracleData::SmoothQuartic { .. } | OracleData::LinearCost { .. } | OracleData::Quadratic { .. } => {
                ModelFamily::LinearMirror
            }
            OracleData::Saddle { .. } => ModelFamily::Saddle,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.data {
            OracleData::ProxLinear { rows } | OracleData::AbsLinear { rows } | OracleData::SmoothQuartic { rows } => {
                rows[0].a.len()
            }
            OracleData::LinearCost { costs } => costs[0].len(),
            OracleData::Quadratic { linear, .. } => linear.len(),
            OracleData::Saddle { rows, .. } => rows[0].len(),
        }
    }

    /// Number of data points `ξ` indexes into, if any.
    fn support_len(&self) -> Option<usize> {
        match &self.data {
            OracleData::ProxLinear { rows } | OracleData::AbsLinear { rows } => Some(rows.len()),
            OracleData::LinearCost { costs } => Some(costs.len()),
            OracleData::Saddle { rows, .. } => Some(rows.len()),
            OracleData::SmoothQuartic { .. } | OracleData::Quadratic { .. } => None,
        }
    }

    /// Checks shapes, weights and the declared constants for internal consistency.
    pub fn validate_shape(&self) -> Result<()> {
        let d = self.dim();
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let check_weights = |w: &[f64]| -> Result<()> {
            if w.is_empty() || w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || (w.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidConfig(format!("sample weights must be a probability vector: {w:?}")));
            }
            Ok(())
        };
        match &self.sample_space {
            SampleSpace::Finite { weights } => {
                check_weights(weights)?;
                if self.support_len() != Some(weights.len()) {
                    return bad(format!("{} weights for data of support {:?}", weights.len(), self.support_len()));
                }
            }
            SampleSpace::Gaussian { dim, std } => {
                if *dim != d || !(*std >= 0.0) {
                    return bad(format!("gaussian noise must have dim {d} and std >= 0"));
                }
                if self.support_len().is_some() {
                    return bad("gaussian noise applies only to gradient oracles".into());
                }
            }
            SampleSpace::FiniteNoise { vectors, weights } => {
                check_weights(weights)?;
                if vectors.len() != weights.len() || vectors.iter().any(|v| v.len() != d) {
                    return bad("noise vectors must match weights and dimension".into());
                }
                let mean = vectors.iter().zip(weights).fold(Point::zeros(d), |acc, (v, w)| acc + v * *w);
                if mean.norm() > 1e-12 {
                    return bad(format!("noise must have mean zero, got {mean:?}"));
                }
                if self.support_len().is_some() {
                    return bad("finite noise applies only to gradient oracles".into());
                }
            }
        }
        let same_dim = match &self.data {
            OracleData::ProxLinear { rows } | OracleData::AbsLinear { rows } | OracleData::SmoothQuartic { rows } => {
                rows.iter().all(|r| r.a.len() == d)
            }
            OracleData::LinearCost { costs } => costs.iter().all(|c| c.len() == d),
            OracleData::Quadratic { matrix, .. } => matrix.len() == d && matrix.iter().all(|r| r.len() == d),
            OracleData::Saddle { rows, radius } => *radius >= 0.0 && rows.iter().all(|r| r.len() == d),
        };
        if !same_dim {
            return bad("inconsistent data dimensions".into());
        }
        let c = &self.constants;
        for (name, v) in [("tau", c.tau), ("rho", c.rho), ("mu", c.mu), ("smooth_m", c.smooth_m), ("sigma", c.sigma), ("lip_bound", c.lip_bound)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("constant {name} must be finite and nonnegative, got {v}"));
            }
        }
        if !c.lip_per_sample.is_empty() && Some(c.lip_per_sample.len()) != self.support_len() {
            return bad("one Lipschitz constant per support point is required".into());
        }
        if self.regime == Regime::C && (c.tau != 0.0 || c.rho != 0.0) {
            return bad("regime C requires tau = rho = 0".into());
        }
        Ok(())
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match &self.sample_space {
            SampleSpace::Finite { weights } | SampleSpace::FiniteNoise { weights, .. } => Some(weights),
            SampleSpace::Gaussian { .. } => None,
        }
    }

    /// Draws one `ξ`. Identical generator states give identical draws.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Sample {
        match &self.sample_space {
            SampleSpace::Finite { weights } => Sample::index(draw_index(weights, rng)),
            SampleSpace::FiniteNoise { vectors, weights } => {
                let i = draw_index(weights, rng);
                Sample { index: i, noise: Some(vectors[i].clone()) }
            }
            SampleSpace::Gaussian { std, .. } if *std == 0.0 => Sample::index(0),
            SampleSpace::Gaussian { dim, std } => {
                let n = Point::from_fn(*dim, |_, _| {
                    let z: f64 = StandardNormal.sample(rng);
                    std * z
                });
                Sample { index: 0, noise: Some(n) }
            }
        }
    }

    /// `f(x, ξ)`; for gradient oracles the data term does not depend on `ξ`.
    pub fn f_sample(&self, x: &Point, xi: &Sample) -> f64 {
        match &self.data {
            OracleData::ProxLinear { rows } => {
                let r = &rows[xi.index];
                (r.a.dot(x).powi(2) - r.b).abs()
            }
            OracleData::AbsLinear { rows } => {
                let r = &rows[xi.index];
                (r.a.dot(x) - r.b).abs()
            }
            OracleData::LinearCost { costs } => costs[xi.index].dot(x),
            OracleData::Saddle { rows, radius } => rows[xi.index].dot(x) + radius * x.norm(),
            OracleData::SmoothQuartic { .. } | OracleData::Quadratic { .. } => self.f_value(x),
        }
    }

    /// Exact `f(x) = E f(x, ξ)`.
    pub fn f_value(&self, x: &Point) -> f64 {
        match &self.data {
            OracleData::SmoothQuartic { rows } => {
                rows.iter().map(|r| (r.a.dot(x).powi(2) - r.b).powi(2)).sum::<f64>() / rows.len() as f64
            }
            OracleData::Quadratic { matrix, linear } => {
                let q = quadratic_matrix(matrix);
                0.5 * x.dot(&(&q * x)) - linear.dot(x)
            }
            _ => {
                let w = self.weights().expect("indexed data has finite weights");
                w.iter().enumerate().map(|(i, wi)| wi * self.f_sample(x, &Sample::index(i))).sum()
            }
        }
    }

    /// A subgradient of `f` at `x` (zero-slope selection at kinks).
    pub fn f_subgradient(&self, x: &Point) -> Point {
        let d = x.len();
        match &self.data {
            OracleData::ProxLinear { rows } => {
                let w = self.weights().expect("finite");
                rows.iter().zip(w).fold(Point::zeros(d), |acc, (r, wi)| {
                    let ax = r.a.dot(x);
                    acc + &r.a * (wi * sign0(ax * ax - r.b) * 2.0 * ax)
                })
            }
            OracleData::AbsLinear { rows } => {
                let w = self.weights().expect("finite");
                rows.iter().zip(w).fold(Point::zeros(d), |acc, (r, wi)| acc + &r.a * (wi * sign0(r.a.dot(x) - r.b)))
            }
            OracleData::SmoothQuartic { rows } => {
                let m = rows.len() as f64;
                rows.iter().fold(Point::zeros(d), |acc, r| {
                    let ax = r.a.dot(x);
                    acc + &r.a * (4.0 * (ax * ax - r.b) * ax / m)
                })
            }
            OracleData::LinearCost { costs } => {
                let w = self.weights().expect("finite");
                costs.iter().zip(w).fold(Point::zeros(d), |acc, (c, wi)| acc + c * *wi)
            }
            OracleData::Quadratic { matrix, linear } => quadratic_matrix(matrix) * x - linear,
            OracleData::Saddle { rows, radius } => {
                let w = self.weights().expect("finite");
                let mean = rows.iter().zip(w).fold(Point::zeros(d), |acc, (a, wi)| acc + a * *wi);
                mean + ball_argmax(x, *radius)
            }
        }
    }

    /// `∇²f(x)` where `f` is twice differentiable everywhere.
    pub fn f_hessian(&self, x: &Point) -> Option<DMatrix<f64>> {
        let d = x.len();
        match &self.data {
            OracleData::SmoothQuartic { rows } => {
                let m = rows.len() as f64;
                Some(rows.iter().fold(DMatrix::zeros(d, d), |acc, r| {
                    let ax = r.a.dot(x);
                    acc + &r.a * r.a.transpose() * (4.0 * (3.0 * ax * ax - r.b) / m)
                }))
            }
            OracleData::Quadratic { matrix, .. } => Some(quadratic_matrix(matrix)),
            OracleData::LinearCost { .. } => Some(DMatrix::zeros(d, d)),
            _ => None,
        }
    }

    pub fn f_smooth(&self) -> bool {
        matches!(self.data, OracleData::SmoothQuartic { .. } | OracleData::Quadratic { .. } | OracleData::LinearCost { .. })
    }

    /// The maximizer `ŵ(x, ξ)` of the inner problem for saddle oracles.
    pub fn saddle_argmax(&self, x: &Point) -> Result<Point> {
        match &self.data {
            OracleData::Saddle { radius, .. } => Ok(ball_argmax(x, *radius)),
            _ => Err(Error::Oracle("not a saddle oracle".into())),
        }
    }

    /// The local model `f_x(·, ξ)`.
    pub fn model_at(&self, x: &Point, xi: &Sample) -> Result<LocalModel> {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::DomainViolation(format!("base point {x:?} is not admissible")));
        }
        let base = x.clone();
        let model = match &self.data {
            OracleData::ProxLinear { rows } => {
                let r = row(rows, xi)?;
                let ax = r.a.dot(x);
                LocalModel::AbsAffine { base, weight: 1.0, offset: ax * ax - r.b, slope: &r.a * (2.0 * ax) }
            }
            OracleData::AbsLinear { rows } => {
                let r = row(rows, xi)?;
                LocalModel::AbsAffine { base, weight: 1.0, offset: r.a.dot(x) - r.b, slope: r.a.clone() }
            }
            OracleData::LinearCost { costs } => {
                let c = costs.get(xi.index).ok_or_else(|| Error::Oracle(format!("sample {} out of range", xi.index)))?;
                LocalModel::Affine { base, value: self.f_value(x), slope: c.clone() }
            }
            OracleData::SmoothQuartic { .. } | OracleData::Quadratic { .. } => {
                let mut g = self.f_subgradient(x);
                if let Some(n) = &xi.noise {
                    g += n;
                }
                LocalModel::Affine { base, value: self.f_value(x), slope: g }
            }
            OracleData::Saddle { rows, radius } => {
                let a = rows.get(xi.index).ok_or_else(|| Error::Oracle(format!("sample {} out of range", xi.index)))?;
                let slope = a + ball_argmax(x, *radius);
                LocalModel::Affine { value: slope.dot(x), base, slope }
            }
        };
        Ok(model)
    }

    pub fn model_value(&self, x: &Point, y: &Point, xi: &Sample) -> Result<f64> {
        Ok(self.model_at(x, xi)?.value(y))
    }

    pub fn model_subgradient(&self, x: &Point, y: &Point, xi: &Sample) -> Result<Point> {
        Ok(self.model_at(x, xi)?.subgradient(y))
    }

    /// Enumerates the finite support as `(weight, sample)` pairs.
    pub fn support(&self) -> Option<Vec<(f64, Sample)>> {
        match &self.sample_space {
            SampleSpace::Finite { weights } => Some(weights.iter().enumerate().map(|(i, w)| (*w, Sample::index(i))).collect()),
            SampleSpace::FiniteNoise { vectors, weights } => Some(
                weights.iter().zip(vectors).enumerate().map(|(i, (w, v))| (*w, Sample { index: i, noise: Some(v.clone()) })).collect(),
            ),
            SampleSpace::Gaussian { .. } => None,
        }
    }

    /// `sqrt(E L(ξ)²)` from the per-sample claims.
    pub fn rms_lipschitz(&self) -> Option<f64> {
        let w = self.weights()?;
        let l = &self.constants.lip_per_sample;
        (l.len() == w.len()).then(|| w.iter().zip(l).map(|(wi, li)| wi * li * li).sum::<f64>().sqrt())
    }
}

fn row<'a>(rows: &'a [DataRow], xi: &Sample) -> Result<&'a DataRow> {
    rows.get(xi.index).ok_or_else(|| Error::Oracle(format!("sample {} out of range", xi.index)))
}

fn draw_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let n = weights.len();
    if weights.iter().all(|w| *w == weights[0]) {
        rng.random_range(0..n)
    } else {
        WeightedIndex::new(weights).expect("validated weights").sample(rng)
    }
}

fn quadratic_matrix(rows: &[Point]) -> DMatrix<f64> {
    let d = rows.len();
    DMatrix::from_fn(d, d, |i, j| rows[i][j])
}

/// `argmax_{‖w‖ <= R} ⟨w, x⟩ = R x/‖x‖`, with `0` at `x = 0`.
pub fn ball_argmax(x: &Point, radius: f64) -> Point {
    let n = x.norm();
    if n == 0.0 {
        Point::zeros(x.len())
    } else {
        x * (radius / n)
    }
}

/// Mean and standard error of a sample.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OneSidedReport {
    pub mean_gap_at_x: f64,
    pub mean_overshoot: f64,
    pub bound_rhs: f64,
    pub std_error: f64,
    pub exact: bool,
    pub pass: bool,
}

/// Checks `E[f_x(x, ξ)] = f(x)` and `E[f_x(y, ξ) − f(y)] <= τ D_Φ(y, x)`.
///
/// Finite sample spaces are averaged exactly; Gaussian ones by Monte Carlo
/// with `n_samples` draws, and then pass within three standard errors.
pub fn verify_one_sided<R: Rng + ?Sized>(
    oracle: &ModelOracle,
    phi: &LegendreFunction,
    x: &Point,
    y: &Point,
    n_samples: usize,
    rng: &mut R,
) -> Result<OneSidedReport> {
    let fx = oracle.f_value(x);
    let fy = oracle.f_value(y);
    let tau = if oracle.regime == Regime::C { 0.0 } else { oracle.constants.tau };
    let bound_rhs = tau * phi.bregman(y, x)?;
    let scale = 1.0 + fx.abs() + fy.abs();
    let (gap, over, se, exact) = match oracle.support() {
        Some(support) => {
            let mut gap = 0.0;
            let mut over = 0.0;
            for (w, xi) in &support {
                let m = oracle.model_at(x, xi)?;
                gap += w * (m.value(x) - fx);
                over += w * (m.value(y) - fy);
            }
            (gap, over, 0.0, true)
        }
        None => {
            let mut gaps = Vec::with_capacity(n_samples);
            let mut overs = Vec::with_capacity(n_samples);
            for _ in 0..n_samples {
                let xi = oracle.sample(rng);
                let m = oracle.model_at(x, &xi)?;
                gaps.push(m.value(x) - fx);
                overs.push(m.value(y) - fy);
            }
            let (g, _) = mean_and_se(&gaps);
            let (o, se) = mean_and_se(&overs);
            (g, o, se, false)
        }
    };
    let tol = 1e-12 * scale;
    let pass = gap.abs() <= tol + 3.0 * se && over <= bound_rhs + tol + 3.0 * se;
    Ok(OneSidedReport { mean_gap_at_x: gap, mean_overshoot: over, bound_rhs, std_error: se, exact, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LipschitzReport {
    /// Largest `(f_x(x, ξ) − f_x(y, ξ)) / sqrt(D_Φ(y, x))` seen.
    pub max_ratio: f64,
    /// Largest ratio divided by the claimed `L(ξ)` of the same sample.
    pub max_relative: f64,
    pub rms_lipschitz: f64,
    pub claimed_l: f64,
    pub pairs_checked: usize,
    pub pass: bool,
}

/// Checks `f_x(x, ξ) − f_x(y, ξ) <= L(ξ) sqrt(D_Φ(y, x))` on every support point and
/// `sqrt(E L(ξ)²) <= 𝖫`. Pairs with `x = y` are skipped.
pub fn verify_lipschitz(oracle: &ModelOracle, phi: &LegendreFunction, pairs: &[(Point, Point)]) -> Result<LipschitzReport> {
    let support = oracle.support().ok_or_else(|| Error::Oracle("Lipschitz check needs a finite sample space".into()))?;
    let lips = &oracle.constants.lip_per_sample;
    if lips.len() != support.len() {
        return Err(Error::Oracle("no per-sample Lipschitz constants declared".into()));
    }
    let mut max_ratio = 0.0_f64;
    let mut max_relative = 0.0_f64;
    let mut checked = 0;
    for (x, y) in pairs {
        let d = phi.bregman(y, x)?;
        if x == y || d == 0.0 {
            continue;
        }
        checked += 1;
        let root = d.sqrt();
        for ((_, xi), l) in support.iter().zip(lips) {
            let m = oracle.model_at(x, xi)?;
            let diff = m.value(x) - m.value(y);
            let slack = 1e-12 * (1.0 + m.value(x).abs() + m.value(y).abs());
            max_ratio = max_ratio.max(diff / root);
            let rel = if *l > 0.0 { (diff - slack).max(0.0) / (l * root) } else if diff > slack { f64::INFINITY } else { 0.0 };
            max_relative = max_relative.max(rel);
        }
    }
    let rms = oracle.rms_lipschitz().unwrap_or(f64::INFINITY);
    let claimed = oracle.constants.lip_bound;
    let pass = max_relative <= 1.0 && rms <= claimed * (1.0 + 1e-12);
    Ok(LipschitzReport { max_ratio, max_relative, rms_lipschitz: rms, claimed_l: claimed, pairs_checked: checked, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothnessReport {
    /// Largest `−τ D − (f(y) − f(x) − ⟨∇f(x), y − x⟩)`; should be `<= 0`.
    pub max_lower_violation: f64,
    /// Largest `(f(y) − f(x) − ⟨∇f(x), y − x⟩) − M D`; should be `<= 0`.
    pub max_upper_violation: f64,
    pub pass: bool,
}

/// Checks `−τ D_Φ(y, x) <= f(y) − f(x) − ⟨∇f(x), y − x⟩ <= M D_Φ(y, x)`.
pub fn verify_relative_smoothness(oracle: &ModelOracle, phi: &LegendreFunction, pairs: &[(Point, Point)]) -> Result<SmoothnessReport> {
    if !oracle.f_smooth() {
        return Err(Error::Oracle("relative smoothness needs a differentiable f".into()));
    }
    let c = &oracle.constants;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::NEG_INFINITY;
    let mut pass = true;
    for (x, y) in pairs {
        let fx = oracle.f_value(x);
        let fy = oracle.f_value(y);
        let lin = fy - fx - oracle.f_subgradient(x).dot(&(y - x));
        let d = phi.bregman(y, x)?;
        let lo = -c.tau * d - lin;
        let hi = lin - c.smooth_m * d;
        lower = lower.max(lo);
        upper = upper.max(hi);
        let slack = 1e-9 * (1.0 + fx.abs() + fy.abs());
        pass &= lo <= slack && hi <= slack;
    }
    Ok(SmoothnessReport { max_lower_violation: lower, max_upper_violation: upper, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VarianceReport {
    pub second_moment: f64,
    pub std_error: f64,
    pub bound: f64,
    pub exact: bool,
    pub pass: bool,
}

/// Checks `E‖G(x, ξ) − ∇f(x)‖²_* <= σ²/2`.
pub fn verify_variance<R: Rng + ?Sized>(
    oracle: &ModelOracle,
    phi: &LegendreFunction,
    x: &Point,
    n_samples: usize,
    rng: &mut R,
) -> Result<VarianceReport> {
    let grad = oracle.f_subgradient(x);
    let norm = phi.primal_norm();
    let dev = |xi: &Sample| -> Result<f64> {
        match oracle.model_at(x, xi)? {
            LocalModel::Affine { slope, .. } => Ok(norm.dual_norm(&(slope - &grad)).powi(2)),
            LocalModel::AbsAffine { .. } => Err(Error::Oracle("variance check needs linear models".into())),
        }
    };
    let bound = 0.5 * oracle.constants.sigma.powi(2);
    let (m, se, exact) = match oracle.support() {
        Some(support) => {
            let mut m = 0.0;
            for (w, xi) in &support {
                m += w * dev(xi)?;
            }
            (m, 0.0, true)
        }
        None => {
            let vals = (0..n_samples).map(|_| dev(&oracle.sample(rng))).collect::<Result<Vec<_>>>()?;
            let (m, se) = mean_and_se(&vals);
            (m, se, false)
        }
    };
    let pass = m <= bound * (1.0 + 1e-12) + 3.0 * se;
    Ok(VarianceReport { second_moment: m, std_error: se, bound, exact, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureReport {
    /// Smallest generalized eigenvalue of `∇²f + ρ ∇²Φ` relative to `∇²Φ` seen.
    pub min_eigenvalue: f64,
    pub points_checked: usize,
    pub pass: bool,
}

/// Second-order weak-convexity check `∇²f(x) + ρ ∇²Φ(x) ⪰ 0`.
pub fn verify_second_order(oracle: &ModelOracle, phi: &LegendreFunction, rho: f64, points: &[Point]) -> Result<CurvatureReport> {
    let mut min_eig = f64::INFINITY;
    let mut checked = 0;
    for x in points {
        let Some(hf) = oracle.f_hessian(x) else {
            return Err(Error::Oracle("second-order check needs a C² objective".into()));
        };
        let hp = phi.hessian(x)?;
        let m = &hf + &hp * rho;
        let eig = SymmetricEigen::new(m).eigenvalues.min();
        let scale = 1.0 + hf.norm() + rho * hp.norm();
        min_eig = min_eig.min(eig / scale);
        checked += 1;
    }
    Ok(CurvatureReport { min_eigenvalue: min_eig, points_checked: checked, pass: min_eig >= -1e-12 })
}

/// Midpoint convexity of `y ↦ f_x(y, ξ)` on the given triples `(x, y1, y2)`.
///
/// Returns the largest violation `f(mid) − (f(y1) + f(y2))/2` scaled by the magnitudes.
pub fn verify_model_convexity(oracle: &ModelOracle, triples: &[(Point, Point, Point)]) -> Result<f64> {
    let support = oracle.support().ok_or_else(|| Error::Oracle("convexity check needs a finite sample space".into()))?;
    let mut worst = f64::NEG_INFINITY;
    for (x, y1, y2) in triples {
        let mid = (y1 + y2) * 0.5;
        for (_, xi) in &support {
            let m = oracle.model_at(x, xi)?;
            let (a, b, c) = (m.value(y1), m.value(y2), m.value(&mid));
            worst = worst.max((c - 0.5 * (a + b)) / (1.0 + a.abs() + b.abs()));
        }
    }
    Ok(worst)
}

/// Checks `⟨a_ξ + ŵ, x⟩ >= ⟨a_ξ + w, x⟩` for the given candidates `w ∈ W`.
pub fn verify_saddle_argmax(oracle: &ModelOracle, x: &Point, candidates: &[Point]) -> Result<bool> {
    let OracleData::Saddle { radius, .. } = &oracle.data else {
        return Err(Error::Oracle("not a saddle oracle".into()));
    };
    let w_hat = oracle.saddle_argmax(x)?;
    if w_hat.norm() > radius * (1.0 + 1e-12) {
        return Ok(false);
    }
    let best = w_hat.dot(x);
    Ok(candidates.iter().filter(|w| w.norm() <= *radius).all(|w| w.dot(x) <= best + 1e-9))
}
