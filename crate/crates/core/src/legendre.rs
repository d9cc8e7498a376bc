//! Legendre functions, Bregman divergences and local norms.
//!
//! Every supported function is a nonnegative combination of three building
//! blocks:
//!
//! * radial terms `c ‖x‖^k` with `k >= 2`,
//! * the Boltzmann–Shannon entropy `Σ x_i log x_i` on the nonnegative orthant,
//! * the Burg function `-Σ log x_i` on the open positive orthant.
//!
//! A [`LegendreFunction`] keeps the user-facing description (its [`LegendreKind`])
//! together with the flattened term list used for evaluation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::decimal;
use crate::error::{Error, Result};
use crate::roots;
use crate::Point;

/// Norm in which strong convexity and local norms are measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimalNorm {
    L2,
    L1,
}

impl PrimalNorm {
    pub fn norm(self, v: &Point) -> f64 {
        match self {
            PrimalNorm::L2 => v.norm(),
            PrimalNorm::L1 => v.iter().map(|x| x.abs()).sum(),
        }
    }

    /// The dual norm (`L2` is self-dual, `L1` pairs with `Linf`).
    pub fn dual_norm(self, v: &Point) -> f64 {
        match self {
            PrimalNorm::L2 => v.norm(),
            PrimalNorm::L1 => v.iter().fold(0.0_f64, |m, x| m.max(x.abs())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongConvexity {
    #[serde(with = "decimal::scalar")]
    pub modulus: f64,
    pub norm: PrimalNorm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainDescriptor {
    AllSpace,
    PositiveOrthant,
    OpenPositiveOrthant,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LegendreKind {
    /// `½‖x‖²`
    Euclidean,
    /// `Σ x_i log x_i`
    ShannonEntropy,
    /// `-Σ log x_i`
    Burg,
    /// `Σ a_i (3i+7)/(i+2) ‖x‖^{i+2}` for the growth polynomial `p(u) = Σ a_i u^i`.
    PolyGrowth {
        #[serde(with = "decimal::vec")]
        coeffs: Vec<f64>,
    },
    /// `Σ b_i/(i+2) ‖x‖^{i+2}` for the polynomial `q(u) = Σ b_i u^i`.
    NormPowerSum {
        #[serde(with = "decimal::vec")]
        coeffs: Vec<f64>,
    },
    WeightedSum {
        children: Vec<LegendreFunction>,
        #[serde(with = "decimal::vec")]
        weights: Vec<f64>,
    },
}

#[derive(Clone, Debug, Default, PartialEq)]
struct Terms {
    /// `(coefficient, exponent)` pairs, exponents distinct and `>= 2`.
    radial: Vec<(f64, i32)>,
    entropy: f64,
    burg: f64,
}

impl Terms {
    fn add_radial(&mut self, c: f64, k: i32) {
        if c == 0.0 {
            return;
        }
        match self.radial.iter_mut().find(|(_, e)| *e == k) {
            Some(term) => term.0 += c,
            None => {
                self.radial.push((c, k));
                self.radial.sort_by_key(|&(_, e)| e);
            }
        }
    }

    fn add_scaled(&mut self, other: &Terms, w: f64) {
        for &(c, k) in &other.radial {
            self.add_radial(w * c, k);
        }
        self.entropy += w * other.entropy;
        self.burg += w * other.burg;
    }

    fn is_radial(&self) -> bool {
        self.entropy == 0.0 && self.burg == 0.0
    }

    fn is_separable(&self) -> bool {
        self.radial.iter().all(|&(_, k)| k == 2)
    }

    fn quadratic(&self) -> f64 {
        self.radial.iter().filter(|&&(_, k)| k == 2).map(|&(c, _)| c).sum()
    }
}

#[derive(Serialize, Deserialize)]
struct LegendreSpec {
    #[serde(flatten)]
    kind: LegendreKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    strong_convexity: Option<StrongConvexity>,
}

/// A Legendre function together with its declared strong-convexity modulus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LegendreSpec", into = "LegendreSpec")]
pub struct LegendreFunction {
    kind: LegendreKind,
    strong_convexity: Option<StrongConvexity>,
    domain: DomainDescriptor,
    terms: Terms,
}

impl TryFrom<LegendreSpec> for LegendreFunction {
    type Error = Error;

    fn try_from(spec: LegendreSpec) -> Result<Self> {
        let mut phi = LegendreFunction::from_kind(spec.kind)?;
        if let Some(sc) = spec.strong_convexity {
            phi.strong_convexity = Some(sc);
        }
        Ok(phi)
    }
}

impl From<LegendreFunction> for LegendreSpec {
    fn from(phi: LegendreFunction) -> Self {
        LegendreSpec { kind: phi.kind, strong_convexity: phi.strong_convexity }
    }
}

fn check_coeffs(coeffs: &[f64], what: &str) -> Result<()> {
    if coeffs.iter().any(|c| !c.is_finite() || *c < 0.0) {
        return Err(Error::InvalidCoefficients(format!("{what} coefficients must be finite and nonnegative: {coeffs:?}")));
    }
    if !coeffs.iter().any(|c| *c > 0.0) {
        return Err(Error::InvalidCoefficients(format!("{what} needs at least one positive coefficient")));
    }
    Ok(())
}

impl LegendreFunction {
    pub fn from_kind(kind: LegendreKind) -> Result<Self> {
        let mut terms = Terms::default();
        let (domain, strong_convexity) = match &kind {
            LegendreKind::Euclidean => {
                terms.add_radial(0.5, 2);
                (DomainDescriptor::AllSpace, Some(StrongConvexity { modulus: 1.0, norm: PrimalNorm::L2 }))
            }
            LegendreKind::ShannonEntropy => {
                terms.entropy = 1.0;
                // Pinsker: 1-strongly convex in l1 on the simplex.
                (DomainDescriptor::PositiveOrthant, Some(StrongConvexity { modulus: 1.0, norm: PrimalNorm::L1 }))
            }
            LegendreKind::Burg => {
                terms.burg = 1.0;
                (DomainDescriptor::OpenPositiveOrthant, None)
            }
            LegendreKind::PolyGrowth { coeffs } => {
                check_coeffs(coeffs, "growth polynomial")?;
                for (i, &a) in coeffs.iter().enumerate() {
                    let i_f = i as f64;
                    terms.add_radial(a * (3.0 * i_f + 7.0) / (i_f + 2.0), i as i32 + 2);
                }
                let sc = (coeffs[0] > 0.0).then(|| StrongConvexity { modulus: 7.0 * coeffs[0], norm: PrimalNorm::L2 });
                (DomainDescriptor::AllSpace, sc)
            }
            LegendreKind::NormPowerSum { coeffs } => {
                check_coeffs(coeffs, "norm power")?;
                for (i, &b) in coeffs.iter().enumerate() {
                    terms.add_radial(b / (i as f64 + 2.0), i as i32 + 2);
                }
                let sc = (coeffs[0] > 0.0).then(|| StrongConvexity { modulus: coeffs[0], norm: PrimalNorm::L2 });
                (DomainDescriptor::AllSpace, sc)
            }
            LegendreKind::WeightedSum { children, weights } => {
                if children.is_empty() || children.len() != weights.len() {
                    return Err(Error::InvalidCoefficients("weighted sum needs one weight per child".into()));
                }
                check_coeffs(weights, "weighted sum")?;
                let mut domain = DomainDescriptor::AllSpace;
                let mut modulus = 0.0;
                let mut norms = Vec::new();
                for (child, &w) in children.iter().zip(weights) {
                    terms.add_scaled(&child.terms, w);
                    domain = match (domain, child.domain) {
                        (DomainDescriptor::OpenPositiveOrthant, _) | (_, DomainDescriptor::OpenPositiveOrthant) => {
                            DomainDescriptor::OpenPositiveOrthant
                        }
                        (DomainDescriptor::PositiveOrthant, _) | (_, DomainDescriptor::PositiveOrthant) => {
                            DomainDescriptor::PositiveOrthant
                        }
                        _ => DomainDescriptor::AllSpace,
                    };
                    if let Some(sc) = child.strong_convexity {
                        if w > 0.0 {
                            modulus += w * sc.modulus;
                            norms.push(sc.norm);
                        }
                    }
                }
                let sc = if modulus > 0.0 {
                    // ‖·‖₁ ≥ ‖·‖₂, so an l1 modulus is also an l2 modulus.
                    let norm = if norms.iter().all(|n| *n == norms[0]) { norms[0] } else { PrimalNorm::L2 };
                    Some(StrongConvexity { modulus, norm })
                } else {
                    None
                };
                (domain, sc)
            }
        };
        Ok(LegendreFunction { kind, strong_convexity, domain, terms })
    }

    pub fn euclidean() -> Self {
        Self::from_kind(LegendreKind::Euclidean).expect("euclidean is always valid")
    }

    pub fn shannon_entropy() -> Self {
        Self::from_kind(LegendreKind::ShannonEntropy).expect("entropy is always valid")
    }

    pub fn burg() -> Self {
        Self::from_kind(LegendreKind::Burg).expect("burg is always valid")
    }

    /// The polynomial-growth function `Σ a_i (3i+7)/(i+2) ‖x‖^{i+2}`.
    pub fn poly_growth(p_coeffs: &[f64]) -> Result<Self> {
        Self::from_kind(LegendreKind::PolyGrowth { coeffs: p_coeffs.to_vec() })
    }

    /// The norm-power sum `Σ b_i/(i+2) ‖x‖^{i+2}`.
    pub fn norm_power_sum(q_coeffs: &[f64]) -> Result<Self> {
        Self::from_kind(LegendreKind::NormPowerSum { coeffs: q_coeffs.to_vec() })
    }

    pub fn weighted_sum(children: Vec<LegendreFunction>, weights: Vec<f64>) -> Result<Self> {
        Self::from_kind(LegendreKind::WeightedSum { children, weights })
    }

    pub fn with_strong_convexity(mut self, sc: Option<StrongConvexity>) -> Self {
        self.strong_convexity = sc;
        self
    }

    pub fn kind(&self) -> &LegendreKind {
        &self.kind
    }

    pub fn strong_convexity(&self) -> Option<StrongConvexity> {
        self.strong_convexity
    }

    pub fn domain(&self) -> DomainDescriptor {
        self.domain
    }

    /// Norm used for local norms: the declared one, Euclidean by default.
    pub fn primal_norm(&self) -> PrimalNorm {
        self.strong_convexity.map_or(PrimalNorm::L2, |sc| sc.norm)
    }

    /// Radial profile `Σ c_k ‖x‖^k` when the function has no separable terms.
    pub fn radial_terms(&self) -> Option<&[(f64, i32)]> {
        self.terms.is_radial().then_some(self.terms.radial.as_slice())
    }

    /// `c` when the function is exactly `c ‖x‖²`.
    pub fn quadratic_coefficient(&self) -> Option<f64> {
        match self.radial_terms() {
            Some([(c, 2)]) => Some(*c),
            _ => None,
        }
    }

    /// `c` when the function is exactly `c Σ x_i log x_i`.
    pub fn entropy_scale(&self) -> Option<f64> {
        (self.terms.radial.is_empty() && self.terms.burg == 0.0 && self.terms.entropy > 0.0).then_some(self.terms.entropy)
    }

    /// Whether the domain forces strictly positive coordinates on its interior.
    pub fn is_orthant_domain(&self) -> bool {
        self.domain != DomainDescriptor::AllSpace
    }

    pub fn in_domain(&self, x: &Point) -> bool {
        self.value(x).is_finite()
    }

    pub fn is_interior(&self, x: &Point) -> bool {
        x.iter().all(|v| v.is_finite()) && (!self.is_orthant_domain() || x.iter().all(|&v| v > 0.0))
    }

    fn require_interior(&self, x: &Point) -> Result<()> {
        if self.is_interior(x) {
            Ok(())
        } else {
            Err(Error::DomainViolation(format!("{x:?} is not interior to dom Φ ({:?})", self.domain)))
        }
    }

    /// `Φ(x)`, `+∞` outside the domain.
    pub fn value(&self, x: &Point) -> f64 {
        if x.iter().any(|v| !v.is_finite()) {
            return f64::INFINITY;
        }
        let t = &self.terms;
        if t.burg > 0.0 && x.iter().any(|&v| v <= 0.0) {
            return f64::INFINITY;
        }
        if t.entropy > 0.0 && x.iter().any(|&v| v < 0.0) {
            return f64::INFINITY;
        }
        let mut total = 0.0;
        if !t.radial.is_empty() {
            let r = x.norm();
            for &(c, k) in &t.radial {
                total += c * r.powi(k);
            }
        }
        if t.entropy > 0.0 {
            total += t.entropy * x.iter().map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 }).sum::<f64>();
        }
        if t.burg > 0.0 {
            total -= t.burg * x.iter().map(|v| v.ln()).sum::<f64>();
        }
        total
    }

    /// `∇Φ(x)` on the interior. Radial terms of order above two have gradient 0 at the origin.
    pub fn gradient(&self, x: &Point) -> Result<Point> {
        self.require_interior(x)?;
        let t = &self.terms;
        let mut g = DVector::zeros(x.len());
        if !t.radial.is_empty() {
            let r = x.norm();
            let mut scale = 0.0;
            for &(c, k) in &t.radial {
                if k == 2 {
                    scale += 2.0 * c;
                } else if r > 0.0 {
                    scale += c * k as f64 * r.powi(k - 2);
                }
            }
            g.axpy(scale, x, 1.0);
        }
        if t.entropy > 0.0 {
            for (gi, &xi) in g.iter_mut().zip(x.iter()) {
                *gi += t.entropy * (xi.ln() + 1.0);
            }
        }
        if t.burg > 0.0 {
            for (gi, &xi) in g.iter_mut().zip(x.iter()) {
                *gi -= t.burg / xi;
            }
        }
        Ok(g)
    }

    /// `D_Φ(y, x) = Φ(y) − Φ(x) − ⟨∇Φ(x), y − x⟩`, evaluated term by term.
    pub fn bregman(&self, y: &Point, x: &Point) -> Result<f64> {
        self.require_interior(x)?;
        if y.len() != x.len() {
            return Err(Error::DomainViolation(format!("dimension mismatch {} vs {}", y.len(), x.len())));
        }
        if !self.in_domain(y) {
            return Err(Error::DomainViolation(format!("{y:?} is outside dom Φ")));
        }
        let t = &self.terms;
        let mut total = 0.0;
        if !t.radial.is_empty() {
            let rx = x.norm();
            let ry = y.norm();
            let diff = y - x;
            let inner = x.dot(&diff);
            for &(c, k) in &t.radial {
                total += if k == 2 {
                    c * diff.norm_squared()
                } else if rx == 0.0 {
                    c * ry.powi(k)
                } else {
                    c * (ry.powi(k) - rx.powi(k) - k as f64 * rx.powi(k - 2) * inner)
                };
            }
        }
        if t.entropy > 0.0 {
            let s: f64 = y
                .iter()
                .zip(x.iter())
                .map(|(&yi, &xi)| if yi > 0.0 { yi * (yi / xi).ln() - yi + xi } else { xi })
                .sum();
            total += t.entropy * s;
        }
        if t.burg > 0.0 {
            let s: f64 = y
                .iter()
                .zip(x.iter())
                .map(|(&yi, &xi)| {
                    let q = yi / xi;
                    q - q.ln() - 1.0
                })
                .sum();
            total += t.burg * s;
        }
        Ok(total.max(0.0))
    }

    /// `∇²Φ(x) v` using the rank-one-plus-identity structure of radial terms.
    pub fn hessian_apply(&self, x: &Point, v: &Point) -> Result<Point> {
        self.require_interior(x)?;
        let t = &self.terms;
        let mut out = DVector::zeros(x.len());
        if !t.radial.is_empty() {
            let r = x.norm();
            let xv = x.dot(v);
            let mut iso = 0.0;
            let mut rank_one = 0.0;
            for &(c, k) in &t.radial {
                let kf = k as f64;
                if k == 2 {
                    iso += 2.0 * c;
                } else if r > 0.0 {
                    iso += c * kf * r.powi(k - 2);
                    rank_one += c * kf * (kf - 2.0) * r.powi(k - 4);
                }
            }
            out.axpy(iso, v, 1.0);
            out.axpy(rank_one * xv, x, 1.0);
        }
        if t.entropy > 0.0 || t.burg > 0.0 {
            for i in 0..x.len() {
                out[i] += (t.entropy / x[i] + t.burg / (x[i] * x[i])) * v[i];
            }
        }
        Ok(out)
    }

    /// Dense `∇²Φ(x)`.
    pub fn hessian(&self, x: &Point) -> Result<DMatrix<f64>> {
        self.require_interior(x)?;
        let t = &self.terms;
        let d = x.len();
        let mut h = DMatrix::zeros(d, d);
        if !t.radial.is_empty() {
            let r = x.norm();
            let mut iso = 0.0;
            let mut rank_one = 0.0;
            for &(c, k) in &t.radial {
                let kf = k as f64;
                if k == 2 {
                    iso += 2.0 * c;
                } else if r > 0.0 {
                    iso += c * kf * r.powi(k - 2);
                    rank_one += c * kf * (kf - 2.0) * r.powi(k - 4);
                }
            }
            for i in 0..d {
                h[(i, i)] += iso;
                for j in 0..d {
                    h[(i, j)] += rank_one * x[i] * x[j];
                }
            }
        }
        for i in 0..d {
            if t.entropy > 0.0 || t.burg > 0.0 {
                h[(i, i)] += t.entropy / x[i] + t.burg / (x[i] * x[i]);
            }
        }
        Ok(h)
    }

    /// Local dual norm `‖∇²Φ(x)^{-1} v‖` in the primal norm.
    pub fn local_dual_norm(&self, x: &Point, v: &Point) -> Result<f64> {
        self.require_interior(x)?;
        if v.iter().all(|&c| c == 0.0) {
            return Ok(0.0);
        }
        let h = self.hessian(x)?;
        let chol = h.cholesky().ok_or(Error::SingularHessian)?;
        let w = chol.solve(v);
        if w.iter().any(|c| !c.is_finite()) {
            return Err(Error::SingularHessian);
        }
        Ok(self.primal_norm().norm(&w))
    }

    /// Whether [`gradient_inverse`](Self::gradient_inverse) has a scalar reduction.
    pub fn has_mirror_inverse(&self) -> bool {
        self.terms.is_radial() || self.terms.is_separable()
    }

    /// Solves `∇Φ(x) = v` for `x` in the interior.
    ///
    /// Radial functions reduce to the monotone scalar equation
    /// `Σ c_k k s^{k-1} = ‖v‖`; separable ones to one monotone equation per coordinate.
    pub fn gradient_inverse(&self, v: &Point) -> Result<Point> {
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NoPreimage(format!("non-finite dual point {v:?}")));
        }
        if self.terms.is_radial() {
            return self.radial_inverse(v);
        }
        if self.terms.is_separable() {
            let mut x = DVector::zeros(v.len());
            for (xi, &vi) in x.iter_mut().zip(v.iter()) {
                *xi = self.separable_inverse(vi)?;
            }
            return Ok(x);
        }
        Err(Error::NoPreimage("mixed radial and separable terms have no scalar mirror map".into()))
    }

    /// Derivative of the radial profile, `ψ(s) = Σ c_k k s^{k-1}`, and `ψ'(s)`.
    pub fn radial_derivative(&self, s: f64) -> (f64, f64) {
        let mut val = 0.0;
        let mut der = 0.0;
        for &(c, k) in &self.terms.radial {
            let kf = k as f64;
            val += c * kf * s.powi(k - 1);
            der += c * kf * (kf - 1.0) * s.powi(k - 2);
        }
        (val, der)
    }

    /// Solves `ψ(s) = target` for `s >= 0`; requires a radial function.
    pub fn radial_root(&self, target: f64) -> Result<roots::Root> {
        if !self.terms.is_radial() || self.terms.radial.is_empty() {
            return Err(Error::NoPreimage("not a radial Legendre function".into()));
        }
        if target <= 0.0 {
            return Ok(roots::Root { x: 0.0, iterations: 0 });
        }
        if let [(c, 2)] = self.terms.radial.as_slice() {
            return Ok(roots::Root { x: target / (2.0 * c), iterations: 0 });
        }
        let hi = roots::expand_upper(|s| self.radial_derivative(s).0 - target, 1.0, 2100)?;
        roots::newton_bisect(|s| {
            let (v, d) = self.radial_derivative(s);
            (v - target, d)
        }, 0.0, hi, 1e-16, 400)
    }

    fn radial_inverse(&self, v: &Point) -> Result<Point> {
        let g = v.norm();
        if g == 0.0 {
            return Ok(DVector::zeros(v.len()));
        }
        if let Some(c) = self.quadratic_coefficient() {
            return Ok(v / (2.0 * c));
        }
        let s = self.radial_root(g)?.x;
        Ok(v * (s / g))
    }

    fn separable_inverse(&self, v: f64) -> Result<f64> {
        let e = self.terms.entropy;
        let b = self.terms.burg;
        let q = 2.0 * self.terms.quadratic();
        match (e > 0.0, b > 0.0, q > 0.0) {
            (true, false, false) => Ok((v / e - 1.0).exp()),
            (false, true, false) => {
                if v < 0.0 {
                    Ok(-b / v)
                } else {
                    Err(Error::NoPreimage(format!("Burg gradient takes only negative values, got {v}")))
                }
            }
            (false, false, true) => Ok(v / q),
            (false, false, false) => Err(Error::NoPreimage("empty Legendre function".into())),
            _ => {
                // Work in t = log x where the equation is smooth and increasing.
                let f = |t: f64| {
                    let x = t.exp();
                    (e * (t + 1.0) - b / x + q * x - v, e + b / x + q * x)
                };
                let mut lo = -1.0;
                while f(lo).0 > 0.0 {
                    lo *= 2.0;
                    if lo < -1e4 {
                        return Err(Error::NoPreimage(format!("cannot bracket mirror preimage of {v}")));
                    }
                }
                let mut hi = 1.0;
                while f(hi).0 < 0.0 {
                    hi *= 2.0;
                    if hi > 1e4 {
                        return Err(Error::NoPreimage(format!("cannot bracket mirror preimage of {v}")));
                    }
                }
                Ok(roots::newton_bisect(f, lo, hi, 1e-16, 400)?.x.exp())
            }
        }
    }
}

/// `Φ(x)` (`+∞` outside the domain).
pub fn phi_value(phi: &LegendreFunction, x: &Point) -> f64 {
    phi.value(x)
}

pub fn phi_gradient(phi: &LegendreFunction, x: &Point) -> Result<Point> {
    phi.gradient(x)
}

pub fn bregman(phi: &LegendreFunction, y: &Point, x: &Point) -> Result<f64> {
    phi.bregman(y, x)
}

pub fn hessian_apply(phi: &LegendreFunction, x: &Point, v: &Point) -> Result<Point> {
    phi.hessian_apply(x, v)
}

pub fn local_dual_norm(phi: &LegendreFunction, x: &Point, v: &Point) -> Result<f64> {
    phi.local_dual_norm(x, v)
}

/// Legendre function adapted to a growth polynomial `p` with nonnegative coefficients.
pub fn build_poly_legendre(p_coeffs: &[f64]) -> Result<LegendreFunction> {
    LegendreFunction::poly_growth(p_coeffs)
}

/// Sum of the accuracy function built from `p` and the Lipschitz function built from `q`.
///
/// Either list may be all zeros, in which case only the other part is kept.
pub fn build_composite_legendre(p_coeffs: &[f64], q_coeffs: &[f64]) -> Result<LegendreFunction> {
    let p_nonzero = p_coeffs.iter().any(|&c| c != 0.0);
    let q_nonzero = q_coeffs.iter().any(|&c| c != 0.0);
    for (c, name) in p_coeffs.iter().map(|c| (c, "p")).chain(q_coeffs.iter().map(|c| (c, "q"))) {
        if !c.is_finite() || *c < 0.0 {
            return Err(Error::InvalidCoefficients(format!("{name} has a negative coefficient: {c}")));
        }
    }
    match (p_nonzero, q_nonzero) {
        (true, true) => LegendreFunction::weighted_sum(
            vec![LegendreFunction::poly_growth(p_coeffs)?, LegendreFunction::norm_power_sum(q_coeffs)?],
            vec![1.0, 1.0],
        ),
        (true, false) => LegendreFunction::poly_growth(p_coeffs),
        (false, true) => LegendreFunction::norm_power_sum(q_coeffs),
        (false, false) => Err(Error::InvalidCoefficients("both polynomials vanish".into())),
    }
}

/// Evaluates `Σ c_i u^i`.
pub fn eval_poly(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
}
