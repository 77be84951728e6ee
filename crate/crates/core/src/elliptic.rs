//! Jacobi theta functions in the classical convention.
//!
//! `θ_k(λ|ω)` has quasi-periods `π` and `πω` with nome `q = e^{iπω}`:
//!
//! ```text
//! θ₁(λ|ω) = 2 Σ_{n≥0} (−1)^n q^{(n+½)²} sin((2n+1)λ)
//! θ₂(λ|ω) = 2 Σ_{n≥0} q^{(n+½)²} cos((2n+1)λ)
//! θ₃(λ|ω) = 1 + 2 Σ_{n≥1} q^{n²} cos(2nλ)
//! θ₄(λ|ω) = 1 + 2 Σ_{n≥1} (−1)^n q^{n²} cos(2nλ)
//! ```
//!
//! Arguments are first translated by a multiple of `πω` so that the series
//! is summed at `|Im λ| ≤ π Im ω / 2`; the translation factor is applied in
//! closed form.

use crate::error::{Error, Result};
use crate::C;
use std::f64::consts::PI;

const I: C = C::new(0.0, 1.0);

/// Modular parameter and truncation policy shared by every theta evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaContext {
    pub omega: C,
    pub tol: f64,
    pub max_terms: usize,
}

/// Selects the half-period ratio `ω` or `2ω`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ratio {
    One,
    Two,
}

impl Ratio {
    fn factor(self) -> f64 {
        match self {
            Ratio::One => 1.0,
            Ratio::Two => 2.0,
        }
    }
}

impl ThetaContext {
    pub fn new(omega: C) -> Result<Self> {
        Self::with_policy(omega, 1e-14, 512)
    }

    pub fn with_policy(omega: C, tol: f64, max_terms: usize) -> Result<Self> {
        if !omega.re.is_finite() || !omega.im.is_finite() || omega.im <= 0.0 {
            return Err(Error::Domain(omega.im));
        }
        if tol.is_nan() || tol <= 0.0 || max_terms == 0 {
            return Err(Error::Invalid(format!("tol={tol}, max_terms={max_terms}")));
        }
        Ok(Self { omega, tol, max_terms })
    }

    /// Context from the nome `t = e^{iπω}` (principal logarithm).
    pub fn from_nome(t: C) -> Result<Self> {
        if !(t.norm() > 0.0 && t.norm() < 1.0) {
            return Err(Error::Invalid(format!("nome must satisfy 0 < |t| < 1, got {t}")));
        }
        Self::new(-I * t.ln() / PI)
    }

    pub fn nome(&self) -> C {
        (I * PI * self.omega).exp()
    }

    /// Same truncation policy, different modular parameter.
    pub fn with_omega(&self, omega: C) -> Result<Self> {
        Self::with_policy(omega, self.tol, self.max_terms)
    }

    pub fn th(&self, kind: u8, lambda: C) -> Result<C> {
        theta(kind, lambda, Ratio::One, self)
    }

    pub fn th2w(&self, kind: u8, lambda: C) -> Result<C> {
        theta(kind, lambda, Ratio::Two, self)
    }
}

/// `θ_kind(λ | ratio·ω)`.
pub fn theta(kind: u8, lambda: C, ratio: Ratio, ctx: &ThetaContext) -> Result<C> {
    if !(1..=4).contains(&kind) {
        return Err(Error::Invalid(format!("theta kind {kind}")));
    }
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::Invalid(format!("non-finite theta argument {lambda}")));
    }
    let tau = ctx.omega * ratio.factor();

    // λ = z + mπτ, with θ(z + mπτ) = (±1)^m q^{−m²} e^{−2imz} θ(z).
    let m = (lambda.im / (PI * tau.im)).round();
    let z = lambda - PI * tau * m;
    let sign = if matches!(kind, 1 | 4) && (m as i64).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    let prefactor = (-I * PI * tau * m * m - 2.0 * I * m * z).exp() * sign;

    let series = theta_series(kind, z, tau, ctx)?;
    Ok(prefactor * series)
}

fn theta_series(kind: u8, z: C, tau: C, ctx: &ThetaContext) -> Result<C> {
    let ipt = I * PI * tau;
    let (mut sum, half) = match kind {
        1 | 2 => (C::new(0.0, 0.0), 0.5),
        _ => (C::new(1.0, 0.0), 0.0),
    };
    let first = if half > 0.0 { 0 } else { 1 };
    for n in first..first + ctx.max_terms {
        let k = n as f64 + half;
        let weight = (ipt * k * k).exp() * 2.0;
        let alt = if n % 2 == 1 { -1.0 } else { 1.0 };
        let term = match kind {
            1 => weight * alt * (z * (2.0 * k)).sin(),
            2 => weight * (z * (2.0 * k)).cos(),
            3 => weight * (z * (2.0 * k)).cos(),
            _ => weight * alt * (z * (2.0 * k)).cos(),
        };
        sum += term;
        if term.norm() < ctx.tol * (sum.norm() + 1.0) {
            return Ok(sum);
        }
    }
    Err(Error::Truncation { max_terms: ctx.max_terms })
}

/// Theta function with characteristic,
/// `ϑ_j(λ) = Σ_n exp[2iπwN m² + 2iπN m (λ + 1/(2N))]` with `m = n + ½ − j/N`
/// and `w = ctx.omega`.
///
/// Quasi-periods: `ϑ_j(λ + 1/N) = −e^{−2πij/N} ϑ_j(λ)` and
/// `ϑ_j(λ + 2w) = −e^{−2πiN(w+λ)} ϑ_j(λ)`.
pub fn theta_char(j: usize, lambda: C, n_sites: usize, ctx: &ThetaContext) -> Result<C> {
    if n_sites == 0 || j >= n_sites {
        return Err(Error::Invalid(format!("characteristic j={j} for N={n_sites}")));
    }
    let w = ctx.omega;
    let nf = n_sites as f64;

    // λ = z + 2kw, ϑ(z + 2kw) = (−1)^k e^{−2πiN(kz + k²w)} ϑ(z).
    let k = (lambda.im / (2.0 * w.im)).round();
    let z = lambda - 2.0 * w * k;
    let sign = if (k as i64).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    let prefactor = (-2.0 * PI * I * nf * (z * k + w * k * k)).exp() * sign;

    let shift = 0.5 - j as f64 / nf;
    let arg = z + 0.5 / nf;
    let term = |n: i64| {
        let m = n as f64 + shift;
        (2.0 * PI * I * nf * (w * m * m + m * arg)).exp()
    };
    let mut sum = term(0);
    for n in 1..=ctx.max_terms as i64 {
        let pair = term(n) + term(-n);
        sum += pair;
        if term(n).norm() + term(-n).norm() < ctx.tol * (sum.norm() + 1.0) {
            return Ok(prefactor * sum);
        }
    }
    Err(Error::Truncation { max_terms: ctx.max_terms })
}

/// Product identities of theta functions used by the quantum determinant
/// computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaIdentity {
    /// `θ₁(x+y)θ₁(x−y)θ₄²(0) = θ₃²(x)θ₂²(y) − θ₂²(x)θ₃²(y)` at ratio ω.
    IF1,
    /// The same relation at ratio 2ω.
    IF2,
    /// `θ₄(x+y)θ₄(x−y)θ₄²(0) = θ₄²(x)θ₄²(y) − θ₁²(x)θ₁²(y)` at ratio 2ω.
    IF3,
    /// `θ₁(x|ω)θ₂(y|ω) = θ₁(x+y|2ω)θ₄(x−y|2ω) + θ₄(x+y|2ω)θ₁(x−y|2ω)`.
    IF4,
}

impl std::str::FromStr for ThetaIdentity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "IF1" => Ok(Self::IF1),
            "IF2" => Ok(Self::IF2),
            "IF3" => Ok(Self::IF3),
            "IF4" => Ok(Self::IF4),
            other => Err(Error::Invalid(format!("unknown identity {other}"))),
        }
    }
}

/// `|LHS − RHS|` of the named identity.
pub fn identity_residual(id: ThetaIdentity, x: C, y: C, ctx: &ThetaContext) -> Result<f64> {
    let zero = C::new(0.0, 0.0);
    let diff = match id {
        ThetaIdentity::IF1 | ThetaIdentity::IF2 => {
            let r = if id == ThetaIdentity::IF1 { Ratio::One } else { Ratio::Two };
            let t = |k, z| theta(k, z, r, ctx);
            let lhs = t(1, x + y)? * t(1, x - y)? * t(4, zero)?.powi(2);
            let rhs = (t(3, x)? * t(2, y)?).powi(2) - (t(2, x)? * t(3, y)?).powi(2);
            lhs - rhs
        }
        ThetaIdentity::IF3 => {
            let t = |k, z| theta(k, z, Ratio::Two, ctx);
            let lhs = t(4, x + y)? * t(4, x - y)? * t(4, zero)?.powi(2);
            let rhs = (t(4, x)? * t(4, y)?).powi(2) - (t(1, x)? * t(1, y)?).powi(2);
            lhs - rhs
        }
        ThetaIdentity::IF4 => {
            let t2 = |k, z| theta(k, z, Ratio::Two, ctx);
            let lhs = ctx.th(1, x)? * ctx.th(2, y)?;
            let rhs = t2(1, x + y)? * t2(4, x - y)? + t2(4, x + y)? * t2(1, x - y)?;
            lhs - rhs
        }
    };
    Ok(diff.norm())
}
