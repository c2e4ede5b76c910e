//! Coefficient algebra of the fifth-order BBM model.
//!
//! The eight-parameter shallow-water family (θ, λ, μ, λ1, μ1 and the
//! auxiliary ρ) fixes the first-order Boussinesq constants `a, b, c, d`,
//! the second-order constants `a1, b1, c1, d1`, and finally the five
//! coefficients `(γ1, γ2, δ1, δ2, γ)` of the one-way model
//!
//! ```text
//! η_t + η_x − γ1 η_xxt + γ2 η_xxx + δ1 η_xxxxt + δ2 η_xxxxx
//!     + ¾ (η²)_x + γ (η²)_xxx − 7/48 (η_x²)_x − ⅛ (η³)_x = 0.
//! ```
//!
//! Everything here is a closed-form rational function of the inputs and is
//! evaluated in `f64`. The test suite checks it against exact rational
//! arithmetic.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The value of γ for which the energy functional is conserved.
pub const ENERGY_GAMMA: f64 = 7.0 / 48.0;

/// Tolerance used for the `energy_conserving` flag.
pub const ENERGY_GAMMA_TOL: f64 = 1e-12;

/// Modeling parameters of the Boussinesq family.
///
/// `theta` is the physical height parameter in `[0, 1]`; it is squared
/// internally. The remaining fields are unconstrained reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModelParameters", into = "RawModelParameters")]
pub struct ModelParameters {
    theta: f64,
    lambda: f64,
    mu: f64,
    lambda1: f64,
    mu1: f64,
    rho: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModelParameters {
    theta: f64,
    lambda: f64,
    mu: f64,
    lambda1: f64,
    mu1: f64,
    #[serde(default)]
    rho: f64,
}

impl TryFrom<RawModelParameters> for ModelParameters {
    type Error = Error;

    fn try_from(r: RawModelParameters) -> Result<Self> {
        ModelParameters::new(r.theta, r.lambda, r.mu, r.lambda1, r.mu1, r.rho)
    }
}

impl From<ModelParameters> for RawModelParameters {
    fn from(p: ModelParameters) -> Self {
        RawModelParameters {
            theta: p.theta,
            lambda: p.lambda,
            mu: p.mu,
            lambda1: p.lambda1,
            mu1: p.mu1,
            rho: p.rho,
        }
    }
}

impl ModelParameters {
    pub fn new(theta: f64, lambda: f64, mu: f64, lambda1: f64, mu1: f64, rho: f64) -> Result<Self> {
        let named = [
            ("theta", theta),
            ("lambda", lambda),
            ("mu", mu),
            ("lambda1", lambda1),
            ("mu1", mu1),
            ("rho", rho),
        ];
        for (name, v) in named {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::invalid("theta", format!("must lie in [0, 1], got {theta}")));
        }
        Ok(ModelParameters {
            theta,
            lambda,
            mu,
            lambda1,
            mu1,
            rho,
        })
    }

    /// θ² = 2/3, λ = 1, μ = 0, λ1 = 1, μ1 = −6, ρ = 0.
    ///
    /// Yields γ1 = γ2 = 1/12, δ1 = 7/72, δ2 = 49/360 and γ = 7/48, so the
    /// model is both well posed and energy conserving.
    pub fn reference() -> Self {
        ModelParameters {
            theta: (2.0f64 / 3.0).sqrt(),
            lambda: 1.0,
            mu: 0.0,
            lambda1: 1.0,
            mu1: -6.0,
            rho: 0.0,
        }
    }

    pub fn with_rho(self, rho: f64) -> Result<Self> {
        ModelParameters::new(self.theta, self.lambda, self.mu, self.lambda1, self.mu1, rho)
    }

    /// Replaces ρ with the value that makes γ = 7/48.
    pub fn with_energy_rho(self) -> Self {
        let rho = rho_for_energy_conservation(&derive_first_order(&self));
        ModelParameters { rho, ..self }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn theta_squared(&self) -> f64 {
        self.theta * self.theta
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }
    pub fn mu1(&self) -> f64 {
        self.mu1
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// First-order Boussinesq constants; `a + b + c + d = 1/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcdFirst {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// Second-order Boussinesq constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbcdSecond {
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
    pub d1: f64,
}

pub fn derive_first_order(p: &ModelParameters) -> AbcdFirst {
    let t2 = p.theta_squared();
    let upper = 0.5 * (t2 - 1.0 / 3.0);
    let lower = 0.5 * (1.0 - t2);
    AbcdFirst {
        a: upper * p.lambda,
        b: upper * (1.0 - p.lambda),
        c: lower * p.mu,
        d: lower * (1.0 - p.mu),
    }
}

pub fn derive_second_order(p: &ModelParameters) -> AbcdSecond {
    let t2 = p.theta_squared();
    let third = t2 - 1.0 / 3.0;
    let fifth = t2 - 1.0 / 5.0;
    let one_minus = 1.0 - t2;
    AbcdSecond {
        a1: -0.25 * third * third * (1.0 - p.lambda) + 5.0 / 24.0 * fifth * fifth * p.lambda1,
        b1: -5.0 / 24.0 * fifth * fifth * (1.0 - p.lambda1),
        c1: 5.0 / 24.0 * one_minus * fifth * (1.0 - p.mu1),
        d1: -0.25 * one_minus * one_minus * p.mu - 5.0 / 24.0 * one_minus * fifth * p.mu1,
    }
}

/// Coefficients `(γ1, γ2, δ1, δ2, γ)` of the fifth-order model.
///
/// The regime flags are computed at construction and cannot drift from the
/// values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bbm5Coefficients {
    gamma1: f64,
    gamma2: f64,
    delta1: f64,
    delta2: f64,
    gamma: f64,
    wellposed_regime: bool,
    energy_conserving: bool,
}

impl Bbm5Coefficients {
    pub fn from_values(gamma1: f64, gamma2: f64, delta1: f64, delta2: f64, gamma: f64) -> Self {
        Bbm5Coefficients {
            gamma1,
            gamma2,
            delta1,
            delta2,
            gamma,
            wellposed_regime: gamma1 > 0.0 && delta1 > 0.0,
            energy_conserving: (gamma - ENERGY_GAMMA).abs() <= ENERGY_GAMMA_TOL,
        }
    }

    /// Coefficients of [`ModelParameters::reference`].
    pub fn reference() -> Self {
        derive_bbm5(&ModelParameters::reference())
    }

    /// Same dispersion, different quadratic coefficient γ.
    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self::from_values(self.gamma1, self.gamma2, self.delta1, self.delta2, gamma)
    }

    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }
    pub fn gamma2(&self) -> f64 {
        self.gamma2
    }
    pub fn delta1(&self) -> f64 {
        self.delta1
    }
    pub fn delta2(&self) -> f64 {
        self.delta2
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn wellposed_regime(&self) -> bool {
        self.wellposed_regime
    }
    pub fn energy_conserving(&self) -> bool {
        self.energy_conserving
    }

    /// Fails with [`Error::RegimeInvalid`] unless γ1 > 0 and δ1 > 0.
    pub fn require_wellposed(&self) -> Result<()> {
        let violations = validate(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::RegimeInvalid(violations))
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientRecord {
    gamma1: f64,
    gamma2: f64,
    delta1: f64,
    delta2: f64,
    gamma: f64,
    #[serde(default, skip_deserializing)]
    wellposed_regime: bool,
    #[serde(default, skip_deserializing)]
    energy_conserving: bool,
}

impl Serialize for Bbm5Coefficients {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CoefficientRecord {
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            delta1: self.delta1,
            delta2: self.delta2,
            gamma: self.gamma,
            wellposed_regime: self.wellposed_regime,
            energy_conserving: self.energy_conserving,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Bbm5Coefficients {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = CoefficientRecord::deserialize(d)?;
        Ok(Bbm5Coefficients::from_values(
            r.gamma1, r.gamma2, r.delta1, r.delta2, r.gamma,
        ))
    }
}

pub fn derive_bbm5(p: &ModelParameters) -> Bbm5Coefficients {
    let AbcdFirst { a, b, c, d } = derive_first_order(p);
    let AbcdSecond { a1, b1, c1, d1 } = derive_second_order(p);
    let rho = p.rho;
    let gamma1 = 0.5 * (b + d - rho);
    let gamma2 = 0.5 * (a + c + rho);
    let delta1 = 0.25 * (2.0 * (b1 + d1) - (b - d + rho) * (1.0 / 6.0 - a - d) - d * (c - a + rho));
    let delta2 = 0.25 * (2.0 * (a1 + c1) - (c - a + rho) * (1.0 / 6.0 - a) + rho / 3.0);
    let gamma = (5.0 - 9.0 * (b + d) + 9.0 * rho) / 24.0;
    Bbm5Coefficients::from_values(gamma1, gamma2, delta1, delta2, gamma)
}

/// ρ* = b + d − 1/6, the choice that makes γ = 7/48.
pub fn rho_for_energy_conservation(abcd: &AbcdFirst) -> f64 {
    abcd.b + abcd.d - 1.0 / 6.0
}

/// A failed well-posedness hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "coefficient", content = "value")]
pub enum Violation {
    #[serde(rename = "gamma1")]
    Gamma1NotPositive(f64),
    #[serde(rename = "delta1")]
    Delta1NotPositive(f64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Gamma1NotPositive(v) => write!(f, "gamma1 must be > 0 (got {v})"),
            Violation::Delta1NotPositive(v) => {
                write!(
                    f,
                    "delta1 must be > 0 (got {v}); the dispersion denominator loses coercivity"
                )
            }
        }
    }
}

/// Every violated well-posedness hypothesis; empty iff the regime is valid.
pub fn validate(c: &Bbm5Coefficients) -> Vec<Violation> {
    let mut out = Vec::new();
    // `!(x > 0)` also catches NaN
    if !(c.gamma1 > 0.0) {
        out.push(Violation::Gamma1NotPositive(c.gamma1));
    }
    if !(c.delta1 > 0.0) {
        out.push(Violation::Delta1NotPositive(c.delta1));
    }
    out
}

/// Everything derivable from one parameter set, as emitted by `bbm5 coeffs`.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientReport {
    pub parameters: ModelParameters,
    pub first_order: AbcdFirst,
    pub second_order: AbcdSecond,
    pub coefficients: Bbm5Coefficients,
    pub violations: Vec<Violation>,
    pub rho_star: f64,
}

impl CoefficientReport {
    pub fn new(parameters: ModelParameters) -> Self {
        let first_order = derive_first_order(&parameters);
        let coefficients = derive_bbm5(&parameters);
        CoefficientReport {
            parameters,
            first_order,
            second_order: derive_second_order(&parameters),
            coefficients,
            violations: validate(&coefficients),
            rho_star: rho_for_energy_conservation(&first_order),
        }
    }
}
