//! Shared test oracles.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    x.to_f64().expect("representable")
}

/// Exact modelling parameters, with θ entered through θ².
#[derive(Debug, Clone)]
pub struct ExactParameters {
    pub theta2: Q,
    pub lambda: Q,
    pub mu: Q,
    pub lambda1: Q,
    pub mu1: Q,
    pub rho: Q,
}

impl ExactParameters {
    pub fn reference() -> Self {
        ExactParameters {
            theta2: q(2, 3),
            lambda: q(1, 1),
            mu: Q::zero(),
            lambda1: q(1, 1),
            mu1: q(-6, 1),
            rho: Q::zero(),
        }
    }

    pub fn to_library(&self) -> bbm5::ModelParameters {
        bbm5::ModelParameters::new(
            to_f64(&self.theta2).sqrt(),
            to_f64(&self.lambda),
            to_f64(&self.mu),
            to_f64(&self.lambda1),
            to_f64(&self.mu1),
            to_f64(&self.rho),
        )
        .expect("valid parameters")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactCoefficients {
    pub a: Q,
    pub b: Q,
    pub c: Q,
    pub d: Q,
    pub a1: Q,
    pub b1: Q,
    pub c1: Q,
    pub d1: Q,
    pub gamma1: Q,
    pub gamma2: Q,
    pub delta1: Q,
    pub delta2: Q,
    pub gamma: Q,
}

pub fn exact_coefficients(p: &ExactParameters) -> ExactCoefficients {
    let one = Q::one();
    let half = q(1, 2);
    let t2 = &p.theta2;
    let third = t2 - q(1, 3);
    let fifth = t2 - q(1, 5);
    let om = &one - t2;
    let a = &half * &third * &p.lambda;
    let b = &half * &third * (&one - &p.lambda);
    let c = &half * &om * &p.mu;
    let d = &half * &om * (&one - &p.mu);
    let k = q(5, 24);
    let a1 = q(-1, 4) * &third * &third * (&one - &p.lambda) + &k * &fifth * &fifth * &p.lambda1;
    let b1 = -(&k * &fifth * &fifth * (&one - &p.lambda1));
    let c1 = &k * &om * &fifth * (&one - &p.mu1);
    let d1 = q(-1, 4) * &om * &om * &p.mu - &k * &om * &fifth * &p.mu1;
    let rho = &p.rho;
    let gamma1 = &half * (&b + &d - rho);
    let gamma2 = &half * (&a + &c + rho);
    let delta1 = q(1, 4) * (q(2, 1) * (&b1 + &d1) - (&b - &d + rho) * (q(1, 6) - &a - &d) - &d * (&c - &a + rho));
    let delta2 = q(1, 4) * (q(2, 1) * (&a1 + &c1) - (&c - &a + rho) * (q(1, 6) - &a) + rho / q(3, 1));
    let gamma = (q(5, 1) - q(9, 1) * (&b + &d) + q(9, 1) * rho) / q(24, 1);
    ExactCoefficients {
        a,
        b,
        c,
        d,
        a1,
        b1,
        c1,
        d1,
        gamma1,
        gamma2,
        delta1,
        delta2,
        gamma,
    }
}

/// Random rational parameters with θ² ∈ [0, 1] and the rest in [−4, 4].
pub fn random_parameters<R: rand::Rng>(rng: &mut R) -> ExactParameters {
    let mut r = |lo: i64, hi: i64| q(rng.random_range(lo * 1000..=hi * 1000), 1000);
    ExactParameters {
        theta2: r(0, 1),
        lambda: r(-4, 4),
        mu: r(-4, 4),
        lambda1: r(-4, 4),
        mu1: r(-4, 4),
        rho: r(-4, 4),
    }
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}
