//! Numerical check of the long-wave derivation.
//!
//! A solution `η` of the scaled one-way model (amplitude α, dispersion β)
//! is turned into a velocity through the correction polynomials
//!
//! ```text
//! w = η + αA + βB + αβC + β²D + α²E,
//! A = −¼η²,  B = ½((c − a + ρ)η_xx + (b − d + ρ)η_xt),  E = ⅛η³,
//! ```
//!
//! and the pair `(η, w)` is substituted into the Boussinesq `abcd` system.
//! With `α = β = ε` the first-order system should be satisfied up to
//! `O(ε²)`. Time derivatives come from the model itself (`η_t` from the
//! right-hand side, `η_tt` from its linearization), never from differencing
//! snapshots.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficients::{
    derive_bbm5, derive_first_order, derive_second_order, AbcdFirst, AbcdSecond, ModelParameters,
};
use crate::error::{Error, Result};
use crate::evolution::{Dynamics, EtdRk4, RhsSpec};
use crate::fit::{log_log_fit, LinearFit};
use crate::multipliers::product_coeffs;
use crate::spectral::{derivative_factors, sobolev_norm_coeffs, Field, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DerivationParameters {
    pub alpha: f64,
    pub beta: f64,
    pub model: ModelParameters,
}

impl DerivationParameters {
    pub fn new(alpha: f64, beta: f64, model: ModelParameters) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::invalid(name, format!("must lie in [0, 1), got {v}")));
            }
        }
        Ok(DerivationParameters { alpha, beta, model })
    }

    /// `α = β = ε`.
    pub fn symmetric(eps: f64, model: ModelParameters) -> Result<Self> {
        Self::new(eps, eps, model)
    }

    fn first(&self) -> AbcdFirst {
        derive_first_order(&self.model)
    }

    fn second(&self) -> AbcdSecond {
        derive_second_order(&self.model)
    }

    /// The model in scaled variables, compiled onto `grid`.
    pub fn dynamics(&self, grid: Grid) -> Result<Dynamics> {
        let spec = RhsSpec::new(derive_bbm5(&self.model)).with_scaling(self.alpha, self.beta);
        Dynamics::new(grid, spec)
    }
}

type Coeffs = Vec<Complex64>;

/// Spectral calculus on one grid.
struct Calculus {
    grid: Grid,
    factors: Vec<Coeffs>,
}

impl Calculus {
    fn new(grid: Grid) -> Self {
        Calculus {
            grid,
            factors: (0..=5).map(|k| derivative_factors(&grid, k)).collect(),
        }
    }

    fn d(&self, c: &[Complex64], k: usize) -> Coeffs {
        c.iter().zip(&self.factors[k]).map(|(a, b)| a * b).collect()
    }

    fn mul(&self, a: &[Complex64], b: &[Complex64]) -> Coeffs {
        product_coeffs(&[a, b])
    }

    fn mul3(&self, a: &[Complex64], b: &[Complex64], c: &[Complex64]) -> Coeffs {
        product_coeffs(&[a, b, c])
    }

    fn norm(&self, c: &[Complex64]) -> f64 {
        sobolev_norm_coeffs(&self.grid, c, 0.0)
    }
}

/// `Σ w_i · c_i`.
fn lin(terms: &[(f64, &[Complex64])]) -> Coeffs {
    let n = terms[0].1.len();
    (0..n).map(|k| terms.iter().map(|(w, c)| *w * c[k]).sum()).collect()
}

/// The five correction polynomials.
#[derive(Debug, Clone)]
pub struct CorrectionTerms {
    pub a: Field,
    pub b: Field,
    pub c: Field,
    pub d: Field,
    pub e: Field,
}

/// `(K_C, K_D1, K_D2)`: `C = K_C(η²)_xx + 13/24 ηη_xx + 11/48 η_x²` and
/// `D = −K_D1 η_xxxt − K_D2 η_xxxx`.
fn constants(p: &DerivationParameters) -> (f64, f64, f64) {
    let AbcdFirst { a, b, c, d } = p.first();
    let AbcdSecond { a1, b1, c1, d1 } = p.second();
    let rho = p.model.rho();
    let kc = (a + 4.0 * b + 2.0 * c - d) / 8.0 + 3.0 / 16.0 * (a + b - c - d) + 3.0 / 8.0 * rho;
    let kd1 = 0.5 * (b1 - d1) + 0.25 * (b - d + rho) * (a - d + 1.0 / 6.0) + 0.25 * d * (c - a + rho);
    let kd2 = 0.5 * (a1 - c1) + 0.25 * (c - a + rho) * (a + 1.0 / 6.0) - rho / 12.0;
    (kc, kd1, kd2)
}

struct Terms {
    a: Coeffs,
    b: Coeffs,
    c: Coeffs,
    d: Coeffs,
    e: Coeffs,
}

fn terms_hat(k: &Calculus, eta: &[Complex64], eta_t: &[Complex64], p: &DerivationParameters) -> Terms {
    let AbcdFirst { a, b, c, d } = p.first();
    let rho = p.model.rho();
    let (kc, kd1, kd2) = constants(p);
    let sq = k.mul(eta, eta);
    let eta_x = k.d(eta, 1);
    let eta_xx = k.d(eta, 2);
    Terms {
        a: lin(&[(-0.25, &sq)]),
        b: lin(&[(0.5 * (c - a + rho), &eta_xx), (0.5 * (b - d + rho), &k.d(eta_t, 1))]),
        c: lin(&[
            (kc, &k.d(&sq, 2)),
            (13.0 / 24.0, &k.mul(eta, &eta_xx)),
            (11.0 / 48.0, &k.mul(&eta_x, &eta_x)),
        ]),
        d: lin(&[(-kd1, &k.d(eta_t, 3)), (-kd2, &k.d(eta, 4))]),
        e: lin(&[(0.125, &k.mul3(eta, eta, eta))]),
    }
}

/// Time derivatives of the correction terms.
fn terms_t_hat(
    k: &Calculus,
    eta: &[Complex64],
    eta_t: &[Complex64],
    eta_tt: &[Complex64],
    p: &DerivationParameters,
) -> Terms {
    let AbcdFirst { a, b, c, d } = p.first();
    let rho = p.model.rho();
    let (kc, kd1, kd2) = constants(p);
    let eta_eta_t = k.mul(eta, eta_t);
    Terms {
        a: lin(&[(-0.5, &eta_eta_t)]),
        b: lin(&[
            (0.5 * (c - a + rho), &k.d(eta_t, 2)),
            (0.5 * (b - d + rho), &k.d(eta_tt, 1)),
        ]),
        c: lin(&[
            (2.0 * kc, &k.d(&eta_eta_t, 2)),
            (13.0 / 24.0, &k.mul(eta_t, &k.d(eta, 2))),
            (13.0 / 24.0, &k.mul(eta, &k.d(eta_t, 2))),
            (11.0 / 24.0, &k.mul(&k.d(eta, 1), &k.d(eta_t, 1))),
        ]),
        d: lin(&[(-kd1, &k.d(eta_tt, 3)), (-kd2, &k.d(eta_t, 4))]),
        e: lin(&[(0.375, &k.mul3(eta, eta, eta_t))]),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    /// `w = η + αA + βB`.
    First,
    /// All five corrections.
    Second,
}

fn assemble(base: &[Complex64], t: &Terms, p: &DerivationParameters, order: Order) -> Coeffs {
    let (al, be) = (p.alpha, p.beta);
    match order {
        Order::First => lin(&[(1.0, base), (al, &t.a), (be, &t.b)]),
        Order::Second => lin(&[
            (1.0, base),
            (al, &t.a),
            (be, &t.b),
            (al * be, &t.c),
            (be * be, &t.d),
            (al * al, &t.e),
        ]),
    }
}

pub fn correction_terms(eta: &Field, eta_t: &Field, p: &DerivationParameters) -> Result<CorrectionTerms> {
    if eta.grid() != eta_t.grid() {
        return Err(Error::GridMismatch);
    }
    let g = *eta.grid();
    let k = Calculus::new(g);
    let t = terms_hat(&k, eta.spectral(), eta_t.spectral(), p);
    Ok(CorrectionTerms {
        a: Field::from_spectral(g, t.a)?,
        b: Field::from_spectral(g, t.b)?,
        c: Field::from_spectral(g, t.c)?,
        d: Field::from_spectral(g, t.d)?,
        e: Field::from_spectral(g, t.e)?,
    })
}

pub fn reconstruct_velocity(eta: &Field, eta_t: &Field, p: &DerivationParameters, order: Order) -> Result<Field> {
    if eta.grid() != eta_t.grid() {
        return Err(Error::GridMismatch);
    }
    let k = Calculus::new(*eta.grid());
    let t = terms_hat(&k, eta.spectral(), eta_t.spectral(), p);
    Field::from_spectral(*eta.grid(), assemble(eta.spectral(), &t, p, order))
}

/// `(η_t, η_tt)` from the scaled model.
pub fn time_derivatives(eta: &Field, p: &DerivationParameters) -> Result<(Field, Field)> {
    let d = p.dynamics(*eta.grid())?;
    let (t, tt) = time_derivatives_hat(&d, eta.spectral());
    Ok((
        Field::from_spectral(*eta.grid(), t)?,
        Field::from_spectral(*eta.grid(), tt)?,
    ))
}

fn time_derivatives_hat(d: &Dynamics, eta: &[Complex64]) -> (Coeffs, Coeffs) {
    let mut e = eta.to_vec();
    e[d.grid().nyquist_slot()] = Complex64::new(0.0, 0.0);
    let t = d.rhs_hat(&e);
    let tt = d.second_time_derivative_hat(&e, &t);
    (t, tt)
}

/// L² norms of the two equations of the `abcd` system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub r1: f64,
    pub r2: f64,
}

impl Residual {
    pub fn combined(&self) -> f64 {
        self.r1.hypot(self.r2)
    }
}

/// Residual of the first-order system
///
/// ```text
/// η_t + w_x + α(wη)_x + β(a w_xxx − b η_xxt),
/// w_t + η_x + α w w_x + β(c η_xxx − d w_xxt),
/// ```
///
/// with `w` truncated after `αA + βB`.
pub fn abcd_residual_first(eta: &Field, p: &DerivationParameters) -> Result<Residual> {
    let d = p.dynamics(*eta.grid())?;
    Ok(residual_hat(&d, eta.spectral(), p, Order::First))
}

/// Residual of the second-order system with the full velocity. The fourth
/// and fifth derivatives amplify grid noise; treat as a diagnostic.
pub fn abcd_residual_second(eta: &Field, p: &DerivationParameters) -> Result<Residual> {
    let d = p.dynamics(*eta.grid())?;
    Ok(residual_hat(&d, eta.spectral(), p, Order::Second))
}

fn residual_hat(dynamics: &Dynamics, eta: &[Complex64], p: &DerivationParameters, order: Order) -> Residual {
    let k = Calculus::new(*dynamics.grid());
    let (eta_t, eta_tt) = time_derivatives_hat(dynamics, eta);
    let w = assemble(eta, &terms_hat(&k, eta, &eta_t, p), p, order);
    let w_t = assemble(&eta_t, &terms_t_hat(&k, eta, &eta_t, &eta_tt, p), p, order);
    let AbcdFirst { a, b, c, d } = p.first();
    let (al, be) = (p.alpha, p.beta);
    let eta_x = k.d(eta, 1);
    let w_x = k.d(&w, 1);
    let eta_w = k.mul(eta, &w);
    let w_wx = k.mul(&w, &w_x);

    let mut r1 = lin(&[
        (1.0, &eta_t),
        (1.0, &w_x),
        (al, &k.d(&eta_w, 1)),
        (be * a, &k.d(&w, 3)),
        (-be * b, &k.d(&eta_t, 2)),
    ]);
    let mut r2 = lin(&[
        (1.0, &w_t),
        (1.0, &eta_x),
        (al, &w_wx),
        (be * c, &k.d(eta, 3)),
        (-be * d, &k.d(&w_t, 2)),
    ]);
    if order == Order::Second {
        let AbcdSecond { a1, b1, c1, d1 } = p.second();
        let extra1 = lin(&[
            (be * be * a1, &k.d(&w, 5)),
            (be * be * b1, &k.d(&eta_t, 4)),
            (-al * be * b, &k.d(&eta_w, 3)),
            (-al * be * (c + d), &k.d(&k.mul(eta, &k.d(&w, 2)), 1)),
        ]);
        let extra2 = lin(&[
            (be * be * c1, &k.d(eta, 5)),
            (be * be * d1, &k.d(&w_t, 4)),
            (-al * be * d, &k.mul(&w, &k.d(&w, 3))),
            (al * be, &k.d(&k.mul(eta, &k.d(eta, 2)), 1)),
            (-al * be * (d - 3.0 * c - 1.0), &k.mul(&w_x, &k.d(&w, 2))),
        ]);
        r1 = lin(&[(1.0, &r1), (1.0, &extra1)]);
        r2 = lin(&[(1.0, &r2), (1.0, &extra2)]);
    }
    Residual {
        r1: k.norm(&r1),
        r2: k.norm(&r2),
    }
}

/// A right-moving `sech²` bump with unit L² norm, centred in the period.
pub fn unit_sech2(grid: Grid, width: f64) -> Result<Field> {
    let mid = grid.length() / 2.0;
    let f = Field::from_fn(grid, |x| 1.0 / ((x - mid) / width).cosh().powi(2))?;
    let norm = sobolev_norm_coeffs(&grid, f.spectral(), 0.0);
    Ok(f.scale(1.0 / norm))
}

/// ε-sweep settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DerivationSweepConfig {
    pub epsilons: Vec<f64>,
    pub grid: Grid,
    pub model: ModelParameters,
    /// Residuals are measured on `[0, horizon]`.
    pub horizon: f64,
    /// Number of equally spaced measurement times, including both ends.
    pub samples: usize,
    pub dt: f64,
    pub width: f64,
    pub second_order: bool,
}

impl Default for DerivationSweepConfig {
    fn default() -> Self {
        DerivationSweepConfig {
            epsilons: vec![0.1, 0.05, 0.025, 0.0125],
            grid: Grid::new(256, 40.0).expect("valid grid"),
            model: ModelParameters::reference(),
            horizon: 1.0,
            samples: 5,
            dt: 1e-2,
            width: 1.0,
            second_order: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivationRow {
    pub eps: f64,
    /// Maxima over the measurement times.
    pub first: Residual,
    pub second: Option<Residual>,
    /// `max_t ‖w − η‖_{L²}` for the first-order velocity.
    pub velocity_defect: f64,
    /// `max_t ‖η_t + η_x‖_{L²}`.
    pub leading_defect: f64,
    /// Exponent fitted on this and all larger ε (NaN for the first row).
    pub slope_running: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DerivationSweep {
    pub rows: Vec<DerivationRow>,
    pub first_fit: Option<LinearFit>,
    pub second_fit: Option<LinearFit>,
    pub velocity_fit: Option<LinearFit>,
    pub leading_fit: Option<LinearFit>,
}

/// Residual maxima over `[0, horizon]` for one ε.
pub fn measure(eta0: &Field, eps: f64, cfg: &DerivationSweepConfig) -> Result<DerivationRow> {
    let p = DerivationParameters::symmetric(eps, cfg.model)?;
    let grid = *eta0.grid();
    let dynamics = p.dynamics(grid)?;
    let k = Calculus::new(grid);
    let samples = cfg.samples.max(1);
    let per = if samples > 1 {
        ((cfg.horizon / (samples - 1) as f64 / cfg.dt) - 1e-9).ceil().max(1.0) as usize
    } else {
        1
    };
    let dt = if samples > 1 {
        cfg.horizon / ((samples - 1) * per) as f64
    } else {
        cfg.dt
    };
    let stepper = EtdRk4::new(&dynamics, dt);
    let mut state = eta0.spectral().to_vec();
    state[grid.nyquist_slot()] = Complex64::new(0.0, 0.0);
    let mut row = DerivationRow {
        eps,
        first: Residual { r1: 0.0, r2: 0.0 },
        second: cfg.second_order.then_some(Residual { r1: 0.0, r2: 0.0 }),
        velocity_defect: 0.0,
        leading_defect: 0.0,
        slope_running: f64::NAN,
    };
    for i in 0..samples {
        if i > 0 {
            for _ in 0..per {
                state = stepper.step(&state);
            }
        }
        let r = residual_hat(&dynamics, &state, &p, Order::First);
        row.first.r1 = row.first.r1.max(r.r1);
        row.first.r2 = row.first.r2.max(r.r2);
        if let Some(s) = row.second.as_mut() {
            let r = residual_hat(&dynamics, &state, &p, Order::Second);
            s.r1 = s.r1.max(r.r1);
            s.r2 = s.r2.max(r.r2);
        }
        let (eta_t, _) = time_derivatives_hat(&dynamics, &state);
        let w = assemble(&state, &terms_hat(&k, &state, &eta_t, &p), &p, Order::First);
        let dw: Coeffs = w.iter().zip(&state).map(|(a, b)| a - b).collect();
        row.velocity_defect = row.velocity_defect.max(k.norm(&dw));
        let lead = lin(&[(1.0, &eta_t), (1.0, &k.d(&state, 1))]);
        row.leading_defect = row.leading_defect.max(k.norm(&lead));
    }
    if !(row.first.r1.is_finite() && row.first.r2.is_finite()) {
        return Err(Error::NonFinite("derivation residual"));
    }
    Ok(row)
}

/// Runs every ε (in parallel) and fits the residual orders.
pub fn residual_sweep(cfg: &DerivationSweepConfig) -> Result<DerivationSweep> {
    if cfg.epsilons.is_empty() {
        return Err(Error::invalid("epsilons", "need at least one value"));
    }
    if !(cfg.horizon.is_finite() && cfg.horizon > 0.0 && cfg.dt > 0.0 && cfg.width > 0.0) {
        return Err(Error::invalid("derivation", "horizon, dt and width must be positive"));
    }
    let eta0 = unit_sech2(cfg.grid, cfg.width)?;
    let mut rows = cfg
        .epsilons
        .par_iter()
        .map(|&e| measure(&eta0, e, cfg))
        .collect::<Result<Vec<_>>>()?;
    let fit = |rows: &[DerivationRow], sel: &dyn Fn(&DerivationRow) -> Option<f64>| -> Option<LinearFit> {
        let pts: Vec<(f64, f64)> = rows.iter().filter_map(|r| sel(r).map(|v| (r.eps, v))).collect();
        if pts.len() < 2 {
            return None;
        }
        let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
        log_log_fit(&x, &y).ok()
    };
    let running: Vec<f64> = (1..=rows.len())
        .map(|m| fit(&rows[..m], &|r| Some(r.first.combined())).map_or(f64::NAN, |f| f.slope))
        .collect();
    for (r, s) in rows.iter_mut().zip(running) {
        r.slope_running = s;
    }
    Ok(DerivationSweep {
        first_fit: fit(&rows, &|r| Some(r.first.combined())),
        second_fit: fit(&rows, &|r| r.second.map(|s| s.combined())),
        velocity_fit: fit(&rows, &|r| Some(r.velocity_defect)),
        leading_fit: fit(&rows, &|r| Some(r.leading_defect)),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(128, 40.0).unwrap()
    }

    #[test]
    fn zero_data_has_zero_terms() {
        let g = grid();
        let p = DerivationParameters::symmetric(0.1, ModelParameters::reference()).unwrap();
        let z = Field::zeros(g);
        let t = correction_terms(&z, &z, &p).unwrap();
        for f in [&t.a, &t.b, &t.c, &t.d, &t.e] {
            assert!(f.is_zero());
        }
    }

    #[test]
    fn pointwise_terms() {
        let g = Grid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let p = DerivationParameters::symmetric(0.1, ModelParameters::reference()).unwrap();
        let eta = Field::from_fn(g, f64::cos).unwrap();
        let t = correction_terms(&eta, &Field::zeros(g), &p).unwrap();
        let want_e = Field::from_fn(g, |x| x.cos().powi(3) / 8.0).unwrap();
        assert!(t.e.sub(&want_e).unwrap().max_abs() < 1e-15);
        // the product is truncated to the grid, so it needs the finer grid
        let fine = Grid::new(512, 40.0).unwrap();
        let unit = unit_sech2(fine, 1.0).unwrap();
        let t = correction_terms(&unit, &Field::zeros(fine), &p).unwrap();
        let l1: f64 = t.a.samples().iter().map(|v| v.abs()).sum::<f64>() * fine.dx();
        assert!((l1 - 0.25).abs() < 1e-12, "{l1}");
    }

    #[test]
    fn velocity_without_corrections_is_eta() {
        let g = grid();
        let p = DerivationParameters::new(0.0, 0.0, ModelParameters::reference()).unwrap();
        let eta = unit_sech2(g, 1.0).unwrap();
        let (eta_t, _) = time_derivatives(&eta, &p).unwrap();
        for order in [Order::First, Order::Second] {
            let w = reconstruct_velocity(&eta, &eta_t, &p, order).unwrap();
            assert!(w.sub(&eta).unwrap().max_abs() < 1e-15);
        }
    }

    #[test]
    fn transport_limit_has_no_residual() {
        let p = DerivationParameters::new(0.0, 0.0, ModelParameters::reference()).unwrap();
        let eta = unit_sech2(grid(), 1.0).unwrap();
        let r = abcd_residual_first(&eta, &p).unwrap();
        assert!(r.r1 < 1e-12 && r.r2 < 1e-12, "{r:?}");
    }

    #[test]
    fn residual_is_translation_invariant() {
        let p = DerivationParameters::symmetric(0.05, ModelParameters::reference()).unwrap();
        let eta = unit_sech2(grid(), 1.0).unwrap();
        let a = abcd_residual_first(&eta, &p).unwrap();
        let b = abcd_residual_first(&eta.shifted(17), &p).unwrap();
        assert!(((a.r1 - b.r1) / a.r1).abs() < 1e-10);
        assert!(((a.r2 - b.r2) / a.r2).abs() < 1e-10);
    }

    #[test]
    fn first_order_residual_halves_quadratically() {
        let eta = unit_sech2(grid(), 1.0).unwrap();
        let m = ModelParameters::reference();
        let r: Vec<f64> = [0.04, 0.02]
            .iter()
            .map(|&e| {
                abcd_residual_first(&eta, &DerivationParameters::symmetric(e, m).unwrap())
                    .unwrap()
                    .combined()
            })
            .collect();
        let ratio = r[0] / r[1];
        assert!(ratio > 3.4 && ratio < 4.6, "ratio {ratio}");
    }

    #[test]
    fn parameters_out_of_range() {
        let m = ModelParameters::reference();
        assert!(DerivationParameters::new(1.0, 0.1, m).is_err());
        assert!(DerivationParameters::new(0.1, -0.1, m).is_err());
    }
}
