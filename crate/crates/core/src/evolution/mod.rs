//! Time evolution of the fifth-order BBM equation.
//!
//! In Fourier variables the equation reads
//!
//! ```text
//! i η̂_t = φ(ξ) η̂ + τ(ξ) (η²)^ − ⅛ ψ(ξ) (η³)^ − 7/48 ψ(ξ) ((η_x)²)^ ,
//! ```
//!
//! so the linear part is the exact unitary group `S(t) = e^{−iφ(ξ)t}` and
//! the nonlinear part is smoothing. [`Dynamics`] precomputes everything
//! needed on a given grid; the steppers and the Duhamel solver consume it.
//!
//! The model can optionally carry the small amplitude and dispersion
//! parameters (α, β) of the unrescaled long-wave equation; with
//! `α = β = 1` it is the equation above.

mod etd;
mod initial;
mod picard;
mod run;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coefficients::{Bbm5Coefficients, ENERGY_GAMMA};
use crate::error::{Error, Result};
use crate::spectral::{self, fft_forward, fft_inverse, spread, Field, Grid};

pub use etd::{EtdRk4, StageStates};
pub use initial::{scale_to_norm, InitialCondition};
pub use picard::{duhamel_picard, existence_time_bound, PicardOutcome};
pub use run::{run_simulation, Monitors, NormSeries, RunReport};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Amplitude (α) and dispersion (β) parameters of the long-wave scaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scaling {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for Scaling {
    fn default() -> Self {
        Scaling { alpha: 1.0, beta: 1.0 }
    }
}

/// What the right-hand side contains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhsSpec {
    pub coefficients: Bbm5Coefficients,
    /// Alias-free products (3/2-padding for quadratic, 2-padding for cubic terms).
    pub dealias: bool,
    /// When false the equation is the linear dispersive flow only.
    pub nonlinear: bool,
    pub scaling: Scaling,
}

impl RhsSpec {
    pub fn new(coefficients: Bbm5Coefficients) -> Self {
        RhsSpec {
            coefficients,
            dealias: true,
            nonlinear: true,
            scaling: Scaling::default(),
        }
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    pub fn linear_only(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn with_scaling(mut self, alpha: f64, beta: f64) -> Self {
        self.scaling = Scaling { alpha, beta };
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    PicardDuhamel,
    #[default]
    ExponentialRk4,
}

/// Time-integration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// The constant `C_s` of the local existence time; not known in closed form.
    pub contraction_constant: f64,
    /// Sobolev index used by the Picard contraction diagnostics.
    pub sobolev_index: f64,
}

impl Default for StepperConfig {
    fn default() -> Self {
        StepperConfig {
            scheme: Scheme::ExponentialRk4,
            dt: 1e-3,
            picard_tol: 1e-12,
            picard_max_iter: 60,
            contraction_constant: 1.0,
            sobolev_index: 1.0,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.picard_tol.is_finite() && self.picard_tol > 0.0) {
            return Err(Error::invalid("picard_tol", "must be positive"));
        }
        if self.picard_max_iter == 0 {
            return Err(Error::invalid("picard_max_iter", "must be at least 1"));
        }
        if !(self.contraction_constant.is_finite() && self.contraction_constant > 0.0) {
            return Err(Error::invalid("contraction_constant", "must be positive"));
        }
        if !(self.sobolev_index.is_finite() && self.sobolev_index >= 0.0) {
            return Err(Error::invalid("sobolev_index", "must be >= 0"));
        }
        Ok(())
    }

    /// Number of steps covering `[0, horizon]` with step at most `dt`.
    pub(crate) fn steps_for(&self, horizon: f64) -> usize {
        ((horizon / self.dt) - 1e-9).ceil().max(1.0) as usize
    }
}

/// The equation compiled onto one grid: linear frequencies and the
/// multipliers of the three nonlinear terms, all with the Nyquist entry
/// zeroed.
#[derive(Debug, Clone)]
pub struct Dynamics {
    grid: Grid,
    spec: RhsSpec,
    /// `φ(ξ_j)`; the linear flow is `η̂_t = −i φ η̂`.
    frequency: Vec<f64>,
    quadratic: Vec<f64>,
    cubic: Vec<f64>,
    gradient: Vec<f64>,
    ddx: Vec<Complex64>,
}

impl Dynamics {
    pub fn new(grid: Grid, spec: RhsSpec) -> Result<Self> {
        spec.coefficients.require_wellposed()?;
        let Scaling { alpha, beta } = spec.scaling;
        if !(alpha.is_finite() && beta.is_finite() && alpha >= 0.0 && beta >= 0.0) {
            return Err(Error::invalid("scaling", "alpha and beta must be finite and >= 0"));
        }
        let c = spec.coefficients;
        let ny = grid.nyquist_slot();
        let mut frequency = Vec::with_capacity(grid.n());
        let mut quadratic = Vec::with_capacity(grid.n());
        let mut cubic = Vec::with_capacity(grid.n());
        let mut gradient = Vec::with_capacity(grid.n());
        for k in 0..grid.n() {
            let xi = if k == ny { 0.0 } else { grid.wavenumber(k) };
            let x2 = xi * xi;
            let den = 1.0 + c.gamma1() * beta * x2 + c.delta1() * beta * beta * x2 * x2;
            frequency.push(xi * (1.0 - c.gamma2() * beta * x2 + c.delta2() * beta * beta * x2 * x2) / den);
            quadratic.push(alpha * (3.0 * xi - 4.0 * c.gamma() * beta * xi * x2) / (4.0 * den));
            cubic.push(-alpha * alpha / 8.0 * xi / den);
            gradient.push(-7.0 / 48.0 * alpha * beta * xi / den);
        }
        Ok(Dynamics {
            grid,
            spec,
            frequency,
            quadratic,
            cubic,
            gradient,
            ddx: spectral::derivative_factors(&grid, 1),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn spec(&self) -> &RhsSpec {
        &self.spec
    }

    pub fn frequency(&self) -> &[f64] {
        &self.frequency
    }

    fn padded_sizes(&self) -> (usize, usize) {
        let n = self.grid.n();
        if self.spec.dealias {
            (3 * n / 2, 2 * n)
        } else {
            (n, n)
        }
    }

    fn derivative(&self, c: &[Complex64]) -> Vec<Complex64> {
        c.iter().zip(&self.ddx).map(|(a, b)| a * b).collect()
    }

    /// `−i [q (P2)^ + c (P3)^ + g (G2)^]` from truncated product coefficients.
    fn assemble(&self, p2: &[Complex64], p3: &[Complex64], g2: &[Complex64]) -> Vec<Complex64> {
        (0..self.grid.n())
            .map(|k| {
                let z = self.quadratic[k] * p2[k] + self.cubic[k] * p3[k] + self.gradient[k] * g2[k];
                Complex64::new(z.im, -z.re)
            })
            .collect()
    }

    /// Nonlinear part `N̂(η)` of `η̂_t = −iφη̂ + N̂(η)`.
    pub fn nonlinear_hat(&self, eta: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.n();
        if !self.spec.nonlinear {
            return vec![ZERO; n];
        }
        let (m2, m3) = self.padded_sizes();
        let eta_x = self.derivative(eta);

        let [u, ux] = physical_pair(eta, &eta_x, m2);
        let sq: Vec<f64> = u.iter().map(|x| x * x).collect();
        let gsq: Vec<f64> = ux.iter().map(|x| x * x).collect();
        let [p2, g2] = spectral_pair(&sq, &gsq, n);

        let u3 = if m3 == m2 { u } else { physical_single(eta, m3) };
        let cube: Vec<f64> = u3.iter().map(|x| x * x * x).collect();
        let p3 = spectral_single(&cube, n);

        self.assemble(&p2, &p3, &g2)
    }

    /// `N̂(u + v) − N̂(u)` written out term by term:
    /// `τ(v² + 2uv) − ⅛ψ(3u²v + 3uv² + v³) − 7/48 ψ(2u_x v_x + v_x²)`.
    pub fn difference_nonlinear_hat(&self, u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.n();
        if !self.spec.nonlinear {
            return vec![ZERO; n];
        }
        let (_, m) = self.padded_sizes();
        let [pu, pv] = physical_pair(u, v, m);
        let [pux, pvx] = physical_pair(&self.derivative(u), &self.derivative(v), m);
        let quad: Vec<f64> = pu.iter().zip(&pv).map(|(u, v)| v * v + 2.0 * u * v).collect();
        let grad: Vec<f64> = pux.iter().zip(&pvx).map(|(ux, vx)| 2.0 * ux * vx + vx * vx).collect();
        let cube: Vec<f64> = pu
            .iter()
            .zip(&pv)
            .map(|(u, v)| 3.0 * u * u * v + 3.0 * u * v * v + v * v * v)
            .collect();
        let [p2, g2] = spectral_pair(&quad, &grad, n);
        let p3 = spectral_single(&cube, n);
        self.assemble(&p2, &p3, &g2)
    }

    /// Directional derivative `N̂'(η)[g]`.
    pub fn linearized_nonlinear_hat(&self, eta: &[Complex64], dir: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.n();
        if !self.spec.nonlinear {
            return vec![ZERO; n];
        }
        let (_, m) = self.padded_sizes();
        let [pe, pg] = physical_pair(eta, dir, m);
        let [pex, pgx] = physical_pair(&self.derivative(eta), &self.derivative(dir), m);
        let quad: Vec<f64> = pe.iter().zip(&pg).map(|(e, g)| 2.0 * e * g).collect();
        let grad: Vec<f64> = pex.iter().zip(&pgx).map(|(e, g)| 2.0 * e * g).collect();
        let cube: Vec<f64> = pe.iter().zip(&pg).map(|(e, g)| 3.0 * e * e * g).collect();
        let [p2, g2] = spectral_pair(&quad, &grad, n);
        let p3 = spectral_single(&cube, n);
        self.assemble(&p2, &p3, &g2)
    }

    /// Full right-hand side `η̂_t`.
    pub fn rhs_hat(&self, eta: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.nonlinear_hat(eta);
        for ((o, e), w) in out.iter_mut().zip(eta).zip(&self.frequency) {
            *o += Complex64::new(0.0, -w) * e;
        }
        out
    }

    /// Second time derivative `η̂_tt = −iφη̂_t + N̂'(η)[η_t]`.
    pub fn second_time_derivative_hat(&self, eta: &[Complex64], eta_t: &[Complex64]) -> Vec<Complex64> {
        let mut out = self.linearized_nonlinear_hat(eta, eta_t);
        for ((o, e), w) in out.iter_mut().zip(eta_t).zip(&self.frequency) {
            *o += Complex64::new(0.0, -w) * e;
        }
        out
    }

    /// Multiplies by `e^{−iφ t}` in place.
    pub fn propagate(&self, c: &mut [Complex64], t: f64) {
        for (z, w) in c.iter_mut().zip(&self.frequency) {
            *z *= Complex64::from_polar(1.0, -w * t);
        }
    }

    /// Energy `½∫ η² + γ1β η_x² + δ1β² η_xx²`.
    pub fn energy_hat(&self, c: &[Complex64]) -> f64 {
        let beta = self.spec.scaling.beta;
        let k = &self.spec.coefficients;
        let scaled = Bbm5Coefficients::from_values(
            k.gamma1() * beta,
            k.gamma2(),
            k.delta1() * beta * beta,
            k.delta2(),
            k.gamma(),
        );
        spectral::energy_coeffs(&self.grid, c, &scaled)
    }

    /// Predicted `dE/dt = αβ(γ − 7/48) ∫ η_x³ dx` (zero for the linear flow).
    pub fn drift_predicted_hat(&self, c: &[Complex64]) -> f64 {
        if !self.spec.nonlinear {
            return 0.0;
        }
        let Scaling { alpha, beta } = self.spec.scaling;
        let pre = alpha * beta * (self.spec.coefficients.gamma() - ENERGY_GAMMA);
        if pre == 0.0 {
            return 0.0;
        }
        pre * cubed_integral(&self.grid, &self.derivative(c))
    }
}

/// Exact `∫ f³ dx` for coefficients without a Nyquist mode.
fn cubed_integral(grid: &Grid, c: &[Complex64]) -> f64 {
    let m = 2 * grid.n();
    let phys = spectral::pad_to_physical(c, m);
    phys.iter().map(|z| z.re * z.re * z.re).sum::<f64>() * grid.length() / m as f64
}

/// Physical values of two real functions on an `m`-point grid via one
/// complex inverse FFT.
fn physical_pair(a: &[Complex64], b: &[Complex64], m: usize) -> [Vec<f64>; 2] {
    let mut buf = vec![ZERO; m];
    spread(a, &mut buf);
    let mut bb = vec![ZERO; m];
    spread(b, &mut bb);
    for (x, y) in buf.iter_mut().zip(&bb) {
        *x += Complex64::new(-y.im, y.re);
    }
    fft_inverse(&mut buf);
    [buf.iter().map(|z| z.re).collect(), buf.iter().map(|z| z.im).collect()]
}

fn physical_single(a: &[Complex64], m: usize) -> Vec<f64> {
    spectral::pad_to_physical(a, m).iter().map(|z| z.re).collect()
}

/// Truncated coefficients of two real `m`-point signals via one complex FFT.
fn spectral_pair(a: &[f64], b: &[f64], n: usize) -> [Vec<Complex64>; 2] {
    let m = a.len();
    let mut buf: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
    fft_forward(&mut buf);
    let inv = 1.0 / m as f64;
    let mut ca = vec![ZERO; n];
    let mut cb = vec![ZERO; n];
    let mut put = |dst: usize, src: usize| {
        let z = buf[src];
        let zc = buf[(m - src) % m].conj();
        ca[dst] = 0.5 * (z + zc) * inv;
        let d = 0.5 * (z - zc) * inv;
        cb[dst] = Complex64::new(d.im, -d.re);
    };
    for k in 0..n / 2 {
        put(k, k);
    }
    for k in 1..n / 2 {
        put(n - k, m - k);
    }
    [ca, cb]
}

fn spectral_single(a: &[f64], n: usize) -> Vec<Complex64> {
    let buf = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    spectral::truncate_from_physical(buf, n)
}

/// The real field `N(f)`: the nonlinear part of the time derivative.
pub fn nonlinear_rhs(f: &Field, spec: &RhsSpec) -> Result<Field> {
    let dynamics = Dynamics::new(*f.grid(), *spec)?;
    Field::from_spectral(*f.grid(), dynamics.nonlinear_hat(f.spectral()))
}

/// Exact linear propagator `S(t)`: coefficients times `e^{−iφ(ξ)t}`.
pub fn semigroup_apply(f: &Field, t: f64, c: &Bbm5Coefficients) -> Result<Field> {
    let dynamics = Dynamics::new(*f.grid(), RhsSpec::new(*c).linear_only())?;
    let mut coeffs = f.spectral().to_vec();
    dynamics.propagate(&mut coeffs, t);
    coeffs[f.grid().nyquist_slot()] = ZERO;
    Field::from_spectral(*f.grid(), coeffs)
}

/// One step of the fourth-order exponential integrator.
pub fn exponential_rk4_step(f: &Field, spec: &RhsSpec, dt: f64) -> Result<Field> {
    let dynamics = Dynamics::new(*f.grid(), *spec)?;
    let stepper = EtdRk4::new(&dynamics, dt);
    let mut state = f.spectral().to_vec();
    state[f.grid().nyquist_slot()] = ZERO;
    Field::from_spectral(*f.grid(), stepper.step(&state))
}

/// `(γ − 7/48) ∫ (f_x)³ dx`, the rate of change of the energy.
pub fn energy_drift_predicted(f: &Field, c: &Bbm5Coefficients) -> Result<f64> {
    c.require_wellposed()?;
    let pre = c.gamma() - ENERGY_GAMMA;
    if pre == 0.0 {
        return Ok(0.0);
    }
    let fx = spectral::spectral_derivative(f, 1);
    Ok(pre * spectral::integral_of_power(&fx, 3))
}
