//! Periodic grid functions and their Fourier coefficients.
//!
//! Coefficients use the amplitude convention
//!
//! ```text
//! c_j = (1/n) Σ_k u(x_k) e^{−iξ_j x_k},      u(x) = Σ_j c_j e^{iξ_j x},
//! ```
//!
//! with `ξ_j = 2πj/L` and `j ∈ {−n/2+1, …, n/2}`. Coefficient vectors are
//! stored in FFT order: slot `k < n/2` holds `j = k`, slot `n/2` holds the
//! Nyquist mode, and slot `k > n/2` holds `j = k − n`.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::coefficients::Bbm5Coefficients;
use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized forward FFT in place.
pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

/// Unnormalized inverse FFT in place.
pub(crate) fn fft_inverse(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(buf);
}

/// Uniform periodic discretization of `[0, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct Grid {
    n: usize,
    length: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n: usize,
    length: f64,
}

impl TryFrom<RawGrid> for Grid {
    type Error = Error;
    fn try_from(r: RawGrid) -> Result<Self> {
        Grid::new(r.n, r.length)
    }
}

impl From<Grid> for RawGrid {
    fn from(g: Grid) -> Self {
        RawGrid {
            n: g.n,
            length: g.length,
        }
    }
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::invalid("n", format!("must be even and >= 4, got {n}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::invalid("length", format!("must be positive, got {length}")));
        }
        Ok(Grid { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn nyquist_slot(&self) -> usize {
        self.n / 2
    }

    /// Signed mode index `j` stored in FFT slot `k`.
    pub fn mode(&self, slot: usize) -> i64 {
        if slot <= self.n / 2 {
            slot as i64
        } else {
            slot as i64 - self.n as i64
        }
    }

    /// FFT slot holding mode `j`, if `j` is on the lattice.
    pub fn slot(&self, j: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if j > half || j <= -half {
            None
        } else if j >= 0 {
            Some(j as usize)
        } else {
            Some((self.n as i64 + j) as usize)
        }
    }

    /// Fundamental wavenumber `2π/L`.
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn wavenumber(&self, slot: usize) -> f64 {
        self.dk() * self.mode(slot) as f64
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.wavenumber(k)).collect()
    }

    /// The Nyquist wavenumber `πn/L`.
    pub fn max_wavenumber(&self) -> f64 {
        self.wavenumber(self.n / 2)
    }

    pub fn points(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n).map(|k| k as f64 * dx).collect()
    }
}

/// Forward transform of real samples into amplitude-convention coefficients.
pub fn spectrum_of(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_forward(&mut buf);
    let inv = 1.0 / n as f64;
    for c in &mut buf {
        *c *= inv;
    }
    buf
}

/// Inverse transform; returns the full complex samples.
pub fn complex_samples_of(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    fft_inverse(&mut buf);
    buf
}

/// Largest `|Im u(x_k)|` of the function with the given coefficients.
pub fn imag_residue(coeffs: &[Complex64]) -> f64 {
    complex_samples_of(coeffs).iter().fold(0.0, |m, z| m.max(z.im.abs()))
}

/// A real periodic grid function together with its Fourier coefficients.
///
/// The two representations are kept consistent; every operation returns a
/// new `Field`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    samples: Vec<f64>,
    spectral: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Self {
        Field {
            grid,
            samples: vec![0.0; grid.n],
            spectral: vec![Complex64::new(0.0, 0.0); grid.n],
        }
    }

    /// Builds a field from point values, filling the spectral cache.
    pub fn from_samples(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.n {
            return Err(Error::invalid(
                "samples",
                format!("expected {} values, got {}", grid.n, samples.len()),
            ));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("field samples"));
        }
        let spectral = spectrum_of(&samples);
        Ok(Field {
            grid,
            samples,
            spectral,
        })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples = grid.points().into_iter().map(f).collect();
        Self::from_samples(grid, samples)
    }

    /// Builds a field from coefficients. Hermitian symmetry is enforced by
    /// averaging each `±j` pair; the zero and Nyquist modes are made real.
    pub fn from_spectral(grid: Grid, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.n {
            return Err(Error::invalid(
                "spectral",
                format!("expected {} coefficients, got {}", grid.n, coeffs.len()),
            ));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("field coefficients"));
        }
        symmetrize(&mut coeffs);
        let samples = complex_samples_of(&coeffs).iter().map(|z| z.re).collect();
        Ok(Field {
            grid,
            samples,
            spectral: coeffs,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spectral(&self) -> &[Complex64] {
        &self.spectral
    }

    /// Coefficient of mode `j` (zero off the lattice).
    pub fn coefficient(&self, j: i64) -> Complex64 {
        self.grid.slot(j).map_or(Complex64::new(0.0, 0.0), |k| self.spectral[k])
    }

    /// The mean value, i.e. the zero mode.
    pub fn zero_mode(&self) -> f64 {
        self.spectral[0].re
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.spectral.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    fn check_grid(&self, other: &Field) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Spectral sum `self + other`.
    pub fn add(&self, other: &Field) -> Result<Field> {
        self.check_grid(other)?;
        let coeffs = self.spectral.iter().zip(&other.spectral).map(|(a, b)| a + b).collect();
        Field::from_spectral(self.grid, coeffs)
    }

    /// Spectral difference `self − other`.
    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.check_grid(other)?;
        let coeffs = self.spectral.iter().zip(&other.spectral).map(|(a, b)| a - b).collect();
        Field::from_spectral(self.grid, coeffs)
    }

    pub fn scale(&self, factor: f64) -> Field {
        Field {
            grid: self.grid,
            samples: self.samples.iter().map(|x| x * factor).collect(),
            spectral: self.spectral.iter().map(|c| c * factor).collect(),
        }
    }

    /// Circular shift by a whole number of grid points (`x ↦ u(x − shift·dx)`).
    pub fn shifted(&self, shift: usize) -> Field {
        let mut samples = self.samples.clone();
        samples.rotate_right(shift % self.grid.n);
        Field::from_samples(self.grid, samples).expect("shift of a finite field is finite")
    }

    /// Copy with the Nyquist coefficient removed.
    pub fn without_nyquist(&self) -> Field {
        let mut c = self.spectral.clone();
        c[self.grid.nyquist_slot()] = Complex64::new(0.0, 0.0);
        Field::from_spectral(self.grid, c).expect("finite coefficients")
    }
}

pub(crate) fn symmetrize(c: &mut [Complex64]) {
    let n = c.len();
    c[0].im = 0.0;
    c[n / 2].im = 0.0;
    for k in 1..n / 2 {
        let avg = 0.5 * (c[k] + c[n - k].conj());
        c[k] = avg;
        c[n - k] = avg.conj();
    }
}

/// Same as [`Field::from_samples`]: the forward transform with the cache filled.
pub fn to_spectral(grid: Grid, samples: Vec<f64>) -> Result<Field> {
    Field::from_samples(grid, samples)
}

/// `(iξ)^order` as a complex factor; the Nyquist factor is zero for odd order.
pub(crate) fn derivative_factors(grid: &Grid, order: u32) -> Vec<Complex64> {
    let ny = grid.nyquist_slot();
    (0..grid.n)
        .map(|k| {
            if order % 2 == 1 && k == ny {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, grid.wavenumber(k)).powu(order)
            }
        })
        .collect()
}

/// `∂_x^order f`, computed by multiplying coefficients by `(iξ)^order`.
pub fn spectral_derivative(f: &Field, order: u32) -> Field {
    if order == 0 {
        return f.clone();
    }
    let factors = derivative_factors(&f.grid, order);
    let coeffs = f.spectral.iter().zip(&factors).map(|(c, m)| c * m).collect();
    Field::from_spectral(f.grid, coeffs).expect("derivative of a finite field is finite")
}

/// Discrete `H^s` norm `sqrt(L Σ (1+ξ²)^s |c_j|²)`.
pub fn sobolev_norm(f: &Field, s: f64) -> f64 {
    sobolev_norm_coeffs(&f.grid, &f.spectral, s)
}

pub(crate) fn sobolev_norm_coeffs(grid: &Grid, c: &[Complex64], s: f64) -> f64 {
    let sum: f64 = c
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let xi = grid.wavenumber(k);
            (1.0 + xi * xi).powf(s) * z.norm_sqr()
        })
        .sum();
    (grid.length * sum).sqrt()
}

/// Homogeneous `Ḣ^s` seminorm `sqrt(L Σ |ξ|^{2s} |c_j|²)`; the zero mode
/// contributes only when `s = 0`.
pub fn homogeneous_sobolev_norm(f: &Field, s: f64) -> f64 {
    let g = &f.grid;
    let sum: f64 = f
        .spectral
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let xi = g.wavenumber(k).abs();
            let w = if xi == 0.0 {
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                xi.powf(2.0 * s)
            };
            w * z.norm_sqr()
        })
        .sum();
    (g.length * sum).sqrt()
}

/// `½ ∫ f² + γ1 f_x² + δ1 f_xx² dx`, evaluated as a spectral sum.
pub fn energy(f: &Field, c: &Bbm5Coefficients) -> Result<f64> {
    c.require_wellposed()?;
    Ok(energy_coeffs(&f.grid, &f.spectral, c))
}

pub(crate) fn energy_coeffs(grid: &Grid, spec: &[Complex64], c: &Bbm5Coefficients) -> f64 {
    let (g1, d1) = (c.gamma1(), c.delta1());
    let sum: f64 = spec
        .iter()
        .enumerate()
        .map(|(k, z)| {
            let xi2 = grid.wavenumber(k).powi(2);
            (1.0 + g1 * xi2 + d1 * xi2 * xi2) * z.norm_sqr()
        })
        .sum();
    0.5 * grid.length * sum
}

/// Zeroes every coefficient with `|ξ_j| > cutoff`.
pub fn low_pass(f: &Field, cutoff: f64) -> Field {
    let g = f.grid;
    let coeffs = f
        .spectral
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if g.wavenumber(k).abs() <= cutoff {
                *c
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Field::from_spectral(g, coeffs).expect("finite coefficients")
}

/// Low-pass with a smooth `½(1 − tanh((|ξ| − cutoff)/width))` roll-off.
pub fn smooth_low_pass(f: &Field, cutoff: f64, width: f64) -> Field {
    let g = f.grid;
    let coeffs = f
        .spectral
        .iter()
        .enumerate()
        .map(|(k, c)| c * (0.5 * (1.0 - ((g.wavenumber(k).abs() - cutoff) / width).tanh())))
        .collect();
    Field::from_spectral(g, coeffs).expect("finite coefficients")
}

/// Zero-padded physical samples of the function with coefficients `c` on a
/// finer grid of `m ≥ n` points. The Nyquist mode of `c` is dropped.
pub(crate) fn pad_to_physical(c: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    spread(c, &mut buf);
    fft_inverse(&mut buf);
    buf
}

/// Copies the non-Nyquist modes of `c` into the larger FFT-ordered buffer.
pub(crate) fn spread(c: &[Complex64], buf: &mut [Complex64]) {
    let n = c.len();
    let m = buf.len();
    buf[..n / 2].copy_from_slice(&c[..n / 2]);
    buf[m - (n / 2 - 1)..].copy_from_slice(&c[n / 2 + 1..]);
}

/// Forward transform of `m` physical values and truncation back to `n`
/// modes (Nyquist set to zero). The input buffer is consumed.
pub(crate) fn truncate_from_physical(mut buf: Vec<Complex64>, n: usize) -> Vec<Complex64> {
    let m = buf.len();
    fft_forward(&mut buf);
    let inv = 1.0 / m as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n / 2 {
        out[k] = buf[k] * inv;
    }
    for k in 1..n / 2 {
        out[n - k] = buf[m - k] * inv;
    }
    out
}

/// Exact (alias-free) `∫ f^p dx` of the trigonometric interpolant of `f`.
/// A Nyquist coefficient is treated as `c cos(ξ_N x)`.
pub fn integral_of_power(f: &Field, p: u32) -> f64 {
    let n = f.grid.n;
    // a degree-p product of modes |j| <= n/2 has |j| <= pn/2 < m
    let m = (p as usize).max(1) * n / 2 + 2;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    spread(&f.spectral, &mut buf);
    let half_nyq = 0.5 * f.spectral[n / 2];
    buf[n / 2] += half_nyq;
    buf[m - n / 2] += half_nyq;
    fft_inverse(&mut buf);
    let sum: f64 = buf.iter().map(|z| z.re.powi(p as i32)).sum();
    sum * f.grid.length / m as f64
}

/// A random real field with coefficients `(1+ξ²)^{−(s+1)/2} · N(0,1)`
/// (complex Gaussian for `j ≠ 0`), Nyquist mode zero.
pub fn random_field<R: Rng + ?Sized>(grid: Grid, s: f64, rng: &mut R) -> Field {
    let n = grid.n;
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let weight = |xi: f64| (1.0 + xi * xi).powf(-(s + 1.0) / 2.0);
    c[0] = Complex64::new(weight(0.0) * rng.sample::<f64, _>(StandardNormal), 0.0);
    for k in 1..n / 2 {
        let w = weight(grid.wavenumber(k)) * std::f64::consts::FRAC_1_SQRT_2;
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c[k] = Complex64::new(w * re, w * im);
        c[n - k] = c[k].conj();
    }
    Field::from_spectral(grid, c).expect("finite coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> Grid {
        Grid::new(64, 2.0 * PI).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(3, 1.0).is_err());
        assert!(Grid::new(6, 0.0).is_err());
        assert!(Grid::new(2, 1.0).is_err());
        let g = Grid::new(8, 2.0 * PI).unwrap();
        let modes: Vec<i64> = (0..8).map(|k| g.mode(k)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, 4, -3, -2, -1]);
        assert_eq!(g.slot(4), Some(4));
        assert_eq!(g.slot(-4), None);
        assert_eq!(g.slot(-1), Some(7));
    }

    #[test]
    fn constant_and_cosine_coefficients() {
        let g = grid();
        let one = Field::from_fn(g, |_| 1.0).unwrap();
        assert!((one.coefficient(0) - 1.0).norm() < 1e-15);
        assert!(one.spectral()[1..].iter().all(|c| c.norm() < 1e-15));

        let cos = Field::from_fn(g, f64::cos).unwrap();
        assert!((cos.coefficient(1) - 0.5).norm() < 1e-15);
        assert!((cos.coefficient(-1) - 0.5).norm() < 1e-15);
    }

    #[test]
    fn non_finite_samples_rejected() {
        let g = grid();
        let mut s = vec![0.0; 64];
        s[3] = f64::NAN;
        assert!(matches!(Field::from_samples(g, s), Err(Error::NonFinite(_))));
    }

    #[test]
    fn derivative_of_cosine() {
        let g = Grid::new(64, 3.0).unwrap();
        for j in 1..=16 {
            let k = g.dk() * j as f64;
            let f = Field::from_fn(g, |x| (k * x).cos()).unwrap();
            let d = spectral_derivative(&f, 1);
            let err = g
                .points()
                .iter()
                .zip(d.samples())
                .fold(0.0f64, |m, (x, v)| m.max((v + k * (k * x).sin()).abs()));
            assert!(err <= 1e-10, "j={j} err={err}");
        }
        let f = Field::from_fn(g, |x| x.sin()).unwrap();
        assert_eq!(spectral_derivative(&f, 0), f);
    }

    #[test]
    fn fourth_derivative_matches_finite_differences() {
        // oracle: the 4th derivative from a dense 7-point stencil on the
        // analytic function, independent of any FFT
        let g = Grid::new(256, 40.0).unwrap();
        let c = 20.0;
        let bump = |x: f64| (-(x - c) * (x - c)).exp();
        let f = Field::from_fn(g, bump).unwrap();
        let d4 = spectral_derivative(&f, 4);
        let h = 1e-2;
        let stencil = [-1.0 / 6.0, 2.0, -13.0 / 2.0, 28.0 / 3.0, -13.0 / 2.0, 2.0, -1.0 / 6.0];
        let mut err = 0.0f64;
        for (x, v) in g.points().iter().zip(d4.samples()) {
            let fd: f64 = stencil
                .iter()
                .enumerate()
                .map(|(i, w)| w * bump(x + (i as f64 - 3.0) * h))
                .sum::<f64>()
                / h.powi(4);
            err = err.max((fd - v).abs());
        }
        assert!(err <= 1e-6, "err={err}");
    }

    #[test]
    fn sobolev_norms_of_cosine() {
        let g = grid();
        let f = Field::from_fn(g, f64::cos).unwrap();
        assert!((sobolev_norm(&f, 0.0) - PI.sqrt()).abs() < 1e-12);
        assert!((sobolev_norm(&f, 1.0) - (2.0 * PI).sqrt()).abs() < 1e-12);
        assert_eq!(sobolev_norm(&Field::zeros(g), 2.0), 0.0);
    }

    #[test]
    fn energy_of_cosine() {
        let c = Bbm5Coefficients::reference();
        let g = grid();
        assert_eq!(energy(&Field::zeros(g), &c).unwrap(), 0.0);
        let f = Field::from_fn(g, f64::cos).unwrap();
        let want = PI / 2.0 * 85.0 / 72.0;
        assert!((energy(&f, &c).unwrap() - want).abs() < 1e-12);
        assert!((want - 1.8544123302439752).abs() < 1e-15);
        for k in 2..5 {
            let kf = k as f64;
            let f = Field::from_fn(g, |x| (kf * x).cos()).unwrap();
            let varphi = 1.0 + c.gamma1() * kf * kf + c.delta1() * kf.powi(4);
            assert!((energy(&f, &c).unwrap() - PI / 2.0 * varphi).abs() < 1e-11);
        }
        let bad = Bbm5Coefficients::from_values(-1.0, 0.0, 1.0, 0.0, 0.0);
        assert!(energy(&f, &bad).is_err());
    }

    #[test]
    fn low_pass_keeps_only_low_modes() {
        let g = grid();
        let f = Field::from_fn(g, |x| x.cos() + (10.0 * x).cos()).unwrap();
        let lp = low_pass(&f, 5.0);
        let want = Field::from_fn(g, f64::cos).unwrap();
        assert!(lp.sub(&want).unwrap().max_abs() < 1e-14);
        assert!(low_pass(&f, g.max_wavenumber()).sub(&f).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn random_field_is_real_and_reproducible() {
        let g = grid();
        let a = random_field(g, 1.0, &mut ChaCha8Rng::seed_from_u64(7));
        let b = random_field(g, 1.0, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a, b);
        assert!(imag_residue(a.spectral()) < 1e-14);
        assert_eq!(a.spectral()[g.nyquist_slot()], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn integral_of_power_is_exact() {
        let g = Grid::new(16, 2.0 * PI).unwrap();
        // sin^3 has zero mean; sin^4 integrates to 3π/4
        let f = Field::from_fn(g, |x| (7.0 * x).sin()).unwrap();
        assert!(integral_of_power(&f, 3).abs() < 1e-13);
        assert!((integral_of_power(&f, 4) - 0.75 * PI).abs() < 1e-13);
        assert!((integral_of_power(&f, 2) - PI).abs() < 1e-13);
    }
}
