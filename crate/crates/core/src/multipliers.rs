//! Fourier multipliers of the model and numerical evidence for their bounds.
//!
//! With `φ̄(ξ) = 1 + γ1ξ² + δ1ξ⁴` the symbols are
//!
//! ```text
//! φ(ξ) = ξ(1 − γ2ξ² + δ2ξ⁴)/φ̄(ξ),   ψ(ξ) = ξ/φ̄(ξ),
//! τ(ξ) = (3ξ − 4γξ³)/(4φ̄(ξ)),       ω(ξ) = |ξ|/(1 + ξ²).
//! ```
//!
//! φ, ψ and τ are odd, so applying them literally to a real function gives
//! an imaginary one; [`apply_real`] composes with `−i` to stay real.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coefficients::Bbm5Coefficients;
use crate::error::{Error, Result};
use crate::spectral::{self, random_field, sobolev_norm_coeffs, Field, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymbolKind {
    Phi,
    Psi,
    Tau,
    Omega,
    VarphiDenominator,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

impl SymbolKind {
    pub fn parity(self) -> Parity {
        match self {
            SymbolKind::Phi | SymbolKind::Psi | SymbolKind::Tau => Parity::Odd,
            SymbolKind::Omega | SymbolKind::VarphiDenominator => Parity::Even,
        }
    }

    fn needs_coefficients(self) -> bool {
        self != SymbolKind::Omega
    }
}

/// A multiplier bound to a set of model coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Symbol {
    kind: SymbolKind,
    coefficients: Bbm5Coefficients,
}

impl Symbol {
    /// Fails if the symbol depends on the coefficients and they are outside
    /// the well-posed regime (the denominator could vanish).
    pub fn new(kind: SymbolKind, coefficients: Bbm5Coefficients) -> Result<Self> {
        if kind.needs_coefficients() {
            coefficients.require_wellposed()?;
        }
        Ok(Symbol { kind, coefficients })
    }

    /// ω does not depend on the model.
    pub fn omega() -> Self {
        Symbol {
            kind: SymbolKind::Omega,
            coefficients: Bbm5Coefficients::reference(),
        }
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn parity(&self) -> Parity {
        self.kind.parity()
    }

    pub fn eval(&self, xi: f64) -> f64 {
        eval_kind(self.kind, &self.coefficients, xi)
    }
}

pub(crate) fn varphi(c: &Bbm5Coefficients, xi: f64) -> f64 {
    let x2 = xi * xi;
    1.0 + c.gamma1() * x2 + c.delta1() * x2 * x2
}

fn eval_kind(kind: SymbolKind, c: &Bbm5Coefficients, xi: f64) -> f64 {
    let x2 = xi * xi;
    match kind {
        SymbolKind::VarphiDenominator => varphi(c, xi),
        SymbolKind::Phi => xi * (1.0 - c.gamma2() * x2 + c.delta2() * x2 * x2) / varphi(c, xi),
        SymbolKind::Psi => xi / varphi(c, xi),
        SymbolKind::Tau => (3.0 * xi - 4.0 * c.gamma() * xi * x2) / (4.0 * varphi(c, xi)),
        SymbolKind::Omega => xi.abs() / (1.0 + x2),
    }
}

/// Pointwise symbol value.
pub fn eval(sym: &Symbol, xi: f64) -> f64 {
    sym.eval(xi)
}

/// Literal multiplication of the coefficients of `f` by the symbol.
pub fn apply(sym: &Symbol, f: &Field) -> Vec<Complex64> {
    let g = f.grid();
    f.spectral()
        .iter()
        .enumerate()
        .map(|(k, c)| c * sym.eval(g.wavenumber(k)))
        .collect()
}

/// Real-valued application: even symbols multiply, odd symbols multiply and
/// compose with `−i` (Nyquist coefficient zeroed).
pub fn apply_real(sym: &Symbol, f: &Field) -> Field {
    let mut c = apply(sym, f);
    if sym.parity() == Parity::Odd {
        for z in &mut c {
            *z *= Complex64::new(0.0, -1.0);
        }
        c[f.grid().nyquist_slot()] = Complex64::new(0.0, 0.0);
    }
    Field::from_spectral(*f.grid(), c).expect("bounded symbols keep coefficients finite")
}

/// Symbol values sampled on a grid's wavenumber lattice.
#[derive(Debug, Clone)]
pub struct SymbolTable {
    grid: Grid,
    coefficients: Bbm5Coefficients,
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    pub tau: Vec<f64>,
    pub omega: Vec<f64>,
    pub varphi: Vec<f64>,
}

impl SymbolTable {
    pub fn new(grid: Grid, coefficients: Bbm5Coefficients) -> Result<Self> {
        coefficients.require_wellposed()?;
        let xs = grid.wavenumbers();
        let table = |kind| xs.iter().map(|&x| eval_kind(kind, &coefficients, x)).collect();
        Ok(SymbolTable {
            grid,
            coefficients,
            phi: table(SymbolKind::Phi),
            psi: table(SymbolKind::Psi),
            tau: table(SymbolKind::Tau),
            omega: table(SymbolKind::Omega),
            varphi: table(SymbolKind::VarphiDenominator),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coefficients(&self) -> &Bbm5Coefficients {
        &self.coefficients
    }

    pub fn values(&self, kind: SymbolKind) -> &[f64] {
        match kind {
            SymbolKind::Phi => &self.phi,
            SymbolKind::Psi => &self.psi,
            SymbolKind::Tau => &self.tau,
            SymbolKind::Omega => &self.omega,
            SymbolKind::VarphiDenominator => &self.varphi,
        }
    }
}

/// Expressions whose supremum over ξ appears in the multilinear estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupExpression {
    /// `|ξψ(ξ)|`
    XiPsi,
    /// `|ξτ(ξ)|`
    XiTau,
    /// `⟨ξ⟩|ξψ(ξ)|` with `⟨ξ⟩ = (1+ξ²)^{1/2}`
    JapaneseXiPsi,
    /// `|ψ(ξ)|/ω(ξ)`
    PsiOverOmega,
    /// `|τ(ξ)|/ω(ξ)`
    TauOverOmega,
    /// `⟨ξ⟩|ξψ(ξ)|/ω(ξ)`
    JapaneseXiPsiOverOmega,
    /// `(1+|ξ|)|ψ(ξ)|/ω(ξ)`
    WeightedPsiOverOmega,
    /// `(1+|ξ|)^3 |ψ(ξ)|`
    CubicWeightedPsi,
    /// `ω(ξ)`
    Omega,
}

impl SupExpression {
    pub fn eval(self, c: &Bbm5Coefficients, xi: f64) -> f64 {
        let psi = eval_kind(SymbolKind::Psi, c, xi);
        let tau = eval_kind(SymbolKind::Tau, c, xi);
        let omega = eval_kind(SymbolKind::Omega, c, xi);
        let jap = (1.0 + xi * xi).sqrt();
        match self {
            SupExpression::XiPsi => (xi * psi).abs(),
            SupExpression::XiTau => (xi * tau).abs(),
            SupExpression::JapaneseXiPsi => jap * (xi * psi).abs(),
            SupExpression::PsiOverOmega => psi.abs() / omega,
            SupExpression::TauOverOmega => tau.abs() / omega,
            SupExpression::JapaneseXiPsiOverOmega => jap * (xi * psi).abs() / omega,
            SupExpression::WeightedPsiOverOmega => (1.0 + xi.abs()) * psi.abs() / omega,
            SupExpression::CubicWeightedPsi => (1.0 + xi.abs()).powi(3) * psi.abs(),
            SupExpression::Omega => omega,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SupMethod {
    ClosedForm,
    Scan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupBound {
    pub value: f64,
    pub argmax: f64,
    pub method: SupMethod,
}

/// Lower and upper end of the ξ scan; every symbol decays rationally, so the
/// supremum is attained (or approached to many digits) inside this window.
pub const SCAN_RANGE: (f64, f64) = (1e-6, 1e3);
const SCAN_POINTS: usize = 20_000;

/// Supremum of the expression over ξ > 0 (all expressions are even).
/// Closed forms are used for `|ξψ|` and ω; everything else is scanned.
pub fn sup_bound(expr: SupExpression, c: &Bbm5Coefficients) -> Result<SupBound> {
    c.require_wellposed()?;
    Ok(match expr {
        SupExpression::XiPsi => {
            let d = c.delta1().sqrt();
            SupBound {
                value: 1.0 / (c.gamma1() + 2.0 * d),
                argmax: 1.0 / d.sqrt(),
                method: SupMethod::ClosedForm,
            }
        }
        SupExpression::Omega => SupBound {
            value: 0.5,
            argmax: 1.0,
            method: SupMethod::ClosedForm,
        },
        _ => scan_sup(expr, c)?,
    })
}

/// Dense log-spaced scan followed by golden-section refinement of the best
/// bracket.
pub fn scan_sup(expr: SupExpression, c: &Bbm5Coefficients) -> Result<SupBound> {
    c.require_wellposed()?;
    let f = |x: f64| expr.eval(c, x);
    let (lo, hi) = SCAN_RANGE;
    let ratio = (hi / lo).ln() / (SCAN_POINTS - 1) as f64;
    let xs: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| {
            if i + 1 == SCAN_POINTS {
                hi
            } else {
                lo * (ratio * i as f64).exp()
            }
        })
        .collect();
    let (best, _) = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, f(x)))
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
        );
    if best == 0 || best + 1 == xs.len() {
        let x = xs[best];
        return Ok(SupBound {
            value: f(x),
            argmax: x,
            method: SupMethod::Scan,
        });
    }
    let (x, v) = golden_max(&f, xs[best - 1], xs[best + 1]);
    Ok(SupBound {
        value: v,
        argmax: x,
        method: SupMethod::Scan,
    })
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > 1e-13 * b.max(1.0) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// The multilinear estimates probed by [`empirical_operator_norm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimate {
    /// `‖τ(∂x)(η1η2)‖_{H^s} ≤ C‖η1‖_{H^s}‖η2‖_{H^s}`, s ≥ 0
    TauBilinear,
    /// `‖ψ(∂x)(η1η2η3)‖_{H^s} ≤ C Π‖ηi‖_{H^s}`, s ≥ 1/6
    PsiTrilinear,
    /// `‖ψ(∂x)[(η1)_x(η2)_x]‖_{H^s} ≤ C‖η1‖_{H^s}‖η2‖_{H^s}`, s ≥ 1
    PsiGradientBilinear,
}

impl Estimate {
    pub fn threshold(self) -> f64 {
        match self {
            Estimate::TauBilinear => 0.0,
            Estimate::PsiTrilinear => 1.0 / 6.0,
            Estimate::PsiGradientBilinear => 1.0,
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Estimate::PsiTrilinear => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Estimate::TauBilinear => "tau_bilinear",
            Estimate::PsiTrilinear => "psi_trilinear",
            Estimate::PsiGradientBilinear => "psi_gradient_bilinear",
        }
    }
}

/// Coefficients of the alias-free product of the given coefficient vectors,
/// truncated to the grid band.
pub(crate) fn product_coeffs(factors: &[&[Complex64]]) -> Vec<Complex64> {
    let n = factors[0].len();
    let m = (factors.len() + 1) * n / 2;
    let m = m + m % 2;
    let mut acc = vec![Complex64::new(1.0, 0.0); m];
    for c in factors {
        let phys = spectral::pad_to_physical(c, m);
        for (a, p) in acc.iter_mut().zip(&phys) {
            *a *= p.re;
        }
    }
    spectral::truncate_from_physical(acc, n)
}

/// `LHS/RHS` of the named estimate for one tuple of fields (0 when the
/// right-hand side vanishes).
pub fn estimate_ratio(estimate: Estimate, fields: &[&Field], s: f64, c: &Bbm5Coefficients) -> Result<f64> {
    if fields.len() != estimate.arity() {
        return Err(Error::invalid(
            "fields",
            format!("{} expects {} inputs", estimate.name(), estimate.arity()),
        ));
    }
    let grid = *fields[0].grid();
    if fields.iter().any(|f| *f.grid() != grid) {
        return Err(Error::GridMismatch);
    }
    let rhs: f64 = fields.iter().map(|f| spectral::sobolev_norm(f, s)).product();
    if rhs == 0.0 {
        return Ok(0.0);
    }
    let table = SymbolTable::new(grid, *c)?;
    let (prod, symbol) = match estimate {
        Estimate::TauBilinear => (
            product_coeffs(&[fields[0].spectral(), fields[1].spectral()]),
            &table.tau,
        ),
        Estimate::PsiTrilinear => (
            product_coeffs(&[fields[0].spectral(), fields[1].spectral(), fields[2].spectral()]),
            &table.psi,
        ),
        Estimate::PsiGradientBilinear => {
            let d = spectral::derivative_factors(&grid, 1);
            let dx = |f: &Field| -> Vec<Complex64> { f.spectral().iter().zip(&d).map(|(a, b)| a * b).collect() };
            let (a, b) = (dx(fields[0]), dx(fields[1]));
            (product_coeffs(&[&a, &b]), &table.psi)
        }
    };
    let lhs_coeffs: Vec<Complex64> = prod.iter().zip(symbol).map(|(p, m)| p * m).collect();
    Ok(sobolev_norm_coeffs(&grid, &lhs_coeffs, s) / rhs)
}

/// Result of a randomized operator-norm probe.
#[derive(Debug, Clone, Serialize)]
pub struct OperatorNormScan {
    pub estimate: Estimate,
    pub s: f64,
    pub trials: usize,
    pub max_ratio: f64,
    pub argmax_trial: usize,
    /// Running maximum after each trial.
    pub running_max: Vec<f64>,
    /// `(max − max after 90% of trials) / max after 90% of trials`.
    pub final_decile_growth: f64,
    #[serde(skip)]
    pub argmax_fields: Vec<Field>,
}

/// Probes the named estimate with `trials` seeded random field tuples whose
/// coefficients are `(1+ξ²)^{−(s+1)/2} · N(0,1)`.
pub fn empirical_operator_norm(
    estimate: Estimate,
    trials: usize,
    grid: Grid,
    s: f64,
    c: &Bbm5Coefficients,
    seed: u64,
) -> Result<OperatorNormScan> {
    if s < estimate.threshold() {
        return Err(Error::BelowThreshold {
            estimate: estimate.name(),
            s,
            threshold: estimate.threshold(),
        });
    }
    c.require_wellposed()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut running_max = Vec::with_capacity(trials);
    let mut best = (0usize, 0.0f64, Vec::new());
    for t in 0..trials {
        let fields: Vec<Field> = (0..estimate.arity()).map(|_| random_field(grid, s, &mut rng)).collect();
        let refs: Vec<&Field> = fields.iter().collect();
        let r = estimate_ratio(estimate, &refs, s, c)?;
        if r > best.1 || t == 0 {
            best = (t, r, fields);
        }
        running_max.push(best.1);
    }
    let final_decile_growth = match trials {
        0 => 0.0,
        _ => {
            let at90 = running_max[(trials * 9 / 10).saturating_sub(1)];
            if at90 > 0.0 {
                (best.1 - at90) / at90
            } else {
                0.0
            }
        }
    };
    Ok(OperatorNormScan {
        estimate,
        s,
        trials,
        max_ratio: best.1,
        argmax_trial: best.0,
        running_max,
        final_decile_growth,
        argmax_fields: best.2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn reference(kind: SymbolKind) -> Symbol {
        Symbol::new(kind, Bbm5Coefficients::reference()).unwrap()
    }

    #[test]
    fn pointwise_values() {
        assert_eq!(reference(SymbolKind::Phi).eval(0.0), 0.0);
        assert_eq!(Symbol::omega().eval(1.0), 0.5);
        // rational oracle: ψ(1) = 72/85, τ(1) = 87/170, φ(1) = 379/425
        assert!((reference(SymbolKind::Psi).eval(1.0) - 72.0 / 85.0).abs() < 1e-15);
        assert!((reference(SymbolKind::Tau).eval(1.0) - 87.0 / 170.0).abs() < 1e-15);
        assert!((reference(SymbolKind::Phi).eval(1.0) - 379.0 / 425.0).abs() < 1e-15);
    }

    #[test]
    fn symbols_need_wellposed_coefficients() {
        let bad = Bbm5Coefficients::from_values(0.1, 0.0, -0.5, 0.0, 0.0);
        assert!(Symbol::new(SymbolKind::Psi, bad).is_err());
        assert!(Symbol::new(SymbolKind::Omega, bad).is_ok());
    }

    #[test]
    fn apply_on_cosine() {
        let c = Bbm5Coefficients::reference();
        let g = Grid::new(32, 2.0 * PI).unwrap();
        assert!(apply(&reference(SymbolKind::Psi), &Field::zeros(g))
            .iter()
            .all(|z| z.norm() == 0.0));
        for k in 1..6 {
            let kf = k as f64;
            let f = Field::from_fn(g, |x| (kf * x).cos()).unwrap();
            let even = apply_real(&reference(SymbolKind::VarphiDenominator), &f);
            let want = Field::from_fn(g, |x| varphi(&c, kf) * (kf * x).cos()).unwrap();
            // roundoff in the high modes is amplified by φ̄(16) ≈ 6.4e3
            assert!(even.sub(&want).unwrap().max_abs() < 1e-10);

            let phi = reference(SymbolKind::Phi);
            let raw = apply(&phi, &f);
            assert!((raw[k] - 0.5 * phi.eval(kf)).norm() < 1e-14);
            assert!((raw[32 - k] - 0.5 * phi.eval(-kf)).norm() < 1e-14);
            let real = apply_real(&phi, &f);
            let want = Field::from_fn(g, |x| phi.eval(kf) * (kf * x).sin()).unwrap();
            assert!(real.sub(&want).unwrap().max_abs() < 1e-13);
        }
    }

    #[test]
    fn closed_form_sup_matches_scan() {
        let c = Bbm5Coefficients::reference();
        let closed = sup_bound(SupExpression::XiPsi, &c).unwrap();
        assert_eq!(closed.method, SupMethod::ClosedForm);
        assert!((closed.value - 1.4145414051377199).abs() < 1e-12);
        let scanned = scan_sup(SupExpression::XiPsi, &c).unwrap();
        assert!((closed.value - scanned.value).abs() < 1e-8);
        let omega = scan_sup(SupExpression::Omega, &c).unwrap();
        assert!((omega.value - 0.5).abs() < 1e-12 && (omega.argmax - 1.0).abs() < 1e-6);
    }

    #[test]
    fn psi_over_omega_is_finite() {
        let c = Bbm5Coefficients::reference();
        let b = sup_bound(SupExpression::PsiOverOmega, &c).unwrap();
        assert!(b.value.is_finite() && b.value >= 1.0);
        // refinement agrees with a brute-force dense linear scan near the peak
        let brute = (1..=200_000)
            .map(|i| SupExpression::PsiOverOmega.eval(&c, i as f64 * 1e-5))
            .fold(0.0f64, f64::max);
        assert!((b.value - brute).abs() < 1e-8, "{} vs {}", b.value, brute);
    }

    #[test]
    fn operator_norm_threshold_refusal() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let c = Bbm5Coefficients::reference();
        let err = empirical_operator_norm(Estimate::PsiGradientBilinear, 10, g, 0.5, &c, 1);
        assert!(matches!(err, Err(Error::BelowThreshold { threshold, .. }) if threshold == 1.0));
        assert!(empirical_operator_norm(Estimate::PsiTrilinear, 10, g, 0.1, &c, 1).is_err());
    }

    #[test]
    fn zero_inputs_give_zero_ratio() {
        let g = Grid::new(32, 2.0 * PI).unwrap();
        let z = Field::zeros(g);
        let c = Bbm5Coefficients::reference();
        for e in [Estimate::TauBilinear, Estimate::PsiGradientBilinear] {
            assert_eq!(estimate_ratio(e, &[&z, &z], 1.0, &c).unwrap(), 0.0);
        }
        assert_eq!(
            estimate_ratio(Estimate::PsiTrilinear, &[&z, &z, &z], 1.0, &c).unwrap(),
            0.0
        );
    }

    #[test]
    fn single_mode_ratio_matches_hand_computation() {
        // η1 = η2 = cos x: η1η2 = ½ + ½cos 2x, so the product has
        // coefficients ½ at ξ = 0 and ¼ at ξ = ±2
        let g = Grid::new(64, 2.0 * PI).unwrap();
        let c = Bbm5Coefficients::reference();
        let cos = Field::from_fn(g, f64::cos).unwrap();
        let tau = reference(SymbolKind::Tau);
        let psi = reference(SymbolKind::Psi);
        let l = 2.0 * PI;
        for s in [0.0, 0.5, 1.0, 2.0] {
            let rhs = l * 2f64.powf(s) / 2.0;
            let lhs = (l * 2.0 * 5f64.powf(s) * (0.25 * tau.eval(2.0)).powi(2)).sqrt();
            let r = estimate_ratio(Estimate::TauBilinear, &[&cos, &cos], s, &c).unwrap();
            assert!((r - lhs / rhs).abs() < 1e-10, "s={s}");

            // (η_x)² = sin² x = ½ − ½cos 2x
            let lhs = (l * 2.0 * 5f64.powf(s) * (0.25 * psi.eval(2.0)).powi(2)).sqrt();
            let r = estimate_ratio(Estimate::PsiGradientBilinear, &[&cos, &cos], s, &c).unwrap();
            assert!((r - lhs / rhs).abs() < 1e-10, "s={s}");

            // cos³ x = ¾cos x + ¼cos 3x
            let lhs = (l
                * 2.0
                * (2f64.powf(s) * (0.375 * psi.eval(1.0)).powi(2) + 10f64.powf(s) * (0.125 * psi.eval(3.0)).powi(2)))
            .sqrt();
            let rhs3 = (l * 2f64.powf(s) / 2.0).powf(1.5);
            let r = estimate_ratio(Estimate::PsiTrilinear, &[&cos, &cos, &cos], s, &c).unwrap();
            assert!((r - lhs / rhs3).abs() < 1e-10, "s={s}");
        }
    }
}
