use num_complex::Complex64;

use super::Dynamics;

/// Cox–Matthews fourth-order exponential time differencing for
/// `η̂_t = L η̂ + N̂(η̂)` with the diagonal `L = −iφ`.
///
/// The coefficient functions are evaluated from their Taylor series near
/// `z = 0`, which keeps them accurate without contour integrals.
#[derive(Debug, Clone)]
pub struct EtdRk4<'a> {
    dynamics: &'a Dynamics,
    dt: f64,
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

/// The four states at which the nonlinearity is evaluated in one step.
#[derive(Debug, Clone)]
pub struct StageStates {
    pub u: Vec<Complex64>,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
    pub c: Vec<Complex64>,
}

impl StageStates {
    pub fn get(&self, stage: usize) -> &[Complex64] {
        match stage {
            0 => &self.u,
            1 => &self.a,
            2 => &self.b,
            _ => &self.c,
        }
    }
}

const TAYLOR_RADIUS: f64 = 0.5;
const TAYLOR_TERMS: usize = 30;

/// `(φ1, φ2, φ3)(z)` with `φ_k(z) = Σ z^m / (m+k)!`.
pub(crate) fn phi_functions(z: Complex64) -> (Complex64, Complex64, Complex64) {
    if z.norm() < TAYLOR_RADIUS {
        let mut p = [Complex64::new(0.0, 0.0); 3];
        for (k, slot) in p.iter_mut().enumerate() {
            // term_m = z^m / (m + k + 1)!
            let mut fact = (1..=k + 1).map(|i| i as f64).product::<f64>();
            let mut term = Complex64::new(1.0 / fact, 0.0);
            let mut sum = term;
            for m in 1..TAYLOR_TERMS {
                fact = (m + k + 1) as f64;
                term = term * z / fact;
                sum += term;
            }
            *slot = sum;
        }
        (p[0], p[1], p[2])
    } else {
        let ez = z.exp();
        let p1 = (ez - 1.0) / z;
        let p2 = (p1 - 1.0) / z;
        let p3 = (p2 - 0.5) / z;
        (p1, p2, p3)
    }
}

impl<'a> EtdRk4<'a> {
    pub fn new(dynamics: &'a Dynamics, dt: f64) -> Self {
        let n = dynamics.grid().n();
        let mut s = EtdRk4 {
            dynamics,
            dt,
            e: Vec::with_capacity(n),
            e2: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        for &w in dynamics.frequency() {
            let z = Complex64::new(0.0, -w * dt);
            let (p1, p2, p3) = phi_functions(z);
            let (h1, _, _) = phi_functions(0.5 * z);
            s.e.push(Complex64::from_polar(1.0, -w * dt));
            s.e2.push(Complex64::from_polar(1.0, -0.5 * w * dt));
            s.q.push(0.5 * dt * h1);
            s.f1.push(dt * (p1 - 3.0 * p2 + 4.0 * p3));
            s.f2.push(dt * (p2 - 2.0 * p3));
            s.f3.push(dt * (-p2 + 4.0 * p3));
        }
        s
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dynamics(&self) -> &Dynamics {
        self.dynamics
    }

    pub fn step(&self, u: &[Complex64]) -> Vec<Complex64> {
        self.step_with(u, |_, x| self.dynamics.nonlinear_hat(x)).0
    }

    /// One step with a caller-supplied nonlinearity `nl(stage, state)`;
    /// also returns the stage states.
    pub fn step_with<F>(&self, u: &[Complex64], mut nl: F) -> (Vec<Complex64>, StageStates)
    where
        F: FnMut(usize, &[Complex64]) -> Vec<Complex64>,
    {
        let n = u.len();
        let nu = nl(0, u);
        let a: Vec<Complex64> = (0..n).map(|k| self.e2[k] * u[k] + self.q[k] * nu[k]).collect();
        let na = nl(1, &a);
        let b: Vec<Complex64> = (0..n).map(|k| self.e2[k] * u[k] + self.q[k] * na[k]).collect();
        let nb = nl(2, &b);
        let c: Vec<Complex64> = (0..n)
            .map(|k| self.e2[k] * a[k] + self.q[k] * (2.0 * nb[k] - nu[k]))
            .collect();
        let nc = nl(3, &c);
        let next = (0..n)
            .map(|k| self.e[k] * u[k] + self.f1[k] * nu[k] + 2.0 * self.f2[k] * (na[k] + nb[k]) + self.f3[k] * nc[k])
            .collect();
        (next, StageStates { u: u.to_vec(), a, b, c })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::Bbm5Coefficients;
    use crate::evolution::RhsSpec;
    use crate::spectral::{Field, Grid};

    #[test]
    fn phi_functions_agree_across_the_switch() {
        for &r in &[0.49999, 0.50001] {
            for &arg in &[0.3, 1.1, 2.0] {
                let z = Complex64::from_polar(r, arg);
                let (a1, a2, a3) = phi_functions(z);
                let ez = z.exp();
                let p1 = (ez - 1.0) / z;
                let p2 = (ez - 1.0 - z) / (z * z);
                let p3 = (ez - 1.0 - z - 0.5 * z * z) / (z * z * z);
                assert!((a1 - p1).norm() < 1e-13);
                assert!((a2 - p2).norm() < 1e-12);
                assert!((a3 - p3).norm() < 1e-11);
            }
        }
        let (a, b, c) = phi_functions(Complex64::new(0.0, 0.0));
        assert_eq!((a.re, b.re, c.re), (1.0, 0.5, 1.0 / 6.0));
    }

    #[test]
    fn linear_step_is_exact() {
        let g = Grid::new(32, 7.0).unwrap();
        let c = Bbm5Coefficients::reference();
        let d = Dynamics::new(g, RhsSpec::new(c).linear_only()).unwrap();
        let f = Field::from_fn(g, |x| (2.0 * std::f64::consts::PI * x / 7.0).sin()).unwrap();
        let stepper = EtdRk4::new(&d, 0.37);
        let got = stepper.step(f.spectral());
        let mut want = f.spectral().to_vec();
        d.propagate(&mut want, 0.37);
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).norm() < 1e-15);
        }
    }
}
