use num_complex::Complex64;
use rayon::prelude::*;

use super::{Dynamics, RhsSpec, StepperConfig, ZERO};
use crate::error::{Error, Result};
use crate::spectral::{sobolev_norm_coeffs, Field};

/// Guaranteed existence time `1 / (8 C_s ‖η0‖ (1 + ‖η0‖))` of the
/// contraction argument; infinite for zero data.
pub fn existence_time_bound(norm: f64, contraction_constant: f64) -> f64 {
    if norm == 0.0 {
        return f64::INFINITY;
    }
    1.0 / (8.0 * contraction_constant * norm * (1.0 + norm))
}

/// Result of the Picard iteration on the Duhamel formulation.
#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub times: Vec<f64>,
    pub trajectory: Vec<Field>,
    /// `sup_t ‖η^{(m+1)}(t) − η^{(m)}(t)‖_{H^s}` per iteration.
    pub differences: Vec<f64>,
    /// `‖η(t_k)‖_{H^s}` along the converged trajectory.
    pub norms: Vec<f64>,
    pub initial_norm: f64,
    pub existence_time_bound: f64,
    pub sobolev_index: f64,
}

impl PicardOutcome {
    pub fn iterations(&self) -> usize {
        self.differences.len()
    }

    /// Successive ratios `d_{m+1} / d_m` (NaN where `d_m = 0`).
    pub fn ratios(&self) -> Vec<f64> {
        self.differences
            .windows(2)
            .map(|w| if w[0] == 0.0 { f64::NAN } else { w[1] / w[0] })
            .collect()
    }

    /// `max_t ‖η(t)‖ / ‖η0‖` (1 for zero data).
    pub fn max_growth(&self) -> f64 {
        if self.initial_norm == 0.0 {
            return 1.0;
        }
        self.norms.iter().fold(0.0, |m: f64, &x| m.max(x)) / self.initial_norm
    }

    pub fn final_state(&self) -> &Field {
        self.trajectory.last().expect("trajectory has at least two nodes")
    }
}

/// Solves `η(t) = S(t)η0 + ∫_0^t S(t − t')N(η(t'))dt'` on `[0, horizon]`
/// by fixed-point iteration in the interaction picture.
///
/// The time integral uses a fourth-order cumulative rule on `K + 1`
/// uniform nodes, `K = ceil(horizon / dt)`. Refuses horizons beyond the
/// guaranteed existence time and reports non-convergence with the full
/// difference history.
pub fn duhamel_picard(eta0: &Field, spec: &RhsSpec, cfg: &StepperConfig, horizon: f64) -> Result<PicardOutcome> {
    cfg.validate()?;
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::invalid("horizon", format!("must be positive, got {horizon}")));
    }
    let grid = *eta0.grid();
    let s = cfg.sobolev_index;
    let dynamics = Dynamics::new(grid, *spec)?;

    let mut base = eta0.spectral().to_vec();
    base[grid.nyquist_slot()] = ZERO;
    let initial_norm = sobolev_norm_coeffs(&grid, &base, s);
    let bound = existence_time_bound(initial_norm, cfg.contraction_constant);
    if horizon > bound * (1.0 + 1e-12) {
        return Err(Error::ExceedsExistenceTime { horizon, bound });
    }

    let steps = cfg.steps_for(horizon).max(4);
    let h = horizon / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
    let evolve = |mut c: Vec<Complex64>, t: f64| {
        dynamics.propagate(&mut c, t);
        c
    };

    let mut trajectory: Vec<Vec<Complex64>> = times.iter().map(|&t| evolve(base.clone(), t)).collect();
    let mut differences = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.picard_max_iter {
        let integrand: Vec<Vec<Complex64>> = trajectory
            .par_iter()
            .zip(&times)
            .map(|(c, &t)| evolve(dynamics.nonlinear_hat(c), -t))
            .collect();
        let next: Vec<Vec<Complex64>> = cumulative_integrals(&integrand, h)
            .into_par_iter()
            .zip(&times)
            .map(|(mut w, &t)| {
                for (a, b) in w.iter_mut().zip(&base) {
                    *a += b;
                }
                evolve(w, t)
            })
            .collect();
        let diff = next
            .par_iter()
            .zip(&trajectory)
            .map(|(a, b)| {
                let d: Vec<Complex64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                sobolev_norm_coeffs(&grid, &d, s)
            })
            .reduce(|| 0.0, f64::max);
        if !diff.is_finite() {
            differences.push(diff);
            return Err(Error::PicardNonConvergence { history: differences });
        }
        differences.push(diff);
        trajectory = next;
        if diff < cfg.picard_tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::PicardNonConvergence { history: differences });
    }

    let norms = trajectory.iter().map(|c| sobolev_norm_coeffs(&grid, c, s)).collect();
    let trajectory = trajectory
        .into_iter()
        .map(|c| Field::from_spectral(grid, c))
        .collect::<Result<Vec<_>>>()?;
    Ok(PicardOutcome {
        times,
        trajectory,
        differences,
        norms,
        initial_norm,
        existence_time_bound: bound,
        sobolev_index: s,
    })
}

fn combine(terms: &[(f64, &[Complex64])]) -> Vec<Complex64> {
    let n = terms[0].1.len();
    (0..n).map(|k| terms.iter().map(|(w, v)| *w * v[k]).sum()).collect()
}

/// `I_k ≈ ∫_0^{t_k} g` for every node, fourth order throughout: composite
/// Simpson for even `k`, Simpson plus a 3/8 panel for odd `k ≥ 3`, and a
/// four-point rule for `k = 1`. Needs at least four intervals.
pub(crate) fn cumulative_integrals(g: &[Vec<Complex64>], h: f64) -> Vec<Vec<Complex64>> {
    let k_max = g.len() - 1;
    assert!(k_max >= 3, "cumulative quadrature needs at least 3 intervals");
    let n = g[0].len();
    let mut simpson: Vec<Vec<Complex64>> = vec![vec![ZERO; n]; k_max + 1];
    for k in (2..=k_max).step_by(2) {
        let panel = combine(&[(h / 3.0, &g[k - 2]), (4.0 * h / 3.0, &g[k - 1]), (h / 3.0, &g[k])]);
        simpson[k] = simpson[k - 2].iter().zip(&panel).map(|(a, b)| a + b).collect();
    }
    let mut out = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let v = match k {
            0 => vec![ZERO; n],
            1 => combine(&[
                (9.0 * h / 24.0, &g[0]),
                (19.0 * h / 24.0, &g[1]),
                (-5.0 * h / 24.0, &g[2]),
                (h / 24.0, &g[3]),
            ]),
            k if k % 2 == 0 => simpson[k].clone(),
            k => combine(&[
                (1.0, &simpson[k - 3]),
                (3.0 * h / 8.0, &g[k - 3]),
                (9.0 * h / 8.0, &g[k - 2]),
                (9.0 * h / 8.0, &g[k - 1]),
                (3.0 * h / 8.0, &g[k]),
            ]),
        };
        out.push(v);
    }
    out
}
