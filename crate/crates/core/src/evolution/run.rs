use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{duhamel_picard, Dynamics, EtdRk4, RhsSpec, Scheme, StepperConfig, ZERO};
use crate::error::{Error, Result};
use crate::spectral::{sobolev_norm_coeffs, Field, Grid};

/// What to record along a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Monitors {
    /// Record every this many steps (the last step is always recorded).
    pub every: usize,
    pub sobolev_indices: Vec<f64>,
    /// Keep a copy of the state every this many steps.
    pub snapshot_every: Option<usize>,
}

impl Default for Monitors {
    fn default() -> Self {
        Monitors {
            every: 1,
            sobolev_indices: vec![0.0, 1.0, 2.0],
            snapshot_every: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormSeries {
    pub s: f64,
    pub values: Vec<f64>,
}

/// Time series recorded by [`run_simulation`].
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub grid: Grid,
    pub scheme: Scheme,
    /// Effective step, `horizon / steps`.
    pub dt: f64,
    pub steps: usize,
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub hs_norms: Vec<NormSeries>,
    pub zero_mode: Vec<f64>,
    /// Centred finite difference of the energy (one-sided at the ends).
    pub energy_rate: Vec<f64>,
    /// `αβ(γ − 7/48) ∫ η_x³` at the recorded times.
    pub drift_predicted: Vec<f64>,
    #[serde(skip)]
    pub snapshots: Vec<(f64, Field)>,
    #[serde(skip)]
    pub final_state: Option<Field>,
}

impl RunReport {
    pub fn drift_residual(&self) -> Vec<f64> {
        self.energy_rate
            .iter()
            .zip(&self.drift_predicted)
            .map(|(a, b)| a - b)
            .collect()
    }

    /// `max_t |E(t) − E(0)| / E(0)`.
    pub fn max_relative_energy_change(&self) -> f64 {
        let e0 = self.energy.first().copied().unwrap_or(0.0);
        if e0 == 0.0 {
            return 0.0;
        }
        self.energy.iter().map(|e| ((e - e0) / e0).abs()).fold(0.0, f64::max)
    }

    pub fn max_zero_mode_change(&self) -> f64 {
        let m0 = self.zero_mode.first().copied().unwrap_or(0.0);
        self.zero_mode.iter().map(|m| (m - m0).abs()).fold(0.0, f64::max)
    }

    pub fn norm_series(&self, s: f64) -> Option<&[f64]> {
        self.hs_norms.iter().find(|n| n.s == s).map(|n| n.values.as_slice())
    }
}

struct Recorder<'a> {
    dynamics: &'a Dynamics,
    monitors: &'a Monitors,
    steps: usize,
    dt: f64,
    all_energy: Vec<f64>,
    report: RunReport,
    recorded: Vec<usize>,
}

impl<'a> Recorder<'a> {
    fn new(dynamics: &'a Dynamics, monitors: &'a Monitors, scheme: Scheme, steps: usize, dt: f64) -> Self {
        Recorder {
            dynamics,
            monitors,
            steps,
            dt,
            all_energy: Vec::with_capacity(steps + 1),
            report: RunReport {
                grid: *dynamics.grid(),
                scheme,
                dt,
                steps,
                times: Vec::new(),
                energy: Vec::new(),
                hs_norms: monitors
                    .sobolev_indices
                    .iter()
                    .map(|&s| NormSeries { s, values: Vec::new() })
                    .collect(),
                zero_mode: Vec::new(),
                energy_rate: Vec::new(),
                drift_predicted: Vec::new(),
                snapshots: Vec::new(),
                final_state: None,
            },
            recorded: Vec::new(),
        }
    }

    /// Returns false when the state is no longer finite.
    fn observe(&mut self, k: usize, c: &[Complex64]) -> Result<bool> {
        let grid = self.dynamics.grid();
        let e = self.dynamics.energy_hat(c);
        if !e.is_finite() {
            return Ok(false);
        }
        self.all_energy.push(e);
        let t = k as f64 * self.dt;
        if k.is_multiple_of(self.monitors.every) || k == self.steps {
            self.recorded.push(k);
            let r = &mut self.report;
            r.times.push(t);
            r.energy.push(e);
            for series in &mut r.hs_norms {
                series.values.push(sobolev_norm_coeffs(grid, c, series.s));
            }
            r.zero_mode.push(c[0].re);
            r.drift_predicted.push(self.dynamics.drift_predicted_hat(c));
        }
        if let Some(every) = self.monitors.snapshot_every {
            if k.is_multiple_of(every) || k == self.steps {
                self.report
                    .snapshots
                    .push((t, Field::from_spectral(*grid, c.to_vec())?));
            }
        }
        Ok(true)
    }

    fn finish(mut self, last: Option<&[Complex64]>) -> Result<RunReport> {
        let e = &self.all_energy;
        let h = self.dt;
        let k_last = e.len().saturating_sub(1);
        self.report.energy_rate = self
            .recorded
            .iter()
            .map(|&k| {
                if e.len() < 3 {
                    f64::NAN
                } else if k == 0 {
                    (-3.0 * e[0] + 4.0 * e[1] - e[2]) / (2.0 * h)
                } else if k >= k_last {
                    (3.0 * e[k_last] - 4.0 * e[k_last - 1] + e[k_last - 2]) / (2.0 * h)
                } else {
                    (e[k + 1] - e[k - 1]) / (2.0 * h)
                }
            })
            .collect();
        // rates are only meaningful for recorded points that were reached
        self.report.energy_rate.truncate(self.report.times.len());
        if let Some(c) = last {
            self.report.final_state = Some(Field::from_spectral(*self.dynamics.grid(), c.to_vec())?);
        }
        Ok(self.report)
    }
}

/// Evolves `eta0` over `[0, horizon]` and records energy, Sobolev norms,
/// the zero mode and the energy-drift balance.
///
/// A non-finite state aborts the run with [`Error::SimulationAborted`],
/// carrying everything recorded up to that point.
pub fn run_simulation(
    eta0: &Field,
    spec: &RhsSpec,
    cfg: &StepperConfig,
    horizon: f64,
    monitors: &Monitors,
) -> Result<RunReport> {
    cfg.validate()?;
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::invalid("horizon", format!("must be positive, got {horizon}")));
    }
    if monitors.every == 0 || monitors.snapshot_every == Some(0) {
        return Err(Error::invalid("monitors", "intervals must be at least 1"));
    }
    let grid = *eta0.grid();
    let dynamics = Dynamics::new(grid, *spec)?;

    match cfg.scheme {
        Scheme::ExponentialRk4 => {
            let steps = cfg.steps_for(horizon);
            let dt = horizon / steps as f64;
            let stepper = EtdRk4::new(&dynamics, dt);
            let mut rec = Recorder::new(&dynamics, monitors, cfg.scheme, steps, dt);
            let mut state = eta0.spectral().to_vec();
            state[grid.nyquist_slot()] = ZERO;
            rec.observe(0, &state)?;
            for k in 1..=steps {
                state = stepper.step(&state);
                if !rec.observe(k, &state)? {
                    let time = k as f64 * dt;
                    let report = rec.finish(None)?;
                    return Err(Error::SimulationAborted {
                        time,
                        report: Box::new(report),
                    });
                }
            }
            rec.finish(Some(&state))
        }
        Scheme::PicardDuhamel => {
            let out = duhamel_picard(eta0, spec, cfg, horizon)?;
            let steps = out.times.len() - 1;
            let dt = horizon / steps as f64;
            let mut rec = Recorder::new(&dynamics, monitors, cfg.scheme, steps, dt);
            for (k, f) in out.trajectory.iter().enumerate() {
                rec.observe(k, f.spectral())?;
            }
            rec.finish(Some(out.final_state().spectral()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::Bbm5Coefficients;

    fn bump(grid: Grid) -> Field {
        let l = grid.length();
        Field::from_fn(grid, |x| 0.3 / ((x - l / 2.0) / 2.0).cosh().powi(2)).unwrap()
    }

    #[test]
    fn energy_is_flat_for_the_reference_model() {
        let g = Grid::new(128, 40.0).unwrap();
        let spec = RhsSpec::new(Bbm5Coefficients::reference());
        let cfg = StepperConfig {
            dt: 0.01,
            ..Default::default()
        };
        let r = run_simulation(&bump(g), &spec, &cfg, 2.0, &Monitors::default()).unwrap();
        assert_eq!(r.times.len(), 201);
        assert!(r.max_relative_energy_change() < 1e-10);
        assert!(r.max_zero_mode_change() < 1e-14);
    }

    #[test]
    fn schemes_agree_on_short_horizon() {
        let g = Grid::new(64, 40.0).unwrap();
        let f = bump(g).scale(0.05);
        let spec = RhsSpec::new(Bbm5Coefficients::reference());
        let etd = StepperConfig {
            dt: 0.01,
            ..Default::default()
        };
        let pic = StepperConfig {
            scheme: Scheme::PicardDuhamel,
            ..etd
        };
        let a = run_simulation(&f, &spec, &etd, 1.0, &Monitors::default()).unwrap();
        let b = run_simulation(&f, &spec, &pic, 1.0, &Monitors::default()).unwrap();
        let diff = a.final_state.unwrap().sub(&b.final_state.unwrap()).unwrap().max_abs();
        assert!(diff < 1e-9, "diff={diff}");
    }

    #[test]
    fn blow_up_aborts_with_partial_report() {
        // an absurd amplitude with a huge step overflows quickly
        let g = Grid::new(32, 10.0).unwrap();
        let f = bump(g).scale(1e100);
        let spec = RhsSpec::new(Bbm5Coefficients::reference());
        let cfg = StepperConfig {
            dt: 1.0,
            ..Default::default()
        };
        match run_simulation(&f, &spec, &cfg, 50.0, &Monitors::default()) {
            Err(Error::SimulationAborted { report, .. }) => assert!(!report.times.is_empty()),
            other => panic!("unexpected {:?}", other.map(|r| r.times.len())),
        }
    }
}
