//! High/low frequency splitting of rough data.
//!
//! `η0 = u0 + v0` with `u0` the modes `|ξ| ≤ N`. The smooth part solves the
//! full equation, the rough part the difference equation
//!
//! ```text
//! i v_t = φ v + τ(v² + 2uv) − ⅛ψ(3u²v + 3uv² + v³) − 7/48 ψ(2u_x v_x + v_x²),
//! ```
//!
//! and `h = v(t0) − S(t0)v0` is the part of `v` that nonlinear interaction
//! has made smooth. Re-absorbing it, `u1 = u(t0) + h`, `v1 = S(t0)v0`, and
//! repeating gives the iteration behind the global result for `1 ≤ s < 2`.
//!
//! Both parts are advanced with the same exponential integrator and step;
//! the `v` stages use the `u` stage values directly, so `u + v` reproduces a
//! direct solve up to rounding.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{Dynamics, EtdRk4, RhsSpec, StageStates, StepperConfig};
use crate::fit::{log_log_fit, LinearFit};
use crate::spectral::{low_pass, smooth_low_pass, sobolev_norm, sobolev_norm_coeffs, Field, Grid};

/// Parameters of one splitting experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub cutoff: f64,
    pub s: f64,
    /// Window length; `t0_constant · N^{−2(2−s)}` when absent.
    #[serde(default)]
    pub t0: Option<f64>,
    #[serde(default = "one")]
    pub t0_constant: f64,
    #[serde(default = "one_usize")]
    pub iterations: usize,
    /// Width of a smooth `tanh` roll-off instead of the sharp cutoff.
    #[serde(default)]
    pub smooth_width: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

impl SplitConfig {
    pub fn new(cutoff: f64, s: f64) -> Self {
        SplitConfig {
            cutoff,
            s,
            t0: None,
            t0_constant: 1.0,
            iterations: 1,
            smooth_width: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cutoff.is_finite() && self.cutoff > 0.0) {
            return Err(Error::invalid(
                "cutoff",
                format!("must be positive, got {}", self.cutoff),
            ));
        }
        if !(1.0..2.0).contains(&self.s) {
            return Err(Error::invalid("s", format!("must lie in [1, 2), got {}", self.s)));
        }
        if let Some(t0) = self.t0 {
            if !(t0.is_finite() && t0 > 0.0) {
                return Err(Error::invalid("t0", "must be positive"));
            }
        }
        if !(self.t0_constant.is_finite() && self.t0_constant > 0.0) {
            return Err(Error::invalid("t0_constant", "must be positive"));
        }
        if let Some(w) = self.smooth_width {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid("smooth_width", "must be positive"));
            }
        }
        Ok(())
    }

    /// `(t0, steps)`: the window, clamped to at least ten steps, and the
    /// number of steps so that `t0 / steps ≤ dt`.
    pub fn window(&self, dt: f64) -> (f64, usize) {
        let raw = self
            .t0
            .unwrap_or_else(|| self.t0_constant * self.cutoff.powf(-2.0 * (2.0 - self.s)));
        let t0 = raw.max(10.0 * dt);
        let steps = ((t0 / dt) - 1e-9).ceil().max(10.0) as usize;
        (t0, steps)
    }
}

/// `‖v0‖_{H^ρ}` against the bound `‖η0‖_{H^s} N^{ρ−s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    pub rho: f64,
    pub norm: f64,
    pub bound: f64,
}

#[derive(Debug, Clone)]
pub struct InitialSplit {
    pub u0: Field,
    pub v0: Field,
    pub tail_bounds: Vec<TailBound>,
}

/// `u0 = low_pass(η0, N)`, `v0 = η0 − u0`, with the tail bounds for
/// `ρ ∈ {0, 1}` recorded.
pub fn split_initial(eta0: &Field, cutoff: f64, s: f64) -> Result<InitialSplit> {
    split_with(eta0, cutoff, s, None)
}

fn split_with(eta0: &Field, cutoff: f64, s: f64, smooth_width: Option<f64>) -> Result<InitialSplit> {
    if !(cutoff.is_finite() && cutoff > 0.0) {
        return Err(Error::invalid("cutoff", "must be positive"));
    }
    let u0 = match smooth_width {
        None => low_pass(eta0, cutoff),
        Some(w) => smooth_low_pass(eta0, cutoff, w),
    };
    // the sharp cut is taken mode by mode so that v0 vanishes exactly when
    // eta0 has no content above the cutoff
    let v: Vec<Complex64> = match smooth_width {
        None => eta0
            .spectral()
            .iter()
            .zip(eta0.grid().wavenumbers().iter())
            .map(|(&a, k)| if k.abs() > cutoff { a } else { Complex64::new(0.0, 0.0) })
            .collect(),
        Some(_) => eta0.spectral().iter().zip(u0.spectral()).map(|(a, b)| a - b).collect(),
    };
    let v0 = Field::from_spectral(*eta0.grid(), v)?;
    let total = sobolev_norm(eta0, s);
    let tail_bounds = [0.0, 1.0]
        .iter()
        .map(|&rho| TailBound {
            rho,
            norm: sobolev_norm(&v0, rho),
            bound: total * cutoff.powf(rho - s),
        })
        .collect();
    Ok(InitialSplit { u0, v0, tail_bounds })
}

/// The smooth part over one window, with every integrator stage kept for
/// the difference equation.
#[derive(Debug, Clone)]
pub struct UTrajectory {
    pub dt: f64,
    /// Spectral states at `k·dt`, `k = 0..=steps`.
    pub states: Vec<Vec<Complex64>>,
    pub stages: Vec<StageStates>,
}

impl UTrajectory {
    pub fn steps(&self) -> usize {
        self.stages.len()
    }
}

/// Advances `u0` by `steps` steps of size `dt`.
pub fn evolve_u(u0: &Field, dynamics: &Dynamics, dt: f64, steps: usize) -> Result<UTrajectory> {
    let stepper = EtdRk4::new(dynamics, dt);
    let mut state = u0.spectral().to_vec();
    state[u0.grid().nyquist_slot()] = Complex64::new(0.0, 0.0);
    let mut states = vec![state.clone()];
    let mut stages = Vec::with_capacity(steps);
    for _ in 0..steps {
        let (next, st) = stepper.step_with(&state, |_, x| dynamics.nonlinear_hat(x));
        check_finite(&next, states.len() as f64 * dt)?;
        stages.push(st);
        state = next;
        states.push(state.clone());
    }
    Ok(UTrajectory { dt, states, stages })
}

/// Advances `v0` along a stored smooth trajectory.
pub fn evolve_v(v0: &Field, u: &UTrajectory, dynamics: &Dynamics) -> Result<Vec<Vec<Complex64>>> {
    let stepper = EtdRk4::new(dynamics, u.dt);
    let mut state = v0.spectral().to_vec();
    state[v0.grid().nyquist_slot()] = Complex64::new(0.0, 0.0);
    let mut states = vec![state.clone()];
    for (k, st) in u.stages.iter().enumerate() {
        let (next, _) = stepper.step_with(&state, |stage, v| dynamics.difference_nonlinear_hat(st.get(stage), v));
        check_finite(&next, (k + 1) as f64 * u.dt)?;
        state = next;
        states.push(state.clone());
    }
    Ok(states)
}

fn check_finite(c: &[Complex64], t: f64) -> Result<()> {
    if c.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid(
            "split evolution",
            format!("state became non-finite at t = {t}"),
        ))
    }
}

/// The remainder `h = v(t0) − S(t0)v0` and the norms used in its estimate.
#[derive(Debug, Clone)]
pub struct Remainder {
    pub h: Field,
    pub h1: f64,
    pub dx_h1: f64,
    pub h2: f64,
}

pub fn compute_h(v_t0: &Field, v0: &Field, t0: f64, dynamics: &Dynamics) -> Result<Remainder> {
    let mut free = v0.spectral().to_vec();
    dynamics.propagate(&mut free, t0);
    let h: Vec<Complex64> = v_t0.spectral().iter().zip(&free).map(|(a, b)| a - b).collect();
    let h = Field::from_spectral(*v0.grid(), h)?;
    let dx = crate::spectral::spectral_derivative(&h, 1);
    Ok(Remainder {
        h1: sobolev_norm(&h, 1.0),
        dx_h1: sobolev_norm(&dx, 1.0),
        h2: sobolev_norm(&h, 2.0),
        h,
    })
}

/// State at the start of iteration `k`.
#[derive(Debug, Clone)]
pub struct SplitState {
    pub k: usize,
    pub u: Field,
    pub v: Field,
    /// Remainder re-absorbed into `u` (zero for `k = 0`).
    pub h: Field,
    pub energy: f64,
}

/// Outcome of [`iterate`].
#[derive(Debug, Clone)]
pub struct SplitRun {
    pub t0: f64,
    pub dt: f64,
    pub steps_per_window: usize,
    pub initial: InitialSplit,
    pub states: Vec<SplitState>,
    /// `E(u_{k+1}) − E(u_k(t0))` per window.
    pub energy_increments: Vec<f64>,
    /// `E(u_k(t0)) − E(u_k)` per window; zero up to time stepping when γ = 7/48.
    pub window_energy_changes: Vec<f64>,
    /// `‖u_k(t0)‖_{H²}` per window.
    pub u_h2_end: Vec<f64>,
    pub remainders: Vec<Remainder>,
    /// `max_k |‖v_k‖_{H^s} − ‖v0‖_{H^s}|`.
    pub v_norm_drift: f64,
    /// `max_t ‖(u + v) − η_direct‖_{H¹}` over every window.
    pub additivity_error: f64,
    /// Mid-window residual of `η(t) − S(t)η0 = u_k(τ) − S(t)u0 + h_k(τ)`
    /// in `H¹`, with `η(t)` from an independent direct solve.
    pub reconstruction_residual: Option<f64>,
}

impl SplitRun {
    /// `η` at the end of the last window.
    pub fn final_eta(&self) -> Result<Field> {
        let last = self.states.last().expect("at least the initial state");
        last.u.add(&last.v)
    }
}

/// Runs `cfg.iterations` windows of evolve-and-reabsorb.
pub fn iterate(eta0: &Field, cfg: &SplitConfig, spec: &RhsSpec, stepper: &StepperConfig) -> Result<SplitRun> {
    cfg.validate()?;
    stepper.validate()?;
    let grid = *eta0.grid();
    let dynamics = Dynamics::new(grid, *spec)?;
    let (t0, steps) = cfg.window(stepper.dt);
    let dt = t0 / steps as f64;
    let initial = split_with(eta0, cfg.cutoff, cfg.s, cfg.smooth_width)?;
    let v_norm0 = sobolev_norm(&initial.v0, cfg.s);

    let mut states = vec![SplitState {
        k: 0,
        u: initial.u0.clone(),
        v: initial.v0.clone(),
        h: Field::zeros(grid),
        energy: dynamics.energy_hat(initial.u0.spectral()),
    }];
    let mut run = SplitRun {
        t0,
        dt,
        steps_per_window: steps,
        initial,
        states: Vec::new(),
        energy_increments: Vec::new(),
        window_energy_changes: Vec::new(),
        u_h2_end: Vec::new(),
        remainders: Vec::new(),
        v_norm_drift: 0.0,
        additivity_error: 0.0,
        reconstruction_residual: None,
    };
    if cfg.iterations == 0 {
        run.states = states;
        return Ok(run);
    }

    let direct_stepper = EtdRk4::new(&dynamics, dt);
    let mut direct = eta0.spectral().to_vec();
    direct[grid.nyquist_slot()] = Complex64::new(0.0, 0.0);
    let mut mid = None;
    for k in 0..cfg.iterations {
        let cur = states.last().expect("non-empty");
        let u_traj = evolve_u(&cur.u, &dynamics, dt, steps)?;
        let v_traj = evolve_v(&cur.v, &u_traj, &dynamics)?;

        for j in 0..=steps {
            if j > 0 {
                direct = direct_stepper.step(&direct);
            }
            let diff: Vec<Complex64> = (0..grid.n())
                .map(|m| u_traj.states[j][m] + v_traj[j][m] - direct[m])
                .collect();
            run.additivity_error = run.additivity_error.max(sobolev_norm_coeffs(&grid, &diff, 1.0));
            if k + 1 == cfg.iterations && j == steps / 2 {
                mid = Some((j, direct.clone()));
            }
        }

        let u_end = Field::from_spectral(grid, u_traj.states[steps].clone())?;
        let v_end = Field::from_spectral(grid, v_traj[steps].clone())?;
        let rem = compute_h(&v_end, &cur.v, t0, &dynamics)?;
        let e_end = dynamics.energy_hat(u_end.spectral());
        let u_next = u_end.add(&rem.h)?;
        let mut v_next = cur.v.spectral().to_vec();
        dynamics.propagate(&mut v_next, t0);
        let v_next = Field::from_spectral(grid, v_next)?;
        let e_next = dynamics.energy_hat(u_next.spectral());

        run.window_energy_changes.push(e_end - cur.energy);
        run.energy_increments.push(e_next - e_end);
        run.u_h2_end.push(sobolev_norm(&u_end, 2.0));
        run.v_norm_drift = run.v_norm_drift.max((sobolev_norm(&v_next, cfg.s) - v_norm0).abs());

        if let Some((j, ref eta_mid)) = mid {
            if k + 1 == cfg.iterations {
                run.reconstruction_residual = Some(reconstruction_residual(
                    &dynamics,
                    &run.initial,
                    eta0,
                    &cur.v,
                    &u_traj,
                    &v_traj,
                    k,
                    j,
                    t0,
                    dt,
                    eta_mid,
                ));
            }
        }

        states.push(SplitState {
            k: k + 1,
            u: u_next,
            v: v_next,
            h: rem.h.clone(),
            energy: e_next,
        });
        run.remainders.push(rem);
    }
    run.states = states;
    Ok(run)
}

/// Both sides of `η(t) − S(t)η0 = u_k(τ) − S(t)u0 + h_k(τ)` at `t = k t0 + τ`.
#[allow(clippy::too_many_arguments)]
fn reconstruction_residual(
    dynamics: &Dynamics,
    initial: &InitialSplit,
    eta0: &Field,
    v_k: &Field,
    u_traj: &UTrajectory,
    v_traj: &[Vec<Complex64>],
    k: usize,
    j: usize,
    t0: f64,
    dt: f64,
    eta_direct: &[Complex64],
) -> f64 {
    let grid = dynamics.grid();
    let tau = j as f64 * dt;
    let t = k as f64 * t0 + tau;
    let flow = |c: &[Complex64], time: f64| {
        let mut c = c.to_vec();
        dynamics.propagate(&mut c, time);
        c
    };
    let s_eta0 = flow(eta0.spectral(), t);
    let s_u0 = flow(initial.u0.spectral(), t);
    let s_vk = flow(v_k.spectral(), tau);
    let n = grid.n();
    let ny = grid.nyquist_slot();
    let diff: Vec<Complex64> = (0..n)
        .map(|m| {
            if m == ny {
                return Complex64::new(0.0, 0.0);
            }
            let lhs = eta_direct[m] - s_eta0[m];
            let h_tau = v_traj[j][m] - s_vk[m];
            let rhs = u_traj.states[j][m] - s_u0[m] + h_tau;
            lhs - rhs
        })
        .collect();
    sobolev_norm_coeffs(grid, &diff, 1.0)
}

/// One row of an `N` sweep (a single window per cutoff).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub cutoff: f64,
    pub t0: f64,
    pub h_h2: f64,
    pub h_h1: f64,
    pub dx_h_h1: f64,
    pub u_h2_t0: f64,
    /// `‖u(t0)‖_{H²} / N^{2−s}`.
    pub u_h2_scaled: f64,
    /// `E(u1) − E(u(t0))`.
    pub energy_increment: f64,
    pub energy_window_change: f64,
    pub additivity_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitSweep {
    pub s: f64,
    pub grid: Grid,
    pub rows: Vec<SweepRow>,
    /// Exponent of `‖h(t0)‖_{H²}` in `N`; absent with fewer than two cutoffs.
    pub h_fit: Option<LinearFit>,
    /// Exponent of `|E(u1) − E(u(t0))|` in `N`.
    pub energy_fit: Option<LinearFit>,
}

/// Runs one window for every cutoff (in parallel) and fits the exponents.
pub fn sweep(
    eta0: &Field,
    cutoffs: &[f64],
    base: &SplitConfig,
    spec: &RhsSpec,
    stepper: &StepperConfig,
) -> Result<SplitSweep> {
    if cutoffs.is_empty() {
        return Err(Error::invalid("cutoffs", "need at least one cutoff"));
    }
    let rows = cutoffs
        .par_iter()
        .map(|&n| {
            let cfg = SplitConfig {
                cutoff: n,
                iterations: 1,
                ..*base
            };
            let run = iterate(eta0, &cfg, spec, stepper)?;
            let rem = &run.remainders[0];
            Ok(SweepRow {
                cutoff: n,
                t0: run.t0,
                h_h2: rem.h2,
                h_h1: rem.h1,
                dx_h_h1: rem.dx_h1,
                u_h2_t0: run.u_h2_end[0],
                u_h2_scaled: run.u_h2_end[0] / n.powf(2.0 - base.s),
                energy_increment: run.energy_increments[0],
                energy_window_change: run.window_energy_changes[0],
                additivity_error: run.additivity_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let (h_fit, energy_fit) = if rows.len() >= 2 {
        let ns: Vec<f64> = rows.iter().map(|r| r.cutoff).collect();
        let hs: Vec<f64> = rows.iter().map(|r| r.h_h2).collect();
        let es: Vec<f64> = rows.iter().map(|r| r.energy_increment.abs()).collect();
        (log_log_fit(&ns, &hs).ok(), log_log_fit(&ns, &es).ok())
    } else {
        (None, None)
    };
    Ok(SplitSweep {
        s: base.s,
        grid: *eta0.grid(),
        rows,
        h_fit,
        energy_fit,
    })
}

/// `(horizon, sup)` pairs and the fitted exponent.
pub type GrowthCurve = (Vec<(f64, f64)>, Option<LinearFit>);

/// `sup_{t ≤ T} ‖η(t) − S(t)η0‖_{H²}` for each horizon, from one direct
/// solve, with the fitted exponent of `1 + T`.
pub fn nonlinear_part_growth(
    eta0: &Field,
    spec: &RhsSpec,
    stepper: &StepperConfig,
    horizons: &[f64],
) -> Result<GrowthCurve> {
    stepper.validate()?;
    let grid = *eta0.grid();
    let dynamics = Dynamics::new(grid, *spec)?;
    let t_max = horizons.iter().copied().fold(0.0, f64::max);
    if !(t_max > 0.0) {
        return Err(Error::invalid("horizons", "need a positive horizon"));
    }
    let steps = stepper.steps_for(t_max);
    let dt = t_max / steps as f64;
    let etd = EtdRk4::new(&dynamics, dt);
    let mut state = eta0.spectral().to_vec();
    state[grid.nyquist_slot()] = Complex64::new(0.0, 0.0);
    let mut sup = Vec::with_capacity(steps + 1);
    let mut running = 0.0f64;
    for k in 0..=steps {
        if k > 0 {
            state = etd.step(&state);
        }
        let mut free = eta0.spectral().to_vec();
        free[grid.nyquist_slot()] = Complex64::new(0.0, 0.0);
        dynamics.propagate(&mut free, k as f64 * dt);
        let d: Vec<Complex64> = state.iter().zip(&free).map(|(a, b)| a - b).collect();
        running = running.max(sobolev_norm_coeffs(&grid, &d, 2.0));
        sup.push(running);
    }
    let out: Vec<(f64, f64)> = horizons
        .iter()
        .map(|&t| (t, sup[((t / dt).round() as usize).min(steps)]))
        .collect();
    let fit = if out.len() >= 2 {
        let x: Vec<f64> = out.iter().map(|(t, _)| 1.0 + t).collect();
        let y: Vec<f64> = out.iter().map(|(_, v)| *v).collect();
        log_log_fit(&x, &y).ok()
    } else {
        None
    };
    Ok((out, fit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::Bbm5Coefficients;
    use crate::evolution::{run_simulation, Monitors};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rough(grid: Grid, s: f64, seed: u64, norm: f64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = crate::spectral::random_field(grid, s, &mut rng);
        crate::evolution::scale_to_norm(&f, s, norm).unwrap()
    }

    fn stepper(dt: f64) -> StepperConfig {
        StepperConfig {
            dt,
            ..Default::default()
        }
    }

    #[test]
    fn split_is_exact_and_tails_are_bounded() {
        let g = Grid::new(128, 2.0 * std::f64::consts::PI).unwrap();
        let f = rough(g, 1.5, 1, 1.0);
        let sp = split_initial(&f, 10.0, 1.5).unwrap();
        for ((a, b), c) in sp.u0.spectral().iter().zip(sp.v0.spectral()).zip(f.spectral()) {
            assert_eq!(a + b, *c);
        }
        for t in &sp.tail_bounds {
            assert!(t.norm <= t.bound, "{t:?}");
        }
        let all = split_initial(&f, 1e6, 1.5).unwrap();
        assert!(all.v0.is_zero());
    }

    #[test]
    fn two_modes_separate_cleanly() {
        let g = Grid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let f = Field::from_fn(g, |x| (2.0 * x).cos() + 0.1 * (9.0 * x).sin()).unwrap();
        let sp = split_initial(&f, 5.0, 1.0).unwrap();
        let low = Field::from_fn(g, |x| (2.0 * x).cos()).unwrap();
        assert!(sp.u0.sub(&low).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn window_is_clamped() {
        let cfg = SplitConfig::new(64.0, 1.5);
        let (t0, steps) = cfg.window(1e-3);
        assert!((t0 - 1.0 / 64.0).abs() < 1e-15);
        assert!(steps >= 10 && t0 / steps as f64 <= 1e-3);
        let (t0, steps) = cfg.window(1e-2);
        assert_eq!((t0, steps), (0.1, 10));
    }

    #[test]
    fn zero_rough_part_gives_zero_remainder() {
        let g = Grid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let f = low_pass(&rough(g, 1.5, 2, 0.5), 4.0);
        let run = iterate(
            &f,
            &SplitConfig::new(8.0, 1.5),
            &RhsSpec::new(Bbm5Coefficients::reference()),
            &stepper(1e-3),
        )
        .unwrap();
        // the packed two-signal FFT leaks roundoff from u into v
        assert!(run.remainders[0].h2 < 1e-13, "{}", run.remainders[0].h2);
    }

    #[test]
    fn v_alone_follows_the_full_equation() {
        let g = Grid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let f = rough(g, 1.5, 3, 0.5);
        let spec = RhsSpec::new(Bbm5Coefficients::reference());
        let d = Dynamics::new(g, spec).unwrap();
        let u = evolve_u(&Field::zeros(g), &d, 1e-3, 20).unwrap();
        let v = evolve_v(&f, &u, &d).unwrap();
        let r = run_simulation(&f, &spec, &stepper(1e-3), 0.02, &Monitors::default()).unwrap();
        let got = Field::from_spectral(g, v[20].clone()).unwrap();
        assert!(got.sub(&r.final_state.unwrap()).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn linear_flow_has_no_remainder() {
        let g = Grid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let f = rough(g, 1.5, 4, 1.0);
        let spec = RhsSpec::new(Bbm5Coefficients::reference()).linear_only();
        let run = iterate(&f, &SplitConfig::new(8.0, 1.5), &spec, &stepper(1e-3)).unwrap();
        assert!(run.remainders[0].h2 < 1e-12);
    }

    #[test]
    fn iterations_are_consistent() {
        let g = Grid::new(128, 2.0 * std::f64::consts::PI).unwrap();
        let f = rough(g, 1.5, 5, 0.5);
        let cfg = SplitConfig {
            iterations: 3,
            ..SplitConfig::new(8.0, 1.5)
        };
        let run = iterate(&f, &cfg, &RhsSpec::new(Bbm5Coefficients::reference()), &stepper(2e-3)).unwrap();
        assert_eq!(run.states.len(), 4);
        assert!(run.additivity_error < 1e-10, "{}", run.additivity_error);
        assert!(run.v_norm_drift < 1e-12);
        assert!(run.reconstruction_residual.unwrap() < 1e-10);
        let none = iterate(
            &f,
            &SplitConfig { iterations: 0, ..cfg },
            &RhsSpec::new(Bbm5Coefficients::reference()),
            &stepper(2e-3),
        )
        .unwrap();
        assert_eq!(none.states.len(), 1);
    }

    #[test]
    fn s_outside_range_is_rejected() {
        assert!(SplitConfig::new(8.0, 2.5).validate().is_err());
        assert!(SplitConfig::new(8.0, 0.5).validate().is_err());
        assert!(SplitConfig::new(0.0, 1.5).validate().is_err());
    }
}
