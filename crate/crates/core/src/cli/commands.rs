use std::path::{Path, PathBuf};

use serde_json::json;

use super::config::ExperimentConfig;
use super::{CliError, CoeffsArgs, Command, Common, DEFAULT_OUT_DIR, OUT_DIR_ENV};
use crate::coefficients::{CoefficientReport, ModelParameters};
use crate::derivation::residual_sweep;
use crate::error::Error;
use crate::evolution::{
    duhamel_picard, existence_time_bound, run_simulation, scale_to_norm, InitialCondition, Monitors, RhsSpec, RunReport,
};
use crate::fit::log_log_fit;
use crate::io::{self, fmt_f64, Table};
use crate::multipliers::{scan_sup, sup_bound, SupExpression, Symbol, SymbolKind};
use crate::spectral::sobolev_norm;
use crate::splitting::{self, SplitConfig};

type Outcome = Result<(), CliError>;

struct Context {
    cfg: ExperimentConfig,
    out: PathBuf,
    out_given: bool,
    quiet: bool,
}

impl Context {
    fn new(common: &Common) -> Result<Self, CliError> {
        let mut cfg = match &common.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = common.seed {
            cfg.seed = seed;
        }
        let env = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
        let chosen = common.out.clone().or_else(|| cfg.output_dir.clone()).or(env);
        let out_given = chosen.is_some();
        Ok(Context {
            out: chosen.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
            out_given,
            cfg,
            quiet: common.quiet,
        })
    }

    fn ensure_out(&self) -> Result<&Path, CliError> {
        std::fs::create_dir_all(&self.out).map_err(Error::from)?;
        Ok(&self.out)
    }

    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }
}

pub(super) fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Coeffs(a) => coeffs(a),
        Command::Simulate(c) => simulate(&Context::new(c)?),
        Command::Split(c) => split(&Context::new(c)?),
        Command::MultiplierTable(c) => multiplier_table(&Context::new(c)?),
        Command::EnergyDrift(c) => energy_drift(&Context::new(c)?),
        Command::Picard(c) => picard(&Context::new(c)?),
        Command::DerivationResidual(c) => derivation(&Context::new(c)?),
    }
}

fn coeffs(args: &CoeffsArgs) -> Outcome {
    let ctx = Context::new(&args.common)?;
    let base = ctx.cfg.model.parameters;
    let mut p = ModelParameters::new(
        args.theta.unwrap_or(base.theta()),
        args.lambda.unwrap_or(base.lambda()),
        args.mu.unwrap_or(base.mu()),
        args.lambda1.unwrap_or(base.lambda1()),
        args.mu1.unwrap_or(base.mu1()),
        args.rho.unwrap_or(base.rho()),
    )?;
    if args.rho_auto || ctx.cfg.model.rho_auto {
        p = p.with_energy_rho();
    }
    let report = CoefficientReport::new(p);
    let text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    if ctx.out_given {
        let path = ctx.ensure_out()?.join("coeffs.json");
        std::fs::write(&path, format!("{text}\n")).map_err(Error::from)?;
    }
    ctx.say(text);
    Ok(())
}

fn run_meta(
    report: &RunReport,
    ctx: &Context,
    horizon: f64,
    initial: &InitialCondition,
    extra: serde_json::Value,
) -> serde_json::Value {
    let max_resid = report
        .drift_residual()
        .iter()
        .fold(0.0f64, |m, r| if r.is_finite() { m.max(r.abs()) } else { m });
    json!({
        "grid": report.grid,
        "scheme": report.scheme,
        "dt": report.dt,
        "steps": report.steps,
        "horizon": horizon,
        "seed": ctx.cfg.seed,
        "initial": initial,
        "records": report.times.len(),
        "max_relative_energy_change": report.max_relative_energy_change(),
        "max_zero_mode_change": report.max_zero_mode_change(),
        "max_abs_drift_residual": max_resid,
        "run": extra,
    })
}

fn simulate(ctx: &Context) -> Outcome {
    let sec = &ctx.cfg.simulate;
    let c = ctx.cfg.model.coefficients();
    let eta0 = sec.initial.build(sec.grid, ctx.cfg.seed)?;
    let spec = RhsSpec::new(c).with_dealias(sec.dealias);
    let out = ctx.ensure_out()?;
    let result = run_simulation(&eta0, &spec, &sec.stepper, sec.horizon, &sec.monitors);
    let (report, aborted) = match result {
        Ok(r) => (r, None),
        Err(Error::SimulationAborted { time, report }) => (*report, Some(time)),
        Err(e) => return Err(e.into()),
    };
    io::run_table(&report).save(&out.join("run.csv"))?;
    let meta = run_meta(
        &report,
        ctx,
        sec.horizon,
        &sec.initial,
        json!({ "coefficients": c, "dealias": sec.dealias, "aborted_at": aborted }),
    );
    io::write_json(&out.join("run_meta.json"), &meta)?;
    for (i, (_, f)) in report.snapshots.iter().enumerate() {
        io::write_snapshot(&out.join(format!("snapshot_{i:04}.csv")), f)?;
    }
    if sec.final_snapshot {
        if let Some(f) = &report.final_state {
            io::write_snapshot(&out.join("final_snapshot.csv"), f)?;
            io::spectrum_table(f).save(&out.join("final_spectrum.csv"))?;
        }
    }
    if let Some(time) = aborted {
        return Err(Error::SimulationAborted {
            time,
            report: Box::new(report),
        }
        .into());
    }
    ctx.say(format!(
        "simulate: {} records, max relative energy change {:.3e} -> {}",
        report.times.len(),
        report.max_relative_energy_change(),
        out.join("run.csv").display()
    ));
    Ok(())
}

fn energy_drift(ctx: &Context) -> Outcome {
    let sec = &ctx.cfg.energy_drift;
    let mut c = ctx.cfg.model.coefficients();
    if let Some(g) = sec.gamma {
        c = c.with_gamma(g);
    }
    let eta0 = sec.initial.build(sec.grid, ctx.cfg.seed)?;
    let monitors = Monitors {
        every: sec.every,
        sobolev_indices: vec![],
        snapshot_every: None,
    };
    let report = run_simulation(&eta0, &RhsSpec::new(c), &sec.stepper, sec.horizon, &monitors)?;
    let out = ctx.ensure_out()?;
    io::drift_table(&report).save(&out.join("energy_drift.csv"))?;
    let mut worst = 0.0f64;
    let mut compared = 0usize;
    for (rate, pred) in report.energy_rate.iter().zip(&report.drift_predicted) {
        if pred.abs() > 1e-8 {
            compared += 1;
            worst = worst.max(((rate - pred) / pred).abs());
        }
    }
    io::write_json(
        &out.join("energy_drift_summary.json"),
        &json!({
            "coefficients": c,
            "gamma_minus_energy_gamma": c.gamma() - 7.0 / 48.0,
            "compared_points": compared,
            "max_relative_mismatch": worst,
            "meta": run_meta(&report, ctx, sec.horizon, &sec.initial, json!(null)),
        }),
    )?;
    ctx.say(format!(
        "energy-drift: {compared} points compared, max relative mismatch {worst:.3e}"
    ));
    Ok(())
}

fn split(ctx: &Context) -> Outcome {
    let sec = &ctx.cfg.split;
    let first = *sec
        .cutoffs
        .first()
        .ok_or_else(|| CliError::Config("split.cutoffs must not be empty".into()))?;
    let base = SplitConfig {
        cutoff: first,
        s: sec.s,
        t0: None,
        t0_constant: sec.t0_constant,
        iterations: 1,
        smooth_width: sec.smooth_width,
    };
    base.validate()?;
    for &n in &sec.cutoffs {
        SplitConfig { cutoff: n, ..base }.validate()?;
    }
    let initial = InitialCondition::RandomSpectrum {
        s: sec.s,
        norm: Some(sec.data_norm),
    };
    let eta0 = initial.build(sec.grid, ctx.cfg.seed)?;
    let spec = RhsSpec::new(ctx.cfg.model.coefficients());
    let sweep = splitting::sweep(&eta0, &sec.cutoffs, &base, &spec, &sec.stepper)?;

    let mut table = Table::new(&["N", "t0", "h_H2", "u_H2_t0", "E_u1_minus_E_ut0", "slope_fit_window"]);
    for (i, r) in sweep.rows.iter().enumerate() {
        let ns: Vec<f64> = sweep.rows[..=i].iter().map(|r| r.cutoff).collect();
        let hs: Vec<f64> = sweep.rows[..=i].iter().map(|r| r.h_h2).collect();
        let slope = if i == 0 {
            f64::NAN
        } else {
            log_log_fit(&ns, &hs).map_or(f64::NAN, |f| f.slope)
        };
        table.push_floats(&[r.cutoff, r.t0, r.h_h2, r.u_h2_t0, r.energy_increment, slope]);
    }
    let out = ctx.ensure_out()?;
    table.save(&out.join("split_sweep.csv"))?;
    let summary = json!({
        "s": sweep.s,
        "grid": sweep.grid,
        "seed": ctx.cfg.seed,
        "data_norm": sec.data_norm,
        "t0_constant": sec.t0_constant,
        "dt": sec.stepper.dt,
        "rows": sweep.rows,
        "h_h2_exponent": sweep.h_fit,
        "energy_increment_exponent": sweep.energy_fit,
        "h_exponent_bound": sweep.s - 3.0,
        "h_exponent_threshold": sweep.s - 3.0 + 0.5,
    });
    io::write_json(&out.join("split_summary.json"), &summary)?;
    match sweep.h_fit {
        Some(f) => ctx.say(format!("split: ‖h(t0)‖_H2 ~ N^{:.3}", f.slope)),
        None => ctx.say("split: single cutoff, no exponent fitted"),
    }
    Ok(())
}

const SUP_EXPRESSIONS: [SupExpression; 9] = [
    SupExpression::XiPsi,
    SupExpression::XiTau,
    SupExpression::JapaneseXiPsi,
    SupExpression::PsiOverOmega,
    SupExpression::TauOverOmega,
    SupExpression::JapaneseXiPsiOverOmega,
    SupExpression::WeightedPsiOverOmega,
    SupExpression::CubicWeightedPsi,
    SupExpression::Omega,
];

fn multiplier_table(ctx: &Context) -> Outcome {
    let sec = &ctx.cfg.multiplier_table;
    if !(sec.xi_max.is_finite() && sec.xi_max > 0.0) || sec.samples_per_unit == 0 {
        return Err(CliError::Config(
            "multiplier_table needs xi_max > 0 and samples_per_unit > 0".into(),
        ));
    }
    let c = ctx.cfg.model.coefficients();
    let kinds = [
        SymbolKind::Phi,
        SymbolKind::Psi,
        SymbolKind::Tau,
        SymbolKind::Omega,
        SymbolKind::VarphiDenominator,
    ];
    let symbols = kinds
        .iter()
        .map(|&k| Symbol::new(k, c))
        .collect::<crate::Result<Vec<_>>>()?;
    let per = sec.samples_per_unit as f64;
    let count = (sec.xi_max * per).round() as usize;
    let mut table = Table::new(&["xi", "phi", "psi", "tau", "omega", "varphi"]);
    for i in 0..=count {
        let xi = i as f64 / per;
        let mut row = vec![xi];
        row.extend(symbols.iter().map(|s| s.eval(xi)));
        table.push_floats(&row);
    }
    let out = ctx.ensure_out()?;
    table.save(&out.join("multipliers.csv"))?;
    let mut sups = Vec::new();
    for e in SUP_EXPRESSIONS {
        let b = sup_bound(e, &c)?;
        let s = scan_sup(e, &c)?;
        sups.push(json!({
            "expression": e,
            "value": b.value,
            "argmax": b.argmax,
            "method": b.method,
            "scan_value": s.value,
            "scan_argmax": s.argmax,
        }));
    }
    io::write_json(
        &out.join("sup_bounds.json"),
        &json!({ "coefficients": c, "bounds": sups }),
    )?;
    ctx.say(format!("multiplier-table: {} rows", table.len()));
    Ok(())
}

fn picard(ctx: &Context) -> Outcome {
    let sec = &ctx.cfg.picard;
    let s = sec.stepper.sobolev_index;
    let mut eta0 = sec.initial.build(sec.grid, ctx.cfg.seed)?;
    if let Some(target) = sec.data_norm {
        if !eta0.is_zero() {
            eta0 = scale_to_norm(&eta0, s, target)?;
        }
    }
    let norm = sobolev_norm(&eta0.without_nyquist(), s);
    let bound = existence_time_bound(norm, sec.stepper.contraction_constant);
    // zero data exists forever; any horizon will do
    let horizon = sec.horizon.unwrap_or(if bound.is_finite() { bound } else { 1.0 });
    let spec = RhsSpec::new(ctx.cfg.model.coefficients());
    let outcome = duhamel_picard(&eta0, &spec, &sec.stepper, horizon)?;

    let out = ctx.ensure_out()?;
    let mut it = Table::new(&["iteration", "sup_diff", "ratio"]);
    let ratios = outcome.ratios();
    for (m, d) in outcome.differences.iter().enumerate() {
        let r = if m == 0 { f64::NAN } else { ratios[m - 1] };
        it.push(vec![(m + 1).to_string(), fmt_f64(*d), fmt_f64(r)]);
    }
    it.save(&out.join("picard.csv"))?;
    let mut traj = Table::new(&["t", "hs_norm", "growth"]);
    for (t, v) in outcome.times.iter().zip(&outcome.norms) {
        let g = if norm == 0.0 { 1.0 } else { v / norm };
        traj.push_floats(&[*t, *v, g]);
    }
    traj.save(&out.join("picard_norms.csv"))?;
    io::write_json(
        &out.join("picard_summary.json"),
        &json!({
            "converged": true,
            "iterations": outcome.iterations(),
            "differences": outcome.differences,
            "ratios": ratios,
            "initial_norm": outcome.initial_norm,
            "sobolev_index": s,
            "existence_time_bound": if bound.is_finite() { json!(bound) } else { json!(null) },
            "horizon": horizon,
            "max_growth": outcome.max_growth(),
            "grid": sec.grid,
            "dt": horizon / (outcome.times.len() - 1) as f64,
        }),
    )?;
    ctx.say(format!(
        "picard: converged in {} iterations, max growth {:.6}",
        outcome.iterations(),
        outcome.max_growth()
    ));
    Ok(())
}

fn derivation(ctx: &Context) -> Outcome {
    let cfg = &ctx.cfg.derivation;
    let sweep = residual_sweep(cfg)?;
    let out = ctx.ensure_out()?;
    let mut table = Table::new(&["eps", "r1_L2", "r2_L2", "slope_running"]);
    for r in &sweep.rows {
        table.push_floats(&[r.eps, r.first.r1, r.first.r2, r.slope_running]);
    }
    table.save(&out.join("derivation.csv"))?;
    io::write_json(
        &out.join("derivation_summary.json"),
        &json!({
            "config": cfg,
            "rows": sweep.rows,
            "first_order_exponent": sweep.first_fit,
            "velocity_defect_exponent": sweep.velocity_fit,
            "leading_defect_exponent": sweep.leading_fit,
            "second_order_exponent": sweep.second_fit,
            "second_order_note": "research grade: high derivatives amplify grid noise",
        }),
    )?;
    match sweep.first_fit {
        Some(f) => ctx.say(format!(
            "derivation-residual: first-order residual ~ eps^{:.3}",
            f.slope
        )),
        None => ctx.say("derivation-residual: single eps, no exponent fitted"),
    }
    Ok(())
}
