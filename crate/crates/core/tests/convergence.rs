use bbm5::evolution::{
    duhamel_picard, run_simulation, scale_to_norm, InitialCondition, Monitors, RhsSpec, Scheme, StepperConfig,
};
use bbm5::fit::log_log_fit;
use bbm5::spectral::{sobolev_norm, Field, Grid};
use bbm5::Bbm5Coefficients;

fn data() -> Field {
    InitialCondition::Sech2 {
        amplitude: 0.5,
        width: 1.0,
        center: None,
    }
    .build(Grid::new(128, 40.0).unwrap(), 0)
    .unwrap()
}

fn solve(eta0: &Field, scheme: Scheme, dt: f64, horizon: f64) -> Field {
    let cfg = StepperConfig {
        scheme,
        dt,
        ..StepperConfig::default()
    };
    let spec = RhsSpec::new(Bbm5Coefficients::reference());
    let monitors = Monitors {
        every: usize::MAX,
        ..Monitors::default()
    };
    run_simulation(eta0, &spec, &cfg, horizon, &monitors)
        .unwrap()
        .final_state
        .unwrap()
}

#[test]
fn exponential_integrator_is_fourth_order() {
    let eta0 = data();
    let reference = solve(&eta0, Scheme::ExponentialRk4, 1.0 / 512.0, 2.0);
    let dts = [0.4, 0.2, 0.1];
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            sobolev_norm(
                &solve(&eta0, Scheme::ExponentialRk4, dt, 2.0).sub(&reference).unwrap(),
                1.0,
            )
        })
        .collect();
    let fit = log_log_fit(&dts, &errs).unwrap();
    assert!(fit.slope > 3.7 && fit.slope < 4.5, "order {} from {errs:?}", fit.slope);
}

#[test]
fn picard_quadrature_is_fourth_order() {
    let eta0 = scale_to_norm(&data(), 1.0, 0.05).unwrap();
    let spec = RhsSpec::new(Bbm5Coefficients::reference());
    let horizon = 1.0;
    let reference = solve(&eta0, Scheme::ExponentialRk4, 1.0 / 512.0, horizon);
    let dts = [0.25, 0.125, 0.0625];
    let errs: Vec<f64> = dts
        .iter()
        .map(|&dt| {
            let cfg = StepperConfig {
                scheme: Scheme::PicardDuhamel,
                dt,
                picard_tol: 1e-15,
                ..StepperConfig::default()
            };
            let out = duhamel_picard(&eta0, &spec, &cfg, horizon).unwrap();
            sobolev_norm(&out.final_state().sub(&reference).unwrap(), 1.0)
        })
        .collect();
    let fit = log_log_fit(&dts, &errs).unwrap();
    assert!(fit.slope > 3.5, "order {} from {errs:?}", fit.slope);
}
