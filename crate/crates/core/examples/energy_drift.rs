//! With γ ≠ 7/48 the energy drifts; compare the measured rate with the
//! predicted one.

use bbm5::evolution::{run_simulation, InitialCondition, Monitors};
use bbm5::{Bbm5Coefficients, Grid, RhsSpec, StepperConfig};

fn main() -> bbm5::Result<()> {
    let grid = Grid::new(1024, 32.0 * std::f64::consts::PI)?;
    let eta0 = InitialCondition::Sech2 {
        amplitude: 0.5,
        width: 1.0,
        center: None,
    }
    .build(grid, 0)?;
    let c = Bbm5Coefficients::reference();
    let spec = RhsSpec::new(c.with_gamma(c.gamma() + 0.1));
    let cfg = StepperConfig {
        dt: 2e-3,
        ..StepperConfig::default()
    };
    let monitors = Monitors {
        every: 250,
        ..Monitors::default()
    };
    let report = run_simulation(&eta0, &spec, &cfg, 3.0, &monitors)?;
    println!("{:>6} {:>16} {:>16}", "t", "dE/dt", "predicted");
    for ((t, rate), pred) in report
        .times
        .iter()
        .zip(&report.energy_rate)
        .zip(&report.drift_predicted)
    {
        println!("{t:6.2} {rate:16.6e} {pred:16.6e}");
    }
    Ok(())
}
