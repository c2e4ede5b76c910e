//! Evolve a sech² hump with the exponential integrator and watch the
//! energy stay put.

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
    let spec = RhsSpec::new(Bbm5Coefficients::reference());
    let cfg = StepperConfig {
        dt: 5e-3,
        ..StepperConfig::default()
    };
    let monitors = Monitors {
        every: 200,
        ..Monitors::default()
    };
    let report = run_simulation(&eta0, &spec, &cfg, 5.0, &monitors)?;
    let h1 = report.norm_series(1.0).expect("H1 is monitored");
    for (i, t) in report.times.iter().enumerate() {
        println!("t = {t:5.2}  E = {:.15}  |eta|_H1 = {:.12}", report.energy[i], h1[i]);
    }
    println!("max relative energy change {:.2e}", report.max_relative_energy_change());
    Ok(())
}
