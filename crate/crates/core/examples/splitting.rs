//! Split rough data at several cutoffs N and measure how the remainder and
//! the energy increment shrink with N.

use bbm5::evolution::InitialCondition;
use bbm5::splitting::{sweep, SplitConfig};
use bbm5::{Bbm5Coefficients, Grid, RhsSpec, StepperConfig};

fn main() -> bbm5::Result<()> {
    let s = 1.5;
    let grid = Grid::new(256, 2.0 * std::f64::consts::PI)?;
    let eta0 = InitialCondition::RandomSpectrum { s, norm: Some(1.0) }.build(grid, 3)?;
    let stepper = StepperConfig {
        dt: 1e-3,
        ..StepperConfig::default()
    };
    let cutoffs = [8.0, 16.0, 32.0];
    let sw = sweep(
        &eta0,
        &cutoffs,
        &SplitConfig::new(cutoffs[0], s),
        &RhsSpec::new(Bbm5Coefficients::reference()),
        &stepper,
    )?;
    for r in &sw.rows {
        println!(
            "N = {:3}: t0 = {:.4}, |h|_H2 = {:.3e}, E increment = {:.3e}",
            r.cutoff, r.t0, r.h_h2, r.energy_increment
        );
    }
    if let Some(fit) = &sw.h_fit {
        let (lo, hi) = fit.slope_ci;
        println!("remainder exponent {:.3} (95% interval {lo:.3} to {hi:.3})", fit.slope);
    }
    Ok(())
}
