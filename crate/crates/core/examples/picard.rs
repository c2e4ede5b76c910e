//! Solve the integral form by fixed-point iteration up to the guaranteed
//! existence time and print the contraction history.

use bbm5::evolution::{duhamel_picard, existence_time_bound, scale_to_norm, InitialCondition, Scheme};
use bbm5::spectral::sobolev_norm;
use bbm5::{Bbm5Coefficients, Grid, RhsSpec, StepperConfig};

fn main() -> bbm5::Result<()> {
    let grid = Grid::new(256, 16.0 * std::f64::consts::PI)?;
    let bump = InitialCondition::Gaussian {
        amplitude: 1.0,
        width: 2.0,
        center: None,
    }
    .build(grid, 0)?;
    let eta0 = scale_to_norm(&bump, 1.0, 0.05)?;
    let horizon = existence_time_bound(sobolev_norm(&eta0, 1.0), 1.0);
    let cfg = StepperConfig {
        scheme: Scheme::PicardDuhamel,
        dt: 2e-2,
        ..StepperConfig::default()
    };
    let out = duhamel_picard(&eta0, &RhsSpec::new(Bbm5Coefficients::reference()), &cfg, horizon)?;
    println!("T = {horizon:.4}, {} iterations", out.iterations());
    for (m, d) in out.differences.iter().enumerate() {
        println!("  iterate {:2}: sup difference {d:.3e}", m + 1);
    }
    println!("max norm growth {:.6}", out.max_growth());
    Ok(())
}
