//! How well does the one-way model reproduce the Boussinesq system as the
//! wave gets small and long?

use bbm5::derivation::{residual_sweep, DerivationSweepConfig};

fn main() -> bbm5::Result<()> {
    let cfg = DerivationSweepConfig {
        second_order: false,
        ..DerivationSweepConfig::default()
    };
    let sw = residual_sweep(&cfg)?;
    for r in &sw.rows {
        println!("eps = {:<7} r1 = {:.3e}  r2 = {:.3e}", r.eps, r.first.r1, r.first.r2);
    }
    if let Some(fit) = &sw.first_fit {
        println!("residual order {:.3}", fit.slope);
    }
    Ok(())
}
