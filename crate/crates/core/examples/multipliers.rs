//! Fourier multipliers of the model: a few values, the closed-form suprema
//! and a randomized probe of one multilinear estimate.

use bbm5::multipliers::{empirical_operator_norm, scan_sup, sup_bound, Estimate, SupExpression, Symbol, SymbolKind};
use bbm5::{Bbm5Coefficients, Grid};

fn main() -> bbm5::Result<()> {
    let c = Bbm5Coefficients::reference();
    println!("{:>6} {:>12} {:>12} {:>12}", "xi", "phi", "psi", "tau");
    for xi in [0.5, 1.0, 2.0, 5.0, 10.0] {
        let v = |k| Symbol::new(k, c).map(|s| s.eval(xi));
        println!(
            "{xi:>6} {:>12.6} {:>12.6} {:>12.6}",
            v(SymbolKind::Phi)?,
            v(SymbolKind::Psi)?,
            v(SymbolKind::Tau)?
        );
    }

    let closed = sup_bound(SupExpression::XiPsi, &c)?;
    let scanned = scan_sup(SupExpression::XiPsi, &c)?;
    println!(
        "sup |xi psi|: closed form {:.15}, scan {:.15}",
        closed.value, scanned.value
    );

    let grid = Grid::new(128, 2.0 * std::f64::consts::PI)?;
    let scan = empirical_operator_norm(Estimate::PsiGradientBilinear, 2000, grid, 1.0, &c, 11)?;
    println!(
        "{}: max ratio {:.4} (final-decile growth {:.2}%)",
        scan.estimate.name(),
        scan.max_ratio,
        100.0 * scan.final_decile_growth
    );
    Ok(())
}
