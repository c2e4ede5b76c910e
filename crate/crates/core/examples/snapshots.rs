//! Write a state to CSV, read it back and dump its spectrum.

use bbm5::evolution::InitialCondition;
use bbm5::io::{read_snapshot, spectrum_table, write_snapshot};
use bbm5::Grid;

fn main() -> bbm5::Result<()> {
    let grid = Grid::new(64, 20.0)?;
    let eta = InitialCondition::Sech2 {
        amplitude: 1.0,
        width: 1.5,
        center: None,
    }
    .build(grid, 0)?;
    let dir = std::env::temp_dir().join("bbm5_snapshot_example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("eta.csv");
    write_snapshot(&path, &eta)?;
    let back = read_snapshot(&path)?;
    println!("round trip max error {:.1e}", back.sub(&eta)?.max_abs());
    let spectrum = spectrum_table(&back);
    println!("{} spectral rows, written next to {}", spectrum.len(), path.display());
    spectrum.save(&dir.join("spectrum.csv"))?;
    Ok(())
}
