//! How far the propagated probe moves away from the resonant result as the
//! one-photon detuning grows. A short cell keeps this quick.

use slowlight::diagnostics::detuning_independence;
use slowlight::solver::SolverOptions;
use slowlight::{GridSpec, MediumParams, PulsePair};

fn main() -> slowlight::Result<()> {
    let pair = PulsePair::gaussian(10.0, 40.0, 4.0, 10.0);
    let medium = MediumParams::resonant(200.0, 1.0);
    let mut grid = GridSpec::default_for(&pair, &medium);
    grid.n_x = 1024;
    grid.n_z = 21;

    let deltas = [10.0, 30.0, 120.0, 400.0];
    let rows = detuning_independence(&pair, &medium, &grid, &SolverOptions::default(), &deltas)?;
    println!("{:>8} {:>12}  note", "delta", "distance");
    for row in rows {
        println!(
            "{:>8} {:>12.4e}  {}",
            row.delta,
            row.distance,
            row.warning.unwrap_or_default()
        );
    }
    Ok(())
}
