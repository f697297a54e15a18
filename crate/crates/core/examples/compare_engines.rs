//! Adiabatic and numerical solutions side by side on one lattice.

use slowlight::adiabatic::{solve_adiabatic, ProfileMode};
use slowlight::diagnostics::{compare, CompareOptions};
use slowlight::solver::{solve, SolverOptions};
use slowlight::{GridSpec, MediumParams, PulsePair};

fn main() -> slowlight::Result<()> {
    let pair = PulsePair::gaussian(5.0, 20.0, 4.0, 11.0);
    let medium = MediumParams::resonant(200.0, 2.0);
    let mut grid = GridSpec::default_for(&pair, &medium);
    grid.n_x = 1024;
    grid.n_z = 41;

    let adiabatic = solve_adiabatic(&pair, &medium, &grid, ProfileMode::EqualKappa)?;
    let numeric = solve(&pair, &medium, &grid, &SolverOptions::default())?;
    let report = compare(
        &adiabatic,
        &numeric,
        &CompareOptions {
            mask_frac: 0.05,
            plateau_x: Some(5.0),
        },
    )?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}
