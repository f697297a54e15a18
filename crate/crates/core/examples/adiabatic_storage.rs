//! Storage of a probe pulse as ground-state coherence, from the traveling-
//! wave solution. Prints the coherence along the cell during the dark
//! window and the regenerated pulse at the exit face.
//!
//! Pass a directory to also write the grid and profile tables as CSV.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use slowlight::adiabatic::{solve_adiabatic, ProfileMode};
use slowlight::io::write_grid_csv;
use slowlight::solver::row_peak;
use slowlight::{GridSpec, MediumParams, PulsePair};

fn main() -> slowlight::Result<()> {
    let pair = PulsePair::gaussian(5.0, 20.0, 4.0, 11.0);
    let medium = MediumParams::resonant(200.0, 8.0);
    let mut grid = GridSpec::default_for(&pair, &medium);
    grid.n_x = 1024;
    grid.n_z = 161;

    let sol = solve_adiabatic(&pair, &medium, &grid, ProfileMode::EqualKappa)?;
    let (s_peak, a3_peak) = sol.tables.profile_peak();
    println!("|A3| peak {a3_peak:.6} at argument {s_peak:.4}");
    println!(
        "deepest coherence at z = {:.4} cm",
        sol.tables.coherence_max_depth()
    );

    println!("\nstored coherence at x = 6:");
    for z in [0.0, 1.0, 2.0, 2.88, 4.0, 6.0, 8.0] {
        println!(
            "  z = {z:>4} cm  |A3| = {:.6}",
            sol.tables.coherence_map(z, 6.0).norm()
        );
    }

    let last = sol.fields.z.len() - 1;
    let (x, peak) = row_peak(
        &sol.fields.x,
        sol.fields.w_p.row(last).iter().map(|w| w.norm()),
    );
    println!(
        "\nregenerated probe: {peak:.4} at (t - t_d)/tau = {:.4}",
        x - pair.x0
    );

    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        std::fs::create_dir_all(&dir)?;
        write_grid_csv(
            &sol.fields,
            &sol.amps,
            BufWriter::new(File::create(dir.join("grid_adiabatic.csv"))?),
        )?;
        sol.tables
            .write_csv(BufWriter::new(File::create(dir.join("profiles.csv"))?))?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
