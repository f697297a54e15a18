//! Self-convergence: solve on the integration lattice and on lattices two
//! and four times finer, and report the largest relative change of every
//! quantity on the shared output lattice. Writes CSV to stdout.

use slowlight::diagnostics::{refinement_study, write_refinement_csv};
use slowlight::solver::SolverOptions;
use slowlight::{GridSpec, MediumParams, PulsePair};

fn main() -> slowlight::Result<()> {
    let pair = PulsePair::gaussian(5.0, 20.0, 4.0, 11.0);
    let medium = MediumParams::resonant(200.0, 1.0);
    let mut grid = GridSpec::default_for(&pair, &medium);
    grid.n_x = 512;
    grid.n_z = 11;

    // deliberately loose so the trend is visible
    let base = SolverOptions {
        max_phase_step: 0.2,
        max_dz: 0.01,
        ..SolverOptions::default()
    };
    let rows = refinement_study(&pair, &medium, &grid, &base, &[2, 4])?;
    write_refinement_csv(&rows, std::io::stdout())?;
    if let [a, b] = rows.as_slice() {
        eprintln!(
            "observed order ~ {:.2}",
            (a.max_delta() / (a.max_delta() - b.max_delta())).log2() + 1.0
        );
    }
    Ok(())
}
