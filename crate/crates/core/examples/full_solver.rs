//! Direct integration of the coupled atom and field equations.
//!
//! ```text
//! cargo run --release --example full_solver [config.json]
//! ```
//!
//! Without an argument a 2 cm cell is propagated, which takes a few
//! seconds; the figure configs under `configs/` take a minute or more.

use std::path::Path;

use slowlight::io::RunConfig;
use slowlight::solver::{solve, SolverOptions};
use slowlight::{GridSpec, MediumParams, PulsePair};

fn main() -> slowlight::Result<()> {
    let (pair, medium, grid, options) = match std::env::args().nth(1) {
        Some(path) => {
            let c = RunConfig::load(Path::new(&path))?;
            (c.pair()?, c.medium()?, c.grid()?, c.solver_options())
        }
        None => {
            let pair = PulsePair::gaussian(5.0, 20.0, 4.0, 11.0);
            let medium = MediumParams::resonant(200.0, 2.0);
            let mut grid = GridSpec::default_for(&pair, &medium);
            grid.n_x = 1024;
            grid.n_z = 41;
            (pair, medium, grid, SolverOptions::default())
        }
    };

    let start = std::time::Instant::now();
    let run = solve(&pair, &medium, &grid, &options)?;
    println!("solved in {:.1?}", start.elapsed());
    println!(
        "integration substeps: {} in x, {} in z",
        run.x_substeps, run.z_substeps
    );
    println!("norm deviation  {:.3e}", run.norm_max_dev);
    println!("flux residual   {:.3e}", run.flux_residual);

    println!(
        "\n{:>6} {:>10} {:>10} {:>10}",
        "z", "max|w_p|", "max|w_c|", "max|A3|"
    );
    let step = (run.fields.z.len() / 8).max(1);
    for k in (0..run.fields.z.len()).step_by(step) {
        let max = |row: ndarray::ArrayView1<num_complex::Complex64>| {
            row.iter().map(|v| v.norm()).fold(0.0, f64::max)
        };
        println!(
            "{:>6.2} {:>10.4} {:>10.4} {:>10.6}",
            run.fields.z[k],
            max(run.fields.w_p.row(k)),
            max(run.fields.w_c.row(k)),
            max(run.amps.a3.row(k)),
        );
    }
    let (x, peak) = run.exit_probe_peak();
    println!("\nexit probe peak {peak:.4} at x = {x:.4}");
    Ok(())
}
