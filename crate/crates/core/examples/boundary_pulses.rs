//! Boundary pulses at the cell entrance and the applicability checks run
//! before any propagation.
//!
//! ```text
//! cargo run --example boundary_pulses
//! ```

use slowlight::model::validate_config;
use slowlight::{GridSpec, MediumParams, PulsePair};

fn main() -> slowlight::Result<()> {
    let pair = PulsePair::gaussian(5.0, 20.0, 4.0, 11.0);
    let medium = MediumParams::resonant(200.0, 8.0);
    let grid = GridSpec::default_for(&pair, &medium);

    println!("{:>7} {:>12} {:>12}", "x", "w_p", "w_c");
    for k in 0..=46 {
        let x = grid.x_min + 0.5 * k as f64;
        let (wp, wc) = pair.envelopes(x);
        println!("{x:>7.2} {wp:>12.6e} {wc:>12.6e}");
    }

    println!(
        "\ngrid: x in [{}, {}], {} x {} samples",
        grid.x_min, grid.x_max, grid.n_x, grid.n_z
    );
    for check in validate_config(&pair, &medium, &grid)?.checks {
        let verdict = match (check.applicable, check.passed) {
            (false, _) => "n/a",
            (true, true) => "ok",
            (true, false) => "FAILS",
        };
        println!(
            "{:<22} {:>12.4} (>= {}) {verdict}",
            check.name, check.value, check.threshold
        );
    }
    Ok(())
}
