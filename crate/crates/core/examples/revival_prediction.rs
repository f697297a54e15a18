//! Closed-form estimates for the regenerated pulse: timing window, peak,
//! width and the recurrence ratio that centres the revival on the delay.

use slowlight::revival::{escape_r_min, matched_r, predict, revival_times};
use slowlight::{Error, MediumParams, PulsePair};

fn main() -> slowlight::Result<()> {
    let medium = MediumParams::resonant(200.0, 8.0);
    let pair = PulsePair::gaussian(5.0, 20.0, 4.0, 11.0);
    let est = predict(&pair, &medium)?;
    println!("{}", serde_json::to_string_pretty(&est)?);

    let dense = MediumParams::resonant(700.0, 8.0);
    let strong = PulsePair::gaussian(20.0, 20.0, 0.0, 11.0);
    println!(
        "matched R in the dense cell: {:.4}",
        matched_r(&strong, &dense)?
    );

    // a weak recurrence cannot pull the stored pulse out of the cell
    let weak = PulsePair {
        r: 1.0,
        ..pair.clone()
    };
    match revival_times(&weak, &medium) {
        Err(Error::Escape { r, r_min }) => println!("R = {r} is too weak; need R > {r_min:.4}"),
        other => println!("unexpected: {other:?}"),
    }

    println!("\n{:>5} {:>9} {:>9} {:>9}", "R", "t_rm", "peak", "fwhm");
    let alpha = revival_times(&pair, &medium)?.alpha;
    let mut r = (escape_r_min(alpha) * 10.0).ceil() / 10.0;
    while r <= 6.0 {
        let p = PulsePair { r, ..pair.clone() };
        let e = predict(&p, &medium)?;
        println!(
            "{r:>5.1} {:>9.4} {:>9.4} {:>9.4}",
            e.t_rm, e.peak_wp, e.fwhm
        );
        r += 0.5;
    }
    Ok(())
}
