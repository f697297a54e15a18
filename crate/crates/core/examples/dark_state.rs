//! Single-atom physics: eigenvalues of the atomic generator, the dark
//! state, and the first-order excited-state amplitude along the pulses.

use num_complex::Complex64;
use slowlight::bloch::{a2_first_order, adiabaticity_report, dark_state, eigenvalues};
use slowlight::{GridSpec, MediumParams, PulsePair};

fn main() -> slowlight::Result<()> {
    let pair = PulsePair::gaussian(5.0, 20.0, 0.0, 0.0);

    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10} {:>12}",
        "x", "l+", "|A1|", "|A3|", "|A2|", "|A2| 1st"
    );
    for k in 0..=16 {
        let x = -2.0 + 0.25 * k as f64;
        let (wp, wc) = pair.envelopes(x);
        let (dp, dc) = pair.envelope_slopes(x);
        let (wp, wc) = (Complex64::from(wp), Complex64::from(wc));
        let ev = eigenvalues(wp, wc, 0.0, 0.0);
        let d = dark_state(wp, wc)?;
        let a2 = a2_first_order(wp, wc, dp.into(), dc.into())?;
        println!(
            "{x:>6.2} {:>10.4} {:>10.6} {:>10.6} {:>10.1e} {:>12.4e}",
            ev.lambda_plus.re,
            d.a1.norm(),
            d.a3.norm(),
            d.a2.norm(),
            a2.norm()
        );
    }

    // a large one-photon detuning shrinks the lower eigenvalue
    for delta in [0.0, 120.0, 1200.0] {
        let medium = MediumParams {
            delta,
            ..MediumParams::resonant(200.0, 8.0)
        };
        let r = adiabaticity_report(&pair, &medium, &GridSpec::default_for(&pair, &medium));
        println!(
            "delta {delta:>6}: margin {:.3} at x = {:.2}",
            r.margin, r.x_at_margin
        );
    }
    Ok(())
}
