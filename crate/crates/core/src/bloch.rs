//! Single-point atomic physics of the lambda system: adiabatic eigenvalues,
//! the dark state and its first-order excited-state correction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GridSpec, MediumParams, PulsePair};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Dimensionless eigenvalues `lambda * tau` of the atomic generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenTriple {
    pub lambda0: Complex64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
}

/// Roots of `l^3 - (delta + i g/2) l^2 - (|w_p|^2 + |w_c|^2) l = 0`.
///
/// The zero root is factored out and the remaining quadratic is solved in
/// closed form; `lambda_plus` is the root with the larger real part.
pub fn eigenvalues(w_p: Complex64, w_c: Complex64, delta: f64, gamma2: f64) -> EigenTriple {
    let half = Complex64::new(delta, 0.5 * gamma2) * 0.5;
    let root = (half * half + w_p.norm_sqr() + w_c.norm_sqr()).sqrt();
    let (a, b) = (half + root, half - root);
    let (lambda_plus, lambda_minus) = if a.re >= b.re { (a, b) } else { (b, a) };
    EigenTriple {
        lambda0: Complex64::new(0.0, 0.0),
        lambda_plus,
        lambda_minus,
    }
}

/// Zero-eigenvalue eigenvector of the atomic generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarkState {
    pub a1: Complex64,
    pub a2: Complex64,
    pub a3: Complex64,
}

pub fn dark_state(w_p: Complex64, w_c: Complex64) -> Result<DarkState> {
    let norm = (w_p.norm_sqr() + w_c.norm_sqr()).sqrt();
    if norm == 0.0 {
        return Err(Error::DegenerateFields);
    }
    Ok(DarkState {
        a1: w_c.conj() / norm,
        a2: Complex64::new(0.0, 0.0),
        a3: -w_p.conj() / norm,
    })
}

/// Both first-order expressions for `A2`: from the `A1` equation (divides by
/// `w_p`) and from the `A3` equation (divides by `w_c`). A form is `None`
/// when its denominator vanishes.
pub fn a2_first_order_forms(
    w_p: Complex64,
    w_c: Complex64,
    dw_p_dx: Complex64,
    dw_c_dx: Complex64,
) -> Result<(Option<Complex64>, Option<Complex64>)> {
    let n2 = w_p.norm_sqr() + w_c.norm_sqr();
    if n2 == 0.0 {
        return Err(Error::DegenerateFields);
    }
    let n = n2.sqrt();
    let dn = (w_p.conj() * dw_p_dx + w_c.conj() * dw_c_dx).re / n;
    // d/dx (f* / N) for f = w_c or w_p
    let d_ratio = |f: Complex64, df: Complex64| (df.conj() * n - f.conj() * dn) / n2;

    let from_a1 = (w_p.norm_sqr() > 0.0).then(|| -I / w_p * d_ratio(w_c, dw_c_dx));
    let from_a3 = (w_c.norm_sqr() > 0.0).then(|| I / w_c * d_ratio(w_p, dw_p_dx));
    Ok((from_a1, from_a3))
}

/// First-order adiabatic `A2`, using whichever of the two equivalent forms
/// has the larger denominator.
pub fn a2_first_order(
    w_p: Complex64,
    w_c: Complex64,
    dw_p_dx: Complex64,
    dw_c_dx: Complex64,
) -> Result<Complex64> {
    let (from_a1, from_a3) = a2_first_order_forms(w_p, w_c, dw_p_dx, dw_c_dx)?;
    let value = if w_p.norm_sqr() >= w_c.norm_sqr() {
        from_a1
    } else {
        from_a3
    };
    value.ok_or(Error::DegenerateFields)
}

/// Eigenvalue separation along the probe pulse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticityReport {
    /// `min(|lambda+|, |lambda-|)` over the probe support.
    pub margin: f64,
    /// Where that minimum occurs.
    pub x_at_margin: f64,
    /// `min |w_c|^2 / |delta|` over the probe support, when `delta != 0`.
    pub stark_ratio: Option<f64>,
}

/// Scan the boundary pulses at the grid's time samples, restricted to the
/// probe support `|w_p| > 1e-3 * omega_p0`.
pub fn adiabaticity_report(
    pair: &PulsePair,
    medium: &MediumParams,
    grid: &GridSpec,
) -> AdiabaticityReport {
    let mut report = AdiabaticityReport {
        margin: f64::INFINITY,
        x_at_margin: f64::NAN,
        stark_ratio: None,
    };
    let cutoff = 1e-3 * pair.omega_p0;
    for x in grid.x_axis() {
        let (wp, wc) = pair.envelopes(x);
        if wp <= cutoff {
            continue;
        }
        let ev = eigenvalues(wp.into(), wc.into(), medium.delta, medium.gamma2);
        let sep = ev.lambda_plus.norm().min(ev.lambda_minus.norm());
        if sep < report.margin {
            report.margin = sep;
            report.x_at_margin = x;
        }
        if medium.delta != 0.0 {
            let stark = wc * wc / medium.delta.abs();
            report.stark_ratio = Some(report.stark_ratio.map_or(stark, |s: f64| s.min(stark)));
        }
    }
    report
}

pub fn adiabaticity_margin(pair: &PulsePair, medium: &MediumParams, grid: &GridSpec) -> f64 {
    adiabaticity_report(pair, medium, grid).margin
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn symmetric_resonant_eigenvalues() {
        let ev = eigenvalues(c(3.0), c(4.0), 0.0, 0.0);
        assert!(close(ev.lambda_plus, c(5.0), 1e-14));
        assert!(close(ev.lambda_minus, c(-5.0), 1e-14));
        assert_eq!(ev.lambda0, c(0.0));
    }

    #[test]
    fn fields_off_eigenvalues() {
        let ev = eigenvalues(c(0.0), c(0.0), 7.0, 0.0);
        assert!(close(ev.lambda_plus, c(7.0), 1e-14));
        assert!(close(ev.lambda_minus, c(0.0), 1e-14));
    }

    #[test]
    fn far_detuned_lambda_minus() {
        let ev = eigenvalues(c(10.0), c(40.0), 120.0, 0.0);
        let approx = -(100.0 + 1600.0) / 120.0;
        let exact = ev.lambda_minus.re;
        assert!(
            (approx - exact).abs() / exact.abs() < 0.15,
            "{exact} vs {approx}"
        );
        assert!(ev.lambda_minus.im.abs() < 1e-12);
    }

    #[test]
    fn dark_state_values() {
        let d = dark_state(c(0.0), c(20.0)).unwrap();
        assert!(close(d.a1, c(1.0), 1e-15) && d.a3.norm() == 0.0);

        let d = dark_state(c(20.0), c(20.0)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(d.a1, c(h), 1e-15) && close(d.a3, c(-h), 1e-15));

        let d = dark_state(c(5.0), c(20.0)).unwrap();
        assert!((d.a3.norm() - 0.242536).abs() < 5e-7);
        assert!((d.a3.norm() - 1.0 / 17f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn dark_state_degenerate() {
        assert!(matches!(
            dark_state(c(0.0), c(0.0)),
            Err(Error::DegenerateFields)
        ));
        assert!(a2_first_order(c(0.0), c(0.0), c(1.0), c(1.0)).is_err());
    }

    #[test]
    fn a2_static_fields_vanish() {
        let a2 = a2_first_order(c(3.0), c(7.0), c(0.0), c(0.0)).unwrap();
        assert_eq!(a2.norm(), 0.0);
    }

    #[test]
    fn a2_forms_agree_for_real_fields() {
        let (a, b) = a2_first_order_forms(c(10.0), c(10.0), c(1.0), c(0.0)).unwrap();
        let (a, b) = (a.unwrap(), b.unwrap());
        assert!((a - b).norm() <= 1e-12 * a.norm());
    }

    #[test]
    fn a2_matches_finite_difference_of_a1() {
        let pair = PulsePair::gaussian(5.0, 20.0, 0.0, 0.0);
        let x = 0.0;
        // x = 0 is a stationary point of both envelopes, so also probe off-peak
        for &x in &[x, 0.3, -0.8, 1.4] {
            let (wp, wc) = pair.envelopes(x);
            let (dwp, dwc) = pair.envelope_slopes(x);
            let a2 = a2_first_order(wp.into(), wc.into(), dwp.into(), dwc.into()).unwrap();

            let a1 = |x: f64| {
                let (p, c) = pair.envelopes(x);
                c / (p * p + c * c).sqrt()
            };
            let h = 1e-4;
            let d_a1 = (-a1(x + 2.0 * h) + 8.0 * a1(x + h) - 8.0 * a1(x - h) + a1(x - 2.0 * h))
                / (12.0 * h);
            let oracle = -I / wp * d_a1;
            let scale = oracle.norm().max(1e-300);
            assert!(
                (a2 - oracle).norm() <= 1e-6 * scale || (a2 - oracle).norm() < 1e-12,
                "x={x}: {a2} vs {oracle}"
            );
        }
    }

    #[test]
    fn margin_worked_pulses() {
        let pair = PulsePair::gaussian(5.0, 20.0, 0.0, 0.0);
        let medium = MediumParams::resonant(200.0, 8.0);
        let grid = GridSpec::default_for(&pair, &medium);
        let report = adiabaticity_report(&pair, &medium, &grid);
        // probe support edge where e^{-x^2} = 1e-3
        let x_edge = (1e3f64).ln().sqrt();
        let bound = 20.0 * (-0.2 * x_edge * x_edge).exp();
        assert!(report.margin > 1.0);
        assert!(
            report.margin >= bound * (1.0 - 1e-3),
            "{} < {bound}",
            report.margin
        );
        assert!(report.stark_ratio.is_none());
    }

    #[test]
    fn margin_without_coupling_collapses() {
        let pair = PulsePair::gaussian(5.0, 0.0, 0.0, 0.0);
        let medium = MediumParams::resonant(200.0, 8.0);
        let grid = GridSpec::default_for(&pair, &medium);
        let margin = adiabaticity_margin(&pair, &medium, &grid);
        assert!(margin < 0.006, "{margin}");
    }

    #[test]
    fn margin_far_detuned_follows_stark_shift() {
        let pair = PulsePair::gaussian(10.0, 40.0, 0.0, 0.0);
        let medium = MediumParams {
            delta: 120.0,
            ..MediumParams::resonant(200.0, 8.0)
        };
        let grid = GridSpec::default_for(&pair, &medium);
        let report = adiabaticity_report(&pair, &medium, &grid);
        // at the peak the limit formula gives (100 + 1600) / 120
        let peak = eigenvalues(c(10.0), c(40.0), 120.0, 0.0)
            .lambda_minus
            .norm();
        assert!((peak - 1700.0 / 120.0).abs() / peak < 0.15);
        assert!((1600.0f64 / 120.0 - 13.333).abs() < 1e-3);
        // the binding point is the support edge, where |lambda-| ~ |w|^2 / delta
        let (wp, wc) = pair.envelopes(report.x_at_margin);
        let limit = (wp * wp + wc * wc) / 120.0;
        assert!((report.margin - limit).abs() / limit < 0.05);
        let stark = report.stark_ratio.unwrap();
        assert!(stark < 1600.0 / 120.0 && stark > 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn cplx() -> impl Strategy<Value = Complex64> {
            (-500.0f64..500.0, -500.0f64..500.0).prop_map(|(a, b)| Complex64::new(a, b))
        }

        proptest! {
            #[test]
            fn roots_satisfy_characteristic_polynomial(
                p in cplx(), cc in cplx(), delta in -1000.0f64..1000.0, g in 0.0f64..100.0
            ) {
                let ev = eigenvalues(p, cc, delta, g);
                let trace = Complex64::new(delta, 0.5 * g);
                let s = p.norm_sqr() + cc.norm_sqr();
                let scale = 1.0 + s + trace.norm_sqr();
                for l in [ev.lambda_plus, ev.lambda_minus] {
                    let res = l * l * l - trace * l * l - s * l;
                    prop_assert!(res.norm() <= 1e-10 * scale * (1.0 + l.norm()));
                }
                prop_assert!((ev.lambda_plus + ev.lambda_minus - trace).norm() <= 1e-10 * scale.sqrt());
                prop_assert!((ev.lambda_plus * ev.lambda_minus + s).norm() <= 1e-10 * scale);
                prop_assert!(ev.lambda_plus.re >= ev.lambda_minus.re);
            }

            #[test]
            fn dark_state_is_scale_invariant_and_dark(p in cplx(), cc in cplx(), k in 0.01f64..100.0) {
                prop_assume!(p.norm() + cc.norm() > 1e-6);
                let d = dark_state(p, cc).unwrap();
                let e = dark_state(p * k, cc * k).unwrap();
                prop_assert!((d.a1 - e.a1).norm() < 1e-12 && (d.a3 - e.a3).norm() < 1e-12);
                let norm = d.a1.norm_sqr() + d.a2.norm_sqr() + d.a3.norm_sqr();
                prop_assert!((norm - 1.0).abs() < 1e-12);
                // zero coupling to |2>: w_p* a1 + w_c* a3 = 0
                prop_assert!((p.conj() * d.a1 + cc.conj() * d.a3).norm() < 1e-9 * (p.norm() + cc.norm()));
                if p.norm() > 1e-6 {
                    let lhs = -(cc.conj() / p.conj()) * d.a3;
                    prop_assert!((lhs - d.a1).norm() < 1e-9 * (1.0 + lhs.norm()));
                }
            }

            #[test]
            fn a2_forms_agree(p in 0.5f64..100.0, cc in 0.5f64..100.0, dp in -50.0f64..50.0, dc in -50.0f64..50.0) {
                let (a, b) = a2_first_order_forms(p.into(), cc.into(), dp.into(), dc.into()).unwrap();
                let (a, b) = (a.unwrap(), b.unwrap());
                prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(b.norm()).max(1e-300));
            }
        }
    }
}
