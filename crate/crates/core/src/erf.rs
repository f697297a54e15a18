use std::f64::consts::PI;

use crate::error::{Error, Result};

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Inverse error function on `(-1, 1)` by bracketed Newton iteration.
///
/// For `|y| > 0.5` the residual is taken on `erfc` so the tails keep full
/// relative precision.
pub fn erf_inv(y: f64) -> Result<f64> {
    if !(y.abs() < 1.0) {
        return Err(Error::Domain(format!(
            "erf_inv argument {y} outside (-1, 1)"
        )));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    let target = y.abs();
    let tail = target > 0.5;
    let residual = |x: f64| {
        if tail {
            (1.0 - target) - erfc(x)
        } else {
            erf(x) - target
        }
    };

    // erf(0) < target < erf(27) == 1.0 in double precision
    let (mut lo, mut hi) = (0.0f64, 27.0f64);
    let mut x = initial_guess(target).clamp(lo, hi);
    for _ in 0..200 {
        let r = residual(x);
        if r == 0.0 {
            break;
        }
        if r < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = 2.0 / PI.sqrt() * (-x * x).exp();
        let mut next = x - r / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * (1.0 + x.abs()) {
            x = next;
            break;
        }
        x = next;
    }
    Ok(x.copysign(y))
}

/// Winitzki's closed-form approximation, good to ~2e-3.
fn initial_guess(y: f64) -> f64 {
    let a = 0.147;
    let ln = (1.0 - y * y).ln();
    let t = 2.0 / (PI * a) + 0.5 * ln;
    ((t * t - ln / a).sqrt() - t).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Maclaurin series, converges for all x but only used for |x| <= 2.
    fn erf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for n in 1..200 {
            term *= -x * x / n as f64;
            let add = term / (2 * n + 1) as f64;
            sum += add;
            if add.abs() < 1e-18 {
                break;
            }
        }
        2.0 / PI.sqrt() * sum
    }

    #[test]
    fn erf_limits() {
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(erf(f64::INFINITY), 1.0);
        assert_eq!(erf(f64::NEG_INFINITY), -1.0);
    }

    #[test]
    fn erf_against_series() {
        for i in -40..=40 {
            let x = i as f64 * 0.05;
            assert!((erf(x) - erf_series(x)).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let x = 1.2345;
        assert!((erf_inv(erf(x)).unwrap() - x).abs() < 1e-9);
        // in the far tail erf(x) carries too few digits to recover x exactly
        for &x in &[-5.5, 4.9] {
            assert!((erf(erf_inv(erf(x)).unwrap()) - erf(x)).abs() <= 1e-15);
        }
        for &x in &[-3.0, -0.9, -1e-8, 1e-3, 0.47, 2.2] {
            assert!((erf_inv(erf(x)).unwrap() - x).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn inverse_drives_worked_example() {
        let t = erf_inv(-0.95008).unwrap() / 0.4f64.sqrt();
        assert!((t + 2.19).abs() < 0.005, "{t}");
    }

    #[test]
    fn inverse_domain() {
        assert!(erf_inv(1.0).is_err());
        assert!(erf_inv(-1.0).is_err());
        assert!(erf_inv(f64::NAN).is_err());
        assert_eq!(erf_inv(0.0).unwrap(), 0.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn roundtrip(y in -0.999_999_999f64..0.999_999_999) {
                let x = erf_inv(y).unwrap();
                prop_assert!((erf(x) - y).abs() <= 1e-12);
            }

            #[test]
            fn odd(y in 0.0f64..0.9999) {
                prop_assert_eq!(erf_inv(-y).unwrap(), -erf_inv(y).unwrap());
            }
        }
    }
}
