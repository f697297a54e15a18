//! Closed-form estimates for the regenerated probe pulse.
//!
//! During the recurring coupling pulse the accumulated intensity is
//! `v = S + R^2/2 |Oc0|^2 sqrt(5 pi/2) (1 + erf(sqrt(2/5) (x - x0)))`, so the
//! exit-face conditions `v - kappa z_m = (1 - f) S` for `f = 1, 1/2, 0`
//! reduce to `erf(sqrt(2/5) (x - x0)) = (alpha - f beta) / R^2 - 1`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::adiabatic::first_pair_area;
use crate::erf::erf_inv;
use crate::error::{Error, Result};
use crate::model::{MediumParams, PulsePair, PulseShape};

/// Timing of the regenerated pulse at the exit face, as `(t_r - t_d) / tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevivalTiming {
    pub alpha: f64,
    pub beta: f64,
    pub t_r1: f64,
    pub t_rm: f64,
    pub t_r2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RevivalEstimate {
    pub alpha: f64,
    pub beta: f64,
    pub t_r1: f64,
    pub t_rm: f64,
    pub t_r2: f64,
    pub peak_wp: f64,
    pub fwhm: f64,
    #[serde(rename = "matched_R")]
    pub matched_r: Option<f64>,
}

fn require_gaussian(pair: &PulsePair) -> Result<()> {
    match pair.shape {
        PulseShape::Gaussian => Ok(()),
        PulseShape::Custom(_) => Err(Error::Config(
            "revival analytics need the Gaussian pulse family".into(),
        )),
    }
}

/// `(alpha, beta)`.
pub fn coefficients(pair: &PulsePair, medium: &MediumParams) -> (f64, f64) {
    let norm = pair.omega_c0.powi(2) * (2.5 * PI).sqrt();
    let alpha = 2.0 * medium.kappa12 * medium.z_m / norm;
    let beta = 2.0 * first_pair_area(pair) / norm;
    (alpha, beta)
}

/// Smallest `R` for which the whole regenerated pulse leaves the cell.
pub fn escape_r_min(alpha: f64) -> f64 {
    (0.5 * alpha).sqrt()
}

pub fn revival_times(pair: &PulsePair, medium: &MediumParams) -> Result<RevivalTiming> {
    require_gaussian(pair)?;
    pair.validate()?;
    medium.validate()?;
    if pair.omega_c0 == 0.0 {
        return Err(Error::Config("revival timing needs omega_c0 > 0".into()));
    }
    let (alpha, beta) = coefficients(pair, medium);
    if alpha <= beta {
        return Err(Error::MediumTraversed { alpha, beta });
    }
    let r2 = pair.r * pair.r;
    // the f = 0 argument is the largest; it must stay below 1
    if r2 == 0.0 || alpha / r2 - 1.0 >= 1.0 {
        return Err(Error::Escape {
            r: pair.r,
            r_min: escape_r_min(alpha),
        });
    }
    let time = |f: f64| -> Result<f64> {
        let arg = (alpha - f * beta) / r2 - 1.0;
        Ok(erf_inv(arg)? / 0.4f64.sqrt())
    };
    Ok(RevivalTiming {
        alpha,
        beta,
        t_r1: time(1.0)?,
        t_rm: time(0.5)?,
        t_r2: time(0.0)?,
    })
}

/// Peak of the regenerated probe at the exit face, `t_rm` relative to `t_d`.
pub fn revival_peak(pair: &PulsePair, t_rm: f64) -> f64 {
    let ratio = pair.omega_p0 / pair.omega_p0.hypot(pair.omega_c0);
    if !ratio.is_finite() {
        return 0.0;
    }
    pair.r * pair.omega_c0 * (-t_rm * t_rm / 5.0).exp() * ratio
}

/// Recurrence ratio that places the peak of the regenerated pulse at the
/// exit face exactly at `t_d`.
pub fn matched_r(pair: &PulsePair, medium: &MediumParams) -> Result<f64> {
    require_gaussian(pair)?;
    let c_term = pair.omega_c0.powi(2) * (5.0 * PI / 8.0).sqrt();
    let p_term = pair.omega_p0.powi(2) * (PI / 8.0).sqrt();
    let kappa_z = medium.kappa12 * medium.z_m;
    let threshold = c_term + p_term;
    if kappa_z <= threshold || c_term == 0.0 {
        return Err(Error::NoMatchedR { kappa_z, threshold });
    }
    Ok(((kappa_z - threshold) / c_term).sqrt())
}

/// Linearized width of the regenerated pulse in units of tau.
pub fn fwhm_estimate(pair: &PulsePair, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!(
            "width estimate needs R > 0, got {r}"
        )));
    }
    if pair.omega_c0 == 0.0 {
        return Err(Error::Domain("width estimate needs omega_c0 > 0".into()));
    }
    let ratio = pair.omega_p0 / pair.omega_c0;
    Ok((2.5 * PI).sqrt() / (r * r) * (1.0 + ratio * ratio / 5f64.sqrt()))
}

/// Depth where the coherence stored by the first pulse pair peaks:
/// `kappa12 z = S / 2`.
pub fn coherence_depth_estimate(pair: &PulsePair, medium: &MediumParams) -> f64 {
    0.5 * first_pair_area(pair) / medium.kappa12
}

/// Full prediction pipeline; `matched_R` is `None` when the medium is too
/// thin for a matched recurrence.
pub fn predict(pair: &PulsePair, medium: &MediumParams) -> Result<RevivalEstimate> {
    let timing = revival_times(pair, medium)?;
    let matched = match matched_r(pair, medium) {
        Ok(r) => Some(r),
        Err(Error::NoMatchedR { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(RevivalEstimate {
        alpha: timing.alpha,
        beta: timing.beta,
        t_r1: timing.t_r1,
        t_rm: timing.t_rm,
        t_r2: timing.t_r2,
        peak_wp: revival_peak(pair, timing.t_rm),
        fwhm: fwhm_estimate(pair, pair.r)?,
        matched_r: matched,
    })
}
