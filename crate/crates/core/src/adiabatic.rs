//! Analytic adiabatic propagation.
//!
//! Inside the adiabatic approximation the photon flux
//! `|w_p|^2/kappa12 + |w_c|^2/kappa32` does not depend on depth, and the
//! normalized fields are traveling waves in the variable `v(x) - u(z)`, where
//! `v` is the accumulated boundary intensity and `u(z) = kappa12 z`. The
//! profiles are tabulated once from the boundary pulses and then looked up at
//! any depth.
//!
//! Two closed cases are supported: equal coupling constants, where both
//! normalized fields travel and `|W_p|^2 + |W_c|^2 = 1`, and a weak probe,
//! where the coupling passes undistorted.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::erf::erf;
use crate::error::{Error, Result};
use crate::model::{
    AmplitudeGrid, FieldGrid, GridSpec, MediumParams, PulsePair, PulseShape, COUPLING_EXPONENT,
};

/// Quadrature points per lattice interval when accumulating `v`.
const V_SUBSTEPS: usize = 16;

/// Above this probe/coupling ratio the weak-probe case is flagged.
pub const WEAK_PROBE_LIMIT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileMode {
    /// `kappa12 == kappa32`.
    EqualKappa,
    /// `|w_p| << |w_c|`: the coupling propagates undistorted.
    WeakProbe,
}

/// `|w_p|^2 / kappa12 + |w_c|^2 / kappa32`.
pub fn photon_flux(w_p: Complex64, w_c: Complex64, medium: &MediumParams) -> f64 {
    w_p.norm_sqr() / medium.kappa12 + w_c.norm_sqr() / medium.kappa32
}

/// Group velocity in cm per tau, neglecting the vacuum term:
/// `v_g tau = (|w_p|^2 + |w_c|^2) / (kappa12 tau)`.
pub fn group_velocity(w_p: Complex64, w_c: Complex64, medium: &MediumParams) -> f64 {
    (w_p.norm_sqr() + w_c.norm_sqr()) / medium.kappa12
}

/// Group velocity in cm per tau including the vacuum term, with `c_tau` the
/// distance light travels in one `tau`, in cm.
pub fn group_velocity_full(
    w_p: Complex64,
    w_c: Complex64,
    medium: &MediumParams,
    c_tau: f64,
) -> f64 {
    let intensity = w_p.norm_sqr() + w_c.norm_sqr();
    if intensity == 0.0 {
        return 0.0;
    }
    c_tau / (1.0 + medium.kappa12 * c_tau / intensity)
}

/// `S`: area under `|w_c|^2 + |w_p|^2` of the first Gaussian pulse pair.
pub fn first_pair_area(pair: &PulsePair) -> f64 {
    pair.omega_c0.powi(2) * (2.5 * PI).sqrt() + pair.omega_p0.powi(2) * (0.5 * PI).sqrt()
}

/// Closed-form accumulated intensity for the Gaussian pulse family.
///
/// With `include_cross = false` the interference term between the two
/// coupling pulses is dropped, matching the analytic timing formulas.
pub fn v_closed_form(pair: &PulsePair, x: f64, include_cross: bool) -> f64 {
    let c2 = pair.omega_c0 * pair.omega_c0;
    let p2 = pair.omega_p0 * pair.omega_p0;
    let a = 2.0 * COUPLING_EXPONENT;
    let half_gauss =
        |width: f64, arg: f64| 0.5 * (PI / width).sqrt() * (1.0 + erf(width.sqrt() * arg));
    let mut v = c2 * half_gauss(a, x)
        + p2 * half_gauss(2.0, x)
        + pair.r * pair.r * c2 * half_gauss(a, x - pair.x0);
    if include_cross && pair.r > 0.0 {
        // exp(-0.2 x^2 - 0.2 (x - x0)^2) = exp(-0.1 x0^2) exp(-0.4 (x - x0/2)^2)
        let shift = (-COUPLING_EXPONENT * 0.5 * pair.x0 * pair.x0).exp();
        v += 2.0 * pair.r * c2 * shift * half_gauss(a, x - 0.5 * pair.x0);
    }
    v
}

/// Monotone accumulated boundary intensity sampled on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxAccumulator {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

impl FluxAccumulator {
    /// Linear interpolation; clamps outside the lattice.
    pub fn at(&self, x: f64) -> f64 {
        interp_clamped(&self.x, &self.v, x)
    }

    /// Smallest `x` with `v(x) >= target`, by inverse interpolation.
    pub fn inverse(&self, target: f64) -> Option<f64> {
        let i = self.v.partition_point(|&v| v < target);
        if i == 0 {
            return (self.v[0] >= target).then_some(self.x[0]);
        }
        if i >= self.v.len() {
            return None;
        }
        let (v0, v1) = (self.v[i - 1], self.v[i]);
        let t = if v1 > v0 {
            (target - v0) / (v1 - v0)
        } else {
            0.0
        };
        Some(self.x[i - 1] + t * (self.x[i] - self.x[i - 1]))
    }
}

/// Cumulative trapezoidal integral of the boundary intensity on the grid's
/// time lattice. In the weak-probe case only the coupling contributes.
pub fn build_v(pair: &PulsePair, grid: &GridSpec, mode: ProfileMode) -> FluxAccumulator {
    let x = grid.x_axis();
    let intensity = |x: f64| {
        let (wp, wc) = pair.envelopes(x);
        match mode {
            ProfileMode::EqualKappa => wp * wp + wc * wc,
            ProfileMode::WeakProbe => wc * wc,
        }
    };
    let mut v = Vec::with_capacity(x.len());
    v.push(0.0);
    let mut acc = 0.0;
    for w in x.windows(2) {
        let h = (w[1] - w[0]) / V_SUBSTEPS as f64;
        let mut seg = 0.5 * (intensity(w[0]) + intensity(w[1]));
        for k in 1..V_SUBSTEPS {
            seg += intensity(w[0] + h * k as f64);
        }
        acc += seg * h;
        v.push(acc);
    }
    FluxAccumulator { x, v }
}

/// Traveling-wave profiles tabulated from the boundary pulses.
#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticTables {
    pub mode: ProfileMode,
    pub pair: PulsePair,
    pub v: FluxAccumulator,
    /// `kappa12`, so that `u(z) = u_slope * z`.
    pub u_slope: f64,
    /// Profile knots in the argument `s`.
    pub knots: Vec<f64>,
    /// Equal kappa: mixing angle `theta` with `F_p = sin`, `F_c = cos`.
    /// Weak probe: `F_p` itself.
    values: Vec<f64>,
    /// Area of the first pulse pair as accumulated in `v`.
    pub s_total: f64,
    /// End of the first-pulse window used for the tabulation.
    pub window_end: f64,
    /// Set when the weak-probe case is used outside its range.
    pub warning: Option<String>,
}

/// Tabulate `F_p` (and `F_c`) over the first-pulse window
/// `[x_min, x0 - 5]` (or the whole grid without a recurrence).
pub fn tabulate_profiles(
    pair: &PulsePair,
    medium: &MediumParams,
    grid: &GridSpec,
    mode: ProfileMode,
) -> Result<AdiabaticTables> {
    pair.validate()?;
    medium.validate()?;
    grid.validate()?;
    let mut warning = None;
    match mode {
        ProfileMode::EqualKappa => {
            let rel = (medium.kappa12 - medium.kappa32).abs() / medium.kappa12;
            if rel > 1e-12 {
                return Err(Error::Config(format!(
                    "equal-kappa profiles need kappa12 == kappa32 (got {} and {})",
                    medium.kappa12, medium.kappa32
                )));
            }
        }
        ProfileMode::WeakProbe => {
            if pair.omega_c0 == 0.0 {
                return Err(Error::Config(
                    "weak-probe profiles need a coupling field".into(),
                ));
            }
            let ratio = pair.omega_p0 / pair.omega_c0;
            if ratio > WEAK_PROBE_LIMIT {
                warning = Some(format!(
                    "probe/coupling ratio {ratio:.3} exceeds {WEAK_PROBE_LIMIT}; weak-probe profiles are approximate"
                ));
            }
        }
    }

    let v = build_v(pair, grid, mode);
    let window_end = match pair.shape {
        PulseShape::Gaussian if pair.r > 0.0 => (pair.x0 - 5.0).min(grid.x_max),
        _ => grid.x_max,
    };

    let peak_intensity =
        v.x.iter()
            .map(|&x| {
                let (wp, wc) = pair.envelopes(x);
                wp * wp + wc * wc
            })
            .fold(0.0, f64::max);
    let plateau = 1e-12 * peak_intensity * grid.dx();

    let mut knots: Vec<f64> = Vec::new();
    let mut values = Vec::new();
    for (&x, &s) in v.x.iter().zip(&v.v) {
        if x > window_end {
            break;
        }
        if let Some(&last) = knots.last() {
            if s - last <= plateau {
                continue;
            }
        }
        let (wp, wc) = pair.envelopes(x);
        let value = match mode {
            ProfileMode::EqualKappa => wp.atan2(wc),
            ProfileMode::WeakProbe => {
                if wc > 0.0 {
                    wp / wc
                } else {
                    0.0
                }
            }
        };
        knots.push(s);
        values.push(value);
    }
    let s_total = v.at(window_end);

    Ok(AdiabaticTables {
        mode,
        pair: pair.clone(),
        v,
        u_slope: medium.kappa12,
        knots,
        values,
        s_total,
        window_end,
        warning,
    })
}

impl AdiabaticTables {
    fn lookup(&self, s: f64) -> f64 {
        let n = self.knots.len();
        if n == 0 || !(s >= self.knots[0] && s <= self.knots[n - 1]) {
            return 0.0;
        }
        interp_clamped(&self.knots, &self.values, s)
    }

    /// Normalized probe profile; zero outside the tabulated range.
    pub fn f_p(&self, s: f64) -> f64 {
        match self.mode {
            ProfileMode::EqualKappa => self.lookup(s).sin(),
            ProfileMode::WeakProbe => self.lookup(s),
        }
    }

    /// Normalized coupling profile. In the equal-kappa case this is `1`
    /// outside the tabulated range so that the flux invariant still holds;
    /// in the weak-probe case the coupling is not a traveling wave and this
    /// returns `1` (the undistorted boundary coupling).
    pub fn f_c(&self, s: f64) -> f64 {
        match self.mode {
            ProfileMode::EqualKappa => self.lookup(s).cos(),
            ProfileMode::WeakProbe => 1.0,
        }
    }

    pub fn u(&self, z: f64) -> f64 {
        self.u_slope * z
    }

    /// Traveling-wave argument `v(x) - u(z)`.
    pub fn argument(&self, z: f64, x: f64) -> f64 {
        self.v.at(x) - self.u(z)
    }

    /// `(w_p, w_c)` at depth `z` and time `x`.
    pub fn reconstruct_fields(&self, z: f64, x: f64) -> (Complex64, Complex64) {
        self.fields_from(self.argument(z, x), x)
    }

    fn fields_from(&self, s: f64, x: f64) -> (Complex64, Complex64) {
        let (wp0, wc0) = self.pair.envelopes(x);
        match self.mode {
            ProfileMode::EqualKappa => {
                let amp = wp0.hypot(wc0);
                let theta = self.lookup(s);
                (
                    Complex64::new(amp * theta.sin(), 0.0),
                    Complex64::new(amp * theta.cos(), 0.0),
                )
            }
            ProfileMode::WeakProbe => (
                Complex64::new(wc0.abs() * self.f_p(s), 0.0),
                Complex64::new(wc0, 0.0),
            ),
        }
    }

    /// `A3(z, x)`: the dark-state amplitude carried by the traveling wave.
    pub fn coherence_map(&self, z: f64, x: f64) -> Complex64 {
        self.amplitudes_from(self.argument(z, x)).1
    }

    /// `(A1, A3)` of the dark state for profile argument `s`.
    fn amplitudes_from(&self, s: f64) -> (Complex64, Complex64) {
        match self.mode {
            ProfileMode::EqualKappa => {
                let theta = self.lookup(s);
                (theta.cos().into(), (-theta.sin()).into())
            }
            ProfileMode::WeakProbe => {
                let fp = self.f_p(s);
                let n = (1.0 + fp * fp).sqrt();
                ((1.0 / n).into(), (-fp / n).into())
            }
        }
    }

    /// Profile argument at which `F_p` peaks, refined with a parabola
    /// through the three surrounding knots.
    pub fn profile_peak(&self) -> (f64, f64) {
        let fp: Vec<f64> = self.knots.iter().map(|&s| self.f_p(s)).collect();
        let i = fp
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if i == 0 || i + 1 >= fp.len() {
            return (self.knots[i], fp[i]);
        }
        let (s0, s1, s2) = (self.knots[i - 1], self.knots[i], self.knots[i + 1]);
        let (f0, f1, f2) = (fp[i - 1], fp[i], fp[i + 1]);
        let d01 = (f1 - f0) / (s1 - s0);
        let d12 = (f2 - f1) / (s2 - s1);
        let curv = (d12 - d01) / (s2 - s0);
        if curv >= 0.0 {
            return (s1, f1);
        }
        // vertex of the interpolating parabola
        let s = 0.5 * (s0 + s1) - d01 / (2.0 * curv);
        let s = s.clamp(s0, s2);
        let f = f0 + d01 * (s - s0) + curv * (s - s0) * (s - s1);
        (s, f.max(f1))
    }

    /// Depth at which the coherence left behind after the first pulse pair
    /// is largest: `u(z) = v_late - s_peak`.
    pub fn coherence_max_depth(&self) -> f64 {
        let (s_peak, _) = self.profile_peak();
        (self.s_total - s_peak) / self.u_slope
    }

    /// Write the profile knots as CSV with columns `s,F_p,F_c`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s", "F_p", "F_c"])?;
        for &s in &self.knots {
            w.write_record([fmt9(s), fmt9(self.f_p(s)), fmt9(self.f_c(s))])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Fields and dark-state amplitudes of the adiabatic solution on a lattice.
#[derive(Debug, Clone)]
pub struct AdiabaticSolution {
    pub tables: AdiabaticTables,
    pub fields: FieldGrid,
    /// `a2` is left at zero (lowest order).
    pub amps: AmplitudeGrid,
}

/// Evaluate the traveling-wave solution on the full output lattice.
pub fn solve_adiabatic(
    pair: &PulsePair,
    medium: &MediumParams,
    grid: &GridSpec,
    mode: ProfileMode,
) -> Result<AdiabaticSolution> {
    let tables = tabulate_profiles(pair, medium, grid, mode)?;
    let x = grid.x_axis();
    let z = grid.z_axis(medium.z_m);
    let mut fields = FieldGrid::zeros(x.clone(), z.clone());
    let mut amps = AmplitudeGrid::zeros(z.len(), x.len());
    for (k, &zk) in z.iter().enumerate() {
        let u = tables.u(zk);
        for (j, &xj) in x.iter().enumerate() {
            let s = tables.v.v[j] - u;
            let (wp, wc) = tables.fields_from(s, xj);
            let (a1, a3) = tables.amplitudes_from(s);
            fields.w_p[[k, j]] = wp;
            fields.w_c[[k, j]] = wc;
            amps.a1[[k, j]] = a1;
            amps.a3[[k, j]] = a3;
        }
    }
    Ok(AdiabaticSolution {
        tables,
        fields,
        amps,
    })
}

/// Nine significant digits, the precision of every CSV this crate writes.
pub(crate) fn fmt9(v: f64) -> String {
    format!("{v:.8e}")
}

fn interp_clamped(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|&xi| xi <= x) - 1;
    let t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + t * (ys[i + 1] - ys[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(p: f64, c: f64, kappa: f64, r: f64) -> (PulsePair, MediumParams, GridSpec) {
        let pair = PulsePair::gaussian(p, c, r, 11.0);
        let medium = MediumParams::resonant(kappa, 8.0);
        let grid = GridSpec::default_for(&pair, &medium);
        (pair, medium, grid)
    }

    #[test]
    fn flux_values() {
        let m = MediumParams::resonant(200.0, 8.0);
        assert_eq!(photon_flux(0.0.into(), 0.0.into(), &m), 0.0);
        assert!((photon_flux(5.0.into(), 20.0.into(), &m) - 2.125).abs() < 1e-15);
        let f1 = photon_flux(Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5), &m);
        let f2 = photon_flux(Complex64::new(2.0, 4.0), Complex64::new(-6.0, 1.0), &m);
        assert!((f2 - 4.0 * f1).abs() < 1e-14);
    }

    #[test]
    fn group_velocity_values() {
        let m = MediumParams::resonant(200.0, 8.0);
        assert!((group_velocity(5.0.into(), 20.0.into(), &m) - 2.125).abs() < 1e-15);
        assert_eq!(group_velocity(0.0.into(), 0.0.into(), &m), 0.0);
        assert_eq!(group_velocity_full(0.0.into(), 0.0.into(), &m, 3e10), 0.0);
        let g1 = group_velocity(1.0.into(), 3.0.into(), &m);
        let g2 = group_velocity(2.0.into(), 6.0.into(), &m);
        assert!((g2 - 4.0 * g1).abs() < 1e-14);
        // vacuum term only matters when c*tau is not huge
        let full = group_velocity_full(5.0.into(), 20.0.into(), &m, 3e4);
        assert!((full - 2.125).abs() / 2.125 < 1e-3);
    }

    #[test]
    fn v_starts_at_zero_and_matches_closed_form() {
        let (pair, _, grid) = setup(5.0, 20.0, 200.0, 0.0);
        let v = build_v(&pair, &grid, ProfileMode::EqualKappa);
        assert_eq!(v.v[0], 0.0);
        assert!(v.v.windows(2).all(|w| w[1] >= w[0]));
        let total = 400.0 * (2.5 * PI).sqrt() + 25.0 * (0.5 * PI).sqrt();
        assert!((total - 1152.33).abs() < 0.005);
        assert!((first_pair_area(&pair) - total).abs() < 1e-12);
        let end = *v.v.last().unwrap();
        assert!((end - total).abs() / total < 1e-6, "{end}");
        for (&x, &vq) in v.x.iter().zip(&v.v).step_by(97) {
            let cf = v_closed_form(&pair, x, true) - v_closed_form(&pair, grid.x_min, true);
            assert!((vq - cf).abs() < 1e-7 * total, "x={x}: {vq} vs {cf}");
        }
        // v(0) = S/2 for centered pulses
        assert!((v.at(0.0) - total / 2.0).abs() / total < 1e-5);
    }

    #[test]
    fn cross_term_is_small_but_present() {
        let pair = PulsePair::gaussian(5.0, 20.0, 4.0, 11.0);
        let with = v_closed_form(&pair, 30.0, true);
        let without = v_closed_form(&pair, 30.0, false);
        let rel = (with - without) / with;
        assert!(rel > 0.0 && rel < 1e-5, "{rel}");
    }

    #[test]
    fn profile_landmarks() {
        let (pair, medium, grid) = setup(5.0, 20.0, 200.0, 4.0);
        let t = tabulate_profiles(&pair, &medium, &grid, ProfileMode::EqualKappa).unwrap();
        let s = first_pair_area(&pair);
        assert!(t.f_p(0.0).abs() < 1e-12);
        assert!((t.f_p(s / 2.0) - 5.0 / 425f64.sqrt()).abs() < 1e-5);
        assert!((5.0 / 425f64.sqrt() - 0.242536).abs() < 5e-7);
        // the probe tail at the end of the first pair is ~1e-8
        assert!(t.f_p(s).abs() < 1e-7);
        assert_eq!(t.f_p(-1.0), 0.0);
        assert_eq!(t.f_p(s + 10.0), 0.0);
        assert_eq!(t.f_c(-1.0), 1.0);
        assert!(t.warning.is_none());
    }

    #[test]
    fn equal_kappa_required() {
        let (pair, mut medium, grid) = setup(5.0, 20.0, 200.0, 0.0);
        medium.kappa32 = 300.0;
        assert!(tabulate_profiles(&pair, &medium, &grid, ProfileMode::EqualKappa).is_err());
        assert!(tabulate_profiles(&pair, &medium, &grid, ProfileMode::WeakProbe).is_ok());
    }

    #[test]
    fn weak_probe_warning() {
        let (pair, medium, grid) = setup(10.0, 20.0, 200.0, 0.0);
        let t = tabulate_profiles(&pair, &medium, &grid, ProfileMode::WeakProbe).unwrap();
        assert!(t.warning.is_some());
        let (pair, medium, grid) = setup(1.0, 20.0, 200.0, 0.0);
        let t = tabulate_profiles(&pair, &medium, &grid, ProfileMode::WeakProbe).unwrap();
        assert!(t.warning.is_none());
    }

    #[test]
    fn weak_probe_profile_follows_ratio() {
        let (pair, medium, grid) = setup(1.0, 20.0, 200.0, 0.0);
        let t = tabulate_profiles(&pair, &medium, &grid, ProfileMode::WeakProbe).unwrap();
        // z = 0 reproduces the boundary
        for &x in &[-1.0, 0.0, 0.5, 1.3] {
            let (wp, wc) = t.reconstruct_fields(0.0, x);
            let (p, c) = pair.envelopes(x);
            assert!((wp.re - p).abs() < 1e-4 * pair.omega_p0, "x={x}");
            assert_eq!(wc.re, c);
        }
        // coupling is undistorted at depth
        let (_, wc) = t.reconstruct_fields(3.0, 0.5);
        assert_eq!(wc.re, pair.envelopes(0.5).1);
        let a3 = t.coherence_map(0.0, 0.0);
        let expect = -1.0 / (1.0f64 + 400.0).sqrt();
        assert!((a3.re - expect).abs() < 1e-5);
    }

    #[test]
    fn reconstruction_at_entrance() {
        let (pair, medium, grid) = setup(5.0, 20.0, 200.0, 4.0);
        let t = tabulate_profiles(&pair, &medium, &grid, ProfileMode::EqualKappa).unwrap();
        for &x in &[-2.0, -0.5, 0.0, 0.77, 2.1] {
            let (wp, wc) = t.reconstruct_fields(0.0, x);
            let (p, c) = pair.envelopes(x);
            assert!((wp.re - p).abs() <= 1e-4 * 5.0, "x={x}: {} vs {p}", wp.re);
            assert!((wc.re - c).abs() <= 1e-4 * 20.0);
        }
    }

    #[test]
    fn coherence_at_entrance_and_plateau() {
        let (pair, medium, grid) = setup(5.0, 20.0, 200.0, 4.0);
        let t = tabulate_profiles(&pair, &medium, &grid, ProfileMode::EqualKappa).unwrap();
        let a3 = t.coherence_map(0.0, 0.0);
        assert!((a3.re + 5.0 / 425f64.sqrt()).abs() < 1e-5);
        // between the pulses v barely moves, so neither does A3
        for &z in &[0.5, 1.5, 2.88, 4.0] {
            let a = t.coherence_map(z, 5.0);
            let b = t.coherence_map(z, 6.0);
            assert!((a - b).norm() < 1e-3, "z={z}: {}", (a - b).norm());
        }
    }

    #[test]
    fn equal_fields_coherence_peak() {
        let (pair, medium, grid) = setup(20.0, 20.0, 700.0, 0.0);
        let t = tabulate_profiles(&pair, &medium, &grid, ProfileMode::EqualKappa).unwrap();
        let (_, peak) = t.profile_peak();
        assert!(
            (peak - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6,
            "{peak}"
        );
    }

    #[test]
    fn coherence_depths() {
        let (pair, medium, grid) = setup(20.0, 20.0, 700.0, 0.0);
        let t = tabulate_profiles(&pair, &medium, &grid, ProfileMode::EqualKappa).unwrap();
        let analytic = first_pair_area(&pair) / (2.0 * 700.0);
        assert!((analytic - 1.159).abs() < 5e-4);
        assert!((t.coherence_max_depth() - analytic).abs() < 1e-3);

        let (pair, medium, grid) = setup(5.0, 20.0, 200.0, 0.0);
        let t = tabulate_profiles(&pair, &medium, &grid, ProfileMode::EqualKappa).unwrap();
        let analytic = first_pair_area(&pair) / (2.0 * 200.0);
        assert!((t.coherence_max_depth() - analytic).abs() < 1e-3);
    }

    #[test]
    fn csv_export() {
        let (pair, medium, grid) = setup(5.0, 20.0, 200.0, 0.0);
        let t = tabulate_profiles(&pair, &medium, &grid, ProfileMode::EqualKappa).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("s,F_p,F_c"));
        assert_eq!(lines.count(), t.knots.len());
    }

    #[test]
    fn plateau_merging_keeps_knots_increasing() {
        let (pair, medium, grid) = setup(5.0, 20.0, 200.0, 4.0);
        let t = tabulate_profiles(&pair, &medium, &grid, ProfileMode::EqualKappa).unwrap();
        assert!(t.knots.windows(2).all(|w| w[1] > w[0]));
        assert!(t.knots.len() < grid.n_x);
    }

    #[test]
    fn inverse_of_v() {
        let (pair, _, grid) = setup(5.0, 20.0, 200.0, 0.0);
        let v = build_v(&pair, &grid, ProfileMode::EqualKappa);
        let x = v.inverse(v.at(0.4)).unwrap();
        assert!((x - 0.4).abs() < 1e-9);
        assert!(v.inverse(1e9).is_none());
    }
}
