//! Dimensionless data model shared by every engine.
//!
//! Time is measured as `x = t_r / tau` (retarded time over the probe pulse
//! length), half-Rabi frequencies as `Omega * tau`, depth in cm and the
//! coupling constants as `kappa * tau` in cm^-1. With this bookkeeping the
//! field equations read `dOmega*/dz = i kappa A1* A2` with no stray factors.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent factor of the coupling Gaussians; the probe factor is 1.
pub const COUPLING_EXPONENT: f64 = 0.2;

/// Ratio used for every "much greater than" applicability check.
pub const MUCH_GREATER_RATIO: f64 = 10.0;

/// Output lattice spacing in z used by [`GridSpec::default_for`], in cm.
pub const DEFAULT_DZ: f64 = 0.01;

/// Sampled unit-peak envelopes for user supplied pulse shapes.
///
/// Values are linearly interpolated and vanish outside the sampled range.
/// They are scaled by `omega_p0` / `omega_c0` of the owning [`PulsePair`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledEnvelope {
    pub x: Vec<f64>,
    pub probe: Vec<f64>,
    pub coupling: Vec<f64>,
}

impl SampledEnvelope {
    pub fn new(x: Vec<f64>, probe: Vec<f64>, coupling: Vec<f64>) -> Result<Self> {
        if x.len() < 2 || probe.len() != x.len() || coupling.len() != x.len() {
            return Err(Error::Config(
                "custom envelope needs >= 2 samples and equal-length columns".into(),
            ));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config(
                "custom envelope x must be strictly increasing".into(),
            ));
        }
        if probe
            .iter()
            .chain(&coupling)
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return Err(Error::Config(
                "custom envelope values must be finite and >= 0".into(),
            ));
        }
        Ok(Self { x, probe, coupling })
    }

    /// (value, slope) of a column at `x`.
    fn eval(&self, column: &[f64], x: f64) -> (f64, f64) {
        let n = self.x.len();
        if x < self.x[0] || x > self.x[n - 1] {
            return (0.0, 0.0);
        }
        let i = match self.x.partition_point(|&xi| xi <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let slope = (column[i + 1] - column[i]) / h;
        (column[i] + slope * (x - self.x[i]), slope)
    }

    /// First and last abscissa where either column is nonzero.
    pub fn support(&self) -> Option<(f64, f64)> {
        let nonzero = |i: &usize| self.probe[*i] > 0.0 || self.coupling[*i] > 0.0;
        let first = (0..self.x.len()).find(nonzero)?;
        let last = (0..self.x.len()).rev().find(nonzero)?;
        Some((self.x[first], self.x[last]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PulseShape {
    /// `w_p = Op0 exp(-x^2)`, `w_c = Oc0 (exp(-0.2 x^2) + R exp(-0.2 (x-x0)^2))`.
    Gaussian,
    Custom(SampledEnvelope),
}

/// Boundary condition at the cell entrance `z = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulsePair {
    pub omega_p0: f64,
    pub omega_c0: f64,
    /// Amplitude ratio of the recurring coupling pulse.
    pub r: f64,
    /// Recurrence delay `t_d / tau`.
    pub x0: f64,
    pub shape: PulseShape,
}

impl PulsePair {
    pub fn gaussian(omega_p0: f64, omega_c0: f64, r: f64, x0: f64) -> Self {
        Self {
            omega_p0,
            omega_c0,
            r,
            x0,
            shape: PulseShape::Gaussian,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega_p0, self.omega_c0, self.r, self.x0]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("pulse parameters must be finite".into()));
        }
        if self.omega_p0 < 0.0 || self.omega_c0 < 0.0 || self.r < 0.0 {
            return Err(Error::Config(
                "omega_p0, omega_c0 and R must be >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Real boundary envelopes `(w_p, w_c)` at `x`.
    pub fn envelopes(&self, x: f64) -> (f64, f64) {
        match &self.shape {
            PulseShape::Gaussian => {
                let wp = self.omega_p0 * (-x * x).exp();
                let d = x - self.x0;
                let wc = self.omega_c0
                    * ((-COUPLING_EXPONENT * x * x).exp()
                        + self.r * (-COUPLING_EXPONENT * d * d).exp());
                (wp, wc)
            }
            PulseShape::Custom(env) => (
                self.omega_p0 * env.eval(&env.probe, x).0,
                self.omega_c0 * env.eval(&env.coupling, x).0,
            ),
        }
    }

    /// Time derivatives `(dw_p/dx, dw_c/dx)` of the boundary envelopes.
    pub fn envelope_slopes(&self, x: f64) -> (f64, f64) {
        match &self.shape {
            PulseShape::Gaussian => {
                let dwp = -2.0 * x * self.omega_p0 * (-x * x).exp();
                let d = x - self.x0;
                let dwc = self.omega_c0
                    * (-2.0 * COUPLING_EXPONENT * x * (-COUPLING_EXPONENT * x * x).exp()
                        - 2.0
                            * COUPLING_EXPONENT
                            * d
                            * self.r
                            * (-COUPLING_EXPONENT * d * d).exp());
                (dwp, dwc)
            }
            PulseShape::Custom(env) => (
                self.omega_p0 * env.eval(&env.probe, x).1,
                self.omega_c0 * env.eval(&env.coupling, x).1,
            ),
        }
    }

    /// Largest boundary field magnitude `sqrt(w_p^2 + w_c^2)` over `[a, b]`.
    pub fn peak_rabi(&self, a: f64, b: f64) -> f64 {
        let n = 20_000;
        (0..=n)
            .map(|i| {
                let (wp, wc) = self.envelopes(a + (b - a) * i as f64 / n as f64);
                wp.hypot(wc)
            })
            .fold(0.0, f64::max)
    }
}

/// Boundary envelopes as complex half-Rabi frequencies.
pub fn boundary_envelopes(pair: &PulsePair, x: f64) -> (Complex64, Complex64) {
    let (wp, wc) = pair.envelopes(x);
    (Complex64::new(wp, 0.0), Complex64::new(wc, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    /// `kappa12 * tau` in cm^-1.
    pub kappa12: f64,
    /// `kappa32 * tau` in cm^-1.
    pub kappa32: f64,
    /// `gamma2 * tau`.
    pub gamma2: f64,
    /// One-photon detuning `delta * tau`.
    pub delta: f64,
    /// Cell length in cm.
    pub z_m: f64,
}

impl MediumParams {
    /// Lossless, resonant medium with equal coupling constants.
    pub fn resonant(kappa: f64, z_m: f64) -> Self {
        Self {
            kappa12: kappa,
            kappa32: kappa,
            gamma2: 0.0,
            delta: 0.0,
            z_m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.kappa12,
            self.kappa32,
            self.gamma2,
            self.delta,
            self.z_m,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Config("medium parameters must be finite".into()));
        }
        if self.kappa12 <= 0.0 || self.kappa32 <= 0.0 {
            return Err(Error::Config("kappa12 and kappa32 must be > 0".into()));
        }
        if self.gamma2 < 0.0 {
            return Err(Error::Config("gamma2 must be >= 0".into()));
        }
        if self.z_m <= 0.0 {
            return Err(Error::Config("z_m must be > 0".into()));
        }
        Ok(())
    }
}

/// Output lattice: `n_x` retarded-time samples on `[x_min, x_max]` and `n_z`
/// depth samples on `[0, z_m]`, both including the end points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_x: usize,
    pub n_z: usize,
}

impl GridSpec {
    /// `x in [-6, x0 + 6]`, 4096 time samples and `dz <= 0.01 cm`.
    pub fn default_for(pair: &PulsePair, medium: &MediumParams) -> Self {
        let (x_min, x_max) = match (&pair.shape, pair.support_window()) {
            (PulseShape::Custom(_), Some((a, b))) => (a, b),
            _ => (-6.0, pair.x0.max(0.0) + 6.0),
        };
        Self {
            x_min,
            x_max,
            n_x: 4096,
            n_z: (medium.z_m / DEFAULT_DZ).ceil() as usize + 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_max.is_finite()) || self.x_min >= self.x_max {
            return Err(Error::Config(format!(
                "grid window [{}, {}] is empty",
                self.x_min, self.x_max
            )));
        }
        if self.n_x < 2 || self.n_z < 2 {
            return Err(Error::Config("grid needs n_x >= 2 and n_z >= 2".into()));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_x - 1) as f64
    }

    pub fn x_axis(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_x).map(|i| self.x_min + dx * i as f64).collect()
    }

    pub fn z_axis(&self, z_m: f64) -> Vec<f64> {
        let dz = z_m / (self.n_z - 1) as f64;
        (0..self.n_z).map(|k| dz * k as f64).collect()
    }
}

impl PulsePair {
    fn support_window(&self) -> Option<(f64, f64)> {
        match &self.shape {
            PulseShape::Custom(env) => Some((env.x[0], env.x[env.x.len() - 1])),
            PulseShape::Gaussian => None,
        }
    }
}

/// Complex `Omega_p tau` and `Omega_c tau` on the `(z, x)` lattice, row-major
/// in z.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub w_p: Array2<Complex64>,
    pub w_c: Array2<Complex64>,
}

impl FieldGrid {
    pub fn zeros(x: Vec<f64>, z: Vec<f64>) -> Self {
        let shape = (z.len(), x.len());
        Self {
            x,
            z,
            w_p: Array2::zeros(shape),
            w_c: Array2::zeros(shape),
        }
    }

    pub fn same_lattice(&self, other: &FieldGrid) -> bool {
        self.x == other.x && self.z == other.z
    }
}

/// Atomic amplitudes `A1, A2, A3` on the same lattice as a [`FieldGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeGrid {
    pub a1: Array2<Complex64>,
    pub a2: Array2<Complex64>,
    pub a3: Array2<Complex64>,
}

impl AmplitudeGrid {
    pub fn zeros(n_z: usize, n_x: usize) -> Self {
        Self {
            a1: Array2::zeros((n_z, n_x)),
            a2: Array2::zeros((n_z, n_x)),
            a3: Array2::zeros((n_z, n_x)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub applicable: bool,
    pub passed: bool,
}

impl Check {
    fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            applicable: true,
            passed: value >= threshold,
        }
    }

    fn not_applicable(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            applicable: false,
            passed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Applicability report for a configuration. Only structurally invalid input
/// is an error; physics conditions are reported as checks.
pub fn validate_config(
    pair: &PulsePair,
    medium: &MediumParams,
    grid: &GridSpec,
) -> Result<ValidationReport> {
    pair.validate()?;
    medium.validate()?;
    grid.validate()?;

    let mut checks = vec![Check::at_least(
        "strong_coupling",
        pair.omega_c0,
        MUCH_GREATER_RATIO,
    )];

    // Coupling must already be strong where the probe starts to rise.
    checks.push(match probe_leading_edge(pair, grid) {
        Some(x_edge) => {
            let (wp, wc) = pair.envelopes(x_edge);
            Check::at_least("coupling_leads_probe", wc / wp, MUCH_GREATER_RATIO)
        }
        None => Check::not_applicable("coupling_leads_probe", f64::INFINITY, MUCH_GREATER_RATIO),
    });

    let stark = if medium.delta == 0.0 {
        f64::INFINITY
    } else {
        pair.omega_c0 * pair.omega_c0 / medium.delta.abs()
    };
    checks.push(if medium.delta.abs() > pair.omega_c0 {
        Check::at_least("far_detuned", stark, MUCH_GREATER_RATIO)
    } else {
        Check::not_applicable("far_detuned", stark, MUCH_GREATER_RATIO)
    });

    checks.push(match &pair.shape {
        PulseShape::Gaussian => {
            let late = if pair.r > 0.0 { pair.x0.max(0.0) } else { 0.0 };
            let margin = (-grid.x_min).min(grid.x_max - late);
            Check::at_least("window_covers_pulses", margin, 5.0)
        }
        PulseShape::Custom(env) => {
            let margin = env
                .support()
                .map(|(a, b)| (a - grid.x_min).min(grid.x_max - b))
                .unwrap_or(0.0);
            Check::at_least("window_covers_pulses", margin, 0.0)
        }
    });

    Ok(ValidationReport { checks })
}

/// First `x` in the window where the probe reaches `1e-3` of its peak.
fn probe_leading_edge(pair: &PulsePair, grid: &GridSpec) -> Option<f64> {
    if pair.omega_p0 <= 0.0 {
        return None;
    }
    let n = 100_000;
    let h = (grid.x_max - grid.x_min) / n as f64;
    (0..=n)
        .map(|i| grid.x_min + h * i as f64)
        .find(|&x| pair.envelopes(x).0 >= 1e-3 * pair.omega_p0)
}
