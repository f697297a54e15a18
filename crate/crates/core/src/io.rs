//! Run configuration files and output artifacts.
//!
//! A configuration is a flat JSON object:
//!
//! ```json
//! {
//!   "omega_p0": 5.0, "omega_c0": 20.0, "R": 4.0, "t_d": 11.0,
//!   "kappa12": 200.0, "z_m": 8.0,
//!   "grid": { "n_x": 1024, "n_z": 161 }
//! }
//! ```
//!
//! `kappa32` defaults to `kappa12`; `gamma2` and `delta` default to zero.
//! An optional `envelope` object with `x`, `probe` and `coupling` columns
//! replaces the Gaussian pair with sampled unit-peak shapes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::adiabatic::fmt9;
use crate::error::{Error, Result};
use crate::model::{
    AmplitudeGrid, FieldGrid, GridSpec, MediumParams, PulsePair, PulseShape, SampledEnvelope,
};
use crate::solver::SolverOptions;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SLOWLIGHT_OUT";

pub const GRID_CSV_HEADER: [&str; 11] = [
    "x", "z", "re_wp", "im_wp", "abs_wp", "re_wc", "im_wc", "abs_wc", "abs_a1", "abs_a2", "abs_a3",
];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_x: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_z: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub omega_p0: f64,
    pub omega_c0: f64,
    #[serde(rename = "R", default)]
    pub r: f64,
    #[serde(default)]
    pub t_d: f64,
    pub kappa12: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa32: Option<f64>,
    #[serde(default)]
    pub gamma2: f64,
    #[serde(default)]
    pub delta: f64,
    pub z_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridOverrides>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverOptions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<SampledEnvelope>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))
    }

    pub fn pair(&self) -> Result<PulsePair> {
        let shape = match &self.envelope {
            None => PulseShape::Gaussian,
            Some(env) => PulseShape::Custom(SampledEnvelope::new(
                env.x.clone(),
                env.probe.clone(),
                env.coupling.clone(),
            )?),
        };
        let pair = PulsePair {
            omega_p0: self.omega_p0,
            omega_c0: self.omega_c0,
            r: self.r,
            x0: self.t_d,
            shape,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn medium(&self) -> Result<MediumParams> {
        let medium = MediumParams {
            kappa12: self.kappa12,
            kappa32: self.kappa32.unwrap_or(self.kappa12),
            gamma2: self.gamma2,
            delta: self.delta,
            z_m: self.z_m,
        };
        medium.validate()?;
        Ok(medium)
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let mut grid = GridSpec::default_for(&self.pair()?, &self.medium()?);
        if let Some(o) = &self.grid {
            grid.x_min = o.x_min.unwrap_or(grid.x_min);
            grid.x_max = o.x_max.unwrap_or(grid.x_max);
            grid.n_x = o.n_x.unwrap_or(grid.n_x);
            grid.n_z = o.n_z.unwrap_or(grid.n_z);
        }
        grid.validate()?;
        Ok(grid)
    }

    pub fn solver_options(&self) -> SolverOptions {
        self.solver.unwrap_or_default()
    }
}

/// One CSV row per lattice point, z-major, nine significant digits.
pub fn write_grid_csv<W: Write>(fields: &FieldGrid, amps: &AmplitudeGrid, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(GRID_CSV_HEADER)?;
    for (k, &z) in fields.z.iter().enumerate() {
        for (j, &x) in fields.x.iter().enumerate() {
            let wp = fields.w_p[[k, j]];
            let wc = fields.w_c[[k, j]];
            w.write_record([
                fmt9(x),
                fmt9(z),
                fmt9(wp.re),
                fmt9(wp.im),
                fmt9(wp.norm()),
                fmt9(wc.re),
                fmt9(wc.im),
                fmt9(wc.norm()),
                fmt9(amps.a1[[k, j]].norm()),
                fmt9(amps.a2[[k, j]].norm()),
                fmt9(amps.a3[[k, j]].norm()),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Output directory: the explicit choice, else `$SLOWLIGHT_OUT`, else `out`.
pub fn resolve_out_dir(explicit: Option<&Path>) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Adiabatic,
    Numeric,
    Both,
}

impl Engine {
    pub fn runs_adiabatic(self) -> bool {
        matches!(self, Engine::Adiabatic | Engine::Both)
    }

    pub fn runs_numeric(self) -> bool {
        matches!(self, Engine::Numeric | Engine::Both)
    }
}

/// Everything needed to repeat a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub engine: Engine,
    pub grid: GridSpec,
    pub solver: SolverOptions,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
    pub crate_version: String,
}
