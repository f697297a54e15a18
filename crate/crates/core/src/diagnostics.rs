//! Error metrics between solutions, grid-refinement studies and the
//! detuning-independence experiment.

use std::io::Write;

use ndarray::{Array2, Zip};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::adiabatic::{fmt9, AdiabaticSolution};
use crate::error::{Error, Result};
use crate::model::{validate_config, AmplitudeGrid, FieldGrid, GridSpec, MediumParams, PulsePair};
use crate::solver::{row_peak, solve, SolveResult, SolverOptions};

/// Values below this fraction of the peak are left out of relative errors
/// in refinement studies.
pub const REFINEMENT_MASK: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    /// Largest relative difference of `|w_p|` over points where either grid
    /// exceeds `mask_frac` of the larger peak.
    pub max_rel_err_wp: f64,
    /// Difference of the probe peak amplitudes on the last row.
    pub peak_amp_err: f64,
    /// Difference of the probe peak times on the last row, in tau.
    pub peak_time_err: f64,
    /// Largest `|A3|` difference along the plateau column.
    pub a3_plateau_err: f64,
    pub flux_residual: f64,
    pub norm_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub mask_frac: f64,
    /// Time inside the storage window at which the coherence plateau is
    /// sampled; `None` skips the plateau metric.
    pub plateau_x: Option<f64>,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            mask_frac: 0.05,
            plateau_x: None,
        }
    }
}

fn peak_abs(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Symmetric masked relative error between two magnitude grids.
pub fn masked_rel_err(a: &Array2<Complex64>, b: &Array2<Complex64>, mask_frac: f64) -> f64 {
    let floor = mask_frac * peak_abs(a).max(peak_abs(b));
    let mut worst: f64 = 0.0;
    Zip::from(a).and(b).for_each(|u, v| {
        let (u, v) = (u.norm(), v.norm());
        let big = u.max(v);
        if big > floor && big > 0.0 {
            worst = worst.max((u - v).abs() / big);
        }
    });
    worst
}

/// Compare two solutions stored on the same lattice.
pub fn compare_grids(
    a: (&FieldGrid, &AmplitudeGrid),
    b: (&FieldGrid, &AmplitudeGrid),
    options: &CompareOptions,
) -> Result<ComparisonReport> {
    if !a.0.same_lattice(b.0) {
        return Err(Error::LatticeMismatch(format!(
            "{}x{} vs {}x{} points",
            a.0.z.len(),
            a.0.x.len(),
            b.0.z.len(),
            b.0.x.len()
        )));
    }
    let last = a.0.z.len() - 1;
    let exit = |g: &FieldGrid| row_peak(&g.x, g.w_p.row(last).iter().map(|w| w.norm()));
    let (ta, pa) = exit(a.0);
    let (tb, pb) = exit(b.0);

    let a3_plateau_err = match options.plateau_x {
        Some(x) => {
            let j = nearest(&a.0.x, x);
            a.1.a3
                .column(j)
                .iter()
                .zip(b.1.a3.column(j))
                .map(|(u, v)| (u.norm() - v.norm()).abs())
                .fold(0.0, f64::max)
        }
        None => 0.0,
    };

    Ok(ComparisonReport {
        max_rel_err_wp: masked_rel_err(&a.0.w_p, &b.0.w_p, options.mask_frac),
        peak_amp_err: (pa - pb).abs(),
        peak_time_err: (ta - tb).abs(),
        a3_plateau_err,
        flux_residual: 0.0,
        norm_residual: 0.0,
    })
}

/// Adiabatic solution against a numerical one; residuals come from the
/// numerical run.
pub fn compare(
    adiabatic: &AdiabaticSolution,
    numeric: &SolveResult,
    options: &CompareOptions,
) -> Result<ComparisonReport> {
    let mut report = compare_grids(
        (&adiabatic.fields, &adiabatic.amps),
        (&numeric.fields, &numeric.amps),
        options,
    )?;
    report.flux_residual = numeric.flux_residual;
    report.norm_residual = numeric.norm_max_dev;
    Ok(report)
}

fn nearest(x: &[f64], target: f64) -> usize {
    let dx = x[1] - x[0];
    (((target - x[0]) / dx).round().max(0.0) as usize).min(x.len() - 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementRow {
    pub factor: u32,
    pub delta_wp: f64,
    pub delta_wc: f64,
    pub delta_a1: f64,
    pub delta_a2: f64,
    pub delta_a3: f64,
}

impl RefinementRow {
    pub fn max_delta(&self) -> f64 {
        [
            self.delta_wp,
            self.delta_wc,
            self.delta_a1,
            self.delta_a2,
            self.delta_a3,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Largest `|b - a| / |a|` over points where `|a|` exceeds `mask` of its
/// peak.
pub fn max_rel_change(a: &Array2<Complex64>, b: &Array2<Complex64>, mask: f64) -> f64 {
    let floor = mask * peak_abs(a);
    let mut worst: f64 = 0.0;
    Zip::from(a).and(b).for_each(|u, v| {
        let m = u.norm();
        if m > floor && m > 0.0 {
            worst = worst.max((v - u).norm() / m);
        }
    });
    worst
}

/// Refinement deltas between a base run and a finer run on the same output lattice.
pub fn refinement_row(factor: u32, base: &SolveResult, fine: &SolveResult) -> RefinementRow {
    let d = |a: &Array2<Complex64>, b: &Array2<Complex64>| max_rel_change(a, b, REFINEMENT_MASK);
    RefinementRow {
        factor,
        delta_wp: d(&base.fields.w_p, &fine.fields.w_p),
        delta_wc: d(&base.fields.w_c, &fine.fields.w_c),
        delta_a1: d(&base.amps.a1, &fine.amps.a1),
        delta_a2: d(&base.amps.a2, &fine.amps.a2),
        delta_a3: d(&base.amps.a3, &fine.amps.a3),
    }
}

/// Solve at `base` resolution and at each factor times finer in both x and
/// z, reporting the largest relative change on the shared output lattice.
pub fn refinement_study(
    pair: &PulsePair,
    medium: &MediumParams,
    grid: &GridSpec,
    base: &SolverOptions,
    factors: &[u32],
) -> Result<Vec<RefinementRow>> {
    if let Some(f) = factors.iter().find(|f| ![2, 4].contains(*f)) {
        return Err(Error::Config(format!(
            "refinement factor must be 2 or 4, got {f}"
        )));
    }
    let coarse = solve(pair, medium, grid, base)?;
    factors
        .iter()
        .map(|&factor| {
            let options = SolverOptions {
                refine: base.refine * factor,
                ..*base
            };
            let fine = solve(pair, medium, grid, &options)?;
            Ok(refinement_row(factor, &coarse, &fine))
        })
        .collect()
}

pub fn write_refinement_csv<W: Write>(rows: &[RefinementRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "factor", "delta_wp", "delta_wc", "delta_a1", "delta_a2", "delta_a3",
    ])?;
    for r in rows {
        w.write_record([
            r.factor.to_string(),
            fmt9(r.delta_wp),
            fmt9(r.delta_wc),
            fmt9(r.delta_a1),
            fmt9(r.delta_a2),
            fmt9(r.delta_a3),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetuningRow {
    pub delta: f64,
    /// `max | |w_p(delta)| - |w_p(0)| |` over the grid, divided by the peak
    /// of the resonant run.
    pub distance: f64,
    pub warning: Option<String>,
}

/// Solve once on resonance and once per detuning, reporting the distance
/// of each probe grid from the resonant one.
pub fn detuning_independence(
    pair: &PulsePair,
    medium_base: &MediumParams,
    grid: &GridSpec,
    options: &SolverOptions,
    deltas: &[f64],
) -> Result<Vec<DetuningRow>> {
    let resonant = MediumParams {
        delta: 0.0,
        ..*medium_base
    };
    let reference = solve(pair, &resonant, grid, options)?;
    let peak = peak_abs(&reference.fields.w_p);
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let medium = MediumParams {
            delta,
            ..*medium_base
        };
        let report = validate_config(pair, &medium, grid)?;
        let warning = report
            .get("far_detuned")
            .filter(|c| c.applicable && !c.passed)
            .map(|c| {
                format!(
                    "far-detuned condition fails: |Oc0|^2/|delta| = {:.3}",
                    c.value
                )
            });
        let distance = if delta == 0.0 {
            0.0
        } else {
            let run = solve(pair, &medium, grid, options)?;
            grid_distance(&reference.fields.w_p, &run.fields.w_p) / peak
        };
        rows.push(DetuningRow {
            delta,
            distance,
            warning,
        });
    }
    Ok(rows)
}

/// `max | |a| - |b| |`.
pub fn grid_distance(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    let mut worst: f64 = 0.0;
    Zip::from(a)
        .and(b)
        .for_each(|u, v| worst = worst.max((u.norm() - v.norm()).abs()));
    worst
}
