//! Command-line front end. The binary only forwards to [`run`].
//!
//! Exit codes: 0 success, 1 a verification suite failed, 2 unreadable or
//! invalid input, 3 a solver or physics error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::adiabatic::{solve_adiabatic, AdiabaticSolution, ProfileMode};
use crate::diagnostics::{compare, CompareOptions};
use crate::error::{Error, Result};
use crate::io::{resolve_out_dir, write_grid_csv, write_json, Engine, RunConfig, RunManifest};
use crate::model::{validate_config, GridSpec, MediumParams, PulsePair, PulseShape};
use crate::revival::{matched_r, predict};
use crate::solver::{row_peak, solve, SolveResult, SolverOptions};
use crate::verify::{run_suite, Case, Suite};

#[derive(Debug, Parser)]
#[command(
    name = "slowlight",
    version,
    about = "Pulse storage and regeneration in a three-level medium"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate a pulse pair and write grid, summary and manifest files.
    Simulate {
        config: PathBuf,
        #[arg(long, value_enum, default_value = "numeric")]
        engine: Engine,
        /// Output directory [default: $SLOWLIGHT_OUT/<config name>, or out/<config name>]
        #[arg(long)]
        out: Option<PathBuf>,
        /// Integration refinement factor (1, 2 or 4).
        #[arg(long)]
        refine: Option<u32>,
        /// Run even when an applicability check fails.
        #[arg(long)]
        force: bool,
    },
    /// Print closed-form revival estimates without simulating.
    Predict {
        config: PathBuf,
        /// Print only the recurrence ratio that centres the revival on t_d.
        #[arg(long)]
        matched_r: bool,
    },
    /// Run a verification suite and print a pass/fail table.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Run numerical suites on this configuration instead of the built-in case.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run both engines and print the comparison report.
    Compare {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        refine: Option<u32>,
        /// Relative-error mask as a fraction of the probe peak.
        #[arg(long, default_value_t = 0.05)]
        mask: f64,
    },
}

/// Map an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_)
        | Error::LatticeMismatch(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_) => 2,
        Error::DegenerateFields
        | Error::Domain(_)
        | Error::Escape { .. }
        | Error::MediumTraversed { .. }
        | Error::NoMatchedR { .. }
        | Error::Stiffness { .. } => 3,
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = match cli.command {
        Command::Simulate {
            config,
            engine,
            out,
            refine,
            force,
        } => cmd_simulate(&config, engine, out.as_deref(), refine, force),
        Command::Predict { config, matched_r } => cmd_predict(&config, matched_r),
        Command::Verify { suite, config } => cmd_verify(suite, config.as_deref()),
        Command::Compare {
            config,
            out,
            refine,
            mask,
        } => cmd_compare(&config, out.as_deref(), refine, mask),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

struct Loaded {
    config: RunConfig,
    pair: PulsePair,
    medium: MediumParams,
    grid: GridSpec,
    options: SolverOptions,
}

fn load(path: &Path, refine: Option<u32>) -> Result<Loaded> {
    let config = RunConfig::load(path)?;
    let mut options = config.solver_options();
    if let Some(r) = refine {
        options.refine = r;
    }
    options.validate()?;
    Ok(Loaded {
        pair: config.pair()?,
        medium: config.medium()?,
        grid: config.grid()?,
        config,
        options,
    })
}

fn default_out(config: &Path, explicit: Option<&Path>) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => {
            let stem = config
                .file_stem()
                .map(PathBuf::from)
                .unwrap_or_else(|| "run".into());
            resolve_out_dir(None).join(stem)
        }
    }
}

fn profile_mode(medium: &MediumParams) -> ProfileMode {
    if (medium.kappa12 - medium.kappa32).abs() <= 1e-12 * medium.kappa12 {
        ProfileMode::EqualKappa
    } else {
        ProfileMode::WeakProbe
    }
}

fn exit_peak(x: &[f64], row: ndarray::ArrayView1<num_complex::Complex64>) -> Value {
    let (xp, wp) = row_peak(x, row.iter().map(|w| w.norm()));
    json!({ "x": xp, "abs_wp": wp })
}

fn numeric_summary(run: &SolveResult, pair: &PulsePair) -> Value {
    let last = run.fields.z.len() - 1;
    let mut peak = exit_peak(&run.fields.x, run.fields.w_p.row(last));
    if pair.r > 0.0 {
        peak["x_minus_t_d"] = json!(peak["x"].as_f64().unwrap() - pair.x0);
    }
    json!({
        "norm_max_dev": run.norm_max_dev,
        "flux_max_dev": run.flux_max_dev,
        "flux_residual": run.flux_residual,
        "exit_peak": peak,
        "lambda_max": run.lambda_max,
        "x_substeps": run.x_substeps,
        "z_substeps": run.z_substeps,
    })
}

fn adiabatic_summary(sol: &AdiabaticSolution, pair: &PulsePair) -> Value {
    let last = sol.fields.z.len() - 1;
    let mut peak = exit_peak(&sol.fields.x, sol.fields.w_p.row(last));
    if pair.r > 0.0 {
        peak["x_minus_t_d"] = json!(peak["x"].as_f64().unwrap() - pair.x0);
    }
    let (_, a3_peak) = sol.tables.profile_peak();
    json!({
        "mode": sol.tables.mode,
        "exit_peak": peak,
        "a3_peak": a3_peak,
        "coherence_max_depth": sol.tables.coherence_max_depth(),
        "warning": sol.tables.warning,
    })
}

fn write_csv_file(
    dir: &Path,
    name: &str,
    sol: (&crate::model::FieldGrid, &crate::model::AmplitudeGrid),
) -> Result<String> {
    let path = dir.join(name);
    write_grid_csv(sol.0, sol.1, BufWriter::new(File::create(&path)?))?;
    Ok(name.to_string())
}

pub fn cmd_simulate(
    config_path: &Path,
    engine: Engine,
    out: Option<&Path>,
    refine: Option<u32>,
    force: bool,
) -> Result<i32> {
    let start = Instant::now();
    let run = load(config_path, refine)?;
    let report = validate_config(&run.pair, &run.medium, &run.grid)?;
    for check in report.failures() {
        eprintln!(
            "check failed: {} = {:.4} (needs >= {})",
            check.name, check.value, check.threshold
        );
    }
    if !report.all_passed() && !force {
        return Ok(2);
    }

    let dir = default_out(config_path, out);
    fs::create_dir_all(&dir)?;
    let mut outputs = Vec::new();
    let mut summary = json!({
        "label": run.config.label,
        "engine": engine,
        "validation": report,
    });

    let adiabatic = if engine.runs_adiabatic() {
        let sol = solve_adiabatic(&run.pair, &run.medium, &run.grid, profile_mode(&run.medium))?;
        outputs.push(write_csv_file(
            &dir,
            "grid_adiabatic.csv",
            (&sol.fields, &sol.amps),
        )?);
        let profiles = "profiles.csv";
        sol.tables
            .write_csv(BufWriter::new(File::create(dir.join(profiles))?))?;
        outputs.push(profiles.into());
        summary["adiabatic"] = adiabatic_summary(&sol, &run.pair);
        Some(sol)
    } else {
        None
    };

    let numeric = if engine.runs_numeric() {
        let res = solve(&run.pair, &run.medium, &run.grid, &run.options)?;
        outputs.push(write_csv_file(
            &dir,
            "grid_numeric.csv",
            (&res.fields, &res.amps),
        )?);
        summary["numeric"] = numeric_summary(&res, &run.pair);
        Some(res)
    } else {
        None
    };

    if let (Some(a), Some(n)) = (&adiabatic, &numeric) {
        let report = compare(a, n, &compare_options(&run.pair, 0.05))?;
        write_json(&report, &dir.join("comparison.json"))?;
        outputs.push("comparison.json".into());
    }

    if matches!(run.pair.shape, PulseShape::Gaussian) && run.pair.r > 0.0 {
        summary["revival"] = match predict(&run.pair, &run.medium) {
            Ok(est) => serde_json::to_value(est)?,
            Err(e) => json!({ "error": e.to_string() }),
        };
    }
    write_json(&summary, &dir.join("summary.json"))?;
    outputs.push("summary.json".into());
    outputs.push("manifest.json".into());

    let manifest = RunManifest {
        config: run.config,
        engine,
        grid: run.grid,
        solver: run.options,
        outputs,
        wall_time_s: start.elapsed().as_secs_f64(),
        crate_version: env!("CARGO_PKG_VERSION").into(),
    };
    write_json(&manifest, &dir.join("manifest.json"))?;
    println!("{}", dir.display());
    Ok(0)
}

fn compare_options(pair: &PulsePair, mask_frac: f64) -> CompareOptions {
    // middle of the storage window, when there is one
    let plateau_x = (pair.r > 0.0 && pair.x0 > 7.0).then(|| 0.5 * (2.0 + pair.x0 - 3.0));
    CompareOptions {
        mask_frac,
        plateau_x,
    }
}

pub fn cmd_predict(config_path: &Path, only_matched: bool) -> Result<i32> {
    let run = load(config_path, None)?;
    let value = if only_matched {
        json!({ "matched_R": matched_r(&run.pair, &run.medium)? })
    } else {
        serde_json::to_value(predict(&run.pair, &run.medium)?)?
    };
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(0)
}

pub fn cmd_verify(suite: Suite, config: Option<&Path>) -> Result<i32> {
    let case = match config {
        Some(path) => {
            let run = load(path, None)?;
            Some(Case {
                pair: run.pair,
                medium: run.medium,
                grid: run.grid,
                options: run.options,
            })
        }
        None => None,
    };
    let lines = run_suite(suite, case)?;
    for line in &lines {
        println!("{line}");
    }
    let failed = lines.iter().filter(|l| !l.passed).count();
    println!("{} checks, {failed} failed", lines.len());
    Ok(if failed == 0 { 0 } else { 1 })
}

pub fn cmd_compare(
    config_path: &Path,
    out: Option<&Path>,
    refine: Option<u32>,
    mask: f64,
) -> Result<i32> {
    let run = load(config_path, refine)?;
    let adiabatic = solve_adiabatic(&run.pair, &run.medium, &run.grid, profile_mode(&run.medium))?;
    let numeric = solve(&run.pair, &run.medium, &run.grid, &run.options)?;
    let report = compare(&adiabatic, &numeric, &compare_options(&run.pair, mask))?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        write_json(&report, &dir.join("comparison.json"))?;
    }
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(0)
}
