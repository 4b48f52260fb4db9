use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;

use cw_seed::builder::{
    boundary_residuals, default_initial_guess, default_section_count, repropagate, solve_scenario,
    solve_sections, SolverSettings, TrajectorySolution,
};
use cw_seed::frames::{state_to_elements, InertialState};
use cw_seed::Error;

use crate::config::{load_config, write_config, LoadedConfig};
use crate::error::CliError;
use crate::export::{
    export_control_history, export_seed, export_trajectory_samples, read_control_history, spans_from_rows,
    DEFAULT_CONTROL_SAMPLES, DEFAULT_SEED_STEPS_PER_REV,
};
use crate::validate::run_validation;

/// Environment variable capping the solver's worker threads.
pub const THREADS_ENV: &str = "CW_SEED_THREADS";

#[derive(Debug, Parser)]
#[command(name = "cw-seed", version, about = "Low-thrust initial-guess trajectories from chained relative-motion segments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a scenario and export its control history, samples and seed.
    Solve {
        config: PathBuf,
        /// Output directory [default: from the config, else `<config stem>-out`].
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Sequential sections for many-revolution transfers.
        #[arg(long)]
        sections: Option<usize>,
        #[arg(long)]
        seed_steps_per_rev: Option<usize>,
    },
    /// Re-propagate an exported control history through the two-body model.
    Propagate {
        config: PathBuf,
        #[arg(long)]
        controls: PathBuf,
        #[arg(long, default_value_t = 200)]
        steps_per_rev: usize,
    },
    /// Check the closed-form propagator against numeric integration.
    Validate {
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Runs the command line and returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Solve { config, out_dir, sections, seed_steps_per_rev } => {
            solve(&config, out_dir, sections, seed_steps_per_rev)
        }
        Command::Propagate { config, controls, steps_per_rev } => propagate(&config, &controls, steps_per_rev),
        Command::Validate { cases, steps, seed } => validate(cases, steps, seed),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("summary serializes"));
}

#[derive(Debug, Serialize)]
struct StateSummary {
    position_km: [f64; 3],
    velocity_km_s: [f64; 3],
    epoch_s: f64,
}

#[derive(Debug, Serialize)]
struct ElementsSummary {
    sma_km: f64,
    ecc: f64,
    inc_deg: f64,
    raan_deg: f64,
}

fn state_summary(s: &InertialState<f64>) -> StateSummary {
    StateSummary { position_km: s.pos, velocity_km_s: s.vel, epoch_s: s.epoch }
}

fn elements_summary(s: &InertialState<f64>, mu: f64) -> Option<ElementsSummary> {
    state_to_elements(s, mu).ok().map(|el| ElementsSummary {
        sma_km: el.sma,
        ecc: el.ecc,
        inc_deg: el.inc.to_degrees(),
        raan_deg: el.raan.to_degrees(),
    })
}

#[derive(Debug, Serialize)]
struct SolveSummary {
    scenario: &'static str,
    converged: bool,
    residual_norm: f64,
    iterations: usize,
    segments: usize,
    sections: usize,
    tof_s: f64,
    tof_days: f64,
    delta_v_km_s: f64,
    propellant_kg: f64,
    final_mass_kg: f64,
    revolutions: f64,
    continuity_error: f64,
    final_state: StateSummary,
    final_elements: Option<ElementsSummary>,
    files: Vec<&'static str>,
}

fn solver_settings(cfg: &LoadedConfig) -> Result<SolverSettings, CliError> {
    let mut s = SolverSettings::default();
    if let Some(tol) = cfg.solver.tol {
        s.lm.tol = tol;
    }
    if let Some(it) = cfg.solver.max_iterations {
        s.lm.max_iterations = it;
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let t: usize = v.trim().parse().ok().filter(|t| *t > 0).ok_or_else(|| CliError::Validation {
            key: THREADS_ENV.into(),
            message: format!("expected a positive integer, got {v:?}"),
        })?;
        s.threads = Some(t);
    }
    Ok(s)
}

fn solve(
    config: &Path,
    out_dir: Option<PathBuf>,
    sections: Option<usize>,
    seed_steps_per_rev: Option<usize>,
) -> Result<i32, CliError> {
    let cfg = load_config(config)?;
    let settings = solver_settings(&cfg)?;
    let sc = &cfg.scenario;
    let sections = sections.or(cfg.solver.sections).unwrap_or_else(|| default_section_count(sc));
    let seed_steps = seed_steps_per_rev.or(cfg.output.seed_steps_per_rev).unwrap_or(DEFAULT_SEED_STEPS_PER_REV);
    if sections == 0 || seed_steps == 0 {
        return Err(CliError::Validation {
            key: if sections == 0 { "--sections" } else { "--seed-steps-per-rev" }.into(),
            message: "must be at least 1".into(),
        });
    }
    let out_dir = out_dir
        .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| default_out_dir(config));

    log::info!(
        "solving {} scenario: {} segments, {} section(s)",
        sc.kind.name(),
        sc.segments,
        sections
    );
    let started = Instant::now();
    let outcome = if sections > 1 {
        solve_sections(sc, sections, &settings)
    } else {
        solve_scenario(sc, &default_initial_guess(sc), &settings)
    };
    let (solution, code) = match outcome {
        Ok(s) => (s, 0),
        Err(Error::NoConvergence(best)) => (*best, 1),
        Err(e) => return Err(e.into()),
    };
    log::info!("solver finished in {:.1} s", started.elapsed().as_secs_f64());
    if code != 0 {
        eprintln!(
            "warning: solver did not converge (residual norm {:.3e}); exporting the best point found",
            solution.residual_norm
        );
    }

    let samples = cfg.output.control_samples_per_segment.unwrap_or(DEFAULT_CONTROL_SAMPLES);
    let files = write_outputs(&cfg, &solution, &out_dir, samples, seed_steps)?;
    log::info!("wrote {} files to {}", files.len(), out_dir.display());
    print_json(&summary(&solution, sections, files));
    Ok(code)
}

fn default_out_dir(config: &Path) -> PathBuf {
    let stem = config.file_stem().map_or_else(|| "cw-seed".into(), |s| s.to_string_lossy().into_owned());
    PathBuf::from(format!("{stem}-out"))
}

fn write_outputs(
    cfg: &LoadedConfig,
    solution: &TrajectorySolution,
    dir: &Path,
    samples: usize,
    seed_steps: usize,
) -> Result<Vec<&'static str>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.display().to_string(), source })?;
    export_control_history(solution, samples, &dir.join("controls.csv"))?;
    export_trajectory_samples(solution, &dir.join("trajectory.csv"))?;
    export_seed(solution, seed_steps, &dir.join("seed.json"))?;
    write_config(cfg, dir.join("scenario.json"))?;
    Ok(vec!["controls.csv", "trajectory.csv", "seed.json", "scenario.json"])
}

fn summary(s: &TrajectorySolution, sections: usize, files: Vec<&'static str>) -> SolveSummary {
    let fin = s.final_state();
    let sc = &s.scenario;
    SolveSummary {
        scenario: sc.kind.name(),
        converged: s.converged,
        residual_norm: s.residual_norm,
        iterations: s.iterations,
        segments: s.params.len(),
        sections,
        tof_s: s.tof,
        tof_days: s.tof / cw_seed::SECONDS_PER_DAY,
        delta_v_km_s: s.delta_v,
        propellant_kg: s.propellant,
        final_mass_kg: sc.spacecraft.initial_mass() - s.propellant,
        revolutions: s.revolutions,
        continuity_error: s.continuity_error(),
        final_state: state_summary(&fin),
        final_elements: elements_summary(&fin, sc.mu),
        files,
    }
}

#[derive(Debug, Serialize)]
struct PropagateSummary {
    segments: usize,
    tof_s: f64,
    steps_per_rev: usize,
    final_state: StateSummary,
    final_elements: Option<ElementsSummary>,
    /// Boundary miss of the propagated arrival, in solver units.
    residual_norm: f64,
}

fn propagate(config: &Path, controls: &Path, steps_per_rev: usize) -> Result<i32, CliError> {
    let cfg = load_config(config)?;
    let sc = &cfg.scenario;
    let rows = read_control_history(controls)?;
    let spans = spans_from_rows(&rows)
        .map_err(|message| CliError::Controls { path: controls.display().to_string(), message })?;
    let fin = repropagate(&sc.start, sc.mu, &spans, steps_per_rev)?;
    let residuals = boundary_residuals(sc, &fin)?;
    print_json(&PropagateSummary {
        segments: spans.len(),
        tof_s: spans.iter().map(|s| s.dt).sum(),
        steps_per_rev,
        final_state: state_summary(&fin),
        final_elements: elements_summary(&fin, sc.mu),
        residual_norm: residuals.iter().map(|r| r * r).sum::<f64>().sqrt(),
    });
    Ok(0)
}

/// Closed-form against RK4 tolerance, scaled units.
pub const VALIDATION_TOL: f64 = 1e-8;
/// Zero-thrust closed form against the transition matrix.
pub const ZERO_THRUST_TOL: f64 = 1e-12;

fn validate(cases: usize, steps: usize, seed: u64) -> Result<i32, CliError> {
    if steps == 0 {
        return Err(CliError::Validation { key: "--steps".into(), message: "must be at least 1".into() });
    }
    let report = run_validation(cases, steps, seed);
    print_json(&report);
    Ok(if report.passed(VALIDATION_TOL, ZERO_THRUST_TOL) { 0 } else { 1 })
}
