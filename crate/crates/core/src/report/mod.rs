//! Scenario files, the end-to-end pipeline and its report files.

mod catalog;
mod output;
mod pipeline;
mod scenario;

use std::path::{Path, PathBuf};

pub use catalog::list_catalog;
pub use output::{fmt_float, OutputDir};
pub use pipeline::{
    convergence_rows, evaluate, evaluate_bounds, richardson, solve_levels, weyl_outcome, ConvergenceRow, Level,
    RunData, WeylOutcome,
};
pub use scenario::{
    ChecksSpec, ConstantsSpec, EigenSpec, EtaSpec, MeshSpec, OutputSpec, Scenario, TargetSpec, TensorSpec,
};

use crate::bounds::BoundReport;
use crate::error::{Result, SpectraError};
use crate::geometry::compute_constants;

/// Environment variable overriding the output root.
pub const OUTPUT_ENV: &str = "SPECTRA_OUT";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Solve the mesh resolutions concurrently.
    pub parallel: bool,
    /// Output root; results go to `<root>/<scenario name>`.
    pub out_root: Option<PathBuf>,
}

impl RunOptions {
    /// Options with the output root taken from `SPECTRA_OUT` when set.
    pub fn from_env(parallel: bool) -> Self {
        RunOptions {
            parallel,
            out_root: std::env::var_os(OUTPUT_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from),
        }
    }
}

/// Outcome of a completed run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub name: String,
    pub out_dir: PathBuf,
    pub evaluated: usize,
    pub not_evaluated: usize,
    pub violations: Vec<BoundReport>,
}

impl RunSummary {
    /// 0 when no evaluated inequality fails, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            1
        }
    }
}

fn finish<T>(out: &OutputDir, name: &str, result: Result<T>) -> Result<T> {
    match result {
        Ok(v) => {
            out.manifest(name, None)?;
            Ok(v)
        }
        Err(e) => {
            let _ = out.manifest(name, Some(&e));
            Err(e)
        }
    }
}

/// Runs a scenario and writes every report file. On a module error the
/// files written so far are kept and MANIFEST records the failure.
pub fn run(scenario: &Scenario, options: &RunOptions) -> Result<RunSummary> {
    let mut out = OutputDir::create(scenario.output_dir(options.out_root.as_deref()))?;
    let result = run_into(scenario, options, &mut out);
    finish(&out, &scenario.name, result)
}

fn run_into(scenario: &Scenario, options: &RunOptions, out: &mut OutputDir) -> Result<RunSummary> {
    let chart = scenario.build_chart()?;
    let levels = solve_levels(scenario, &chart, options.parallel)?;
    out.eigenvalues(&levels)?;
    out.convergence(&convergence_rows(scenario, &levels))?;
    let constants = compute_constants(&chart, scenario.constants.resolution)?;
    out.constants(scenario, &chart, &constants)?;
    let finest = levels
        .last()
        .ok_or_else(|| SpectraError::Config("no resolutions".into()))?;
    let reports = evaluate_bounds(scenario, &chart, &constants, finest)?;
    out.bounds(&reports)?;
    out.weyl(&weyl_outcome(finest, chart.dim_n(), constants.vol_omega))?;
    let evaluated = reports.iter().filter(|r| r.is_evaluated()).count();
    Ok(RunSummary {
        name: scenario.name.clone(),
        out_dir: out.path.clone(),
        evaluated,
        not_evaluated: reports.len() - evaluated,
        violations: reports.into_iter().filter(|r| r.is_violation()).collect(),
    })
}

/// Solves every resolution and writes eigenvalues.csv and convergence.csv.
pub fn run_convergence(scenario: &Scenario, options: &RunOptions) -> Result<(PathBuf, Vec<ConvergenceRow>)> {
    let mut out = OutputDir::create(scenario.output_dir(options.out_root.as_deref()))?;
    let result = (|| {
        let chart = scenario.build_chart()?;
        let levels = solve_levels(scenario, &chart, options.parallel)?;
        out.eigenvalues(&levels)?;
        let rows = convergence_rows(scenario, &levels);
        out.convergence(&rows)?;
        Ok(rows)
    })();
    let rows = finish(&out, &scenario.name, result)?;
    Ok((out.path.clone(), rows))
}

/// Loads a scenario file.
pub fn load(path: &Path) -> Result<Scenario> {
    Scenario::from_file(path)
}
