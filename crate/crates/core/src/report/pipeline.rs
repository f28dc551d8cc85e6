use std::thread;

use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use crate::assembly::{assemble, DofMap};
use crate::bounds::{
    check_cheng_yang_type, check_corollary_trio, check_polya_type, check_proposition_testfunction, check_thm_drift,
    check_thm_tensor, euclidean_comparators, lemma_c_bound, recursion_lemma, submanifold_comparators, upsilon_shift,
    weyl_fit, BoundReport, EigenfunctionQuadrature, ReportStatus, Spectrum, SpectrumSource, TensorMode, WeylFit,
};
use crate::eigensolve::{solve_sparse, LanczosOptions, SpectralResult};
use crate::error::{Result, SpectraError};
use crate::geometry::{compute_constants, Chart, GeometricConstants, ScalarField};
use crate::mesh::Mesh;

/// Eigenpairs computed on one mesh.
pub struct Level {
    pub resolution: usize,
    pub mesh: Mesh,
    pub dofs: DofMap,
    pub result: SpectralResult,
}

impl Level {
    pub fn h_max(&self) -> f64 {
        self.mesh.h_max()
    }
}

/// One row of the convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    /// 1-based eigenvalue index.
    pub index: usize,
    pub resolution: usize,
    pub h_max: f64,
    pub value: f64,
    /// Richardson limit from the three finest meshes.
    pub extrapolated: f64,
    /// Observed order from the three finest meshes.
    pub order: f64,
    pub target: Option<f64>,
}

impl ConvergenceRow {
    pub fn relative_error(&self) -> Option<f64> {
        self.target.map(|t| (self.value - t).abs() / t.abs())
    }
}

/// Result of a Weyl fit, or the reason it was not performed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeylOutcome {
    Fit(WeylFit),
    Skipped { skipped: String },
}

fn solve_level(scenario: &Scenario, chart: &Chart, resolution: usize) -> Result<Level> {
    let mesh = Mesh::build_structured(&chart.domain, resolution)?;
    let asm = assemble(chart, &mesh)?;
    let options = LanczosOptions {
        tolerance: scenario.eigen.tolerance,
        ..LanczosOptions::default()
    };
    let result = solve_sparse(&asm.a, &asm.b, scenario.eigen.k_max, scenario.eigen.shift, &options)?;
    Ok(Level {
        resolution,
        mesh,
        dofs: asm.dofs,
        result,
    })
}

/// Meshes, assembles and solves every resolution of the scenario, in
/// resolution order. With `parallel`, resolutions run on separate threads.
pub fn solve_levels(scenario: &Scenario, chart: &Chart, parallel: bool) -> Result<Vec<Level>> {
    let resolutions = &scenario.mesh.resolutions;
    if !parallel {
        return resolutions.iter().map(|&r| solve_level(scenario, chart, r)).collect();
    }
    thread::scope(|s| {
        let handles: Vec<_> = resolutions
            .iter()
            .map(|&r| s.spawn(move || solve_level(scenario, chart, r)))
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(SpectraError::Evaluation("solver thread panicked".into())))
            })
            .collect()
    })
}

/// Richardson extrapolation from three values on meshes with sizes h1 > h2 > h3.
pub fn richardson(values: [f64; 3], h: [f64; 3]) -> (f64, f64) {
    let ratio = (values[0] - values[1]) / (values[1] - values[2]);
    let r = h[1] / h[2];
    if !(ratio > 0.0) || !ratio.is_finite() || r <= 1.0 {
        return (f64::NAN, f64::NAN);
    }
    let order = ratio.ln() / (h[0] / h[1]).ln();
    let limit = values[2] + (values[2] - values[1]) / (r.powf(order) - 1.0);
    (limit, order)
}

/// Convergence rows for every eigenvalue index and resolution.
pub fn convergence_rows(scenario: &Scenario, levels: &[Level]) -> Vec<ConvergenceRow> {
    let k = scenario.eigen.k_max;
    let targets = scenario.targets.as_ref().map(|t| t.values(k)).unwrap_or_default();
    let mut rows = Vec::new();
    for i in 0..k {
        let (extrapolated, order) = if levels.len() >= 3 {
            let last = &levels[levels.len() - 3..];
            richardson(
                [
                    last[0].result.eigenvalues[i],
                    last[1].result.eigenvalues[i],
                    last[2].result.eigenvalues[i],
                ],
                [last[0].h_max(), last[1].h_max(), last[2].h_max()],
            )
        } else {
            (f64::NAN, f64::NAN)
        };
        for level in levels {
            rows.push(ConvergenceRow {
                index: i + 1,
                resolution: level.resolution,
                h_max: level.h_max(),
                value: level.result.eigenvalues[i],
                extrapolated,
                order,
                target: targets.get(i).copied(),
            });
        }
    }
    rows
}

fn push_all(out: &mut Vec<BoundReport>, reports: Result<Vec<BoundReport>>) -> Result<()> {
    out.extend(reports?);
    Ok(())
}

/// Every requested check at every k <= k_max - 1 on the given level.
pub fn evaluate_bounds(
    scenario: &Scenario,
    chart: &Chart,
    constants: &GeometricConstants,
    level: &Level,
) -> Result<Vec<BoundReport>> {
    let lambda = Spectrum::new(
        level.result.eigenvalues.clone(),
        chart.dim_n(),
        SpectrumSource::Computed,
    )?;
    let shifted = match upsilon_shift(&lambda, constants) {
        Ok(s) => Ok(s),
        Err(SpectraError::ShiftPositivity { value }) => Err(value),
        Err(e) => return Err(e),
    };
    let k_top = lambda.len() - 1;
    let needs_quadrature = scenario.wants("thm_tensor") || scenario.wants("proposition_testfunction");
    let quadrature = if needs_quadrature {
        Some(EigenfunctionQuadrature::new(
            chart,
            &level.mesh,
            &level.dofs,
            &level.result,
        )?)
    } else {
        None
    };
    let mut out = Vec::new();
    for k in 1..=k_top {
        if scenario.wants("thm_drift") {
            out.push(check_thm_drift(&lambda, constants, k)?);
        }
        if scenario.wants("thm_tensor") {
            out.push(check_thm_tensor(&lambda, constants, k, TensorMode::InfTrace, None)?);
            out.push(check_thm_tensor(
                &lambda,
                constants,
                k,
                TensorMode::Integrated,
                quadrature.as_ref(),
            )?);
        }
        match &shifted {
            Ok(v) => {
                if scenario.wants("corollary_trio") {
                    out.extend(check_corollary_trio(v, k)?);
                }
                if scenario.wants("polya_type") {
                    out.push(check_polya_type(v, constants.vol_omega, k)?);
                }
                if scenario.wants("cheng_yang_type") {
                    out.push(check_cheng_yang_type(v, k)?);
                }
                if scenario.wants("recursion_lemma") {
                    out.push(recursion_lemma(v, 1.0, k)?.2);
                }
                if scenario.wants("lemma_c_bound") {
                    for &c in &scenario.checks.c_values {
                        out.push(lemma_c_bound(v, c, k)?);
                    }
                }
                if scenario.wants("intro_comparators") {
                    push_all(&mut out, euclidean_comparators(v, k, Some(constants.vol_omega)))?;
                }
            }
            Err(value) => {
                let note = format!("shifted eigenvalue {value} is not positive");
                for name in [
                    "corollary_trio",
                    "polya_type",
                    "cheng_yang_type",
                    "recursion_lemma",
                    "lemma_c_bound",
                ] {
                    if scenario.wants(name) {
                        out.push(BoundReport::not_evaluated(
                            name,
                            k,
                            ReportStatus::NotApplicable,
                            note.clone(),
                        ));
                    }
                }
            }
        }
        if scenario.wants("intro_comparators") {
            push_all(&mut out, submanifold_comparators(&lambda, k, constants))?;
        }
        if let (true, Some(q)) = (scenario.wants("proposition_testfunction"), quadrature.as_ref()) {
            for l in 0..chart.dim_m() {
                out.push(check_proposition_testfunction(q, &ScalarField::Ambient(l), k)?);
            }
        }
    }
    Ok(out)
}

/// Weyl fit of the computed spectrum over all indices.
pub fn weyl_outcome(level: &Level, n: usize, vol: f64) -> WeylOutcome {
    let values = &level.result.eigenvalues;
    let fit =
        Spectrum::new(values.clone(), n, SpectrumSource::Computed).and_then(|s| weyl_fit(&s, vol, 1..=values.len()));
    match fit {
        Ok(f) => WeylOutcome::Fit(f),
        Err(e) => WeylOutcome::Skipped { skipped: e.to_string() },
    }
}

/// Everything a scenario run produces, before it is written to disk.
pub struct RunData {
    pub chart: Chart,
    pub levels: Vec<Level>,
    pub constants: GeometricConstants,
    pub reports: Vec<BoundReport>,
    pub convergence: Vec<ConvergenceRow>,
    pub weyl: WeylOutcome,
}

impl RunData {
    pub fn finest(&self) -> &Level {
        self.levels.last().expect("scenario has at least one resolution")
    }

    pub fn violations(&self) -> impl Iterator<Item = &BoundReport> {
        self.reports.iter().filter(|r| r.is_violation())
    }
}

/// Runs the whole pipeline in memory.
pub fn evaluate(scenario: &Scenario, parallel: bool) -> Result<RunData> {
    let chart = scenario.build_chart()?;
    let levels = solve_levels(scenario, &chart, parallel)?;
    let constants = compute_constants(&chart, scenario.constants.resolution)?;
    let finest = levels.last().expect("validated scenario has resolutions");
    let reports = evaluate_bounds(scenario, &chart, &constants, finest)?;
    let convergence = convergence_rows(scenario, &levels);
    let weyl = weyl_outcome(finest, chart.dim_n(), constants.vol_omega);
    Ok(RunData {
        chart,
        levels,
        constants,
        reports,
        convergence,
        weyl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_recovers_quadratic_error() {
        let f = |h: f64| 3.0 + 0.7 * h * h;
        let (limit, order) = richardson([f(0.4), f(0.2), f(0.1)], [0.4, 0.2, 0.1]);
        assert!((limit - 3.0).abs() < 1e-12);
        assert!((order - 2.0).abs() < 1e-10);
        let (limit, _) = richardson([1.0, 1.0, 1.0], [0.4, 0.2, 0.1]);
        assert!(limit.is_nan());
    }
}
