//! Browser bindings: each export takes plain values and returns a JSON string.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use serde::Serialize;
use serde_json::{json, Value};
use spectra_core::bounds::{
    c_constant, check_cheng_yang_type, check_corollary_trio, check_polya_type, euclidean_comparators, lemma_c_bound,
    recursion_lemma, weyl_fit, BoundReport, Spectrum, SpectrumSource,
};
use spectra_core::report::{evaluate, Scenario};
use spectra_core::{Result, SpectraError};
use wasm_bindgen::prelude::*;

/// Largest mesh resolution accepted from the page for two-dimensional domains.
pub const MAX_WEB_RESOLUTION_2D: usize = 96;
/// Largest mesh resolution accepted from the page for intervals.
pub const MAX_WEB_RESOLUTION_1D: usize = 4000;

#[derive(Serialize)]
struct LevelSummary {
    resolution: usize,
    dofs: usize,
    h_max: f64,
    eigenvalues: Vec<f64>,
    residuals: Vec<f64>,
}

/// Runs a scenario given as TOML in memory and summarizes the results.
pub fn scenario_summary(toml_text: &str) -> Result<Value> {
    let scenario = Scenario::from_toml_str(toml_text)?;
    let limit = if scenario.build_chart()?.dim_n() == 1 {
        MAX_WEB_RESOLUTION_1D
    } else {
        MAX_WEB_RESOLUTION_2D
    };
    if let Some(&r) = scenario.mesh.resolutions.iter().find(|&&r| r > limit) {
        return Err(SpectraError::Config(format!(
            "resolution {r} exceeds the browser limit of {limit}"
        )));
    }
    let data = evaluate(&scenario, false)?;
    let levels: Vec<LevelSummary> = data
        .levels
        .iter()
        .map(|l| LevelSummary {
            resolution: l.resolution,
            dofs: l.dofs.num_dofs(),
            h_max: l.h_max(),
            eigenvalues: l.result.eigenvalues.clone(),
            residuals: l.result.residuals.clone(),
        })
        .collect();
    let violations = data.violations().count();
    Ok(json!({
        "name": scenario.name,
        "n": data.chart.dim_n(),
        "m": data.chart.dim_m(),
        "constants": data.constants,
        "upsilon_shift": data.constants.upsilon_shift(),
        "levels": levels,
        "convergence": data.convergence,
        "reports": data.reports,
        "violations": violations,
        "weyl": data.weyl,
    }))
}

/// Parses a list of eigenvalues separated by commas, whitespace or newlines.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| SpectraError::Parameter(format!("cannot parse '{s}' as a number")))
        })
        .collect()
}

/// Closed-form Dirichlet spectrum of a unit interval, or of the rectangle
/// [0, 1] x [0, aspect].
pub fn closed_form(domain: &str, aspect: f64, count: usize) -> Result<(Spectrum, f64)> {
    match domain {
        "interval" => Ok((Spectrum::unit_interval(count), 1.0)),
        "rectangle" if aspect > 0.0 => Ok((Spectrum::rectangle(1.0, aspect, count), aspect)),
        "rectangle" => Err(SpectraError::Parameter(format!(
            "aspect must be positive, got {aspect}"
        ))),
        other => Err(SpectraError::Parameter(format!("unknown domain '{other}'"))),
    }
}

/// Evaluates the spectrum-only inequalities at every k below the length of
/// the spectrum. The sequence is used as given, without a curvature shift.
pub fn spectrum_checks(spectrum: &Spectrum, vol: f64) -> Result<Value> {
    let mut reports: Vec<BoundReport> = Vec::new();
    for k in 1..spectrum.len() {
        reports.extend(check_corollary_trio(spectrum, k)?);
        reports.push(check_polya_type(spectrum, vol, k)?);
        reports.push(check_cheng_yang_type(spectrum, k)?);
        reports.push(recursion_lemma(spectrum, 1.0, k)?.2);
        for c in [1.0, 2.0] {
            reports.push(lemma_c_bound(spectrum, c, k)?);
        }
        reports.extend(euclidean_comparators(spectrum, k, Some(vol))?);
    }
    let weyl = if spectrum.len() >= 10 {
        match weyl_fit(spectrum, vol, 1..=spectrum.len()) {
            Ok(fit) => json!(fit),
            Err(e) => json!({ "skipped": e.to_string() }),
        }
    } else {
        json!({ "skipped": "at least 10 eigenvalues are needed for a fit" })
    };
    let violations = reports.iter().filter(|r| r.is_violation()).count();
    Ok(json!({
        "n": spectrum.n(),
        "vol": vol,
        "values": spectrum.values(),
        "reports": reports,
        "violations": violations,
        "weyl": weyl,
    }))
}

/// Checks a closed-form spectrum.
pub fn closed_form_checks(domain: &str, aspect: f64, count: usize) -> Result<Value> {
    let (spectrum, vol) = closed_form(domain, aspect, count)?;
    spectrum_checks(&spectrum, vol)
}

/// Checks a user-supplied ascending sequence of dimension n and volume vol.
pub fn sequence_checks(text: &str, n: usize, vol: f64) -> Result<Value> {
    let spectrum = Spectrum::new(parse_values(text)?, n, SpectrumSource::Synthetic)?;
    if spectrum.len() < 2 {
        return Err(SpectraError::Parameter("enter at least two values".into()));
    }
    if !(vol > 0.0) {
        return Err(SpectraError::Parameter(format!("volume must be positive, got {vol}")));
    }
    spectrum_checks(&spectrum, vol)
}

/// C(n, k, c) over k = 1..=k_max.
pub fn recursion_table(n: f64, c: f64, k_max: usize) -> Result<Value> {
    if !(n > 0.0 && c > 0.0) {
        return Err(SpectraError::Parameter(format!(
            "n and c must be positive, got n = {n}, c = {c}"
        )));
    }
    let rows: Vec<Value> = (1..=k_max)
        .map(|k| json!({ "k": k, "c_constant": c_constant(n, k, c) }))
        .collect();
    Ok(json!({ "n": n, "c": c, "rows": rows }))
}

fn to_js(result: Result<Value>) -> std::result::Result<String, JsValue> {
    result
        .map(|v| v.to_string())
        .map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Runs a TOML scenario and returns the summary as JSON.
#[wasm_bindgen(js_name = runScenario)]
pub fn run_scenario(toml_text: &str) -> std::result::Result<String, JsValue> {
    to_js(scenario_summary(toml_text))
}

/// Checks the closed-form spectrum of "interval" or "rectangle".
#[wasm_bindgen(js_name = checkClosedForm)]
pub fn check_closed_form(domain: &str, aspect: f64, count: usize) -> std::result::Result<String, JsValue> {
    to_js(closed_form_checks(domain, aspect, count))
}

/// Checks a typed sequence of eigenvalues.
#[wasm_bindgen(js_name = checkSequence)]
pub fn check_sequence(text: &str, n: usize, vol: f64) -> std::result::Result<String, JsValue> {
    to_js(sequence_checks(text, n, vol))
}

/// Tabulates the recursion constant.
#[wasm_bindgen(js_name = recursionTable)]
pub fn recursion_table_js(n: f64, c: f64, k_max: usize) -> std::result::Result<String, JsValue> {
    to_js(recursion_table(n, c, k_max))
}
