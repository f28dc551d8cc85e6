use serde::{Deserialize, Serialize};

use super::{yang_sums, BoundReport, ReportStatus, Spectrum};
use crate::error::{Result, SpectraError};

/// Running means of a sequence and the quantity F_k driving the recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionState {
    pub k: usize,
    /// Lambda_k, the mean of the first k terms.
    pub mean: f64,
    /// T_k, the mean of the squares of the first k terms.
    pub square_mean: f64,
    /// F_k = (1 + 2c/n) Lambda_k^2 - T_k.
    pub f: f64,
    /// C(n, k, c).
    pub c_constant: f64,
    pub c: f64,
}

impl RecursionState {
    pub fn new(values: &[f64], n: f64, c: f64, k: usize) -> Self {
        let kf = k as f64;
        let mean = values[..k].iter().sum::<f64>() / kf;
        let square_mean = values[..k].iter().map(|v| v * v).sum::<f64>() / kf;
        RecursionState {
            k,
            mean,
            square_mean,
            f: (1.0 + 2.0 * c / n) * mean * mean - square_mean,
            c_constant: c_constant(n, k, c),
            c,
        }
    }
}

/// C(n, k, c) = 1 - (c / 3n) (k/(k+1))^{4c/n} (1 + 2c/n)(1 + 4c/n) / (k+1)^3.
pub fn c_constant(n: f64, k: usize, c: f64) -> f64 {
    let kf = k as f64;
    let num = c * (1.0 + 2.0 * c / n) * (1.0 + 4.0 * c / n) * (kf / (kf + 1.0)).powf(4.0 * c / n);
    1.0 - num / (3.0 * n * (kf + 1.0).powi(3))
}

/// Whether sum (x_{k+1} - x_i)^2 <= (4c/n) sum (x_{k+1} - x_i) x_i holds at k.
pub fn c_hypothesis_holds(values: &[f64], n: f64, c: f64, k: usize, slack: f64) -> bool {
    let (sq, lin) = yang_sums(values, k);
    let rhs = 4.0 * c / n * lin;
    sq <= rhs + slack * rhs.abs()
}

fn check_sequence(seq: &Spectrum, c: f64, k: usize) -> Result<()> {
    if !(c > 0.0) {
        return Err(SpectraError::Parameter(format!("c must be positive, got {c}")));
    }
    seq.require(k)
}

/// F_{k+1} <= C(n,k,c) ((k+1)/k)^{4c/n} F_k for sequences satisfying the
/// c-hypothesis at k; reported not applicable otherwise.
pub fn recursion_lemma(seq: &Spectrum, c: f64, k: usize) -> Result<(RecursionState, RecursionState, BoundReport)> {
    check_sequence(seq, c, k)?;
    let n = seq.n() as f64;
    let v = seq.values();
    let now = RecursionState::new(v, n, c, k);
    let next = RecursionState::new(v, n, c, k + 1);
    let name = "recursion_lemma";
    if !c_hypothesis_holds(v, n, c, k, seq.slack()) {
        let report = BoundReport::not_evaluated(
            name,
            k,
            ReportStatus::NotApplicable,
            format!("c-hypothesis fails for c = {c}"),
        );
        return Ok((now, next, report));
    }
    let kf = k as f64;
    let factor = now.c_constant * ((kf + 1.0) / kf).powf(4.0 * c / n);
    let mut report = BoundReport::evaluated(name, k, next.f, factor * now.f, seq.slack())
        .with_inputs(format!("c={c};C={:.17e};F_k={:.17e}", now.c_constant, now.f));
    if !(now.c_constant > 0.0 && now.c_constant < 1.0) || !(now.f > 0.0) {
        report.holds = false;
        report.note = format!(
            "expected 0 < C < 1 and F_k > 0, got C = {} and F_k = {}",
            now.c_constant, now.f
        );
    }
    Ok((now, next, report))
}

/// x_{k+1} <= (1 + 4c/n) k^{2c/n} x_1, evaluated when the c-hypothesis holds
/// at every k' <= k.
pub fn lemma_c_bound(seq: &Spectrum, c: f64, k: usize) -> Result<BoundReport> {
    check_sequence(seq, c, k)?;
    let n = seq.n() as f64;
    let v = seq.values();
    let name = format!("lemma_c_bound_c{c}");
    if let Some(bad) = (1..=k).find(|&j| !c_hypothesis_holds(v, n, c, j, seq.slack())) {
        return Ok(BoundReport::not_evaluated(
            &name,
            k,
            ReportStatus::NotApplicable,
            format!("c-hypothesis fails at k = {bad} for c = {c}"),
        ));
    }
    let rhs = (1.0 + 4.0 * c / n) * (k as f64).powf(2.0 * c / n) * v[0];
    Ok(BoundReport::evaluated(&name, k, v[k], rhs, seq.slack()).with_inputs(format!("c={c}")))
}
