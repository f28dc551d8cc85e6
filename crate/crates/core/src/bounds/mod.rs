//! Eigenvalue inequalities evaluated on closed-form or computed spectra.

mod checks;
mod integrated;
mod recursion;
mod sweep;
mod weyl;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpectraError};
use crate::geometry::GeometricConstants;

pub use checks::{
    check_cheng_yang_type, check_corollary_trio, check_polya_type, check_thm_drift, check_thm_tensor,
    euclidean_comparators, intro_comparators, submanifold_comparators, TensorMode,
};
pub use integrated::{check_proposition_testfunction, EigenfunctionQuadrature};
pub use recursion::{c_constant, c_hypothesis_holds, lemma_c_bound, recursion_lemma, RecursionState};
pub use sweep::{property_sweep, SweepSummary};
pub use weyl::{weyl_constant, weyl_fit, WeylFit};

/// Relative slack for verdicts on closed-form and synthetic spectra.
pub const EXACT_SLACK: f64 = 1e-9;
/// Relative slack for verdicts on computed spectra.
pub const COMPUTED_SLACK: f64 = 1e-6;

/// Every check name accepted in scenario files.
pub const CHECK_NAMES: [&str; 9] = [
    "cheng_yang_type",
    "corollary_trio",
    "intro_comparators",
    "lemma_c_bound",
    "polya_type",
    "proposition_testfunction",
    "recursion_lemma",
    "thm_drift",
    "thm_tensor",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    Computed,
    ClosedForm,
    Synthetic,
}

/// Ascending positive eigenvalues of an n-dimensional problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
    n: usize,
    source: SpectrumSource,
}

impl Spectrum {
    pub fn new(values: Vec<f64>, n: usize, source: SpectrumSource) -> Result<Self> {
        if n == 0 {
            return Err(SpectraError::Parameter("spectrum dimension must be positive".into()));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(SpectraError::Parameter(format!(
                "spectrum entries must be positive, found {v}"
            )));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(SpectraError::Parameter("spectrum must be ascending".into()));
        }
        Ok(Spectrum { values, n, source })
    }

    /// Dirichlet spectrum of the unit interval, k^2 pi^2.
    pub fn unit_interval(count: usize) -> Self {
        let values = (1..=count).map(|k| (k * k) as f64 * PI * PI).collect();
        Spectrum {
            values,
            n: 1,
            source: SpectrumSource::ClosedForm,
        }
    }

    /// Dirichlet spectrum of the rectangle [0, a] x [0, b], lowest `count` values.
    pub fn rectangle(a: f64, b: f64, count: usize) -> Self {
        let mut values = Vec::new();
        let mut bound = 4.0 * PI * PI * (1.0 / (a * a) + 1.0 / (b * b));
        loop {
            values.clear();
            let pmax = (bound.sqrt() * a / PI).ceil() as usize + 1;
            let qmax = (bound.sqrt() * b / PI).ceil() as usize + 1;
            for p in 1..=pmax {
                for q in 1..=qmax {
                    let v = PI * PI * ((p * p) as f64 / (a * a) + (q * q) as f64 / (b * b));
                    if v <= bound {
                        values.push(v);
                    }
                }
            }
            if values.len() >= count {
                break;
            }
            bound *= 2.0;
        }
        values.sort_by(f64::total_cmp);
        values.truncate(count);
        Spectrum {
            values,
            n: 2,
            source: SpectrumSource::ClosedForm,
        }
    }

    /// Dirichlet spectrum of the unit square, pi^2 (p^2 + q^2).
    pub fn unit_square(count: usize) -> Self {
        Self::rectangle(1.0, 1.0, count)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    /// The relative slack used for verdicts on this spectrum.
    pub fn slack(&self) -> f64 {
        match self.source {
            SpectrumSource::Computed => COMPUTED_SLACK,
            _ => EXACT_SLACK,
        }
    }

    /// The first `count` entries.
    pub fn truncated(&self, count: usize) -> Self {
        Spectrum {
            values: self.values[..count.min(self.len())].to_vec(),
            ..self.clone()
        }
    }

    /// Adds a constant to every entry; fails if the result is not positive.
    pub fn shifted(&self, shift: f64) -> Result<Self> {
        let values: Vec<f64> = self.values.iter().map(|v| v + shift).collect();
        if let Some(first) = values.first() {
            if *first <= 0.0 {
                return Err(SpectraError::ShiftPositivity { value: *first });
            }
        }
        Ok(Spectrum { values, ..self.clone() })
    }

    /// Checks that lambda_{k+1} exists.
    fn require(&self, k: usize) -> Result<()> {
        if k == 0 || k + 1 > self.len() {
            return Err(SpectraError::Parameter(format!(
                "k = {k} needs 1 <= k and k + 1 <= {} eigenvalues",
                self.len()
            )));
        }
        Ok(())
    }
}

/// The shifted sequence lambda_i + (n^2 H_0^2 + eta_0^2 + 2 eta_bar_0) / 4.
pub fn upsilon_shift(spectrum: &Spectrum, constants: &GeometricConstants) -> Result<Spectrum> {
    spectrum.shifted(constants.upsilon_shift())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Evaluated,
    /// The hypothesis of the statement fails for the input.
    NotApplicable,
    /// The statement cannot be evaluated (ties, missing data).
    Skipped,
}

/// One inequality evaluated at one k, normalized to lhs <= rhs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub holds: bool,
    pub slack: f64,
    pub status: ReportStatus,
    pub note: String,
    /// Constants that entered the evaluation.
    pub inputs: String,
}

impl BoundReport {
    pub fn evaluated(name: &str, k: usize, lhs: f64, rhs: f64, slack: f64) -> Self {
        let ratio = if rhs != 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        BoundReport {
            name: name.to_string(),
            k,
            lhs,
            rhs,
            ratio,
            holds: lhs <= rhs + slack * rhs.abs(),
            slack,
            status: ReportStatus::Evaluated,
            note: String::new(),
            inputs: String::new(),
        }
    }

    /// A report that records values without a verdict.
    pub fn not_evaluated(name: &str, k: usize, status: ReportStatus, note: impl Into<String>) -> Self {
        BoundReport {
            name: name.to_string(),
            k,
            lhs: f64::NAN,
            rhs: f64::NAN,
            ratio: f64::NAN,
            holds: true,
            slack: 0.0,
            status,
            note: note.into(),
            inputs: String::new(),
        }
    }

    pub fn with_inputs(mut self, inputs: impl Into<String>) -> Self {
        self.inputs = inputs.into();
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn is_evaluated(&self) -> bool {
        self.status == ReportStatus::Evaluated
    }

    /// True for an evaluated report whose inequality fails.
    pub fn is_violation(&self) -> bool {
        self.is_evaluated() && !self.holds
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            ReportStatus::Evaluated => write!(
                f,
                "{} k={} lhs={:.6e} rhs={:.6e} ratio={:.6} {}",
                self.name,
                self.k,
                self.lhs,
                self.rhs,
                self.ratio,
                if self.holds { "holds" } else { "VIOLATED" }
            ),
            _ => write!(f, "{} k={} {:?}: {}", self.name, self.k, self.status, self.note),
        }
    }
}

/// Pairs (lambda_i, lambda_{k+1} - lambda_i) for i = 1..k.
fn gaps(values: &[f64], k: usize) -> impl Iterator<Item = (f64, f64)> + '_ {
    let top = values[k];
    values[..k].iter().map(move |&l| (l, top - l))
}

/// Sum of (x_{k+1} - x_i)^2 and of (x_{k+1} - x_i) x_i over i <= k.
fn yang_sums(values: &[f64], k: usize) -> (f64, f64) {
    gaps(values, k).fold((0.0, 0.0), |(sq, lin), (l, g)| (sq + g * g, lin + g * l))
}
