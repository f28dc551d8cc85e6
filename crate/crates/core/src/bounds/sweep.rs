use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::recursion::c_hypothesis_holds;
use super::{check_corollary_trio, ReportStatus, Spectrum, SpectrumSource};
use crate::error::Result;

/// Outcome of the randomized corollary sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub sequences: usize,
    /// Evaluated (sequence, k) pairs.
    pub checks: usize,
    /// Pairs where the discriminant was negative.
    pub negative_discriminants: usize,
    pub counterexamples: Vec<String>,
}

/// Largest root of k x^2 - (2 + 4/n) S x + (1 + 4/n) Q.
fn upper_root(values: &[f64], n: f64) -> f64 {
    let k = values.len() as f64;
    let s: f64 = values.iter().sum();
    let q: f64 = values.iter().map(|v| v * v).sum();
    let b = (2.0 + 4.0 / n) * s;
    let disc = (b * b - 4.0 * k * (1.0 + 4.0 / n) * q).max(0.0);
    (b + disc.sqrt()) / (2.0 * k)
}

/// Draws random positive sequences satisfying the Yang-form inequality at
/// every k and evaluates the corollary trio on each.
pub fn property_sweep(sequences: usize, seed: u64) -> Result<SweepSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = SweepSummary {
        sequences: 0,
        checks: 0,
        negative_discriminants: 0,
        counterexamples: Vec::new(),
    };
    while summary.sequences < sequences {
        let n = rng.random_range(1..=4usize);
        let len = rng.random_range(3..=16usize);
        let nf = n as f64;
        let mut values = vec![rng.random_range(0.1..10.0)];
        while values.len() < len {
            let last = *values.last().unwrap();
            let top = upper_root(&values, nf).max(last);
            values.push(last + rng.random_range(0.0..1.0) * (top - last));
        }
        if !(1..len).all(|k| c_hypothesis_holds(&values, nf, 1.0, k, 0.0)) {
            continue;
        }
        summary.sequences += 1;
        let spectrum = Spectrum::new(values, n, SpectrumSource::Synthetic)?;
        for k in 1..len {
            summary.checks += 1;
            let trio = check_corollary_trio(&spectrum, k)?;
            if trio[1].status == ReportStatus::NotApplicable {
                summary.negative_discriminants += 1;
            }
            for r in trio.iter().filter(|r| r.is_violation()) {
                summary.counterexamples.push(format!("{r} on {:?}", spectrum.values()));
            }
        }
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_is_deterministic_and_clean() {
        let a = property_sweep(200, 7).unwrap();
        let b = property_sweep(200, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sequences, 200);
        assert!(a.counterexamples.is_empty(), "{:?}", a.counterexamples);
    }

    #[test]
    fn yang_form_sequences_have_nonnegative_discriminant() {
        let s = property_sweep(100, 11).unwrap();
        assert_eq!(s.negative_discriminants, 0);
    }
}
