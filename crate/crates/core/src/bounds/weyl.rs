use std::f64::consts::PI;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::error::{Result, SpectraError};
use crate::geometry::unit_ball_volume;

/// W = 4 pi^2 / (omega_n vol)^{2/n}, the leading Weyl coefficient.
pub fn weyl_constant(n: usize, vol: f64) -> f64 {
    4.0 * PI * PI / (unit_ball_volume(n) * vol).powf(2.0 / n as f64)
}

/// Least-squares fit of log lambda_k against log k, with the mean-limit forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeylFit {
    pub n: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub exponent: f64,
    pub expected_exponent: f64,
    pub constant: f64,
    /// The Weyl coefficient W.
    pub target: f64,
    /// ((1/k) sum lambda_i) / k^{2/n} at k = k_max.
    pub mean_ratio: f64,
    /// n/(n+2) W.
    pub mean_target: f64,
    /// ((1/k) sum lambda_i^2) / k^{4/n} at k = k_max.
    pub square_mean_ratio: f64,
    /// n/(n+4) W^2.
    pub square_mean_target: f64,
}

impl WeylFit {
    pub fn constant_error(&self) -> f64 {
        (self.constant / self.target - 1.0).abs()
    }

    pub fn exponent_error(&self) -> f64 {
        (self.exponent / self.expected_exponent - 1.0).abs()
    }

    pub fn mean_error(&self) -> f64 {
        (self.mean_ratio / self.mean_target - 1.0).abs()
    }

    pub fn square_mean_error(&self) -> f64 {
        (self.square_mean_ratio / self.square_mean_target - 1.0).abs()
    }
}

/// Fits lambda_k ~ constant * k^exponent over `k_range` (1-based indices).
pub fn weyl_fit(spectrum: &Spectrum, vol: f64, k_range: RangeInclusive<usize>) -> Result<WeylFit> {
    let (k_min, k_max) = (*k_range.start(), *k_range.end());
    if k_min == 0 || k_max > spectrum.len() || k_max < k_min || k_max - k_min + 1 < 10 {
        return Err(SpectraError::Parameter(format!(
            "Weyl fit needs at least 10 indices within 1..={}, got {k_min}..={k_max}",
            spectrum.len()
        )));
    }
    if !(vol > 0.0) {
        return Err(SpectraError::Parameter(format!("volume must be positive, got {vol}")));
    }
    let v = spectrum.values();
    let n = spectrum.n();
    let nf = n as f64;
    let points: Vec<(f64, f64)> = k_range.map(|k| ((k as f64).ln(), v[k - 1].ln())).collect();
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let exponent = sxy / sxx;
    let constant = (my - exponent * mx).exp();

    let target = weyl_constant(n, vol);
    let kf = k_max as f64;
    let mean = v[..k_max].iter().sum::<f64>() / kf;
    let square_mean = v[..k_max].iter().map(|x| x * x).sum::<f64>() / kf;
    Ok(WeylFit {
        n,
        k_min,
        k_max,
        exponent,
        expected_exponent: 2.0 / nf,
        constant,
        target,
        mean_ratio: mean / kf.powf(2.0 / nf),
        mean_target: nf / (nf + 2.0) * target,
        square_mean_ratio: square_mean / kf.powf(4.0 / nf),
        square_mean_target: nf / (nf + 4.0) * target * target,
    })
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    #[test]
    fn weyl_constants() {
        assert_relative_eq!(weyl_constant(1, 1.0), PI * PI, max_relative = 1e-15);
        assert_relative_eq!(weyl_constant(2, 1.0), 4.0 * PI, max_relative = 1e-15);
    }

    #[test]
    fn interval_fit_is_exact() {
        let fit = weyl_fit(&Spectrum::unit_interval(200), 1.0, 1..=200).unwrap();
        assert_relative_eq!(fit.exponent, 2.0, max_relative = 1e-12);
        assert_relative_eq!(fit.constant, PI * PI, max_relative = 1e-12);
    }

    #[test]
    fn too_few_points() {
        let s = Spectrum::unit_interval(20);
        assert!(weyl_fit(&s, 1.0, 1..=9).is_err());
        assert!(weyl_fit(&s, 1.0, 1..=21).is_err());
        assert!(weyl_fit(&s, 1.0, 1..=10).is_ok());
    }

    #[test]
    fn square_fit_tracks_weyl_law() {
        let fit = weyl_fit(&Spectrum::unit_square(500), 1.0, 1..=500).unwrap();
        assert_relative_eq!(fit.target, 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(fit.mean_target, 2.0 * PI, max_relative = 1e-15);
        assert!(fit.exponent > 0.9 && fit.exponent < 1.0);
        assert!(fit.mean_ratio > fit.mean_target);
    }
}
