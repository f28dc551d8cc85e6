use serde::{Deserialize, Serialize};

use super::integrated::EigenfunctionQuadrature;
use super::weyl::weyl_constant;
use super::{gaps, yang_sums, BoundReport, ReportStatus, Spectrum};
use crate::error::{Result, SpectraError};
use crate::geometry::GeometricConstants;

/// How the trace of T enters the tensor theorem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TensorMode {
    /// tr T replaced by its infimum, constants as suprema.
    InfTrace,
    /// Integrals over computed eigenfunctions.
    Integrated,
}

/// Drifting-Laplacian universal inequality with the curvature and drift shift.
pub fn check_thm_drift(spectrum: &Spectrum, constants: &GeometricConstants, k: usize) -> Result<BoundReport> {
    spectrum.require(k)?;
    let n = spectrum.n() as f64;
    let shift = constants.upsilon_shift();
    let (lhs, _) = yang_sums(spectrum.values(), k);
    let rhs = 4.0 / n * gaps(spectrum.values(), k).map(|(l, g)| g * (l + shift)).sum::<f64>();
    Ok(
        BoundReport::evaluated("thm_drift", k, lhs, rhs, spectrum.slack()).with_inputs(format!(
            "h_0={:e};eta_0={:e};eta_bar_0={:e}",
            constants.h_0, constants.eta_0, constants.eta_bar_0
        )),
    )
}

/// Inequality for div_eta(T grad u) on an immersed domain.
pub fn check_thm_tensor(
    spectrum: &Spectrum,
    constants: &GeometricConstants,
    k: usize,
    mode: TensorMode,
    quadrature: Option<&EigenfunctionQuadrature>,
) -> Result<BoundReport> {
    spectrum.require(k)?;
    match mode {
        TensorMode::InfTrace => Ok(thm_tensor_inf_trace(spectrum, constants, k)),
        TensorMode::Integrated => {
            let q = quadrature.ok_or_else(|| {
                SpectraError::Parameter("integrated tensor check needs eigenfunctions and a mesh".into())
            })?;
            q.thm_tensor_integrated(k, spectrum.slack())
        }
    }
}

fn thm_tensor_inf_trace(spectrum: &Spectrum, c: &GeometricConstants, k: usize) -> BoundReport {
    let codim = (c.m - c.n) as f64;
    let drift = c.t_0 + c.t_star * c.eta_0;
    let fixed = codim * codim * c.a_0 * c.a_0 * c.t_star * c.t_star + drift * drift;
    let (sq, _) = yang_sums(spectrum.values(), k);
    let lhs = c.tr_t_inf * sq;
    let rhs = gaps(spectrum.values(), k)
        .map(|(l, g)| g * (fixed + 4.0 * drift * l.sqrt() + 4.0 * l))
        .sum();
    BoundReport::evaluated("thm_tensor_inf_trace", k, lhs, rhs, spectrum.slack()).with_inputs(format!(
        "tr_t_inf={:e};a_0={:e};t_star={:e};t_0={:e};eta_0={:e}",
        c.tr_t_inf, c.a_0, c.t_star, c.t_0, c.eta_0
    ))
}

/// The three consequences of the Yang-form inequality for a shifted sequence:
/// the second-Yang bound, the quadratic-root bound and the gap bound.
pub fn check_corollary_trio(shifted: &Spectrum, k: usize) -> Result<[BoundReport; 3]> {
    shifted.require(k)?;
    let v = shifted.values();
    let n = shifted.n() as f64;
    let kf = k as f64;
    let sum: f64 = v[..k].iter().sum();
    let mean = sum / kf;
    let spread: f64 = v[..k].iter().map(|x| (x - mean).powi(2)).sum();
    let disc = (2.0 / (kf * n) * sum).powi(2) - (1.0 + 4.0 / n) / kf * spread;
    let slack = shifted.slack();
    let first = BoundReport::evaluated("corollary_yang2", k, v[k], (1.0 + 4.0 / n) * sum / kf, slack);
    if disc < 0.0 {
        let (sq, lin) = yang_sums(v, k);
        let note = if sq <= (4.0 / n) * lin * (1.0 + slack) {
            format!("negative discriminant {disc:e} on a sequence satisfying the Yang form: numerical inconsistency")
        } else {
            format!("negative discriminant {disc:e}: the Yang-form hypothesis fails")
        };
        return Ok([
            first,
            BoundReport::not_evaluated("corollary_root", k, ReportStatus::NotApplicable, note.clone()),
            BoundReport::not_evaluated("corollary_gap", k, ReportStatus::NotApplicable, note),
        ]);
    }
    let root = disc.sqrt();
    let inputs = format!("discriminant={disc:e}");
    Ok([
        first,
        BoundReport::evaluated("corollary_root", k, v[k], (1.0 + 2.0 / n) * mean + root, slack)
            .with_inputs(inputs.clone()),
        BoundReport::evaluated("corollary_gap", k, v[k] - v[k - 1], 2.0 * root, slack).with_inputs(inputs),
    ])
}

/// Lower bound on the mean of the first k shifted eigenvalues.
pub fn check_polya_type(shifted: &Spectrum, vol: f64, k: usize) -> Result<BoundReport> {
    if !(vol > 0.0) {
        return Err(SpectraError::Parameter(format!("volume must be positive, got {vol}")));
    }
    if k == 0 || k > shifted.len() {
        return Err(SpectraError::Parameter(format!("k = {k} out of range")));
    }
    let n = shifted.n() as f64;
    let mean = shifted.values()[..k].iter().sum::<f64>() / k as f64;
    let bound = n / ((n + 2.0) * (n + 4.0)).sqrt() * weyl_constant(shifted.n(), vol) * (k as f64).powf(2.0 / n);
    Ok(BoundReport::evaluated("polya_type", k, bound, mean, shifted.slack()).with_inputs(format!("vol={vol:e}")))
}

/// upsilon_{k+1} <= (1 + 4/n) k^{2/n} upsilon_1.
pub fn check_cheng_yang_type(shifted: &Spectrum, k: usize) -> Result<BoundReport> {
    shifted.require(k)?;
    let n = shifted.n() as f64;
    let v = shifted.values();
    let rhs = (1.0 + 4.0 / n) * (k as f64).powf(2.0 / n) * v[0];
    Ok(BoundReport::evaluated("cheng_yang_type", k, v[k], rhs, shifted.slack()))
}

/// Classical inequalities that hold for Euclidean Dirichlet spectra: PPW,
/// Hile-Protter, both Yang inequalities, the gap bound and Li-Yau.
pub fn euclidean_comparators(spectrum: &Spectrum, k: usize, vol: Option<f64>) -> Result<Vec<BoundReport>> {
    spectrum.require(k)?;
    let v = spectrum.values();
    let n = spectrum.n() as f64;
    let kf = k as f64;
    let slack = spectrum.slack();
    let sum: f64 = v[..k].iter().sum();
    let mean = sum / kf;
    let (sq, lin) = yang_sums(v, k);
    let mut out = Vec::with_capacity(7);

    out.push(BoundReport::evaluated(
        "ppw",
        k,
        v[k] - v[k - 1],
        4.0 / (n * kf) * sum,
        slack,
    ));
    if v[k] > v[k - 1] {
        let hp: f64 = gaps(v, k).map(|(l, g)| l / g).sum();
        out.push(BoundReport::evaluated("hile_protter", k, n * kf / 4.0, hp, slack));
    } else {
        out.push(BoundReport::not_evaluated(
            "hile_protter",
            k,
            ReportStatus::Skipped,
            "eigenvalue tie in the denominator",
        ));
    }
    out.push(BoundReport::evaluated("yang_1", k, sq, 4.0 / n * lin, slack));
    out.push(BoundReport::evaluated("yang_2", k, v[k], (1.0 + 4.0 / n) * mean, slack));
    let spread: f64 = v[..k].iter().map(|x| (x - mean).powi(2)).sum::<f64>() / kf;
    let disc = (2.0 / n * mean).powi(2) - (1.0 + 4.0 / n) * spread;
    if disc >= 0.0 {
        out.push(BoundReport::evaluated(
            "gap_bound",
            k,
            v[k] - v[k - 1],
            2.0 * disc.sqrt(),
            slack,
        ));
    } else {
        out.push(BoundReport::not_evaluated(
            "gap_bound",
            k,
            ReportStatus::NotApplicable,
            format!("negative discriminant {disc:e}"),
        ));
    }
    match vol {
        Some(vol) if vol > 0.0 => {
            let bound = n / (n + 2.0) * weyl_constant(spectrum.n(), vol) * kf.powf(2.0 / n);
            out.push(BoundReport::evaluated("li_yau", k, bound, mean, slack).with_inputs(format!("vol={vol:e}")));
        }
        _ => out.push(BoundReport::not_evaluated(
            "li_yau",
            k,
            ReportStatus::Skipped,
            "volume not supplied",
        )),
    }
    Ok(out)
}

/// Inequalities for submanifolds (Chen-Cheng) and for the drifting
/// Laplacian (Xia-Xu), which carry H_0 and eta_0.
pub fn submanifold_comparators(
    spectrum: &Spectrum,
    k: usize,
    constants: &GeometricConstants,
) -> Result<Vec<BoundReport>> {
    spectrum.require(k)?;
    let v = spectrum.values();
    let n = spectrum.n() as f64;
    let kf = k as f64;
    let slack = spectrum.slack();
    let curv = n * n * constants.h_0 * constants.h_0;
    let eta = constants.eta_0;
    let inputs = format!("h_0={:e};eta_0={:e}", constants.h_0, eta);
    let (sq, _) = yang_sums(v, k);
    let mut out = Vec::with_capacity(3);
    if eta == 0.0 {
        let rhs = 4.0 / n * gaps(v, k).map(|(l, g)| g * (l + curv / 4.0)).sum::<f64>();
        out.push(BoundReport::evaluated("chen_cheng_1", k, sq, rhs, slack).with_inputs(inputs.clone()));
        let mean = v[..k].iter().map(|l| l + curv / 4.0).sum::<f64>() / kf;
        out.push(
            BoundReport::evaluated("chen_cheng_2", k, v[k] + curv / 4.0, (1.0 + 4.0 / n) * mean, slack)
                .with_inputs(inputs.clone()),
        );
    } else {
        for name in ["chen_cheng_1", "chen_cheng_2"] {
            out.push(BoundReport::not_evaluated(
                name,
                k,
                ReportStatus::NotApplicable,
                "stated for the Laplacian without drift",
            ));
        }
    }
    let rhs = 1.0 / n
        * gaps(v, k)
            .map(|(l, g)| g * (4.0 * l + 4.0 * eta * l.sqrt() + curv + eta * eta))
            .sum::<f64>();
    out.push(BoundReport::evaluated("xia_xu", k, sq, rhs, slack).with_inputs(inputs));
    Ok(out)
}

/// All comparators evaluated on the supplied spectrum.
pub fn intro_comparators(
    spectrum: &Spectrum,
    k: usize,
    constants: Option<&GeometricConstants>,
) -> Result<Vec<BoundReport>> {
    let mut out = euclidean_comparators(spectrum, k, constants.map(|c| c.vol_omega))?;
    if let Some(c) = constants {
        out.extend(submanifold_comparators(spectrum, k, c)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_relative_eq;

    use super::super::SpectrumSource;
    use super::*;

    fn flat_square() -> GeometricConstants {
        let mut c = GeometricConstants::zero(2, 2, 1.0);
        c.t_star = 2f64.sqrt();
        c.tr_t_inf = 2.0;
        c.tr_t_sup = 2.0;
        c
    }

    fn find<'a>(reports: &'a [BoundReport], name: &str) -> &'a BoundReport {
        reports.iter().find(|r| r.name == name).unwrap()
    }

    #[test]
    fn thm_drift_on_square() {
        let s = Spectrum::unit_square(4);
        let r = check_thm_drift(&s, &flat_square(), 3).unwrap();
        assert_relative_eq!(r.lhs, 54.0 * PI.powi(4), max_relative = 1e-14);
        assert_relative_eq!(r.rhs, 84.0 * PI.powi(4), max_relative = 1e-14);
        assert!(r.holds);
    }

    #[test]
    fn degenerate_gap_holds() {
        let s = Spectrum::new(vec![3.0; 6], 2, SpectrumSource::Synthetic).unwrap();
        let c = flat_square();
        for k in 1..5 {
            assert_eq!(check_thm_drift(&s, &c, k).unwrap().lhs, 0.0);
            assert!(check_thm_drift(&s, &c, k).unwrap().holds);
            assert!(check_thm_tensor(&s, &c, k, TensorMode::InfTrace, None).unwrap().holds);
            assert!(check_corollary_trio(&s, k).unwrap().iter().all(|r| r.holds));
            assert!(check_cheng_yang_type(&s, k).unwrap().holds);
            let reports = intro_comparators(&s, k, Some(&c)).unwrap();
            assert!(reports.iter().filter(|r| r.name != "li_yau").all(|r| r.holds));
            assert_eq!(find(&reports, "hile_protter").status, ReportStatus::Skipped);
            for name in ["ppw", "yang_1", "gap_bound", "chen_cheng_1", "xia_xu"] {
                assert_eq!(find(&reports, name).lhs, 0.0, "{name}");
            }
        }
    }

    #[test]
    fn k_out_of_range() {
        let s = Spectrum::unit_square(4);
        assert!(check_thm_drift(&s, &flat_square(), 4).is_err());
        assert!(check_thm_drift(&s, &flat_square(), 0).is_err());
    }

    #[test]
    fn drift_theorem_equals_yang_form_on_shifted_spectrum() {
        let lambda: Vec<f64> = (1..=12).map(|k| 1.0 + (k * k) as f64 * PI * PI).collect();
        let s = Spectrum::new(lambda, 1, SpectrumSource::ClosedForm).unwrap();
        let mut c = GeometricConstants::zero(1, 1, 1.0);
        c.eta_0 = 2.0;
        c.eta_bar_0 = -4.0;
        let u = super::super::upsilon_shift(&s, &c).unwrap();
        for k in 1..12 {
            let drift = check_thm_drift(&s, &c, k).unwrap();
            let yang = find(&euclidean_comparators(&u, k, None).unwrap(), "yang_1").clone();
            assert_relative_eq!(drift.lhs, yang.lhs, max_relative = 1e-12);
            assert_relative_eq!(drift.rhs, yang.rhs, max_relative = 1e-12);
            assert_eq!(drift.holds, yang.holds);
        }
    }

    #[test]
    fn tensor_theorem_reduces_to_yang_on_flat_square() {
        let s = Spectrum::unit_square(11);
        let c = flat_square();
        for k in 1..=10 {
            let r = check_thm_tensor(&s, &c, k, TensorMode::InfTrace, None).unwrap();
            let (sq, lin) = yang_sums(s.values(), k);
            assert_relative_eq!(r.lhs, 2.0 * sq, max_relative = 1e-14);
            assert_relative_eq!(r.rhs, 4.0 * lin, max_relative = 1e-14);
            assert!(r.holds);
        }
    }

    fn diagonal_tensor_square(t: [f64; 2]) -> (Spectrum, GeometricConstants) {
        // div(T grad u) on the unit square is the Laplacian on [0, 1/sqrt(t1)] x [0, 1/sqrt(t2)]
        let s = Spectrum::rectangle(1.0 / t[0].sqrt(), 1.0 / t[1].sqrt(), 12);
        let mut c = GeometricConstants::zero(2, 2, 1.0);
        c.t_star = (t[0] * t[0] + t[1] * t[1]).sqrt();
        c.tr_t_inf = t[0] + t[1];
        c.tr_t_sup = t[0] + t[1];
        (s, c)
    }

    #[test]
    fn inf_trace_form_undercounts_tensors_above_the_metric() {
        let (s, c) = diagonal_tensor_square([1.0, 2.0]);
        let r = check_thm_tensor(&s, &c, 5, TensorMode::InfTrace, None).unwrap();
        assert!(!r.holds && r.ratio > 1.08 && r.ratio < 1.09, "{r}");
        let (s, c) = diagonal_tensor_square([1.0, 0.5]);
        for k in 1..12 {
            assert!(check_thm_tensor(&s, &c, k, TensorMode::InfTrace, None).unwrap().holds);
        }
    }

    #[test]
    fn integrated_mode_needs_quadrature() {
        let s = Spectrum::unit_square(4);
        assert!(check_thm_tensor(&s, &flat_square(), 2, TensorMode::Integrated, None).is_err());
    }

    #[test]
    fn corollaries_on_interval_and_square() {
        let s = Spectrum::unit_interval(4);
        let [first, _, _] = check_corollary_trio(&s, 1).unwrap();
        assert_relative_eq!(first.lhs, 4.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(first.rhs, 5.0 * PI * PI, max_relative = 1e-15);
        assert!(first.holds);
        let sq = Spectrum::unit_square(6);
        assert!(check_corollary_trio(&sq, 5)
            .unwrap()
            .iter()
            .all(|r| r.holds && r.is_evaluated()));
    }

    #[test]
    fn polya_type_values() {
        let s = Spectrum::unit_square(120);
        let r = check_polya_type(&s, 1.0, 1).unwrap();
        assert_relative_eq!(r.lhs, 2.0 / 24f64.sqrt() * 4.0 * PI, max_relative = 1e-14);
        assert!((r.lhs - 5.1302).abs() < 1e-4 && r.holds);
        assert!(check_polya_type(&s, 1.0, 100).unwrap().holds);
        let r = check_polya_type(&Spectrum::unit_interval(2), 1.0, 1).unwrap();
        assert_relative_eq!(r.lhs, PI * PI / 15f64.sqrt(), max_relative = 1e-14);
        assert!(r.holds);
        assert!(check_polya_type(&s, 0.0, 1).is_err());
    }

    #[test]
    fn cheng_yang_type_values() {
        let r = check_cheng_yang_type(&Spectrum::unit_interval(2), 1).unwrap();
        assert_relative_eq!(r.lhs, 4.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(r.rhs, 5.0 * PI * PI, max_relative = 1e-15);
        // lambda_25 of the square is 40 pi^2 (p^2 + q^2 = 40 is the 25th value)
        let r = check_cheng_yang_type(&Spectrum::unit_square(25), 24).unwrap();
        assert_relative_eq!(r.lhs, 40.0 * PI * PI, max_relative = 1e-14);
        assert_relative_eq!(r.rhs, 144.0 * PI * PI, max_relative = 1e-14);
        assert!(r.holds);
    }

    #[test]
    fn comparator_values() {
        let r = euclidean_comparators(&Spectrum::unit_square(4), 3, Some(1.0)).unwrap();
        let y = find(&r, "yang_1");
        assert_relative_eq!(y.ratio, 54.0 / 84.0, max_relative = 1e-14);
        assert!(r.iter().all(|r| r.holds));
        let r = euclidean_comparators(&Spectrum::unit_interval(2), 1, Some(1.0)).unwrap();
        let ppw = find(&r, "ppw");
        assert_relative_eq!(ppw.lhs, 3.0 * PI * PI, max_relative = 1e-15);
        assert_relative_eq!(ppw.rhs, 4.0 * PI * PI, max_relative = 1e-15);
        assert!(ppw.holds);
    }

    #[test]
    fn comparators_hold_on_closed_form_spectra() {
        let sq = Spectrum::unit_square(60);
        let c = flat_square();
        for k in 1..59 {
            for r in intro_comparators(&sq, k, Some(&c)).unwrap() {
                assert!(r.holds, "{r}");
            }
        }
        let iv = Spectrum::unit_interval(30);
        for k in 1..29 {
            for r in euclidean_comparators(&iv, k, Some(1.0)).unwrap() {
                assert!(r.holds, "{r}");
            }
        }
    }

    #[test]
    fn yang_bound_fails_on_a_crafted_sequence() {
        let s = Spectrum::new(vec![1.0, 100.0], 2, SpectrumSource::Synthetic).unwrap();
        let r = euclidean_comparators(&s, 1, None).unwrap();
        assert!(find(&r, "yang_1").is_violation());
        assert_eq!(find(&r, "li_yau").status, ReportStatus::Skipped);
    }
}
