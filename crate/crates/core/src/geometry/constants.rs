use serde::{Deserialize, Serialize};

use super::chart::Chart;
use super::local::second_fundamental_form;
use crate::error::{Result, SpectraError};
use crate::quadrature::integrate_domain;

/// Smallest sample resolution accepted by [`compute_constants`].
pub const MIN_SAMPLE_RESOLUTION: usize = 8;

const VOLUME_PANELS: usize = 16;
const VOLUME_ORDER: usize = 8;

/// Suprema, infima and volume entering the eigenvalue inequalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricConstants {
    pub n: usize,
    pub m: usize,
    /// sup |grad eta|.
    pub eta_0: f64,
    /// sup of the drifting Laplacian of eta, Delta eta - |grad eta|^2.
    pub eta_bar_0: f64,
    /// sup of the mean curvature norm, H = (1/n) tr alpha.
    pub h_0: f64,
    /// max over normal directions of sup |A_nu| (Hilbert-Schmidt).
    pub a_0: f64,
    /// sup |T| (Hilbert-Schmidt with indices raised by g).
    pub t_star: f64,
    /// sup |tr(nabla T)|.
    pub t_0: f64,
    pub tr_t_inf: f64,
    pub tr_t_sup: f64,
    /// Unweighted Riemannian volume of the domain.
    pub vol_omega: f64,
    pub sample_resolution: usize,
    pub sample_points: usize,
    pub fd_step: f64,
}

impl GeometricConstants {
    /// Flat, undrifted constants with T = 0, for closed-form comparisons.
    pub fn zero(n: usize, m: usize, vol_omega: f64) -> Self {
        GeometricConstants {
            n,
            m,
            eta_0: 0.0,
            eta_bar_0: 0.0,
            h_0: 0.0,
            a_0: 0.0,
            t_star: 0.0,
            t_0: 0.0,
            tr_t_inf: 0.0,
            tr_t_sup: 0.0,
            vol_omega,
            sample_resolution: 0,
            sample_points: 0,
            fd_step: 0.0,
        }
    }

    /// Additive shift (n^2 H_0^2 + eta_0^2 + 2 eta_bar_0) / 4.
    pub fn upsilon_shift(&self) -> f64 {
        let n = self.n as f64;
        (n * n * self.h_0 * self.h_0 + self.eta_0 * self.eta_0 + 2.0 * self.eta_bar_0) / 4.0
    }

    /// The suprema listed by name, for refinement comparisons.
    pub fn suprema(&self) -> [(&'static str, f64); 7] {
        [
            ("eta_0", self.eta_0),
            ("eta_bar_0", self.eta_bar_0),
            ("h_0", self.h_0),
            ("a_0", self.a_0),
            ("t_star", self.t_star),
            ("t_0", self.t_0),
            ("tr_t_sup", self.tr_t_sup),
        ]
    }
}

/// Volume of the unit ball in R^n.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Evaluates the geometric constants of a chart by maximizing over the
/// sample grid of the given resolution, boundary points included.
pub fn compute_constants(chart: &Chart, resolution: usize) -> Result<GeometricConstants> {
    if resolution < MIN_SAMPLE_RESOLUTION {
        return Err(SpectraError::Parameter(format!(
            "sample resolution must be at least {MIN_SAMPLE_RESOLUTION}, got {resolution}"
        )));
    }
    let chart = chart.clone().with_fd_resolution(resolution);
    let n = chart.dim_n();
    let mut c = GeometricConstants {
        n,
        m: chart.dim_m(),
        eta_0: 0.0,
        eta_bar_0: f64::NEG_INFINITY,
        h_0: 0.0,
        a_0: 0.0,
        t_star: 0.0,
        t_0: 0.0,
        tr_t_inf: f64::INFINITY,
        tr_t_sup: f64::NEG_INFINITY,
        vol_omega: 0.0,
        sample_resolution: resolution,
        sample_points: 0,
        fd_step: chart.fd_step(),
    };
    let grid = chart.domain.sample_grid(resolution);
    c.sample_points = grid.len();
    for xi in &grid {
        let local = chart.local(xi)?;
        let grad_sq = local.grad_norm_sq(&local.eta);
        c.eta_0 = c.eta_0.max(grad_sq.sqrt());
        c.eta_bar_0 = c.eta_bar_0.max(local.drift_laplacian(&local.eta));

        let sff = second_fundamental_form(&local.jet, xi)?;
        c.h_0 = c.h_0.max(sff.mean_curvature_norm());
        for alpha in &sff.alpha {
            let raised = &local.g_inv * alpha * &local.g_inv;
            let hs = raised.component_mul(alpha).sum().max(0.0).sqrt();
            c.a_0 = c.a_0.max(hs);
        }
        c.t_star = c.t_star.max(local.hs_norm_t());
        c.t_0 = c.t_0.max(local.covector_norm_sq(&local.divergence_t()).sqrt());
        let tr = local.trace_t();
        c.tr_t_inf = c.tr_t_inf.min(tr);
        c.tr_t_sup = c.tr_t_sup.max(tr);
    }
    c.vol_omega = riemannian_volume(&chart)?;
    let values = [
        c.eta_0,
        c.eta_bar_0,
        c.h_0,
        c.a_0,
        c.t_star,
        c.t_0,
        c.tr_t_inf,
        c.tr_t_sup,
        c.vol_omega,
    ];
    if values.iter().any(|v| !v.is_finite()) {
        return Err(SpectraError::Evaluation("geometric constants are not finite".into()));
    }
    Ok(c)
}

/// Integral of sqrt(det g) over the chart domain.
pub fn riemannian_volume(chart: &Chart) -> Result<f64> {
    integrate_domain(&chart.domain, VOLUME_PANELS, VOLUME_ORDER, |xi| {
        Ok(chart.metric(xi)?.determinant().sqrt())
    })
}

/// Integral of e^-eta sqrt(det g) over the chart domain.
pub fn weighted_volume(chart: &Chart) -> Result<f64> {
    integrate_domain(&chart.domain, VOLUME_PANELS, VOLUME_ORDER, |xi| {
        Ok(chart.local(xi)?.weight)
    })
}
