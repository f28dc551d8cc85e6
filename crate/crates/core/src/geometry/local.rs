use nalgebra::{DMatrix, DVector};

use super::chart::{Chart, ImmersionJet, ScalarField, ScalarJet, TensorJet};
use crate::error::{Result, SpectraError};

const DEGENERACY_TOL: f64 = 1e-12;

/// Every pointwise quantity of a chart needed by assembly and the bounds.
#[derive(Debug, Clone)]
pub struct LocalGeometry {
    pub xi: Vec<f64>,
    pub jet: ImmersionJet,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub sqrt_det_g: f64,
    /// `dg[c]` is the chart derivative of g along coordinate c.
    pub dg: Vec<DMatrix<f64>>,
    /// `christoffel[l][(i, j)]` is the symbol with upper index l.
    pub christoffel: Vec<DMatrix<f64>>,
    pub tensor: TensorJet,
    /// K = g^-1 T g^-1, so that T(grad u, grad v) = du^T K dv.
    pub k: DMatrix<f64>,
    pub dk: Vec<DMatrix<f64>>,
    pub eta: ScalarJet,
    /// Density of dm = e^-eta dM with respect to chart Lebesgue measure.
    pub weight: f64,
    tensor_is_metric: bool,
}

/// Normal frame and second fundamental form at a point.
#[derive(Debug, Clone)]
pub struct SecondFundamentalForm {
    /// Orthonormal normal vectors in R^m, m - n of them.
    pub normals: Vec<DVector<f64>>,
    /// `alpha[k][(i, j)] = <d_ij x, normals[k]>`.
    pub alpha: Vec<DMatrix<f64>>,
    /// H = (1/n) tr_g alpha, as a vector in R^m.
    pub mean_curvature: DVector<f64>,
}

impl SecondFundamentalForm {
    pub fn mean_curvature_norm(&self) -> f64 {
        self.mean_curvature.norm()
    }

    /// |alpha|, with both indices raised by the given inverse metric.
    pub fn norm(&self, g_inv: &DMatrix<f64>) -> f64 {
        let sq: f64 = self
            .alpha
            .iter()
            .map(|a| (g_inv * a * g_inv).component_mul(a).sum())
            .sum();
        sq.max(0.0).sqrt()
    }
}

fn spd_check(t: &DMatrix<f64>) -> bool {
    let sym = (t - t.transpose()).abs().max() <= 1e-12 * (1.0 + t.abs().max());
    sym && t.clone().cholesky().is_some()
}

impl Chart {
    /// Induced metric g_ij at a chart point.
    pub fn metric(&self, xi: &[f64]) -> Result<DMatrix<f64>> {
        self.check_in_domain(xi)?;
        let jet = self.immersion.jet(xi);
        let g = jet.tangent.transpose() * &jet.tangent;
        check_metric(&g, xi)?;
        Ok(g)
    }

    /// Metric, connection, tensor and weight data at a chart point.
    pub fn local(&self, xi: &[f64]) -> Result<LocalGeometry> {
        self.check_in_domain(xi)?;
        let n = self.dim_n();
        let jet = self.immersion.jet(xi);
        let tangent = &jet.tangent;
        let g = tangent.transpose() * tangent;
        let det = check_metric(&g, xi)?;
        let g_inv = g.clone().try_inverse().ok_or_else(|| SpectraError::Degeneracy {
            point: xi.to_vec(),
            reason: "metric is not invertible".into(),
        })?;

        let dg: Vec<DMatrix<f64>> = (0..n)
            .map(|c| {
                DMatrix::from_fn(n, n, |a, b| {
                    jet.second(c, a).dot(&tangent.column(b)) + tangent.column(a).dot(jet.second(c, b))
                })
            })
            .collect();
        let first_kind = |i: usize, j: usize, k: usize| jet.second(i, j).dot(&tangent.column(k));
        let christoffel: Vec<DMatrix<f64>> = (0..n)
            .map(|l| DMatrix::from_fn(n, n, |i, j| (0..n).map(|k| g_inv[(l, k)] * first_kind(i, j, k)).sum()))
            .collect();

        let tensor = self.tensor_jet(xi, &jet)?;
        if !spd_check(&tensor.value) {
            return Err(SpectraError::Tensor {
                location: format!("chart point {xi:?}"),
            });
        }
        let k = &g_inv * &tensor.value * &g_inv;
        let dk = (0..n)
            .map(|c| {
                let dginv = -(&g_inv * &dg[c] * &g_inv);
                &dginv * &tensor.value * &g_inv + &g_inv * &tensor.deriv[c] * &g_inv + &g_inv * &tensor.value * &dginv
            })
            .collect();
        let eta = self.scalar_jet(&self.eta, xi, &jet)?;
        let sqrt_det_g = det.sqrt();
        let weight = (-eta.value).exp() * sqrt_det_g;
        if !weight.is_finite() {
            return Err(SpectraError::Evaluation(format!("weight is not finite at {xi:?}")));
        }
        Ok(LocalGeometry {
            xi: xi.to_vec(),
            jet,
            g,
            g_inv,
            sqrt_det_g,
            dg,
            christoffel,
            tensor,
            k,
            dk,
            eta,
            weight,
            tensor_is_metric: self.tensor.is_parallel_to_metric(),
        })
    }

    /// Second fundamental form of the immersion at a chart point.
    pub fn second_fundamental_form(&self, xi: &[f64]) -> Result<SecondFundamentalForm> {
        self.check_in_domain(xi)?;
        let jet = self.immersion.jet(xi);
        second_fundamental_form(&jet, xi)
    }

    /// Norm of the second fundamental form at a chart point.
    pub fn alpha_norm(&self, xi: &[f64]) -> Result<f64> {
        let g_inv = self
            .metric(xi)?
            .try_inverse()
            .expect("metric was checked positive definite");
        Ok(self.second_fundamental_form(xi)?.norm(&g_inv))
    }

    /// Value, gradient and Hessian of a scalar field at a chart point.
    pub fn evaluate_scalar(&self, field: &ScalarField, xi: &[f64]) -> Result<ScalarJet> {
        self.check_in_domain(xi)?;
        let jet = self.immersion.jet(xi);
        self.scalar_jet(field, xi, &jet)
    }
}

fn check_metric(g: &DMatrix<f64>, xi: &[f64]) -> Result<f64> {
    let det = g.determinant();
    if !det.is_finite() || det <= DEGENERACY_TOL {
        return Err(SpectraError::Degeneracy {
            point: xi.to_vec(),
            reason: format!("det g = {det:e}"),
        });
    }
    Ok(det)
}

/// Gram-Schmidt on the tangent vectors followed by the ambient basis in order.
pub fn second_fundamental_form(jet: &ImmersionJet, xi: &[f64]) -> Result<SecondFundamentalForm> {
    let m = jet.tangent.nrows();
    let n = jet.tangent.ncols();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(m);
    let scale = jet.tangent.norm().max(1.0);
    for i in 0..n {
        let mut v: DVector<f64> = jet.tangent.column(i).into_owned();
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dot(&v);
                v.axpy(-proj, b, 1.0);
            }
        }
        let norm = v.norm();
        if norm <= 1e-10 * scale {
            return Err(SpectraError::Degeneracy {
                point: xi.to_vec(),
                reason: "tangent vectors are linearly dependent".into(),
            });
        }
        basis.push(v / norm);
    }
    let mut normals = Vec::with_capacity(m - n);
    for e in 0..m {
        if basis.len() == m {
            break;
        }
        let mut v = DVector::zeros(m);
        v[e] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dot(&v);
                v.axpy(-proj, b, 1.0);
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            let nu = v / norm;
            basis.push(nu.clone());
            normals.push(nu);
        }
    }
    let g = jet.tangent.transpose() * &jet.tangent;
    let g_inv = g.try_inverse().ok_or_else(|| SpectraError::Degeneracy {
        point: xi.to_vec(),
        reason: "metric is not invertible".into(),
    })?;
    let alpha: Vec<DMatrix<f64>> = normals
        .iter()
        .map(|nu| DMatrix::from_fn(n, n, |i, j| jet.second(i, j).dot(nu)))
        .collect();
    let mut mean_curvature = DVector::zeros(m);
    for (nu, a) in normals.iter().zip(&alpha) {
        let h = g_inv.component_mul(a).sum() / n as f64;
        mean_curvature.axpy(h, nu, 1.0);
    }
    Ok(SecondFundamentalForm {
        normals,
        alpha,
        mean_curvature,
    })
}

impl LocalGeometry {
    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    /// Squared g-norm of a covector given by its chart components.
    pub fn covector_norm_sq(&self, w: &DVector<f64>) -> f64 {
        (w.transpose() * &self.g_inv * w)[(0, 0)]
    }

    pub fn grad_norm_sq(&self, f: &ScalarJet) -> f64 {
        self.covector_norm_sq(&f.grad)
    }

    /// T(grad a, grad b) for chart differentials da, db.
    pub fn tensor_form(&self, da: &DVector<f64>, db: &DVector<f64>) -> f64 {
        (da.transpose() * &self.k * db)[(0, 0)]
    }

    /// T(grad f) as a covector: T_ab g^bc d_c f.
    pub fn tensor_apply(&self, df: &DVector<f64>) -> DVector<f64> {
        &self.tensor.value * (&self.g_inv * df)
    }

    /// tr T = g^ab T_ab.
    pub fn trace_t(&self) -> f64 {
        self.g_inv.component_mul(&self.tensor.value).sum()
    }

    /// Hilbert-Schmidt norm of T with indices raised by g.
    pub fn hs_norm_t(&self) -> f64 {
        let s = &self.g_inv * &self.tensor.value;
        (&s * &s).trace().max(0.0).sqrt()
    }

    /// tr(nabla T) as a covector: g^ij (nabla_i T)_ja.
    pub fn divergence_t(&self) -> DVector<f64> {
        let n = self.dim();
        if self.tensor_is_metric {
            return DVector::zeros(n);
        }
        let t = &self.tensor.value;
        let gam = &self.christoffel;
        DVector::from_fn(n, |a, _| {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let mut cov = self.tensor.deriv[i][(j, a)];
                    for l in 0..n {
                        cov -= gam[l][(i, j)] * t[(l, a)] + gam[l][(i, a)] * t[(j, l)];
                    }
                    acc += self.g_inv[(i, j)] * cov;
                }
            }
            acc
        })
    }

    /// Gamma^k_ki, the derivative of log sqrt(det g).
    fn log_volume_gradient(&self) -> DVector<f64> {
        let n = self.dim();
        DVector::from_fn(n, |i, _| (0..n).map(|k| self.christoffel[k][(k, i)]).sum())
    }

    fn divergence_form(&self, k: &DMatrix<f64>, dk: &[DMatrix<f64>], f: &ScalarJet) -> f64 {
        let n = self.dim();
        let lv = self.log_volume_gradient();
        let mut out = 0.0;
        for i in 0..n {
            for j in 0..n {
                out += dk[i][(i, j)] * f.grad[j] + k[(i, j)] * f.hess[(i, j)] + lv[i] * k[(i, j)] * f.grad[j]
                    - k[(i, j)] * self.eta.grad[i] * f.grad[j];
            }
        }
        out
    }

    /// The weighted operator div_eta(T grad f) at this point.
    pub fn apply_operator(&self, f: &ScalarJet) -> f64 {
        self.divergence_form(&self.k, &self.dk, f)
    }

    /// The drifting Laplacian (T = I) of f at this point.
    pub fn drift_laplacian(&self, f: &ScalarJet) -> f64 {
        let dginv: Vec<DMatrix<f64>> = self.dg.iter().map(|d| -(&self.g_inv * d * &self.g_inv)).collect();
        self.divergence_form(&self.g_inv, &dginv, f)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::geometry::chart::{Domain, Immersion, TensorField};

    fn associate(theta: f64) -> Chart {
        Chart::new(
            Immersion::AssociateFamily { theta },
            Domain::Rectangle {
                lo: [0.0, -1.0],
                hi: [PI, 1.0],
            },
            ScalarField::zero(),
            TensorField::Metric,
        )
        .unwrap()
    }

    #[test]
    fn flat_metric_is_identity() {
        let chart = Chart::flat_rectangle([0.0, 0.0], [1.0, 1.0]).unwrap();
        let g = chart.metric(&[0.3, 0.8]).unwrap();
        assert_eq!(g, DMatrix::identity(2, 2));
        let sff = chart.second_fundamental_form(&[0.3, 0.8]).unwrap();
        assert!(sff.normals.is_empty());
        assert_eq!(sff.mean_curvature_norm(), 0.0);
    }

    #[test]
    fn stereographic_metric_at_origin() {
        let chart = Chart::hemisphere(1.0).unwrap();
        let g = chart.metric(&[0.0, 0.0]).unwrap();
        assert_relative_eq!(g, DMatrix::identity(2, 2) * 4.0, epsilon = 1e-15);
        let xi = [0.3, -0.4];
        let s: f64 = 1.0 + 0.25;
        let g = chart.metric(&xi).unwrap();
        assert_relative_eq!(g, DMatrix::identity(2, 2) * (4.0 / (s * s)), epsilon = 1e-14);
    }

    #[test]
    fn unit_sphere_mean_curvature_is_one() {
        let chart = Chart::hemisphere(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let r: f64 = rng.random_range(0.0..1.0);
            let phi: f64 = rng.random_range(0.0..2.0 * PI);
            let xi = [r * phi.cos(), r * phi.sin()];
            let sff = chart.second_fundamental_form(&xi).unwrap();
            assert_relative_eq!(sff.mean_curvature_norm(), 1.0, epsilon = 1e-12);
            let normal = &sff.normals[0];
            let x = chart.immersion.jet(&xi).position;
            assert_relative_eq!(normal.dot(&x).abs(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sphere_radius_scales_curvature() {
        let chart = Chart::hemisphere(2.0).unwrap();
        let sff = chart.second_fundamental_form(&[0.2, 0.5]).unwrap();
        assert_relative_eq!(sff.mean_curvature_norm(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn associate_family_is_isometric_and_minimal_at_ends() {
        let charts: Vec<Chart> = [0.0, PI / 4.0, PI / 2.0].iter().map(|t| associate(*t)).collect();
        for &(u, v) in &[(0.1f64, -0.9f64), (1.3, 0.2), (3.0, 0.95)] {
            let expected = DMatrix::identity(2, 2) * v.cosh().powi(2);
            for chart in &charts {
                let g = chart.metric(&[u, v]).unwrap();
                assert_relative_eq!(g, expected, epsilon = 1e-12);
                let sff = chart.second_fundamental_form(&[u, v]).unwrap();
                assert!(sff.mean_curvature_norm() <= 1e-8);
            }
        }
    }

    #[test]
    fn associate_family_alpha_norm() {
        // minimal surface with Gauss curvature -1/cosh^4 v, so |alpha|^2 = 2/cosh^4 v
        for theta in [0.0, 0.6, PI / 2.0] {
            let chart = associate(theta);
            for &(u, v) in &[(0.2f64, -0.7f64), (2.1, 0.0), (2.9, 0.8)] {
                let expected = 2f64.sqrt() / v.cosh().powi(2);
                assert_relative_eq!(chart.alpha_norm(&[u, v]).unwrap(), expected, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn unit_sphere_alpha_norm() {
        let chart = Chart::hemisphere(1.0).unwrap();
        assert_relative_eq!(chart.alpha_norm(&[0.3, -0.2]).unwrap(), 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn christoffel_symbols_of_stereographic_chart() {
        // conformal metric g = e^{2f} I with f = log 2 - log(1 + |xi|^2)
        let chart = Chart::hemisphere(1.0).unwrap();
        let xi = [0.4, 0.1];
        let local = chart.local(&xi).unwrap();
        let s = 1.0 + xi[0] * xi[0] + xi[1] * xi[1];
        let df = [-2.0 * xi[0] / s, -2.0 * xi[1] / s];
        let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        for l in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    let expected = delta(l, i) * df[j] + delta(l, j) * df[i] - delta(i, j) * df[l];
                    assert_relative_eq!(local.christoffel[l][(i, j)], expected, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn operator_on_flat_interval() {
        let chart = Chart::flat_interval(0.0, 1.0).unwrap();
        let xi = [0.37];
        let local = chart.local(&xi).unwrap();
        let square = chart.evaluate_scalar(&ScalarField::RadialQuadratic(1.0), &xi).unwrap();
        assert_relative_eq!(local.apply_operator(&square), 2.0, epsilon = 1e-14);

        let drifted = chart.with_eta(ScalarField::Linear(vec![2.0])).unwrap();
        let local = drifted.local(&xi).unwrap();
        let h = drifted.evaluate_scalar(&ScalarField::Linear(vec![1.0]), &xi).unwrap();
        assert_relative_eq!(local.apply_operator(&h), -2.0, epsilon = 1e-14);
        let eta = local.eta.clone();
        assert_relative_eq!(local.drift_laplacian(&eta), -4.0, epsilon = 1e-14);
    }

    #[test]
    fn sphere_coordinate_functions_are_eigenfunctions() {
        // on the unit sphere the Laplacian of an ambient coordinate is -2 x_l
        let chart = Chart::hemisphere(1.0).unwrap();
        let xi = [0.25, -0.6];
        let local = chart.local(&xi).unwrap();
        for l in 0..3 {
            let f = chart.evaluate_scalar(&ScalarField::Ambient(l), &xi).unwrap();
            assert_relative_eq!(local.apply_operator(&f), -2.0 * f.value, epsilon = 1e-12);
        }
    }

    #[test]
    fn divergence_of_diagonal_tensor_on_flat_chart() {
        let chart = Chart::flat_rectangle([0.0, 0.0], [1.0, 1.0])
            .unwrap()
            .with_tensor(TensorField::Diagonal(vec![1.0, 0.5]))
            .unwrap();
        let local = chart.local(&[0.5, 0.5]).unwrap();
        assert_eq!(local.divergence_t(), DVector::zeros(2));
        assert_relative_eq!(local.trace_t(), 1.5);
        assert_relative_eq!(local.hs_norm_t(), 1.25f64.sqrt());
    }

    #[test]
    fn expression_tensor_divergence_matches_closed_form() {
        use crate::expr::Expr;
        let entries = ["1 + x^2", "0", "2 + x*y"].map(|s| Expr::parse(s).unwrap()).to_vec();
        let chart = Chart::flat_rectangle([0.0, 0.0], [1.0, 1.0])
            .unwrap()
            .with_tensor(TensorField::Expr(entries))
            .unwrap()
            .with_fd_resolution(512);
        let xi = [0.3, 0.7];
        let div = chart.local(&xi).unwrap().divergence_t();
        // flat chart: (div T)_a = d_i T_ia
        assert_relative_eq!(div[0], 2.0 * xi[0], epsilon = 1e-8);
        assert_relative_eq!(div[1], xi[0], epsilon = 1e-8);
    }

    #[test]
    fn indefinite_tensor_is_rejected() {
        let chart = Chart::flat_rectangle([0.0, 0.0], [1.0, 1.0])
            .unwrap()
            .with_tensor(TensorField::Diagonal(vec![1.0, -0.5]))
            .unwrap();
        assert!(matches!(chart.local(&[0.5, 0.5]), Err(SpectraError::Tensor { .. })));
    }

    #[test]
    fn points_outside_domain_are_rejected() {
        let chart = Chart::hemisphere(1.0).unwrap();
        assert!(matches!(chart.metric(&[0.9, 0.9]), Err(SpectraError::Domain { .. })));
    }
}
