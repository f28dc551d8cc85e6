use nalgebra::DVector;

use super::{BoundReport, COMPUTED_SLACK};
use crate::assembly::{cell_quadrature, DofMap};
use crate::eigensolve::SpectralResult;
use crate::error::{Result, SpectraError};
use crate::geometry::{second_fundamental_form, Chart, LocalGeometry, ScalarField};
use crate::mesh::Mesh;

/// One quadrature point with the pointwise quantities of the tensor lemma.
pub struct QuadraturePoint {
    pub cell: usize,
    pub shape: Vec<f64>,
    /// dm-weight of the point: rule weight times e^-eta sqrt(det g).
    pub measure: f64,
    pub local: LocalGeometry,
    /// g^ab T_ab.
    pub trace_t: f64,
    /// |tr(alpha(T., .))|^2 summed over normal directions.
    pub alpha_t_sq: f64,
    /// tr(nabla T) as a covector.
    pub div_t: DVector<f64>,
    /// T(grad eta) as a covector.
    pub t_eta: DVector<f64>,
}

/// Eigenfunctions of a computed spectrum together with per-element
/// quadrature data, for integrals of products of eigenfunctions and fields.
pub struct EigenfunctionQuadrature<'a> {
    chart: &'a Chart,
    mesh: &'a Mesh,
    points: Vec<QuadraturePoint>,
    /// Shape gradients per cell.
    grads: Vec<Vec<DVector<f64>>>,
    modes: Vec<Vec<f64>>,
    eigenvalues: Vec<f64>,
}

impl<'a> EigenfunctionQuadrature<'a> {
    pub fn new(chart: &'a Chart, mesh: &'a Mesh, dofs: &DofMap, result: &SpectralResult) -> Result<Self> {
        let mut points = Vec::new();
        let mut grads = Vec::with_capacity(mesh.num_cells());
        for c in 0..mesh.num_cells() {
            let quad = cell_quadrature(chart, mesh, c)?;
            grads.push(quad.grads);
            for p in quad.points {
                let sff = second_fundamental_form(&p.local.jet, &p.xi)?;
                let alpha_t_sq = sff.alpha.iter().map(|a| p.local.k.component_mul(a).sum().powi(2)).sum();
                points.push(QuadraturePoint {
                    cell: c,
                    measure: p.weight * p.local.weight,
                    trace_t: p.local.trace_t(),
                    alpha_t_sq,
                    div_t: p.local.divergence_t(),
                    t_eta: p.local.tensor_apply(&p.local.eta.grad),
                    shape: p.shape,
                    local: p.local,
                });
            }
        }
        Ok(EigenfunctionQuadrature {
            chart,
            mesh,
            points,
            grads,
            modes: (0..result.len()).map(|i| result.vertex_values(i, dofs)).collect(),
            eigenvalues: result.eigenvalues.clone(),
        })
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn points(&self) -> &[QuadraturePoint] {
        &self.points
    }

    /// Value and chart differential of eigenfunction `i` at a point.
    pub fn mode_at(&self, i: usize, p: &QuadraturePoint) -> (f64, DVector<f64>) {
        let verts = self.mesh.cell(p.cell);
        let grads = &self.grads[p.cell];
        let mode = &self.modes[i];
        let mut u = 0.0;
        let mut du = DVector::zeros(grads[0].len());
        for (a, &v) in verts.iter().enumerate() {
            u += p.shape[a] * mode[v];
            du += &grads[a] * mode[v];
        }
        (u, du)
    }

    /// Integral over dm of f(point, u_i, du_i).
    pub fn integrate(&self, i: usize, mut f: impl FnMut(&QuadraturePoint, f64, &DVector<f64>) -> f64) -> f64 {
        self.points
            .iter()
            .map(|p| {
                let (u, du) = self.mode_at(i, p);
                p.measure * f(p, u, &du)
            })
            .sum()
    }

    fn require(&self, k: usize) -> Result<()> {
        if k == 0 || k + 1 > self.len() {
            return Err(SpectraError::Parameter(format!(
                "k = {k} needs 1 <= k and k + 1 <= {} eigenfunctions",
                self.len()
            )));
        }
        Ok(())
    }

    /// The tensor theorem in integrated form: tr T stays inside the integral
    /// and the curvature and divergence terms are integrated against u_i^2.
    pub fn thm_tensor_integrated(&self, k: usize, slack: f64) -> Result<BoundReport> {
        self.require(k)?;
        let top = self.eigenvalues[k];
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for i in 0..k {
            let gap = top - self.eigenvalues[i];
            if gap == 0.0 {
                continue;
            }
            let mut trace = 0.0;
            let mut bracket = 0.0;
            for p in &self.points {
                let (u, du) = self.mode_at(i, p);
                let l = &p.local;
                let drift = &p.div_t - &p.t_eta;
                let t_du = l.tensor_apply(&du);
                let cross = (drift.transpose() * &l.g_inv * &t_du)[(0, 0)];
                trace += p.measure * u * u * p.trace_t;
                bracket += p.measure * (u * u * (p.alpha_t_sq + l.covector_norm_sq(&drift)) + 4.0 * u * cross);
            }
            lhs += gap * gap * trace;
            rhs += gap * (bracket + 4.0 * self.eigenvalues[i]);
        }
        Ok(BoundReport::evaluated("thm_tensor_integrated", k, lhs, rhs, slack))
    }
}

/// Rayleigh-Ritz test-function inequality
/// sum (l_{k+1} - l_i)^2 int u_i^2 T(grad h, grad h)
///   <= sum (l_{k+1} - l_i) int (u_i L h + 2 T(grad h, grad u_i))^2.
pub fn check_proposition_testfunction(
    quad: &EigenfunctionQuadrature,
    h: &ScalarField,
    k: usize,
) -> Result<BoundReport> {
    quad.require(k)?;
    quad.chart.validate_scalar(h)?;
    let jets = quad
        .points
        .iter()
        .map(|p| {
            let jet = quad.chart.scalar_jet(h, &p.local.xi, &p.local.jet)?;
            let lh = p.local.apply_operator(&jet);
            Ok((jet.grad.clone(), lh, p.local.tensor_form(&jet.grad, &jet.grad)))
        })
        .collect::<Result<Vec<_>>>()?;
    let name = format!("proposition_testfunction[{}]", h.describe());
    if jets.iter().all(|(_, _, t)| *t == 0.0) {
        let lhs = 0.0;
        return Ok(BoundReport::evaluated(&name, k, lhs, 0.0, COMPUTED_SLACK)
            .with_note("degenerate test function: T(grad h, grad h) vanishes"));
    }
    let top = quad.eigenvalues[k];
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for i in 0..k {
        let gap = top - quad.eigenvalues[i];
        let mut weight_sq = 0.0;
        let mut square = 0.0;
        for (p, (dh, lh, thh)) in quad.points.iter().zip(&jets) {
            let (u, du) = quad.mode_at(i, p);
            let term = u * lh + 2.0 * p.local.tensor_form(dh, &du);
            weight_sq += p.measure * u * u * thh;
            square += p.measure * term * term;
        }
        lhs += gap * gap * weight_sq;
        rhs += gap * square;
    }
    Ok(BoundReport::evaluated(&name, k, lhs, rhs, COMPUTED_SLACK))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::assembly::assemble;
    use crate::eigensolve::{solve_sparse, LanczosOptions};
    use crate::geometry::TensorField;

    fn setup(chart: &Chart, res: usize, k: usize) -> (Mesh, DofMap, SpectralResult) {
        let mesh = Mesh::build_structured(&chart.domain, res).unwrap();
        let asm = assemble(chart, &mesh).unwrap();
        let result = solve_sparse(&asm.a, &asm.b, k, 0.0, &LanczosOptions::default()).unwrap();
        (mesh, asm.dofs, result)
    }

    #[test]
    fn constant_test_function_is_trivial() {
        let chart = Chart::flat_rectangle([0.0, 0.0], [1.0, 1.0]).unwrap();
        let (mesh, dofs, result) = setup(&chart, 12, 4);
        let q = EigenfunctionQuadrature::new(&chart, &mesh, &dofs, &result).unwrap();
        let r = check_proposition_testfunction(&q, &ScalarField::Constant(3.0), 3).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert!(r.holds && !r.note.is_empty());
    }

    #[test]
    fn coordinate_test_function_on_square() {
        let chart = Chart::flat_rectangle([0.0, 0.0], [1.0, 1.0]).unwrap();
        let (mesh, dofs, result) = setup(&chart, 24, 4);
        let q = EigenfunctionQuadrature::new(&chart, &mesh, &dofs, &result).unwrap();
        for i in 0..4 {
            let grad = q.integrate(i, |p, u, _| {
                u * u
                    * p.local
                        .grad_norm_sq(&chart.evaluate_scalar(&ScalarField::Ambient(0), &p.local.xi).unwrap())
            });
            let norm = q.integrate(i, |_, u, _| u * u);
            assert!((grad - norm).abs() <= 1e-6 * norm);
            assert!((norm - 1.0).abs() <= 1e-10);
        }
        let r = check_proposition_testfunction(&q, &ScalarField::Ambient(0), 3).unwrap();
        assert!(r.holds, "{r}");
        assert!(r.lhs > 0.0);
    }

    #[test]
    fn hemisphere_ambient_test_functions() {
        // x_1 x_3 is a Dirichlet eigenfunction, so h = x_1 gives equality in
        // the continuum; the discrete ratio approaches 1 at second order
        let chart = Chart::hemisphere(1.0).unwrap();
        let mut excess = Vec::new();
        for res in [12, 24] {
            let (mesh, dofs, result) = setup(&chart, res, 4);
            let q = EigenfunctionQuadrature::new(&chart, &mesh, &dofs, &result).unwrap();
            let r = check_proposition_testfunction(&q, &ScalarField::Ambient(2), 3).unwrap();
            assert!(r.holds && r.ratio < 0.5, "{r}");
            let r0 = check_proposition_testfunction(&q, &ScalarField::Ambient(0), 3).unwrap();
            let r1 = check_proposition_testfunction(&q, &ScalarField::Ambient(1), 3).unwrap();
            assert!((r0.ratio - r1.ratio).abs() < 1e-9);
            excess.push(r0.ratio - 1.0);
            let r = q.thm_tensor_integrated(3, COMPUTED_SLACK).unwrap();
            assert!(r.holds, "{r}");
        }
        let order = (excess[0] / excess[1]).log2();
        assert!((order - 2.0).abs() < 0.3, "excess {excess:?}");
    }

    #[test]
    fn integrated_tensor_form_on_flat_square_is_yang() {
        let chart = Chart::flat_rectangle([0.0, 0.0], [1.0, 1.0]).unwrap();
        let (mesh, dofs, result) = setup(&chart, 16, 6);
        let q = EigenfunctionQuadrature::new(&chart, &mesh, &dofs, &result).unwrap();
        let l = q.eigenvalues();
        for k in 1..6 {
            let r = q.thm_tensor_integrated(k, COMPUTED_SLACK).unwrap();
            let sq: f64 = (0..k).map(|i| (l[k] - l[i]).powi(2)).sum();
            let lin: f64 = (0..k).map(|i| (l[k] - l[i]) * l[i]).sum();
            assert!((r.lhs - 2.0 * sq).abs() <= 1e-9 * r.lhs.max(1.0));
            assert!((r.rhs - 4.0 * lin).abs() <= 1e-9 * r.rhs);
        }
    }

    #[test]
    fn tensor_divergence_enters_integrated_form() {
        let chart = Chart::flat_rectangle([0.0, 0.0], [PI, PI])
            .unwrap()
            .with_tensor(TensorField::Expr(vec![
                "1 + 0.2*x".parse().unwrap(),
                "0".parse().unwrap(),
                "1".parse().unwrap(),
            ]))
            .unwrap();
        let (mesh, dofs, result) = setup(&chart, 12, 4);
        let q = EigenfunctionQuadrature::new(&chart, &mesh, &dofs, &result).unwrap();
        assert!(q
            .points()
            .iter()
            .all(|p| (p.div_t[0] - 0.2).abs() < 1e-6 && p.div_t[1].abs() < 1e-9));
        assert!(q.thm_tensor_integrated(3, COMPUTED_SLACK).unwrap().holds);
    }
}
