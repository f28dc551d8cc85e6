//! P1 finite-element assembly of the weighted Dirichlet form and mass matrix.

use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SpectraError};
use crate::geometry::{Chart, LocalGeometry, ScalarField};
use crate::mesh::Mesh;
use crate::sparse::SparseSymMatrix;

/// Maps mesh vertices to interior degrees of freedom.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    vertex_to_dof: Vec<Option<usize>>,
    dof_to_vertex: Vec<usize>,
}

impl DofMap {
    pub fn interior(mesh: &Mesh) -> Self {
        Self::from_mask(mesh.boundary_mask())
    }

    /// Every vertex is a degree of freedom.
    pub fn all(mesh: &Mesh) -> Self {
        Self::from_mask(&vec![false; mesh.num_vertices()])
    }

    fn from_mask(boundary: &[bool]) -> Self {
        let mut vertex_to_dof = Vec::with_capacity(boundary.len());
        let mut dof_to_vertex = Vec::new();
        for (v, b) in boundary.iter().enumerate() {
            if *b {
                vertex_to_dof.push(None);
            } else {
                vertex_to_dof.push(Some(dof_to_vertex.len()));
                dof_to_vertex.push(v);
            }
        }
        DofMap {
            vertex_to_dof,
            dof_to_vertex,
        }
    }

    pub fn num_dofs(&self) -> usize {
        self.dof_to_vertex.len()
    }

    pub fn dof(&self, vertex: usize) -> Option<usize> {
        self.vertex_to_dof[vertex]
    }

    pub fn vertex(&self, dof: usize) -> usize {
        self.dof_to_vertex[dof]
    }

    /// Expands a dof vector to per-vertex values, zero on the boundary.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        self.vertex_to_dof.iter().map(|d| d.map_or(0.0, |d| x[d])).collect()
    }
}

/// Stiffness matrix A, mass matrix B and the dof map they refer to.
#[derive(Debug, Clone)]
pub struct Assembled {
    pub a: SparseSymMatrix,
    pub b: SparseSymMatrix,
    pub dofs: DofMap,
}

/// One quadrature point of a cell: chart location, quadrature weight
/// (chart measure), P1 shape values and the local geometry.
pub struct CellPoint {
    pub xi: Vec<f64>,
    pub weight: f64,
    pub shape: Vec<f64>,
    pub local: LocalGeometry,
}

/// Quadrature data for one cell: constant shape gradients plus points.
pub struct CellQuadrature {
    /// Chart gradient of each vertex basis function.
    pub grads: Vec<DVector<f64>>,
    pub points: Vec<CellPoint>,
}

fn tensor_error_at(cell: usize, err: SpectraError) -> SpectraError {
    match err {
        SpectraError::Tensor { location } => SpectraError::Tensor {
            location: format!("cell {cell} ({location})"),
        },
        other => other,
    }
}

/// Three-edge-midpoint rule for triangles, two-point Gauss for segments.
pub fn cell_quadrature(chart: &Chart, mesh: &Mesh, cell: usize) -> Result<CellQuadrature> {
    let verts = mesh.cell(cell);
    let measure = mesh.cell_measure(cell);
    let mut rules: Vec<(Vec<f64>, f64)> = Vec::with_capacity(3);
    let grads = if mesh.dim() == 1 {
        let g = 1.0 / measure;
        let s = 0.5 / 3f64.sqrt();
        for t in [0.5 - s, 0.5 + s] {
            rules.push((vec![1.0 - t, t], measure / 2.0));
        }
        vec![DVector::from_vec(vec![-g]), DVector::from_vec(vec![g])]
    } else {
        let (p0, p1, p2) = (mesh.vertex(verts[0]), mesh.vertex(verts[1]), mesh.vertex(verts[2]));
        let jac = DMatrix::from_row_slice(2, 2, &[p1[0] - p0[0], p2[0] - p0[0], p1[1] - p0[1], p2[1] - p0[1]]);
        let inv_t = jac
            .try_inverse()
            .ok_or_else(|| SpectraError::Parameter(format!("cell {cell} is degenerate")))?
            .transpose();
        let g1 = inv_t.column(0).into_owned();
        let g2 = inv_t.column(1).into_owned();
        let g0 = -(&g1 + &g2);
        for bary in [[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]] {
            rules.push((bary.to_vec(), measure / 3.0));
        }
        vec![g0, g1, g2]
    };
    let dim = mesh.dim();
    let mut points = Vec::with_capacity(rules.len());
    for (shape, weight) in rules {
        let mut xi = vec![0.0; dim];
        for (a, &v) in verts.iter().enumerate() {
            for (d, x) in xi.iter_mut().enumerate() {
                *x += shape[a] * mesh.vertex(v)[d];
            }
        }
        let local = chart.local(&xi).map_err(|e| tensor_error_at(cell, e))?;
        points.push(CellPoint {
            xi,
            weight,
            shape,
            local,
        });
    }
    Ok(CellQuadrature { grads, points })
}

fn assemble_with(chart: &Chart, mesh: &Mesh, dofs: DofMap) -> Result<Assembled> {
    if chart.dim_n() != mesh.dim() {
        return Err(SpectraError::Parameter("mesh and chart dimensions differ".into()));
    }
    if dofs.num_dofs() == 0 {
        return Err(SpectraError::MeshTooCoarse);
    }
    let mut ta = Vec::with_capacity(mesh.num_cells() * 9);
    let mut tb = Vec::with_capacity(mesh.num_cells() * 9);
    for c in 0..mesh.num_cells() {
        let quad = cell_quadrature(chart, mesh, c)?;
        let verts = mesh.cell(c);
        let nloc = verts.len();
        let mut ka = vec![0.0; nloc * nloc];
        let mut kb = vec![0.0; nloc * nloc];
        for p in &quad.points {
            let w = p.weight * p.local.weight;
            for a in 0..nloc {
                let kga = &p.local.k * &quad.grads[a];
                for b in a..nloc {
                    ka[a * nloc + b] += w * quad.grads[b].dot(&kga);
                    kb[a * nloc + b] += w * p.shape[a] * p.shape[b];
                }
            }
        }
        for a in 0..nloc {
            let Some(da) = dofs.dof(verts[a]) else { continue };
            for b in a..nloc {
                let Some(db) = dofs.dof(verts[b]) else { continue };
                ta.push((da, db, ka[a * nloc + b]));
                tb.push((da, db, kb[a * nloc + b]));
            }
        }
    }
    let n = dofs.num_dofs();
    Ok(Assembled {
        a: SparseSymMatrix::from_triplets(n, &ta),
        b: SparseSymMatrix::from_triplets(n, &tb),
        dofs,
    })
}

/// Assembles A and B with Dirichlet vertices eliminated.
pub fn assemble(chart: &Chart, mesh: &Mesh) -> Result<Assembled> {
    assemble_with(chart, mesh, DofMap::interior(mesh))
}

/// Assembles A and B over every vertex, without boundary elimination.
pub fn assemble_unconstrained(chart: &Chart, mesh: &Mesh) -> Result<Assembled> {
    assemble_with(chart, mesh, DofMap::all(mesh))
}

/// Pointwise values of div_eta(T grad h) at the mesh vertices.
pub fn apply_lh(chart: &Chart, mesh: &Mesh, h: &ScalarField) -> Result<Vec<f64>> {
    chart.validate_scalar(h)?;
    (0..mesh.num_vertices())
        .map(|v| {
            let xi = mesh.vertex(v);
            let local = chart.local(xi)?;
            let jet = chart.evaluate_scalar(h, xi)?;
            let value = local.apply_operator(&jet);
            if value.is_finite() {
                Ok(value)
            } else {
                Err(SpectraError::Evaluation(format!("operator value not finite at {xi:?}")))
            }
        })
        .collect()
}
