//! Lowest eigenpairs of the generalized problem A x = lambda B x.

mod dense;
mod lanczos;

use serde::{Deserialize, Serialize};

use crate::assembly::DofMap;
use crate::sparse::SparseSymMatrix;

pub use dense::{solve_dense, DENSE_MAX_DIM};
pub use lanczos::{solve_sparse, LanczosOptions};

/// Default relative residual tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// Ascending eigenvalues with B-orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors in degree-of-freedom numbering.
    pub eigenvectors: Vec<Vec<f64>>,
    /// Relative residuals |A x - lambda B x| / ((1 + lambda) |B x|).
    pub residuals: Vec<f64>,
    pub method: String,
    pub iterations: usize,
    pub tolerance: f64,
}

impl SpectralResult {
    pub fn empty(method: &str, tolerance: f64) -> Self {
        SpectralResult {
            eigenvalues: Vec::new(),
            eigenvectors: Vec::new(),
            residuals: Vec::new(),
            method: method.to_string(),
            iterations: 0,
            tolerance,
        }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Eigenvector `i` as per-vertex values, zero on Dirichlet vertices.
    pub fn vertex_values(&self, i: usize, dofs: &DofMap) -> Vec<f64> {
        dofs.expand(&self.eigenvectors[i])
    }
}

/// |A x - lambda B x| / ((1 + lambda) |B x|).
pub fn relative_residual(a: &SparseSymMatrix, b: &SparseSymMatrix, lambda: f64, x: &[f64]) -> f64 {
    let ax = a.mul_vec(x);
    let bx = b.mul_vec(x);
    let r: f64 = ax
        .iter()
        .zip(&bx)
        .map(|(p, q)| (p - lambda * q).powi(2))
        .sum::<f64>()
        .sqrt();
    let nb: f64 = bx.iter().map(|v| v * v).sum::<f64>().sqrt();
    r / ((1.0 + lambda.abs()) * nb)
}

/// x^T A x / x^T B x.
pub fn rayleigh_quotient(a: &SparseSymMatrix, b: &SparseSymMatrix, x: &[f64]) -> f64 {
    a.bilinear(x, x) / b.bilinear(x, x)
}

/// Flips the sign so that the largest-magnitude entry is positive.
pub(crate) fn fix_sign(x: &mut [f64]) {
    let mut best = 0.0f64;
    let mut sign = 1.0;
    for v in x.iter() {
        if v.abs() > best {
            best = v.abs();
            sign = v.signum();
        }
    }
    if sign < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}
