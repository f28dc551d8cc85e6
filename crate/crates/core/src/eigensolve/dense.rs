use faer::{Mat, Side};

use super::{fix_sign, relative_residual, SpectralResult, DEFAULT_TOLERANCE};
use crate::error::{Result, SpectraError};
use crate::sparse::SparseSymMatrix;

/// Largest dimension accepted by the dense solver.
pub const DENSE_MAX_DIM: usize = 4000;

fn to_faer(m: &SparseSymMatrix) -> Mat<f64> {
    let n = m.dim();
    let mut out = Mat::zeros(n, n);
    for i in 0..n {
        for (j, v) in m.upper_row(i) {
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// Reference solver: Cholesky reduction to a standard symmetric problem and
/// a full eigendecomposition.
pub fn solve_dense(a: &SparseSymMatrix, b: &SparseSymMatrix, k: usize) -> Result<SpectralResult> {
    let n = a.dim();
    if b.dim() != n {
        return Err(SpectraError::Parameter("A and B have different dimensions".into()));
    }
    if k > n {
        return Err(SpectraError::Parameter(format!(
            "requested {k} eigenpairs of a {n}-dimensional problem"
        )));
    }
    if n > DENSE_MAX_DIM {
        return Err(SpectraError::Parameter(format!(
            "dense solver accepts at most {DENSE_MAX_DIM} unknowns, got {n}"
        )));
    }
    if k == 0 {
        return Ok(SpectralResult::empty("dense", DEFAULT_TOLERANCE));
    }
    let bm = to_faer(b);
    let llt = bm.llt(Side::Lower).map_err(|_| SpectraError::MassNotSpd {
        pivot: first_bad_pivot(b),
    })?;
    let l = llt.L();

    // C = L^-1 A L^-T, formed as L^-1 (L^-1 A)^T
    let mut x = to_faer(a);
    l.solve_lower_triangular_in_place(x.as_mut());
    let mut c = x.transpose().to_owned();
    l.solve_lower_triangular_in_place(c.as_mut());
    let c = Mat::from_fn(n, n, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));

    let evd = c
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| SpectraError::Convergence {
            iterations: 0,
            residuals: Vec::new(),
        })?;
    let s = evd.S();
    let u = evd.U();
    let mut vectors = u.get(.., 0..k).to_owned();
    l.transpose().solve_upper_triangular_in_place(vectors.as_mut());

    let mut result = SpectralResult::empty("dense", DEFAULT_TOLERANCE);
    for i in 0..k {
        let lambda = s[i];
        let mut v: Vec<f64> = (0..n).map(|r| vectors[(r, i)]).collect();
        let norm = b.bilinear(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        fix_sign(&mut v);
        result.residuals.push(relative_residual(a, b, lambda, &v));
        result.eigenvalues.push(lambda);
        result.eigenvectors.push(v);
    }
    Ok(result)
}

fn first_bad_pivot(b: &SparseSymMatrix) -> usize {
    match crate::sparse::SkylineCholesky::factor(b) {
        Ok(_) => 0,
        Err(p) => p,
    }
}
