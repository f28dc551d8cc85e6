use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fix_sign, relative_residual, SpectralResult, DEFAULT_TOLERANCE};
use crate::error::{Result, SpectraError};
use crate::sparse::{factor_shifted, SkylineCholesky, SparseSymMatrix};

/// Settings for the block shift-invert Lanczos solver.
#[derive(Debug, Clone, PartialEq)]
pub struct LanczosOptions {
    pub block_size: usize,
    pub tolerance: f64,
    /// The iteration stops after `max_steps_per_pair * k` block steps.
    pub max_steps_per_pair: usize,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            block_size: 3,
            tolerance: DEFAULT_TOLERANCE,
            max_steps_per_pair: 50,
            seed: 0x5eed_1a2c,
        }
    }
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// B-orthonormal Krylov basis with cached products A q and B q.
struct Basis<'a> {
    a: &'a SparseSymMatrix,
    b: &'a SparseSymMatrix,
    q: Vec<Vec<f64>>,
    aq: Vec<Vec<f64>>,
    bq: Vec<Vec<f64>>,
    h: DMatrix<f64>,
}

impl<'a> Basis<'a> {
    fn new(a: &'a SparseSymMatrix, b: &'a SparseSymMatrix) -> Self {
        Basis {
            a,
            b,
            q: Vec::new(),
            aq: Vec::new(),
            bq: Vec::new(),
            h: DMatrix::zeros(0, 0),
        }
    }

    fn len(&self) -> usize {
        self.q.len()
    }

    /// Orthogonalizes `w` against the basis (two classical Gram-Schmidt
    /// passes in the B inner product) and appends it unless it is numerically
    /// dependent.
    fn push(&mut self, mut w: Vec<f64>) -> bool {
        let bw = self.b.mul_vec(&w);
        let before = dot(&w, &bw).max(0.0).sqrt();
        if before == 0.0 {
            return false;
        }
        for _ in 0..2 {
            let coeffs: Vec<f64> = self.bq.iter().map(|bq| dot(bq, &w)).collect();
            for (c, q) in coeffs.iter().zip(&self.q) {
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let mut bw = self.b.mul_vec(&w);
        let after = dot(&w, &bw).max(0.0).sqrt();
        if after <= 1e-10 * before {
            return false;
        }
        w.iter_mut().for_each(|v| *v /= after);
        bw.iter_mut().for_each(|v| *v /= after);
        let aw = self.a.mul_vec(&w);

        let m = self.len();
        let mut h = DMatrix::zeros(m + 1, m + 1);
        h.view_mut((0, 0), (m, m)).copy_from(&self.h);
        for j in 0..m {
            let v = dot(&self.q[j], &aw);
            h[(j, m)] = v;
            h[(m, j)] = v;
        }
        h[(m, m)] = dot(&w, &aw);
        self.h = h;
        self.q.push(w);
        self.aq.push(aw);
        self.bq.push(bw);
        true
    }

    /// Lowest `k` Ritz pairs as (value, coefficients, residual estimate).
    fn ritz(&self, k: usize) -> Vec<(f64, Vec<f64>, f64)> {
        let eig = SymmetricEigen::new(self.h.clone());
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let n = self.q[0].len();
        order
            .into_iter()
            .take(k)
            .map(|c| {
                let lambda = eig.eigenvalues[c];
                let y: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
                let mut r = vec![0.0; n];
                let mut bx = vec![0.0; n];
                for (j, yj) in y.iter().enumerate() {
                    for i in 0..n {
                        r[i] += yj * (self.aq[j][i] - lambda * self.bq[j][i]);
                        bx[i] += yj * self.bq[j][i];
                    }
                }
                let res = norm(&r) / ((1.0 + lambda.abs()) * norm(&bx));
                (lambda, y, res)
            })
            .collect()
    }

    fn combine(&self, y: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.q[0].len()];
        for (yj, q) in y.iter().zip(&self.q) {
            x.iter_mut().zip(q).for_each(|(xi, qi)| *xi += yj * qi);
        }
        x
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

fn apply_operator(factor: &SkylineCholesky, b: &SparseSymMatrix, x: &[f64]) -> Vec<f64> {
    let mut y = b.mul_vec(x);
    factor.solve_in_place(&mut y);
    y
}

/// Lowest `k` eigenpairs by block Lanczos on (A - shift B)^-1 B with full
/// reorthogonalization. The shift must lie below the lowest eigenvalue.
pub fn solve_sparse(
    a: &SparseSymMatrix,
    b: &SparseSymMatrix,
    k: usize,
    shift: f64,
    options: &LanczosOptions,
) -> Result<SpectralResult> {
    let n = a.dim();
    if b.dim() != n {
        return Err(SpectraError::Parameter("A and B have different dimensions".into()));
    }
    if k > n {
        return Err(SpectraError::Parameter(format!(
            "requested {k} eigenpairs of a {n}-dimensional problem"
        )));
    }
    if options.block_size == 0 {
        return Err(SpectraError::Parameter("block size must be positive".into()));
    }
    if k == 0 {
        return Ok(SpectralResult::empty("lanczos", options.tolerance));
    }
    if let Err(pivot) = SkylineCholesky::factor(b) {
        return Err(SpectraError::MassNotSpd { pivot });
    }
    let factor = factor_shifted(a, b, shift)?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let p = options.block_size.min(n);
    let max_steps = options.max_steps_per_pair * k;

    let mut basis = Basis::new(a, b);
    let mut block: Vec<Vec<f64>> = (0..p).map(|_| random_vector(&mut rng, n)).collect();
    let mut last = Vec::new();
    for step in 1..=max_steps {
        let start = basis.len();
        for w in block.drain(..) {
            let w = apply_operator(&factor, b, &w);
            if basis.len() < n {
                basis.push(w);
            }
        }
        let mut attempts = 0;
        while basis.len() == start && basis.len() < n && attempts < 10 {
            let w = apply_operator(&factor, b, &random_vector(&mut rng, n));
            basis.push(w);
            attempts += 1;
        }
        block = basis.q[start..].to_vec();

        if basis.len() >= k {
            let ritz = basis.ritz(k);
            let converged = ritz.iter().all(|(_, _, r)| *r <= options.tolerance);
            last = ritz.iter().map(|(_, _, r)| *r).collect();
            if converged || basis.len() == n {
                return finish(a, b, &basis, ritz, step, options.tolerance);
            }
        }
        if block.is_empty() {
            break;
        }
    }
    Err(SpectraError::Convergence {
        iterations: max_steps,
        residuals: last,
    })
}

fn finish(
    a: &SparseSymMatrix,
    b: &SparseSymMatrix,
    basis: &Basis,
    ritz: Vec<(f64, Vec<f64>, f64)>,
    iterations: usize,
    tolerance: f64,
) -> Result<SpectralResult> {
    let mut result = SpectralResult::empty("lanczos", tolerance);
    result.iterations = iterations;
    for (lambda, y, _) in ritz {
        let mut x = basis.combine(&y);
        let scale = b.bilinear(&x, &x).sqrt();
        x.iter_mut().for_each(|v| *v /= scale);
        fix_sign(&mut x);
        result.residuals.push(relative_residual(a, b, lambda, &x));
        result.eigenvalues.push(lambda);
        result.eigenvectors.push(x);
    }
    if result.residuals.iter().any(|r| !(*r <= tolerance)) {
        return Err(SpectraError::Convergence {
            iterations,
            residuals: result.residuals,
        });
    }
    Ok(result)
}
