//! Symmetric sparse matrices and an envelope Cholesky factorization.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::error::{Result, SpectraError};

/// Symmetric matrix stored as its upper triangle (row <= col) in CSR form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    /// Builds the matrix from (row, col, value) triplets. Either triangle may
    /// be given; duplicates are summed in input order.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut upper: Vec<(usize, usize, f64)> = triplets
            .iter()
            .map(|&(i, j, v)| if i <= j { (i, j, v) } else { (j, i, v) })
            .collect();
        upper.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(upper.len());
        let mut values: Vec<f64> = Vec::with_capacity(upper.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in upper {
            assert!(j < dim, "triplet ({i}, {j}) outside dimension {dim}");
            if last == Some((i, j)) {
                *values.last_mut().expect("previous entry") += v;
            } else {
                cols.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSymMatrix {
            dim,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored upper-triangle entries.
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Stored entries of row i with column >= i.
    pub fn upper_row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[range.clone()].binary_search(&c) {
            Ok(pos) => self.values[range.start + pos],
            Err(_) => 0.0,
        }
    }

    /// y = M x.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..self.dim {
            let mut acc = 0.0;
            for (j, v) in self.upper_row(i) {
                acc += v * x[j];
                if j != i {
                    y[j] += v * x[i];
                }
            }
            y[i] += acc;
        }
    }

    /// x^T M y.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        self.mul_vec(y).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for i in 0..self.dim {
            for (j, v) in self.upper_row(i) {
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// Upper-triangle entries as `i j value` lines, 17 significant digits.
    pub fn to_coordinate_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim {
            for (j, v) in self.upper_row(i) {
                let _ = writeln!(out, "{i} {j} {v:.16e}");
            }
        }
        out
    }
}

/// Row-oriented envelope (skyline) Cholesky factor L of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    dim: usize,
    /// First stored column of each row of L.
    first: Vec<usize>,
    /// Offset of each row within `data`; row i holds columns first[i]..=i.
    offset: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    /// Factors a - shift * b. Returns the zero-based index of the first
    /// nonpositive pivot on failure.
    pub fn factor_shifted(a: &SparseSymMatrix, b: &SparseSymMatrix, shift: f64) -> std::result::Result<Self, usize> {
        assert_eq!(a.dim(), b.dim(), "matrix dimensions differ");
        let n = a.dim();
        let mut first: Vec<usize> = (0..n).collect();
        for m in [a, b] {
            for i in 0..n {
                for (j, _) in m.upper_row(i) {
                    first[j] = first[j].min(i);
                }
            }
        }
        let mut offset = Vec::with_capacity(n + 1);
        let mut total = 0;
        for (i, f) in first.iter().enumerate() {
            offset.push(total);
            total += i - f + 1;
        }
        offset.push(total);
        let mut data = vec![0.0; total];
        for i in 0..n {
            for (j, v) in a.upper_row(i) {
                data[offset[j] + i - first[j]] += v;
            }
            if shift != 0.0 {
                for (j, v) in b.upper_row(i) {
                    data[offset[j] + i - first[j]] -= shift * v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let start = fi.max(fj);
                let mut s = data[offset[i] + j - fi];
                let row_i = &data[offset[i] + start - fi..offset[i] + j - fi];
                let row_j = &data[offset[j] + start - fj..offset[j] + j - fj];
                s -= row_i.iter().zip(row_j).map(|(x, y)| x * y).sum::<f64>();
                if j < i {
                    let djj = data[offset[j] + j - fj];
                    data[offset[i] + j - fi] = s / djj;
                } else {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(i);
                    }
                    data[offset[i] + i - fi] = s.sqrt();
                }
            }
        }
        Ok(SkylineCholesky {
            dim: n,
            first,
            offset,
            data,
        })
    }

    pub fn factor(m: &SparseSymMatrix) -> std::result::Result<Self, usize> {
        let zero = SparseSymMatrix::from_triplets(m.dim(), &[]);
        Self::factor_shifted(m, &zero, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored entries of L.
    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[self.offset[i]..self.offset[i + 1]]
    }

    /// Solves (L L^T) x = rhs in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.dim;
        for i in 0..n {
            let row = self.row(i);
            let fi = self.first[i];
            let s: f64 = row[..i - fi].iter().zip(&x[fi..i]).map(|(l, v)| l * v).sum();
            x[i] = (x[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let row = self.row(i);
            let fi = self.first[i];
            x[i] /= row[i - fi];
            let xi = x[i];
            for (l, v) in row[..i - fi].iter().zip(&mut x[fi..i]) {
                *v -= l * xi;
            }
        }
    }
}

/// Factors a - shift * b, mapping failure to a shift error.
pub fn factor_shifted(a: &SparseSymMatrix, b: &SparseSymMatrix, shift: f64) -> Result<SkylineCholesky> {
    SkylineCholesky::factor_shifted(a, b, shift).map_err(|pivot| SpectraError::Shift { shift, pivot })
}
