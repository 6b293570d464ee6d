//! Compressed sparse row storage for complex matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Square or rectangular complex matrix in CSR form.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            data: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            data: vec![C64::new(1.0, 0.0); n],
        }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates and
    /// dropping exact zeros.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        mut triplets: Vec<(usize, usize, C64)>,
    ) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; nrows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut data: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(
                r < nrows && c < ncols,
                "triplet ({r}, {c}) outside {nrows}x{ncols}"
            );
            if last == Some((r, c)) {
                *data.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                data.push(v);
                rows.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_idx = Vec::with_capacity(indices.len());
        let mut keep_data = Vec::with_capacity(data.len());
        for ((r, c), v) in rows.into_iter().zip(indices).zip(data) {
            if v != C64::new(0.0, 0.0) {
                indptr[r + 1] += 1;
                keep_idx.push(c);
                keep_data.push(v);
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Self {
            nrows,
            ncols,
            indptr,
            indices: keep_idx,
            data: keep_data,
        }
    }

    /// Sparse copy of a dense matrix, dropping entries with modulus `<= tol`.
    pub fn from_dense(m: &DMatrix<C64>, tol: f64) -> Self {
        let mut t = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v.norm() > tol {
                    t.push((r, c, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    /// Iterator over `(row, col, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.data[k]))
        })
    }

    /// Entries of one row as `(col, value)`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        (self.indptr[r]..self.indptr[r + 1]).map(move |k| (self.indices[k], self.data[k]))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.row(r)
            .find(|&(j, _)| j == c)
            .map(|(_, v)| v)
            .unwrap_or_default()
    }

    /// `out += scale * self * x`.
    pub fn mul_vec_acc(&self, scale: C64, x: &[C64], out: &mut [C64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(out.len(), self.nrows);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.data[k] * x[self.indices[k]];
            }
            *o += scale * acc;
        }
    }

    pub fn mul_vec(&self, x: &DVector<C64>) -> DVector<C64> {
        let mut out = DVector::zeros(self.nrows);
        self.mul_vec_acc(C64::new(1.0, 0.0), x.as_slice(), out.as_mut_slice());
        out
    }

    /// `out += scale * self * m` for a dense right factor.
    pub fn mul_dense_acc(&self, scale: C64, m: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        debug_assert_eq!(m.nrows(), self.ncols);
        for c in 0..m.ncols() {
            let col = m.column(c);
            let mut ocol = out.column_mut(c);
            for r in 0..self.nrows {
                let mut acc = C64::new(0.0, 0.0);
                for k in self.indptr[r]..self.indptr[r + 1] {
                    acc += self.data[k] * col[self.indices[k]];
                }
                ocol[r] += scale * acc;
            }
        }
    }

    pub fn mul_dense(&self, m: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.nrows, m.ncols());
        self.mul_dense_acc(C64::new(1.0, 0.0), m, &mut out);
        out
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.ncols, other.nrows, "inner dimensions differ");
        let mut t = Vec::new();
        let mut acc = vec![C64::new(0.0, 0.0); other.ncols];
        let mut touched = Vec::new();
        let mut seen = vec![false; other.ncols];
        for r in 0..self.nrows {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !seen[c] {
                        seen[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            for &c in &touched {
                t.push((r, c, acc[c]));
                acc[c] = C64::new(0.0, 0.0);
                seen[c] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.nrows, other.ncols, t)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CsrMatrix {
        let t = self.iter().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.ncols, self.nrows, t)
    }

    /// `self + scale * other`.
    pub fn add_scaled(&self, scale: C64, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(
            (self.nrows, self.ncols),
            (other.nrows, other.ncols),
            "shapes differ"
        );
        let t = self
            .iter()
            .chain(other.iter().map(|(r, c, v)| (r, c, scale * v)))
            .collect();
        Self::from_triplets(self.nrows, self.ncols, t)
    }

    pub fn scale(&self, s: C64) -> CsrMatrix {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &CsrMatrix) -> CsrMatrix {
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, a) in self.iter() {
            for (r2, c2, b) in other.iter() {
                t.push((r1 * other.nrows + r2, c1 * other.ncols + c2, a * b));
            }
        }
        Self::from_triplets(self.nrows * other.nrows, self.ncols * other.ncols, t)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    /// Largest modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        self.add_scaled(C64::new(-1.0, 0.0), other)
            .data
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum, an upper bound on the spectral radius.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample() -> CsrMatrix {
        CsrMatrix::from_triplets(
            3,
            3,
            vec![
                (0, 1, c(1.0, 2.0)),
                (2, 0, c(-1.0, 0.5)),
                (1, 1, c(3.0, 0.0)),
                (0, 1, c(1.0, 0.0)),
            ],
        )
    }

    #[test]
    fn duplicates_are_summed() {
        let m = sample();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.get(0, 1), c(2.0, 2.0));
        assert_eq!(m.get(2, 2), c(0.0, 0.0));
    }

    #[test]
    fn products_match_dense() {
        let a = sample();
        let b = a.adjoint().add_scaled(c(0.0, 1.0), &CsrMatrix::identity(3));
        let dense = a.to_dense() * b.to_dense();
        let sparse = a.matmul(&b).to_dense();
        assert!((dense - sparse).norm() < 1e-14);
        let m = DMatrix::from_fn(3, 2, |r, k| c(r as f64, k as f64 - 1.0));
        assert!((a.mul_dense(&m) - a.to_dense() * &m).norm() < 1e-14);
        let v = DVector::from_fn(3, |r, _| c(1.0, r as f64));
        assert!((a.mul_vec(&v) - a.to_dense() * &v).norm() < 1e-14);
    }

    #[test]
    fn kron_matches_dense() {
        let a = sample();
        let b = CsrMatrix::from_triplets(2, 2, vec![(0, 1, c(1.0, 0.0)), (1, 0, c(0.0, 1.0))]);
        let k = a.kron(&b).to_dense();
        let (ad, bd) = (a.to_dense(), b.to_dense());
        for r in 0..6 {
            for col in 0..6 {
                assert_eq!(k[(r, col)], ad[(r / 2, col / 2)] * bd[(r % 2, col % 2)]);
            }
        }
    }

    #[test]
    fn adjoint_round_trips() {
        let a = sample();
        assert_eq!(a.adjoint().adjoint(), a);
        assert!(a.to_dense().adjoint() == a.adjoint().to_dense());
    }
}
