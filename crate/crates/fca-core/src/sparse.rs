//! Column-compressed complex matrices for the lattice operators, which have a
//! handful of nonzeros per column.

use crate::linalg::{ComplexMatrix, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    /// Per column: (row, value), rows ascending, no explicit zeros.
    columns: Vec<Vec<(usize, C64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, columns: (0..n).map(|j| vec![(j, C64::new(1.0, 0.0))]).collect() }
    }

    /// Builds from (row, col, value) triplets, summing duplicates.
    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, C64)>) -> Self {
        let mut columns: Vec<Vec<(usize, C64)>> = vec![Vec::new(); cols];
        for (r, c, v) in triplets {
            assert!(r < rows && c < cols, "triplet ({r}, {c}) outside {rows}x{cols}");
            columns[c].push((r, v));
        }
        for col in columns.iter_mut() {
            *col = compress(std::mem::take(col));
        }
        Self { rows, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[(usize, C64)] {
        &self.columns[j]
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols());
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        for (x, col) in v.iter().zip(&self.columns) {
            if x.re == 0.0 && x.im == 0.0 {
                continue;
            }
            for &(r, a) in col {
                out[r] += a * x;
            }
        }
        out
    }

    /// A† v
    pub fn apply_adjoint(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.rows);
        self.columns.iter().map(|col| col.iter().map(|&(r, a)| a.conj() * v[r]).sum()).collect()
    }

    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.cols(), rhs.rows);
        let columns = rhs
            .columns
            .iter()
            .map(|rcol| {
                let mut acc = Vec::new();
                for &(k, b) in rcol {
                    for &(i, a) in &self.columns[k] {
                        acc.push((i, a * b));
                    }
                }
                compress(acc)
            })
            .collect();
        SparseMatrix { rows: self.rows, columns }
    }

    pub fn adjoint(&self) -> SparseMatrix {
        let mut trip = Vec::with_capacity(self.nnz());
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                trip.push((c, r, v.conj()));
            }
        }
        SparseMatrix::from_triplets(self.cols(), self.rows, trip)
    }

    pub fn add(&self, rhs: &SparseMatrix) -> SparseMatrix {
        self.combine(rhs, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, rhs: &SparseMatrix) -> SparseMatrix {
        self.combine(rhs, C64::new(-1.0, 0.0))
    }

    fn combine(&self, rhs: &SparseMatrix, factor: C64) -> SparseMatrix {
        assert_eq!((self.rows, self.cols()), (rhs.rows, rhs.cols()));
        let columns = self
            .columns
            .iter()
            .zip(&rhs.columns)
            .map(|(a, b)| {
                let mut acc = a.clone();
                acc.extend(b.iter().map(|&(r, v)| (r, v * factor)));
                compress(acc)
            })
            .collect();
        SparseMatrix { rows: self.rows, columns }
    }

    pub fn scale(&self, s: C64) -> SparseMatrix {
        let columns = self.columns.iter().map(|col| compress(col.iter().map(|&(r, v)| (r, v * s)).collect())).collect();
        SparseMatrix { rows: self.rows, columns }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.rows, self.cols());
        for (c, col) in self.columns.iter().enumerate() {
            for &(r, v) in col {
                m[(r, c)] = v;
            }
        }
        m
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.columns.iter().flatten().map(|(_, v)| v.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm; bounds the operator norm from above.
    pub fn frobenius(&self) -> f64 {
        self.columns.iter().flatten().map(|(_, v)| v.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn compress(mut entries: Vec<(usize, C64)>) -> Vec<(usize, C64)> {
    entries.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, C64)> = Vec::with_capacity(entries.len());
    for (r, v) in entries {
        match out.last_mut() {
            Some(last) if last.0 == r => last.1 += v,
            _ => out.push((r, v)),
        }
    }
    out.retain(|(_, v)| v.re != 0.0 || v.im != 0.0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs_diff};

    fn sample() -> SparseMatrix {
        SparseMatrix::from_triplets(
            3,
            3,
            [(0, 0, c(1.0, 0.0)), (2, 0, c(0.0, 2.0)), (1, 2, c(-1.0, 1.0)), (1, 2, c(0.5, 0.0))],
        )
    }

    #[test]
    fn duplicates_are_summed() {
        let m = sample();
        assert_eq!(m.column(2), &[(1, c(-0.5, 1.0))]);
        assert_eq!(m.nnz(), 3);
    }

    #[test]
    fn agrees_with_dense() {
        let a = sample();
        let b = a.adjoint().add(&SparseMatrix::identity(3));
        let dense = a.to_dense() * b.to_dense();
        assert!(max_abs_diff(&a.mul(&b).to_dense(), &dense) < 1e-15);
        let v = vec![c(1.0, 2.0), c(-0.3, 0.0), c(0.0, 1.0)];
        let w = a.apply(&v);
        let wd = a.to_dense() * nalgebra::DVector::from_vec(v.clone());
        for i in 0..3 {
            assert!((w[i] - wd[i]).norm() < 1e-15);
        }
        let wa = a.apply_adjoint(&v);
        let wad = a.to_dense().adjoint() * nalgebra::DVector::from_vec(v);
        for i in 0..3 {
            assert!((wa[i] - wad[i]).norm() < 1e-15);
        }
    }

    #[test]
    fn cancellation_drops_entries() {
        let a = sample();
        assert_eq!(a.sub(&a).nnz(), 0);
        assert_eq!(a.sub(&a).frobenius(), 0.0);
    }
}
