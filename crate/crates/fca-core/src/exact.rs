//! Exact Gaussian-rational matrices and a row-reduction kernel solver.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::linalg::{ComplexMatrix, C64};

/// a + bi with a, b rational. `BigRational` keeps itself reduced.
pub type ExactScalar = Complex<BigRational>;

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn gauss(re: i64, im: i64) -> ExactScalar {
    Complex::new(rational(re), rational(im))
}

pub fn is_zero(z: &ExactScalar) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

fn to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Dense row-major matrix over Gaussian rationals.
#[derive(Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<ExactScalar>,
}

impl ExactMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![ExactScalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ExactScalar::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> ExactScalar) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Builds from integer (re, im) pairs in row-major order.
    pub fn from_gauss_ints(rows: usize, cols: usize, vals: &[(i64, i64)]) -> Self {
        assert_eq!(vals.len(), rows * cols);
        Self { rows, cols, entries: vals.iter().map(|&(a, b)| gauss(a, b)).collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[ExactScalar] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[ExactScalar] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(is_zero)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols && *self == self.adjoint()
    }

    pub fn scale(&self, s: &ExactScalar) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|z| z * s).collect() }
    }

    /// `self * other − other * self`
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        &(self * other) + &(other * self)
    }

    /// Entry-wise real and imaginary parts, each as a rational matrix embedded
    /// back into Gaussian rationals.
    pub fn split_re_im(&self) -> (Self, Self) {
        let re = Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| Complex::new(z.re.clone(), BigRational::zero())).collect(),
        };
        let im = Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| Complex::new(z.im.clone(), BigRational::zero())).collect(),
        };
        (re, im)
    }

    /// Flattens row-major into a single column.
    pub fn vectorize(&self) -> Vec<ExactScalar> {
        self.entries.clone()
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            let z = &self[(i, j)];
            C64::new(to_f64(&z.re), to_f64(&z.im))
        })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<ExactScalar>]) -> Self {
        let rows = cols.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn mul_vec(&self, v: &[ExactScalar]) -> Vec<ExactScalar> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = ExactScalar::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !is_zero(a) && !is_zero(b) {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }
}

impl Index<(usize, usize)> for ExactMatrix {
    type Output = ExactScalar;
    fn index(&self, (i, j): (usize, usize)) -> &ExactScalar {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ExactMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ExactScalar {
        &mut self.entries[i * self.cols + j]
    }
}

impl Mul for &ExactMatrix {
    type Output = ExactMatrix;
    fn mul(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out = ExactMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if is_zero(a) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !is_zero(b) {
                        out[(i, j)] = &out[(i, j)] + a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &ExactMatrix {
    type Output = ExactMatrix;
    fn add(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ExactMatrix {
    type Output = ExactMatrix;
    fn sub(self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ExactMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ExactMatrix {
    type Output = ExactMatrix;
    fn neg(self) -> ExactMatrix {
        ExactMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(|z| -z).collect() }
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ExactMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|z| format!("{}+{}i", z.re, z.im)).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Reduced row echelon form, built one row at a time so that only pivot rows
/// are ever stored.
#[derive(Debug, Clone)]
pub struct RowEchelon {
    cols: usize,
    /// (pivot column, row with a unit pivot and zeros in every other pivot column)
    pivots: Vec<(usize, Vec<ExactScalar>)>,
}

impl RowEchelon {
    pub fn new(cols: usize) -> Self {
        Self { cols, pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` against the current pivots; returns what is left.
    pub fn reduce(&self, mut row: Vec<ExactScalar>) -> Vec<ExactScalar> {
        for (pc, prow) in &self.pivots {
            if is_zero(&row[*pc]) {
                continue;
            }
            let f = row[*pc].clone();
            for (x, p) in row.iter_mut().zip(prow) {
                if !is_zero(p) {
                    *x = &*x - &f * p;
                }
            }
        }
        row
    }

    /// Adds a row; returns true if it increased the rank.
    pub fn push(&mut self, row: Vec<ExactScalar>) -> bool {
        assert_eq!(row.len(), self.cols);
        let mut row = self.reduce(row);
        let Some(pc) = row.iter().position(|z| !is_zero(z)) else {
            return false;
        };
        let inv = ExactScalar::one() / &row[pc];
        for x in row.iter_mut() {
            if !is_zero(x) {
                *x = &*x * &inv;
            }
        }
        for (_, prow) in self.pivots.iter_mut() {
            if is_zero(&prow[pc]) {
                continue;
            }
            let f = prow[pc].clone();
            for (x, r) in prow.iter_mut().zip(&row) {
                if !is_zero(r) {
                    *x = &*x - &f * r;
                }
            }
        }
        self.pivots.push((pc, row));
        true
    }

    /// Basis of the right kernel of the accumulated rows.
    pub fn kernel(&self) -> Vec<Vec<ExactScalar>> {
        let mut is_pivot = vec![false; self.cols];
        for (pc, _) in &self.pivots {
            is_pivot[*pc] = true;
        }
        (0..self.cols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut v = vec![ExactScalar::zero(); self.cols];
                v[f] = ExactScalar::one();
                for (pc, prow) in &self.pivots {
                    v[*pc] = -prow[f].clone();
                }
                v
            })
            .collect()
    }
}

/// Basis of {v : M v = 0} over the Gaussian rationals.
pub fn exact_nullspace(m: &ExactMatrix) -> Vec<Vec<ExactScalar>> {
    let mut ech = RowEchelon::new(m.cols());
    for i in 0..m.rows() {
        if ech.rank() == m.cols() {
            break;
        }
        ech.push(m.row(i).to_vec());
    }
    ech.kernel()
}

pub fn exact_rank(m: &ExactMatrix) -> usize {
    let mut ech = RowEchelon::new(m.cols());
    for i in 0..m.rows() {
        ech.push(m.row(i).to_vec());
    }
    ech.rank()
}

/// Rank of a family of vectors of equal length.
pub fn rank_of_vectors(vs: &[Vec<ExactScalar>]) -> usize {
    let Some(first) = vs.first() else { return 0 };
    let mut ech = RowEchelon::new(first.len());
    for v in vs {
        ech.push(v.clone());
    }
    ech.rank()
}
