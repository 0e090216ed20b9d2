//! Dense complex matrices and the few factorizations the rest of the crate needs.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

/// Tolerance for accepting a floating matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("eigendecomposition failed to reach residual {0:e}")]
    EigenFailed(f64),
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// e^{i theta}
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn pauli(axis: usize) -> ComplexMatrix {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    match axis {
        0 => ComplexMatrix::identity(2, 2),
        1 => ComplexMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        2 => ComplexMatrix::from_row_slice(2, 2, &[z, -I, I, z]),
        3 => ComplexMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("pauli axis {axis} out of range"),
    }
}

pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut m = ComplexMatrix::zeros(ra + rb, ca + cb);
    m.view_mut((0, 0), (ra, ca)).copy_from(a);
    m.view_mut((ra, ca), (rb, cb)).copy_from(b);
    m
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &ComplexMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// ‖U†U − I‖ in the max-entry norm.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let g = u.adjoint() * u;
    max_abs_diff(&g, &ComplexMatrix::identity(u.ncols(), u.ncols()))
}

/// Product that skips structurally zero entries of the left factor.
/// Projectors and the blocked evolution have O(1) nonzeros per row, so this
/// turns cubic products into quadratic ones.
pub fn sparse_left_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.ncols(), b.nrows());
    let mut out = ComplexMatrix::zeros(a.nrows(), b.ncols());
    for k in 0..a.ncols() {
        for i in 0..a.nrows() {
            let aik = a[(i, k)];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..b.ncols() {
                let bkj = b[(k, j)];
                if bkj != C64::new(0.0, 0.0) {
                    out[(i, j)] += aik * bkj;
                }
            }
        }
    }
    out
}

/// `a * b * a` for a sparse `a`, typically a projector.
pub fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let ab = sparse_left_mul(a, b);
    sparse_left_mul(&a.transpose(), &ab.transpose()).transpose()
}

/// exp(−i·scale·H) for Hermitian H, through the spectral decomposition.
pub fn hermitian_exp(h: &ComplexMatrix, scale: f64) -> Result<ComplexMatrix, LinalgError> {
    let (r, cdim) = h.shape();
    if r != cdim {
        return Err(LinalgError::NotSquare(r, cdim));
    }
    let dev = hermiticity_defect(h);
    if dev > HERMITIAN_TOL {
        return Err(LinalgError::NotHermitian(dev));
    }
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = sym.symmetric_eigen();
    let phases = eig.eigenvalues.map(|e| C64::from_polar(1.0, -scale * e));
    let v = &eig.eigenvectors;
    let mut vd = v.clone();
    for (j, mut col) in vd.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    Ok(vd * v.adjoint())
}

/// Eigendecomposition of a unitary matrix.
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    pub eigenvalues: Vec<C64>,
    /// Orthonormal eigenvectors, one per column.
    pub vectors: ComplexMatrix,
    /// Largest ‖Uv − λv‖ over the returned pairs.
    pub residual: f64,
}

/// Diagonalizes a unitary through a Cayley transform onto a Hermitian matrix.
///
/// For a reference phase e^{iφ} outside the spectrum,
/// `i(e^{iφ} + U)(e^{iφ} − U)^{-1}` is Hermitian with the same eigenvectors,
/// so the Hermitian solver yields an orthonormal eigenbasis even inside
/// degenerate eigenspaces. Several reference phases are tried in turn.
pub fn unitary_eigen(u: &ComplexMatrix, tol: f64) -> Result<UnitaryEigen, LinalgError> {
    let (r, cdim) = u.shape();
    if r != cdim {
        return Err(LinalgError::NotSquare(r, cdim));
    }
    let n = r;
    let dev = unitarity_defect(u);
    if dev > 1e-10 {
        return Err(LinalgError::NotUnitary(dev));
    }
    let mut best = f64::INFINITY;
    for &phi in &[1.234_567_890_1, -2.468_013_579_7, 0.372_839_104_5, 2.913_579_246_8] {
        let shift = ComplexMatrix::identity(n, n) * cis(phi);
        let Some(inv) = (&shift - u).try_inverse() else {
            continue;
        };
        let cay = ((&shift + u) * inv) * I;
        let cay = (&cay + cay.adjoint()).scale(0.5);
        let eig = cay.symmetric_eigen();
        let vectors = eig.eigenvectors;
        let uv = u * &vectors;
        let mut eigenvalues = Vec::with_capacity(n);
        let mut residual: f64 = 0.0;
        for j in 0..n {
            let v = vectors.column(j);
            let w = uv.column(j);
            let lam = v.dotc(&w);
            let lam = lam / lam.norm();
            let res = (w - v * lam).norm();
            residual = residual.max(res);
            eigenvalues.push(lam);
        }
        if residual <= tol {
            return Ok(UnitaryEigen { eigenvalues, vectors, residual });
        }
        best = best.min(residual);
    }
    Err(LinalgError::EigenFailed(best))
}

/// Eigenphases of a unitary in (−π, π], ascending.
pub fn eigenphases(u: &ComplexMatrix) -> Result<Vec<f64>, LinalgError> {
    let eig = unitary_eigen(u, 1e-10)?;
    let mut ph: Vec<f64> = eig.eigenvalues.iter().map(|z| wrap_phase(z.arg())).collect();
    ph.sort_by(f64::total_cmp);
    Ok(ph)
}

/// Maps an angle into (−π, π].
pub fn wrap_phase(theta: f64) -> f64 {
    use std::f64::consts::PI;
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    t
}
