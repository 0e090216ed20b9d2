//! Fermionic mode operators on the 2^s occupation basis.
//!
//! Basis state index bit j is the occupation of mode j (mode 0 is the least
//! significant bit). The operator for mode j picks up the Jordan-Wigner sign
//! (−1)^{n_0+…+n_{j−1}} from the modes below it.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::{ExactMatrix, ExactScalar};
use crate::linalg::{ComplexMatrix, C64};

pub const MAX_MODES: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FockError {
    #[error("mode index {mode} out of range for {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },
    #[error("{0} modes exceeds the supported maximum of {MAX_MODES}")]
    TooManyModes(usize),
}

#[derive(Debug, Clone)]
pub struct FockOperator {
    pub modes: usize,
    pub matrix: ComplexMatrix,
}

/// (row, col, sign) triples of the mode operator.
fn entries(mode: usize, daggered: bool, modes: usize) -> Result<Vec<(usize, usize, i64)>, FockError> {
    if modes > MAX_MODES {
        return Err(FockError::TooManyModes(modes));
    }
    if mode >= modes {
        return Err(FockError::ModeOutOfRange { mode, modes });
    }
    let bit = 1usize << mode;
    let below = bit - 1;
    let mut out = Vec::new();
    for state in 0..(1usize << modes) {
        let occupied = state & bit != 0;
        if occupied == daggered {
            continue;
        }
        let sign = if (state & below).count_ones().is_multiple_of(2) { 1 } else { -1 };
        out.push((state ^ bit, state, sign));
    }
    Ok(out)
}

/// ψ_j (or ψ†_j when `daggered`) on `modes` modes.
pub fn field_operator(mode: usize, daggered: bool, modes: usize) -> Result<FockOperator, FockError> {
    let dim = 1usize << modes.min(MAX_MODES);
    let mut matrix = ComplexMatrix::zeros(dim, dim);
    for (r, col, s) in entries(mode, daggered, modes)? {
        matrix[(r, col)] = C64::new(s as f64, 0.0);
    }
    Ok(FockOperator { modes, matrix })
}

/// Exact counterpart of [`field_operator`].
pub fn exact_field_operator(mode: usize, daggered: bool, modes: usize) -> Result<ExactMatrix, FockError> {
    let dim = 1usize << modes.min(MAX_MODES);
    let mut m = ExactMatrix::zeros(dim, dim);
    for (r, col, s) in entries(mode, daggered, modes)? {
        m[(r, col)] = if s > 0 { ExactScalar::one() } else { -ExactScalar::one() };
    }
    Ok(m)
}

/// Exact annihilators and creators for every mode.
pub struct ExactModes {
    pub annihilators: Vec<ExactMatrix>,
    pub creators: Vec<ExactMatrix>,
}

impl ExactModes {
    pub fn new(modes: usize) -> Result<Self, FockError> {
        let annihilators = (0..modes).map(|j| exact_field_operator(j, false, modes)).collect::<Result<Vec<_>, _>>()?;
        let creators = (0..modes).map(|j| exact_field_operator(j, true, modes)).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { annihilators, creators })
    }

    pub fn modes(&self) -> usize {
        self.annihilators.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.modes()
    }

    pub fn number(&self, j: usize) -> ExactMatrix {
        &self.creators[j] * &self.annihilators[j]
    }

    pub fn total_number(&self) -> ExactMatrix {
        let mut n = ExactMatrix::zeros(self.dim(), self.dim());
        for j in 0..self.modes() {
            n = &n + &self.number(j);
        }
        n
    }

    /// Normal-ordered ψ†_{c1}…ψ†_{cq} ψ_{a1}…ψ_{aq} with the listed order.
    pub fn monomial(&self, creators: &[usize], annihilators: &[usize]) -> ExactMatrix {
        let mut m = ExactMatrix::identity(self.dim());
        for &j in creators {
            m = &m * &self.creators[j];
        }
        for &j in annihilators {
            m = &m * &self.annihilators[j];
        }
        m
    }
}

/// Occupation number of `mode` in basis state `state`.
pub fn occupation(state: usize, mode: usize) -> bool {
    state >> mode & 1 == 1
}

pub fn vacuum(modes: usize) -> Vec<ExactScalar> {
    let mut v = vec![ExactScalar::zero(); 1 << modes];
    v[0] = ExactScalar::one();
    v
}
