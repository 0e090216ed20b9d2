//! Two-particle sector of the one-dimensional interacting automaton at fixed
//! total momentum `p`.
//!
//! States live on `span{|e_i⟩|y⟩}` with six internal pair labels and the
//! relative coordinate `y ∈ −L..=L`. Each parity class of `y` is a ring
//! (even sites: `L+1`, odd sites: `L`), so shifts by two wrap cyclically and
//! the free step stays exactly unitary.
//!
//! Pair labels (particle one, particle two) over the cell modes 1..4:
//! e1 = (1,4), e2 = (3,2), e3 = (3,4), e4 = (4,1), e5 = (2,3), e6 = (4,3).
//! Label `i + 3` is the exchange partner of label `i`.

mod blocking;
mod states;

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{c, cis, ComplexMatrix, C64, I};
use crate::sparse::SparseMatrix;

pub use blocking::{PairSpace, QBlockingReport};
pub use states::{
    analytic_free_state, analytic_scattering_state, bound_state_vector, bound_states, characteristic_roots,
    contact_states, free_grid, scattering_coefficients, scattering_grid, AnalyticEigenstate, CharacteristicRoots,
    Family, ScatteringCoefficients,
};

/// Tolerance for switching onto a critical branch (`2p = n′π`, `√2|λ| = nπ`).
pub const CRITICAL_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwoParticleError {
    #[error("half-width L must be even and at least 8, got {0}")]
    BadHalfWidth(usize),
    #[error("parameters must be finite")]
    NonFinite,
    #[error("k = {0} is not on the discrete momentum grid")]
    OffGrid(f64),
    #[error("scattering state vanishes identically at k = {0}")]
    Degenerate(f64),
    #[error("cos(√2|λ|) vanishes; characteristic roots are undefined")]
    GammaZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoParticleParams {
    pub p: f64,
    pub lambda: C64,
    pub half_width: usize,
}

impl TwoParticleParams {
    pub fn new(p: f64, lambda_abs: f64, lambda_phase: f64, half_width: usize) -> Result<Self, TwoParticleError> {
        Self::with_lambda(p, lambda_abs * cis(lambda_phase), half_width)
    }

    pub fn with_lambda(p: f64, lambda: C64, half_width: usize) -> Result<Self, TwoParticleError> {
        if !(p.is_finite() && lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(TwoParticleError::NonFinite);
        }
        if half_width < 8 || !half_width.is_multiple_of(2) {
            return Err(TwoParticleError::BadHalfWidth(half_width));
        }
        Ok(Self { p, lambda, half_width })
    }

    /// Same model with a different truncation.
    pub fn resized(&self, half_width: usize) -> Result<Self, TwoParticleError> {
        Self::with_lambda(self.p, self.lambda, half_width)
    }

    pub fn lattice(&self) -> Lattice {
        Lattice { half_width: self.half_width }
    }

    /// √2|λ|
    pub fn mu(&self) -> f64 {
        SQRT_2 * self.lambda.norm()
    }

    pub fn gamma(&self) -> f64 {
        self.mu().cos()
    }

    pub fn epsilon(&self) -> f64 {
        (2.0 * self.p).cos() * (self.gamma() + 1.0)
    }

    /// `iλ̄ sin(√2|λ|)/(√2|λ|)`, which vanishes with λ.
    pub fn coupling(&self) -> C64 {
        let mu = self.mu();
        if mu == 0.0 {
            return c(0.0, 0.0);
        }
        I * self.lambda.conj() * (mu.sin() / mu)
    }

    /// `n′` when `2p = n′π` within [`CRITICAL_TOL`].
    pub fn critical_momentum(&self) -> Option<i64> {
        nearest_multiple(2.0 * self.p, PI)
    }

    /// `n` when `√2|λ| = nπ`; the interaction then acts only by signs.
    pub fn decoupled_index(&self) -> Option<i64> {
        nearest_multiple(self.mu(), PI)
    }

    /// `√2|λ|` is an odd multiple of π.
    pub fn odd_pi_coupling(&self) -> bool {
        self.decoupled_index().is_some_and(|n| n.rem_euclid(2) == 1)
    }
}

fn nearest_multiple(x: f64, unit: f64) -> Option<i64> {
    let n = (x / unit).round();
    ((x - n * unit).abs() < CRITICAL_TOL).then_some(n as i64)
}

/// Index bookkeeping for the truncated relative lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice {
    pub half_width: usize,
}

impl Lattice {
    pub const LABELS: usize = 6;

    pub fn sites(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn dim(&self) -> usize {
        Self::LABELS * self.sites()
    }

    /// Dimension of the antisymmetric range.
    pub fn range_dim(&self) -> usize {
        3 * self.sites()
    }

    fn l(&self) -> i64 {
        self.half_width as i64
    }

    pub fn ys(&self) -> std::ops::RangeInclusive<i64> {
        -self.l()..=self.l()
    }

    pub fn index(&self, label: usize, y: i64) -> usize {
        debug_assert!(label < Self::LABELS && y.abs() <= self.l());
        label * self.sites() + (y + self.l()) as usize
    }

    pub fn site(&self, index: usize) -> (usize, i64) {
        (index / self.sites(), (index % self.sites()) as i64 - self.l())
    }

    /// Folds `y` back onto its parity ring.
    pub fn wrap(&self, y: i64) -> i64 {
        let l = self.l();
        if y.rem_euclid(2) == 0 {
            -l + 2 * (y + l).div_euclid(2).rem_euclid(l + 1)
        } else {
            -l + 1 + 2 * (y + l - 1).div_euclid(2).rem_euclid(l)
        }
    }

    /// Coordinates in the range basis `(|e_i,y⟩ − |e_{i+3},−y⟩)/√2`, `i < 3`.
    pub fn to_range(&self, v: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::default(); self.range_dim()];
        for i in 0..3 {
            for y in self.ys() {
                out[self.index(i, y)] = (v[self.index(i, y)] - v[self.index(i + 3, -y)]) * FRAC_1_SQRT_2;
            }
        }
        out
    }

    pub fn from_range(&self, r: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::default(); self.dim()];
        for i in 0..3 {
            for y in self.ys() {
                let a = r[self.index(i, y)] * FRAC_1_SQRT_2;
                out[self.index(i, y)] += a;
                out[self.index(i + 3, -y)] -= a;
            }
        }
        out
    }

    /// Probability per site, summed over pair labels.
    pub fn marginal(&self, v: &[C64]) -> Vec<f64> {
        let n = self.sites();
        (0..n).map(|s| (0..Self::LABELS).map(|i| v[i * n + s].norm_sqr()).sum()).collect()
    }
}

/// D̃_p: phases on the contact labels, shifts by two on e3/e6.
pub fn build_free_block(params: &TwoParticleParams) -> SparseMatrix {
    let lat = params.lattice();
    let up = cis(2.0 * params.p);
    let down = up.conj();
    let one = c(1.0, 0.0);
    let mut trip = Vec::with_capacity(lat.dim());
    for y in lat.ys() {
        for (label, phase) in [(0, up), (3, up), (1, down), (4, down)] {
            trip.push((lat.index(label, y), lat.index(label, y), phase));
        }
        trip.push((lat.index(2, lat.wrap(y - 2)), lat.index(2, y), one));
        trip.push((lat.index(5, lat.wrap(y + 2)), lat.index(5, y), one));
    }
    SparseMatrix::from_triplets(lat.dim(), lat.dim(), trip)
}

/// exp(−i(O′ ⊕ O′)) on (e1..e6) at a single site, in closed form.
///
/// O′ annihilates w = (e1 − e2)/√2 and swaps u = (e1 + e2)/√2 with e3 at
/// rate √2|λ|, so the exponential is a rotation in the (u, e3) plane.
pub fn build_interaction_block(lambda: C64) -> ComplexMatrix {
    let mu = SQRT_2 * lambda.norm();
    let mut half = ComplexMatrix::identity(3, 3);
    if mu > 0.0 {
        let (s, co) = mu.sin_cos();
        let phase = lambda / lambda.norm();
        let u = [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0];
        let e3 = [0.0, 0.0, 1.0];
        for a in 0..3 {
            for b in 0..3 {
                let proj = u[a] * u[b] + e3[a] * e3[b];
                let mix = I * s * (phase.conj() * u[a] * e3[b] + phase * e3[a] * u[b]);
                half[(a, b)] += c((co - 1.0) * proj, 0.0) + mix;
            }
        }
    }
    crate::linalg::direct_sum(&half, &half)
}

/// The 3×3 generator O′ on (e1, e2, e3).
pub fn interaction_generator(lambda: C64) -> ComplexMatrix {
    let z = C64::default();
    let (l, lb) = (-lambda, -lambda.conj());
    ComplexMatrix::from_row_slice(3, 3, &[z, z, lb, z, z, lb, l, l, z])
}

/// J̃: the interaction block at y = 0, identity elsewhere.
pub fn build_contact(params: &TwoParticleParams) -> SparseMatrix {
    let lat = params.lattice();
    let block = build_interaction_block(params.lambda);
    let mut trip = Vec::with_capacity(lat.dim() + 36);
    for idx in 0..lat.dim() {
        if lat.site(idx).1 != 0 {
            trip.push((idx, idx, c(1.0, 0.0)));
        }
    }
    for a in 0..6 {
        for b in 0..6 {
            trip.push((lat.index(a, 0), lat.index(b, 0), block[(a, b)]));
        }
    }
    SparseMatrix::from_triplets(lat.dim(), lat.dim(), trip)
}

/// The exchange `X ⊗ R`: `|e_i,y⟩ ↦ |e_{i±3},−y⟩`.
pub fn build_exchange(params: &TwoParticleParams) -> SparseMatrix {
    let lat = params.lattice();
    let trip = (0..lat.dim()).map(|idx| {
        let (i, y) = lat.site(idx);
        (lat.index((i + 3) % 6, -y), idx, c(1.0, 0.0))
    });
    SparseMatrix::from_triplets(lat.dim(), lat.dim(), trip)
}

/// P̃_− = (I − X ⊗ R)/2.
pub fn build_antisymmetrizer(params: &TwoParticleParams) -> SparseMatrix {
    let lat = params.lattice();
    SparseMatrix::identity(lat.dim()).sub(&build_exchange(params)).scale(c(0.5, 0.0))
}

/// Ã₂(p) = P̃_− J̃ D̃_p P̃_− on the truncated lattice.
#[derive(Debug, Clone)]
pub struct BlockedEvolution {
    pub params: TwoParticleParams,
    pub lattice: Lattice,
    pub matrix: SparseMatrix,
}

pub fn build_evolution(params: &TwoParticleParams) -> BlockedEvolution {
    let proj = build_antisymmetrizer(params);
    let step = build_contact(params).mul(&build_free_block(params));
    let matrix = proj.mul(&step).mul(&proj);
    BlockedEvolution { params: *params, lattice: params.lattice(), matrix }
}

impl BlockedEvolution {
    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.matrix.apply(v)
    }

    pub fn dense(&self) -> ComplexMatrix {
        self.matrix.to_dense()
    }

    /// The operator in the orthonormal range basis of P̃_−.
    pub fn restricted(&self) -> ComplexMatrix {
        let lat = self.lattice;
        let n = lat.range_dim();
        let mut out = ComplexMatrix::zeros(n, n);
        let mut unit = vec![C64::default(); n];
        for col in 0..n {
            unit[col] = c(1.0, 0.0);
            let image = lat.to_range(&self.apply(&lat.from_range(&unit)));
            unit[col] = C64::default();
            for (row, v) in image.into_iter().enumerate() {
                out[(row, col)] = v;
            }
        }
        out
    }

    /// ‖Av − ωv‖₂, over all sites or only `|y| ≤ window`.
    pub fn residual(&self, v: &[C64], omega: C64, window: Option<i64>) -> f64 {
        let image = self.apply(v);
        image
            .iter()
            .zip(v)
            .enumerate()
            .filter(|(idx, _)| window.is_none_or(|w| self.lattice.site(*idx).1.abs() <= w))
            .map(|(_, (a, b))| (a - omega * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Orthogonal projectors onto the four invariant pieces of the range.
#[derive(Debug, Clone)]
pub struct SubspaceProjectors {
    /// e1/e4 pairs off the contact site.
    pub a: SparseMatrix,
    /// e2/e5 pairs off the contact site.
    pub b: SparseMatrix,
    /// e3/e6 pairs on odd sites.
    pub c: SparseMatrix,
    /// The rest: e1, e2 at y = 0 and e3 on even sites.
    pub d: SparseMatrix,
}

impl SubspaceProjectors {
    pub fn all(&self) -> [&SparseMatrix; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }
}

/// Range-basis coordinates that belong to the `d` piece.
pub fn d_coordinates(lat: &Lattice) -> Vec<usize> {
    let mut out = vec![lat.index(0, 0), lat.index(1, 0)];
    out.extend(lat.ys().filter(|y| y % 2 == 0).map(|y| lat.index(2, y)));
    out
}

pub fn subspace_projectors(params: &TwoParticleParams) -> SubspaceProjectors {
    let lat = params.lattice();
    let h = c(0.5, 0.0);
    let piece = |keep: &dyn Fn(usize, i64) -> bool| {
        let mut trip = Vec::new();
        for i in 0..3 {
            for y in lat.ys().filter(|&y| keep(i, y)) {
                // |b⟩⟨b| with b = (|i,y⟩ − |i+3,−y⟩)/√2
                let (p, q) = (lat.index(i, y), lat.index(i + 3, -y));
                trip.extend([(p, p, h), (q, q, h), (p, q, -h), (q, p, -h)]);
            }
        }
        SparseMatrix::from_triplets(lat.dim(), lat.dim(), trip)
    };
    SubspaceProjectors {
        a: piece(&|i, y| i == 0 && y != 0),
        b: piece(&|i, y| i == 1 && y != 0),
        c: piece(&|i, y| i == 2 && y % 2 != 0),
        d: piece(&|i, y| (i < 2 && y == 0) || (i == 2 && y % 2 == 0)),
    }
}

/// Frobenius norm of Ã₂ − e^{2ip}P_a − e^{−2ip}P_b − P_cÃ₂P_c − P_dÃ₂P_d.
pub fn decomposition_defect(ev: &BlockedEvolution, proj: &SubspaceProjectors) -> f64 {
    let p = ev.params.p;
    let rest = ev
        .matrix
        .sub(&proj.a.scale(cis(2.0 * p)))
        .sub(&proj.b.scale(cis(-2.0 * p)))
        .sub(&proj.c.mul(&ev.matrix).mul(&proj.c))
        .sub(&proj.d.mul(&ev.matrix).mul(&proj.d));
    rest.frobenius()
}
