//! Free walks: the two Weyl automata on the BCC lattice, the Dirac automaton
//! built from a pair of them, and the massless one-dimensional walk.

use serde::Serialize;
use thiserror::Error;

use crate::linalg::{self, c, cis, direct_sum, pauli, ComplexMatrix, LinalgError, I};

pub type Vec3 = [f64; 3];

#[derive(Debug, Error, PartialEq)]
pub enum WalkError {
    #[error("mass parameter {0} outside [-1, 1]")]
    MassOutOfRange(f64),
    #[error("generator set is not closed under rotation {0}")]
    NotClosed(usize),
    #[error("representation has {rep} elements but the group has {group}")]
    RepSize { rep: usize, group: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Chirality {
    /// The `+` automaton.
    Right,
    /// The `−` automaton.
    Left,
}

impl Chirality {
    pub fn sign(self) -> f64 {
        match self {
            Chirality::Right => 1.0,
            Chirality::Left => -1.0,
        }
    }
}

/// Positive generators h1..h4 of the BCC lattice.
pub fn bcc_generators() -> [Vec3; 4] {
    let s = 1.0 / 3f64.sqrt();
    [[s, -s, -s], [s, s, s], [-s, -s, s], [-s, s, -s]]
}

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn neg(a: &Vec3) -> Vec3 {
    [-a[0], -a[1], -a[2]]
}

/// Closed-form W(k) = d I − i a_x σx ± i a_y σy + i a_z σz.
pub fn weyl_matrix(chirality: Chirality, k: Vec3) -> ComplexMatrix {
    let ch = chirality.sign();
    let t = 1.0 / 3f64.sqrt();
    let (sx, cx) = (k[0] * t).sin_cos();
    let (sy, cy) = (k[1] * t).sin_cos();
    let (sz, cz) = (k[2] * t).sin_cos();
    let d = cx * cy * cz - ch * sx * sy * sz;
    let ax = sx * cy * cz + ch * cx * sy * sz;
    let ay = cx * sy * cz - ch * sx * cy * sz;
    let az = cx * cy * sz + ch * sx * sy * cz;
    let id = ComplexMatrix::identity(2, 2) * c(d, 0.0);
    id - pauli(1) * (I * ax) + pauli(2) * (I * (ch * ay)) + pauli(3) * (I * az)
}

/// The coefficients (d, a_x, a_y, a_z) of [`weyl_matrix`].
pub fn weyl_coefficients(chirality: Chirality, k: Vec3) -> [f64; 4] {
    let w = weyl_matrix(chirality, k);
    let ch = chirality.sign();
    let d = ((w[(0, 0)] + w[(1, 1)]) * 0.5).re;
    let az = ((w[(0, 0)] - w[(1, 1)]) * (-0.5 * I)).re;
    let ax = ((w[(0, 1)] + w[(1, 0)]) * (0.5 * I)).re;
    let ay = ((w[(0, 1)] - w[(1, 0)]) * (-0.5 * ch)).re;
    [d, ax, ay, az]
}

/// A walk given by its transition matrices, one per lattice displacement.
#[derive(Debug, Clone)]
pub struct Walk {
    pub transitions: Vec<(Vec3, ComplexMatrix)>,
}

impl Walk {
    /// Σ_h e^{−ik·h} U_h
    pub fn symbol(&self, k: Vec3) -> ComplexMatrix {
        let dim = self.transitions[0].1.nrows();
        let mut out = ComplexMatrix::zeros(dim, dim);
        for (h, u) in &self.transitions {
            out += u * cis(-dot(&k, h));
        }
        out
    }
}

/// Position-space Weyl automaton: the eight transitions ±h_i.
pub fn weyl_walk(chirality: Chirality) -> Walk {
    let (eta, eta_bar) = match chirality {
        Chirality::Right => (c(0.25, 0.25), c(0.25, -0.25)),
        Chirality::Left => (c(0.25, -0.25), c(0.25, 0.25)),
    };
    let z = c(0.0, 0.0);
    let forward = ComplexMatrix::from_row_slice(2, 2, &[eta, z, eta, z]);
    let backward = ComplexMatrix::from_row_slice(2, 2, &[z, -eta_bar, z, eta_bar]);
    let hs = bcc_generators();
    let mut transitions = Vec::with_capacity(8);
    for (i, h) in hs.iter().enumerate() {
        let s = pauli(i);
        transitions.push((*h, &s * &forward * &s));
        transitions.push((neg(h), &s * &backward * &s));
    }
    Walk { transitions }
}

/// Position-space Dirac automaton: two Weyl automata coupled on site.
pub fn dirac_walk(chirality: Chirality, m: f64) -> Result<Walk, WalkError> {
    let n = mass_partner(m)?;
    let weyl = weyl_walk(chirality);
    let zero2 = ComplexMatrix::zeros(2, 2);
    let mut transitions = Vec::with_capacity(9);
    for (h, u) in &weyl.transitions {
        // W† carries the transition at −h as the adjoint of the one at h
        let partner = weyl.transitions.iter().find(|(g, _)| *g == neg(h)).expect("±h pairs").1.adjoint();
        transitions.push((*h, direct_sum(&(u * c(n, 0.0)), &(partner * c(n, 0.0)))));
    }
    let mut onsite = direct_sum(&zero2, &zero2);
    for j in 0..2 {
        onsite[(j, j + 2)] = I * m;
        onsite[(j + 2, j)] = I * m;
    }
    transitions.push(([0.0; 3], onsite));
    Ok(Walk { transitions })
}

fn mass_partner(m: f64) -> Result<f64, WalkError> {
    if m.is_nan() || m.abs() > 1.0 {
        return Err(WalkError::MassOutOfRange(m));
    }
    Ok((1.0 - m * m).sqrt())
}

/// D(k) = [[n W(k), i m I], [i m I, n W(k)†]] with n = √(1 − m²).
pub fn dirac_matrix_chiral(chirality: Chirality, k: Vec3, m: f64) -> Result<ComplexMatrix, WalkError> {
    let n = mass_partner(m)?;
    let w = weyl_matrix(chirality, k);
    let mut d = direct_sum(&(&w * c(n, 0.0)), &(w.adjoint() * c(n, 0.0)));
    for j in 0..2 {
        d[(j, j + 2)] = I * m;
        d[(j + 2, j)] = I * m;
    }
    Ok(d)
}

/// Dirac automaton built on the right-handed Weyl automaton.
pub fn dirac_matrix(k: Vec3, m: f64) -> Result<ComplexMatrix, WalkError> {
    dirac_matrix_chiral(Chirality::Right, k, m)
}

/// diag(e^{−ik}, e^{ik}, e^{ik}, e^{−ik})
pub fn massless_1d_matrix(k: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = cis(-k);
    m[(1, 1)] = cis(k);
    m[(2, 2)] = cis(k);
    m[(3, 3)] = cis(-k);
    m
}

/// Which walk a dispersion sweep runs over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum WalkModel {
    Weyl(Chirality),
    Dirac {
        chirality: Chirality,
        mass: f64,
    },
    /// Only k1 is used.
    Massless1d,
}

impl WalkModel {
    pub fn matrix(&self, k: Vec3) -> Result<ComplexMatrix, WalkError> {
        match *self {
            WalkModel::Weyl(ch) => Ok(weyl_matrix(ch, k)),
            WalkModel::Dirac { chirality, mass } => dirac_matrix_chiral(chirality, k, mass),
            WalkModel::Massless1d => Ok(massless_1d_matrix(k[0])),
        }
    }

    pub fn branches(&self) -> usize {
        match self {
            WalkModel::Weyl(_) => 2,
            _ => 4,
        }
    }
}

/// Eigenphases of U(k) in (−π, π], ascending.
pub fn dispersion(model: &WalkModel, k: Vec3) -> Result<Vec<f64>, WalkError> {
    Ok(linalg::eigenphases(&model.matrix(k)?)?)
}

/// The π rotations about x, y and z together with the identity.
pub fn isotropy_rotations() -> [[[f64; 3]; 3]; 4] {
    let d = |a: f64, b: f64, c: f64| [[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]];
    [d(1.0, 1.0, 1.0), d(1.0, -1.0, -1.0), d(-1.0, 1.0, -1.0), d(-1.0, -1.0, 1.0)]
}

fn rotate(r: &[[f64; 3]; 3], v: &Vec3) -> Vec3 {
    [dot(&r[0], v), dot(&r[1], v), dot(&r[2], v)]
}

/// A group of rotations with internal matrices, element-wise paired.
#[derive(Debug, Clone)]
pub struct IsotropyRep {
    pub name: String,
    pub rotations: Vec<[[f64; 3]; 3]>,
    pub internal: Vec<ComplexMatrix>,
}

impl IsotropyRep {
    /// I, iσx, iσy, iσz.
    pub fn weyl() -> Self {
        Self {
            name: "weyl".into(),
            rotations: isotropy_rotations().to_vec(),
            internal: (0..4).map(|a| if a == 0 { pauli(0) } else { pauli(a) * I }).collect(),
        }
    }

    /// Same rotations with every internal matrix replaced by the identity.
    pub fn trivial(dim: usize) -> Self {
        Self {
            name: "trivial".into(),
            rotations: isotropy_rotations().to_vec(),
            internal: vec![ComplexMatrix::identity(dim, dim); 4],
        }
    }

    pub fn dirac(variant: DiracRep) -> Self {
        Self { name: variant.name().into(), rotations: isotropy_rotations().to_vec(), internal: variant.matrices() }
    }

    /// Largest deviation from V_a V_b = ±V_{ab} over all pairs.
    pub fn projective_defect(&self) -> f64 {
        let n = self.rotations.len();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                let r = mat3_mul(&self.rotations[a], &self.rotations[b]);
                let Some(ab) = self.rotations.iter().position(|x| *x == r) else {
                    return f64::INFINITY;
                };
                let prod = &self.internal[a] * &self.internal[b];
                let plus = linalg::max_abs_diff(&prod, &self.internal[ab]);
                let minus = linalg::max_abs_diff(&prod, &(-&self.internal[ab]));
                worst = worst.max(plus.min(minus));
            }
        }
        worst
    }
}

fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Candidate internal representations for the Dirac automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DiracRep {
    /// iσ_l ⊕ iσ_l, the Weyl representation on both halves.
    WeylPair,
    /// −σ_l ⊕ σ_l
    SignFlipped,
    /// −σx ⊕ σx, −σy ⊕ σy, −σz ⊕ σy.
    AsPrinted,
}

impl DiracRep {
    pub const ALL: [DiracRep; 3] = [DiracRep::WeylPair, DiracRep::SignFlipped, DiracRep::AsPrinted];

    pub fn name(self) -> &'static str {
        match self {
            DiracRep::WeylPair => "weyl_pair",
            DiracRep::SignFlipped => "sign_flipped",
            DiracRep::AsPrinted => "as_printed",
        }
    }

    pub fn matrices(self) -> Vec<ComplexMatrix> {
        let mut out = vec![ComplexMatrix::identity(4, 4)];
        for a in 1..4 {
            let m = match self {
                DiracRep::WeylPair => direct_sum(&(pauli(a) * I), &(pauli(a) * I)),
                DiracRep::SignFlipped => direct_sum(&(-pauli(a)), &pauli(a)),
                DiracRep::AsPrinted => direct_sum(&(-pauli(a)), &pauli(if a == 3 { 2 } else { a })),
            };
            out.push(m);
        }
        out
    }
}

/// Max over rotations l and transitions h of ‖U_{l h} − V_l U_h V_l†‖.
pub fn isotropy_covariance_check(walk: &Walk, rep: &IsotropyRep) -> Result<f64, WalkError> {
    if rep.internal.len() != rep.rotations.len() {
        return Err(WalkError::RepSize { rep: rep.internal.len(), group: rep.rotations.len() });
    }
    let mut worst: f64 = 0.0;
    for (l, (r, v)) in rep.rotations.iter().zip(&rep.internal).enumerate() {
        for (h, u) in &walk.transitions {
            let image = rotate(r, h);
            let target = walk
                .transitions
                .iter()
                .find(|(g, _)| (0..3).all(|i| (g[i] - image[i]).abs() < 1e-9))
                .ok_or(WalkError::NotClosed(l))?;
            let conj = v * u * v.adjoint();
            worst = worst.max(linalg::max_abs_diff(&target.1, &conj));
        }
    }
    Ok(worst)
}

/// Same check in momentum space: ‖U(R k) − V U(k) V†‖ at one k.
pub fn momentum_covariance(model: &WalkModel, rep: &IsotropyRep, k: Vec3) -> Result<f64, WalkError> {
    let u = model.matrix(k)?;
    let mut worst: f64 = 0.0;
    for (r, v) in rep.rotations.iter().zip(&rep.internal) {
        let rotated = model.matrix(rotate(r, &k))?;
        worst = worst.max(linalg::max_abs_diff(&rotated, &(v * &u * v.adjoint())));
    }
    Ok(worst)
}

/// Uniform n³ grid over [−π√3/2, π√3/2]³ (endpoints included).
pub fn bz_grid(n: usize) -> Vec<Vec3> {
    let half = std::f64::consts::PI * 3f64.sqrt() / 2.0;
    let step = if n > 1 { 2.0 * half / (n - 1) as f64 } else { 0.0 };
    let axis: Vec<f64> = (0..n).map(|i| if n > 1 { -half + step * i as f64 } else { 0.0 }).collect();
    let mut out = Vec::with_capacity(n * n * n);
    for &x in &axis {
        for &y in &axis {
            for &z in &axis {
                out.push([x, y, z]);
            }
        }
    }
    out
}

/// Unit vector along (1, 2, 3), used for small-k limits.
pub fn generic_direction() -> Vec3 {
    let n = 14f64.sqrt();
    [1.0 / n, 2.0 / n, 3.0 / n]
}
