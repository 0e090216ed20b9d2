//! Closed-form eigenstates of the blocked evolution: free waves on the odd
//! sublattice, scattering waves through the contact site, and the states
//! pinned at `y = 0`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use serde::Serialize;

use super::{Lattice, TwoParticleError, TwoParticleParams};
use crate::linalg::{c, cis, C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    PhiF,
    PhiS,
    PhiB0,
    PhiBMinus,
    PhiBPlus,
    /// Contact-site pairs that only pick up `e^{±2ip}` once the interaction
    /// is a full turn (`√2|λ| = 2nπ`).
    Contact,
}

impl Family {
    pub fn is_bound(self) -> bool {
        matches!(self, Family::PhiB0 | Family::PhiBMinus | Family::PhiBPlus)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringCoefficients {
    /// `c_k = γ e^{−ik} + e^{ik} − ε`
    pub c: C64,
    /// Amplitude on `y ≥ 2` and on `y ≤ 0`.
    pub upper: C64,
    pub lower: C64,
    /// Contact amplitudes on `e1 − e4` and `e2 − e5`.
    pub contact_plus: C64,
    pub contact_minus: C64,
    pub gamma: f64,
    pub epsilon: f64,
    /// `iλ̄ sin(√2|λ|)/(√2|λ|)`
    pub coupling: C64,
    /// Norm of the unnormalized truncated vector.
    pub norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyticEigenstate {
    pub family: Family,
    pub k: Option<f64>,
    pub eigenvalue: C64,
    pub coefficients: Option<ScatteringCoefficients>,
    #[serde(skip)]
    pub vector: Vec<C64>,
}

/// Below this `|c_k|` the generic amplitudes vanish and the derivative
/// form takes over.
const NODE_TOL: f64 = 1e-9;

/// `k = 2πj/L − π`, `j = 0..L`: the momenta that fit the odd ring.
pub fn free_grid(params: &TwoParticleParams) -> Vec<f64> {
    let l = params.half_width;
    (0..l).map(|j| TAU * j as f64 / l as f64 - PI).collect()
}

fn on_free_grid(params: &TwoParticleParams, k: f64) -> bool {
    let x = (k + PI) * params.half_width as f64 / TAU;
    (x - x.round()).abs() < 1e-9
}

/// φ_f(k) = (|e3⟩|k⟩_o − |e6⟩|−k⟩_o)/√2 on odd sites, eigenvalue `e^{−ik}`.
pub fn analytic_free_state(params: &TwoParticleParams, k: f64) -> Result<AnalyticEigenstate, TwoParticleError> {
    if !on_free_grid(params, k) {
        return Err(TwoParticleError::OffGrid(k));
    }
    let lat = params.lattice();
    let scale = 1.0 / (2.0 * params.half_width as f64).sqrt();
    let mut v = vec![C64::default(); lat.dim()];
    for s in lat.ys().filter(|y| y % 2 != 0) {
        let amp = cis(-k * s as f64 / 2.0) * scale;
        v[lat.index(2, s)] += amp;
        v[lat.index(5, -s)] -= amp;
    }
    Ok(AnalyticEigenstate { family: Family::PhiF, k: Some(k), eigenvalue: cis(-k), coefficients: None, vector: v })
}

/// Coefficients of φ_s(k) before normalization.
pub fn scattering_coefficients(params: &TwoParticleParams, k: f64) -> ScatteringCoefficients {
    let gamma = params.gamma();
    let epsilon = params.epsilon();
    let coupling = params.coupling();
    let (ek, two_p) = (cis(-k), cis(2.0 * params.p));
    let cc = gamma * ek + ek.conj() - epsilon;
    let base = ScatteringCoefficients {
        c: cc,
        upper: cc.conj(),
        lower: cc,
        contact_plus: coupling * (ek - two_p.conj()),
        contact_minus: coupling * (ek - two_p),
        gamma,
        epsilon,
        coupling,
        norm: 0.0,
    };
    if let Some(n) = params.decoupled_index() {
        // the contact site only flips signs: plain waves glued by (−1)^n
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let zero = C64::default();
        return ScatteringCoefficients {
            upper: c(1.0, 0.0),
            lower: c(sign, 0.0),
            contact_plus: zero,
            contact_minus: zero,
            ..base
        };
    }
    if cc.norm() < NODE_TOL {
        let dc = -I * gamma * ek + I * ek.conj();
        let contact = -I * coupling * ek;
        return ScatteringCoefficients {
            upper: dc.conj(),
            lower: dc,
            contact_plus: contact,
            contact_minus: contact,
            ..base
        };
    }
    base
}

/// φ_s(k), normalized over the truncated lattice; eigenvalue `e^{−ik}`.
///
/// Away from the seam it is an eigenvector for every `k`; on the periodic
/// lattice it is exact only for momenta from [`scattering_grid`].
pub fn analytic_scattering_state(params: &TwoParticleParams, k: f64) -> Result<AnalyticEigenstate, TwoParticleError> {
    let lat = params.lattice();
    let mut coeffs = scattering_coefficients(params, k);
    let mut v = vec![C64::default(); lat.dim()];
    let half = params.half_width as i64 / 2;
    for m in -half..=half {
        let amp = if m >= 1 { coeffs.upper } else { coeffs.lower } * cis(-(m as f64) * k);
        v[lat.index(2, 2 * m)] += amp;
        v[lat.index(5, -2 * m)] -= amp;
    }
    for (label, amp) in [(0, coeffs.contact_plus), (1, coeffs.contact_minus)] {
        v[lat.index(label, 0)] += amp;
        v[lat.index(label + 3, 0)] -= amp;
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return Err(TwoParticleError::Degenerate(k));
    }
    v.iter_mut().for_each(|z| *z /= norm);
    coeffs.norm = norm;
    Ok(AnalyticEigenstate {
        family: Family::PhiS,
        k: Some(k),
        eigenvalue: cis(-k),
        coefficients: Some(coeffs),
        vector: v,
    })
}

/// Roots of `z² − εz + γ` (the reciprocals of the characteristic roots) and
/// whether each sits on the unit circle.
fn contact_roots(params: &TwoParticleParams) -> [(C64, bool); 2] {
    let gamma = params.gamma();
    if let Some(n) = params.critical_momentum() {
        let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        return [(c(sign, 0.0), true), (c(sign * gamma, 0.0), false)];
    }
    let eps = params.epsilon();
    let disc = eps * eps - 4.0 * gamma;
    let root = if disc >= 0.0 { c(disc.sqrt(), 0.0) } else { c(0.0, (-disc).sqrt()) };
    let max = 1.0 - f64::EPSILON;
    [(eps + root) / 2.0, (eps - root) / 2.0].map(|z| {
        let r = z.norm();
        (if r > max { z * (max / r) } else { z }, false)
    })
}

/// Continuous, strictly increasing phase whose crossings of `2πℤ` are the
/// allowed scattering momenta on the periodic lattice.
fn quantization_phase(params: &TwoParticleParams, roots: &[(C64, bool); 2], k: f64) -> f64 {
    let winding: f64 = roots
        .iter()
        .map(
            |&(z, on_circle)| {
                if on_circle {
                    z.arg() + k + PI
                } else {
                    2.0 * (c(1.0, 0.0) - z * cis(-k)).arg() + 2.0 * k
                }
            },
        )
        .sum();
    (params.half_width as f64 - 1.0) * k + winding
}

/// Momenta in `[−π, π)` at which φ_s is an exact eigenvector of the
/// periodic truncated operator.
pub fn scattering_grid(params: &TwoParticleParams) -> Vec<f64> {
    let l = params.half_width as i64;
    if let Some(n) = params.decoupled_index() {
        // k = (2πj + arg γ)/(L+1)
        let offset = n.rem_euclid(2);
        return (-(l + 1)..=l)
            .map(|j| 2 * j + offset)
            .filter(|&num| num >= -(l + 1) && num < l + 1)
            .map(|num| PI * num as f64 / (l + 1) as f64)
            .collect();
    }
    let roots = contact_roots(params);
    let phase = |k: f64| quantization_phase(params, &roots, k);
    let (lo, hi) = (phase(-PI), phase(PI));
    // the phase winds an exact number of turns; a root sitting on k = −π
    // must not be lost to rounding in `lo`
    let turns = ((hi - lo) / TAU).round() as usize;
    let first = ((lo - 1e-9) / TAU).ceil();
    let mut out = Vec::with_capacity(turns);
    for j in 0..turns {
        let target = TAU * (first + j as f64);
        let (mut a, mut b) = (-PI, PI);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if phase(mid) < target {
                a = mid;
            } else {
                b = mid;
            }
        }
        out.push(if phase(a) >= target { a } else { 0.5 * (a + b) });
    }
    out
}

fn contact_vector(lat: &Lattice, plus: C64, minus: C64) -> Vec<C64> {
    let mut v = vec![C64::default(); lat.dim()];
    v[lat.index(0, 0)] = plus;
    v[lat.index(3, 0)] = -plus;
    v[lat.index(1, 0)] = minus;
    v[lat.index(4, 0)] = -minus;
    v
}

/// The contact-site vector of a bound family at the given `p`, whether or
/// not it is an eigenvector there; `None` for the extended families.
pub fn bound_state_vector(params: &TwoParticleParams, family: Family) -> Option<Vec<C64>> {
    let lat = params.lattice();
    let e = cis(-params.p) * 0.5;
    match family {
        Family::PhiB0 => Some(contact_vector(&lat, c(0.5, 0.0), c(-0.5, 0.0))),
        Family::PhiBMinus => Some(contact_vector(&lat, e, -e.conj())),
        Family::PhiBPlus => Some(contact_vector(&lat, e, e.conj())),
        _ => None,
    }
}

/// Normalizable eigenstates supported on `y = 0`.
///
/// φ_b0 when `2p = n′π` (eigenvalue `(−1)^{n′}`) unless `√2|λ|` is an odd
/// multiple of π; φ_b∓ (eigenvalues ±1) at odd multiples of π.
pub fn bound_states(params: &TwoParticleParams) -> Vec<AnalyticEigenstate> {
    let make = |family, eigenvalue: f64| AnalyticEigenstate {
        family,
        k: None,
        eigenvalue: c(eigenvalue, 0.0),
        coefficients: None,
        vector: bound_state_vector(params, family).expect("bound family"),
    };
    if params.odd_pi_coupling() {
        vec![make(Family::PhiBMinus, 1.0), make(Family::PhiBPlus, -1.0)]
    } else if let Some(n) = params.critical_momentum() {
        vec![make(Family::PhiB0, if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 })]
    } else {
        Vec::new()
    }
}

/// The two contact pairs when the interaction is a full turn, eigenvalues
/// `e^{2ip}` and `e^{−2ip}`.
pub fn contact_states(params: &TwoParticleParams) -> Vec<AnalyticEigenstate> {
    match params.decoupled_index() {
        Some(n) if n.rem_euclid(2) == 0 => {
            let lat = params.lattice();
            let h = c(FRAC_1_SQRT_2, 0.0);
            let z = C64::default();
            [(h, z, cis(2.0 * params.p)), (z, h, cis(-2.0 * params.p))]
                .into_iter()
                .map(|(a, b, w)| AnalyticEigenstate {
                    family: Family::Contact,
                    k: None,
                    eigenvalue: w,
                    coefficients: None,
                    vector: contact_vector(&lat, a, b),
                })
                .collect()
        }
        _ => Vec::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacteristicRoots {
    pub r_plus: C64,
    pub r_minus: C64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl CharacteristicRoots {
    /// `r_± = (ε ± √(ε² − 4γ))/(2γ)`, square root with `Im ≥ 0`.
    pub fn from_coefficients(gamma: f64, epsilon: f64) -> Result<Self, TwoParticleError> {
        if gamma == 0.0 {
            return Err(TwoParticleError::GammaZero);
        }
        let disc = epsilon * epsilon - 4.0 * gamma;
        let root = if disc >= 0.0 { c(disc.sqrt(), 0.0) } else { c(0.0, (-disc).sqrt()) };
        Ok(Self { r_plus: (epsilon + root) / (2.0 * gamma), r_minus: (epsilon - root) / (2.0 * gamma), gamma, epsilon })
    }

    pub fn discriminant(&self) -> f64 {
        self.epsilon * self.epsilon - 4.0 * self.gamma
    }

    pub fn min_modulus(&self) -> f64 {
        self.r_plus.norm().min(self.r_minus.norm())
    }
}

pub fn characteristic_roots(params: &TwoParticleParams) -> Result<CharacteristicRoots, TwoParticleError> {
    CharacteristicRoots::from_coefficients(params.gamma(), params.epsilon())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::two_particle::build_evolution;
    use std::f64::consts::SQRT_2;

    fn params(p: f64, mu: f64, phase: f64, l: usize) -> TwoParticleParams {
        TwoParticleParams::new(p, mu / SQRT_2, phase, l).unwrap()
    }

    fn inner(a: &[C64], b: &[C64]) -> C64 {
        a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
    }

    #[test]
    fn free_states_are_orthonormal_eigenvectors() {
        let pr = params(0.3, 1.1, 0.4, 12);
        let ev = build_evolution(&pr);
        let lat = pr.lattice();
        let states: Vec<_> = free_grid(&pr).iter().map(|&k| analytic_free_state(&pr, k).unwrap()).collect();
        assert_eq!(states.len(), 12);
        for (i, a) in states.iter().enumerate() {
            assert!(ev.residual(&a.vector, a.eigenvalue, None) < 1e-12);
            for i3 in 0..6 {
                assert_eq!(a.vector[lat.index(i3, 0)], C64::default());
            }
            for (j, b) in states.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((inner(&a.vector, &b.vector) - expect).norm() < 1e-12);
            }
        }
        assert!(matches!(analytic_free_state(&pr, 0.1), Err(TwoParticleError::OffGrid(_))));
    }

    #[test]
    fn scattering_state_interior_residual_for_any_k() {
        let pr = params(0.7, 1.0, 0.3, 32);
        let ev = build_evolution(&pr);
        for k in [-2.9, -1.0, 0.05, 1.7, 3.0] {
            let s = analytic_scattering_state(&pr, k).unwrap();
            assert!(ev.residual(&s.vector, s.eigenvalue, Some(28)) < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn quantized_scattering_states_are_exact() {
        for (p, mu, phase) in
            [(0.7, 1.0, 0.3), (0.0, 1.0, 0.0), (PI / 2.0, 0.6, 1.0), (0.3, 2.5, -0.7), (1.2, 4.0, 0.0)]
        {
            let pr = params(p, mu, phase, 16);
            let ev = build_evolution(&pr);
            let grid = scattering_grid(&pr);
            let expect = if pr.critical_momentum().is_some() { 18 } else { 19 };
            assert_eq!(grid.len(), expect, "({p}, {mu})");
            for k in grid {
                let s = analytic_scattering_state(&pr, k).unwrap();
                assert!(ev.residual(&s.vector, s.eigenvalue, None) < 1e-10, "({p}, {mu}) k = {k}");
            }
        }
    }

    #[test]
    fn decoupled_grids_are_exact() {
        for (p, mu) in [(0.4, 0.0), (0.4, 2.0 * PI), (0.9, PI), (0.25, 3.0 * PI)] {
            let pr = params(p, mu, 0.0, 12);
            let ev = build_evolution(&pr);
            let grid = scattering_grid(&pr);
            assert_eq!(grid.len(), 13);
            for k in grid {
                let s = analytic_scattering_state(&pr, k).unwrap();
                assert!(ev.residual(&s.vector, s.eigenvalue, None) < 1e-12, "({p}, {mu}) k = {k}");
            }
            for s in contact_states(&pr) {
                assert!(ev.residual(&s.vector, s.eigenvalue, None) < 1e-14);
            }
        }
    }

    #[test]
    fn weak_coupling_decouples_contact_pairs() {
        let pr = params(0.5, 1e-7, 0.0, 8);
        let co = scattering_coefficients(&pr, 0.8);
        assert!(co.contact_plus.norm() < 1e-6 && co.contact_minus.norm() < 1e-6);
    }

    #[test]
    fn bound_states_at_odd_pi() {
        for p in [0.0, PI / 4.0, 1.3] {
            let pr = params(p, PI, 0.6, 8);
            let ev = build_evolution(&pr);
            let states = bound_states(&pr);
            assert_eq!(states.iter().map(|s| s.family).collect::<Vec<_>>(), vec![Family::PhiBMinus, Family::PhiBPlus]);
            for s in &states {
                assert!(ev.residual(&s.vector, s.eigenvalue, None) < 1e-12);
                let norm: f64 = s.vector.iter().map(|z| z.norm_sqr()).sum();
                assert!((norm - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn phi_b0_at_critical_momentum() {
        for (p, sign) in [(0.0, 1.0), (PI / 2.0, -1.0)] {
            let pr = params(p, 1.0, 0.0, 8);
            let ev = build_evolution(&pr);
            let states = bound_states(&pr);
            assert_eq!(states.len(), 1);
            assert_eq!(states[0].eigenvalue, c(sign, 0.0));
            assert!(ev.residual(&states[0].vector, states[0].eigenvalue, None) < 1e-12);
            for k in scattering_grid(&pr) {
                let s = analytic_scattering_state(&pr, k).unwrap();
                assert!(inner(&states[0].vector, &s.vector).norm() < 1e-10);
            }
        }
        assert!(bound_states(&params(0.7, 1.0, 0.0, 8)).is_empty());
    }

    #[test]
    fn characteristic_root_cases() {
        let double = CharacteristicRoots::from_coefficients(1.0, 2.0).unwrap();
        assert!((double.r_plus - 1.0).norm() < 1e-15 && (double.r_minus - 1.0).norm() < 1e-15);
        let pr = params(0.7, 1.0, 0.0, 8);
        let r = characteristic_roots(&pr).unwrap();
        assert!(r.discriminant() < 0.0);
        for z in [r.r_plus, r.r_minus] {
            assert!((z.norm_sqr() - 1.0 / r.gamma).abs() < 1e-12);
        }
        assert_eq!(CharacteristicRoots::from_coefficients(0.0, 1.0), Err(TwoParticleError::GammaZero));
    }
}
