//! Numerical oracles for the two-particle spectral resolution: dense
//! diagonalization, completeness of the analytic eigenbasis, the recurrence
//! obeyed by vectors orthogonal to every scattering state, and root bounds.

use std::f64::consts::{PI, SQRT_2, TAU};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{cis, unitarity_defect, unitary_eigen, wrap_phase, ComplexMatrix, LinalgError, C64};
use crate::two_particle::{
    analytic_free_state, analytic_scattering_state, bound_states, build_evolution, contact_states, d_coordinates,
    free_grid, scattering_grid, AnalyticEigenstate, BlockedEvolution, CharacteristicRoots, Family, Lattice,
    TwoParticleError, TwoParticleParams,
};

/// Participation ratio at or below which an eigenvector counts as bound.
pub const BOUND_PR: f64 = 4.0;
/// Participation ratio above which an eigenvector counts as extended.
pub const EXTENDED_PR: f64 = 10.0;

const CLUSTER_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("restricted evolution is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] TwoParticleError),
}

#[derive(Debug, Clone, Serialize)]
pub struct StateMatch {
    pub family: Family,
    pub k: Option<f64>,
    pub eigenphase: f64,
    /// Distance to the nearest numerical eigenphase.
    pub phase_distance: f64,
    /// Overlap with the closest eigenvector of that eigenvalue.
    pub fidelity: f64,
    /// Weight inside the whole numerical eigenspace, unwindowed.
    pub subspace_fidelity: f64,
    /// Participation ratio of the closest eigenvector.
    pub participation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    /// Ascending in (−π, π]; column `j` of `vectors` belongs to entry `j`.
    pub eigenphases: Vec<f64>,
    pub localization: Vec<f64>,
    pub matches: Vec<StateMatch>,
    pub residual: f64,
    #[serde(skip)]
    pub eigenvalues: Vec<C64>,
    /// Eigenvectors in the range basis of the antisymmetrizer.
    #[serde(skip)]
    pub vectors: ComplexMatrix,
    #[serde(skip)]
    lattice: Option<Lattice>,
}

/// Relative-coordinate marginal of a range-basis vector.
fn range_marginal(lat: &Lattice, u: &[C64]) -> Vec<f64> {
    lat.ys()
        .map(|y| 0.5 * (0..3).map(|i| u[lat.index(i, y)].norm_sqr() + u[lat.index(i, -y)].norm_sqr()).sum::<f64>())
        .collect()
}

/// `(Σ P)² / Σ P²`
pub fn participation_ratio(marginal: &[f64]) -> f64 {
    let total: f64 = marginal.iter().sum();
    let sq: f64 = marginal.iter().map(|p| p * p).sum();
    total * total / sq
}

/// Hermitian form that picks a definite basis inside a degenerate
/// eigenspace: contact-site weight first, then hopping along `y`.
fn contact_weight(lat: &Lattice, u: &[C64], w: &[C64]) -> C64 {
    (0..3).map(|i| u[lat.index(i, 0)].conj() * w[lat.index(i, 0)]).sum()
}

fn hopping(lat: &Lattice, u: &[C64], w: &[C64]) -> C64 {
    let mut acc = C64::default();
    for i in 0..3 {
        for y in lat.ys() {
            let a = lat.index(i, y);
            let b = lat.index(i, lat.wrap(y + 2));
            acc += u[a].conj() * w[b] + u[b].conj() * w[a];
        }
    }
    acc * 0.5
}

/// Rotates a block of orthonormal columns so that `form` is diagonal on it;
/// returns the diagonal, descending.
fn diagonalize_block(cols: &mut [Vec<C64>], form: &dyn Fn(&[C64], &[C64]) -> C64) -> Vec<f64> {
    let m = cols.len();
    let mut h = ComplexMatrix::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let v = form(&cols[a], &cols[b]);
            h[(a, b)] = v;
            h[(b, a)] = v.conj();
        }
    }
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let n = cols[0].len();
    let rotated: Vec<Vec<C64>> = order
        .iter()
        .map(|&j| {
            let mut out = vec![C64::default(); n];
            for (a, col) in cols.iter().enumerate() {
                let coef = eig.eigenvectors[(a, j)];
                for (o, x) in out.iter_mut().zip(col) {
                    *o += coef * x;
                }
            }
            out
        })
        .collect();
    cols.clone_from_slice(&rotated);
    order.iter().map(|&j| eig.eigenvalues[j]).collect()
}

fn canonicalize(lat: &Lattice, cols: &mut [Vec<C64>]) {
    if cols.len() < 2 {
        return;
    }
    let weights = diagonalize_block(cols, &|u, w| contact_weight(lat, u, w));
    let mut start = 0;
    while start < cols.len() {
        let mut end = start + 1;
        while end < cols.len() && (weights[end] - weights[start]).abs() < 1e-9 {
            end += 1;
        }
        if end - start > 1 {
            diagonalize_block(&mut cols[start..end], &|u, w| hopping(lat, u, w));
        }
        start = end;
    }
}

/// Groups sorted eigenphases into clusters closer than `CLUSTER_TOL`,
/// merging across the ±π seam.
fn clusters(values: &[C64]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (j, v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(last) if (values[*last.last().unwrap()] - v).norm() < CLUSTER_TOL => last.push(j),
            _ => out.push(vec![j]),
        }
    }
    if out.len() > 1 {
        let first = values[out[0][0]];
        let last = values[*out.last().unwrap().last().unwrap()];
        if (first - last).norm() < CLUSTER_TOL {
            let tail = out.pop().unwrap();
            out[0].extend(tail);
        }
    }
    out
}

/// Full eigendecomposition of Ã₂ on the range of P̃_−, matched against the
/// closed-form free, scattering, and bound states.
pub fn brute_spectrum(ev: &BlockedEvolution) -> Result<SpectrumReport, SpectralError> {
    let lat = ev.lattice;
    let a = ev.restricted();
    let defect = unitarity_defect(&a);
    if defect > 1e-10 {
        return Err(SpectralError::NotUnitary(defect));
    }
    let eig = unitary_eigen(&a, 1e-10)?;
    let n = a.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    let phase = |z: C64| wrap_phase(z.arg());
    order.sort_by(|&x, &y| phase(eig.eigenvalues[x]).total_cmp(&phase(eig.eigenvalues[y])));
    let eigenvalues: Vec<C64> = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let mut cols: Vec<Vec<C64>> = order.iter().map(|&j| eig.vectors.column(j).iter().copied().collect()).collect();

    for cluster in clusters(&eigenvalues) {
        if cluster.len() > 1 {
            let mut block: Vec<Vec<C64>> = cluster.iter().map(|&j| cols[j].clone()).collect();
            canonicalize(&lat, &mut block);
            for (&j, v) in cluster.iter().zip(block) {
                cols[j] = v;
            }
        }
    }
    let localization = cols.iter().map(|u| participation_ratio(&range_marginal(&lat, u))).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, j| cols[j][r]);
    let mut report = SpectrumReport {
        eigenphases: eigenvalues.iter().map(|&z| phase(z)).collect(),
        localization,
        matches: Vec::new(),
        residual: eig.residual,
        eigenvalues,
        vectors,
        lattice: Some(lat),
    };
    let window = lat.half_width as i64 - 4;
    let mut states = analytic_states(&ev.params)?;
    states.extend(contact_states(&ev.params));
    report.matches =
        states.iter().map(|s| report.match_state(s, (s.family == Family::PhiS).then_some(window))).collect();
    Ok(report)
}

impl SpectrumReport {
    /// Numerical eigenvectors whose eigenvalue lies within `tol` of `target`.
    pub fn eigenspace(&self, target: C64, tol: f64) -> Vec<usize> {
        (0..self.eigenvalues.len()).filter(|&j| (self.eigenvalues[j] - target).norm() < tol).collect()
    }

    pub fn bound_count(&self) -> usize {
        self.localization.iter().filter(|&&pr| pr <= BOUND_PR).count()
    }

    pub fn min_participation(&self) -> f64 {
        self.localization.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Compares a closed-form state with the numerical spectrum, optionally
    /// restricting both to `|y| ≤ window` and renormalizing.
    pub fn match_state(&self, state: &AnalyticEigenstate, window: Option<i64>) -> StateMatch {
        let lat = self.lattice.expect("report built by brute_spectrum");
        let keep: Vec<usize> =
            (0..lat.range_dim()).filter(|&r| window.is_none_or(|w| lat.site(r).1.abs() <= w)).collect();
        let full = DVector::from_vec(lat.to_range(&state.vector));
        let full = full.unscale(full.norm());
        let target: DVector<C64> = DVector::from_iterator(keep.len(), keep.iter().map(|&r| full[r]));
        let target = target.unscale(target.norm());
        let nearest = self.eigenvalues.iter().map(|z| (z - state.eigenvalue).norm()).fold(f64::INFINITY, f64::min);
        // The projection onto the eigenspace is the eigenvector closest to
        // the state, which matters when distinct families are degenerate.
        let mut projection = DVector::<C64>::zeros(full.len());
        for j in self.eigenspace(state.eigenvalue, nearest.max(0.0) + CLUSTER_TOL) {
            let col = self.vectors.column(j);
            projection += col * col.dotc(&full);
        }
        let subspace = projection.norm_squared();
        let (fidelity, participation) = if subspace > 0.0 {
            let windowed: DVector<C64> = DVector::from_iterator(keep.len(), keep.iter().map(|&r| projection[r]));
            let pr = participation_ratio(&range_marginal(&lat, projection.as_slice()));
            (target.dotc(&windowed).norm_sqr() / windowed.norm_squared(), pr)
        } else {
            (0.0, f64::INFINITY)
        };
        StateMatch {
            family: state.family,
            k: state.k,
            eigenphase: wrap_phase(state.eigenvalue.arg()),
            phase_distance: 2.0 * (nearest / 2.0).asin(),
            fidelity: fidelity.min(1.0),
            subspace_fidelity: subspace.min(1.0),
            participation,
        }
    }
}

/// All closed-form eigenstates at `params`: φ_f on its grid, φ_s on the
/// quantized grid, and the applicable bound states.
pub fn analytic_states(params: &TwoParticleParams) -> Result<Vec<AnalyticEigenstate>, TwoParticleError> {
    let mut out =
        free_grid(params).into_iter().map(|k| analytic_free_state(params, k)).collect::<Result<Vec<_>, _>>()?;
    for k in scattering_grid(params) {
        out.push(analytic_scattering_state(params, k)?);
    }
    out.extend(bound_states(params));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CompletenessOptions {
    /// Leave the bound-state projectors out of the sum.
    pub omit_bound: bool,
    /// Interior half-width; defaults to `L − 16`.
    pub window: Option<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompletenessReport {
    /// ‖Σ − P_d‖₂ on the window.
    pub defect: f64,
    pub window: i64,
    pub states: usize,
    pub dimension: usize,
}

/// Spectral norm of a Hermitian matrix.
fn hermitian_norm(m: ComplexMatrix) -> f64 {
    let sym = (&m + m.adjoint()).scale(0.5);
    sym.symmetric_eigenvalues().iter().fold(0.0, |acc: f64, e| acc.max(e.abs()))
}

/// Σ_k |φ_s(k)⟩⟨φ_s(k)| plus bound (and full-turn contact) projectors,
/// compared with P_d on the coordinates of the `d` piece with `|y| ≤ window`.
pub fn completeness_check(
    params: &TwoParticleParams,
    options: CompletenessOptions,
) -> Result<CompletenessReport, TwoParticleError> {
    let lat = params.lattice();
    let window = options.window.unwrap_or(lat.half_width as i64 - 16);
    let coords = d_coordinates(&lat);
    let mut states: Vec<AnalyticEigenstate> =
        scattering_grid(params).into_iter().map(|k| analytic_scattering_state(params, k)).collect::<Result<_, _>>()?;
    states.extend(contact_states(params));
    if !options.omit_bound && params.decoupled_index().is_none_or(|n| n.rem_euclid(2) == 1) {
        // at a full turn φ_b0 lies in the span of the contact pairs
        states.extend(bound_states(params));
    }
    let dim = coords.len();
    let mut sigma = ComplexMatrix::zeros(dim, dim);
    for s in &states {
        let r = lat.to_range(&s.vector);
        let u = DVector::from_iterator(dim, coords.iter().map(|&c| r[c]));
        sigma += &u * u.adjoint();
    }
    let keep: Vec<usize> = (0..dim).filter(|&j| lat.site(coords[j]).1.abs() <= window).collect();
    let mut restricted = ComplexMatrix::from_fn(keep.len(), keep.len(), |a, b| sigma[(keep[a], keep[b])]);
    for j in 0..keep.len() {
        restricted[(j, j)] -= 1.0;
    }
    Ok(CompletenessReport { defect: hermitian_norm(restricted), window, states: states.len(), dimension: dim })
}

/// Completeness of φ_f on the odd piece P_c, over all of its coordinates.
pub fn free_completeness(params: &TwoParticleParams) -> Result<f64, TwoParticleError> {
    let lat = params.lattice();
    let coords: Vec<usize> = lat.ys().filter(|y| y % 2 != 0).map(|y| lat.index(2, y)).collect();
    let dim = coords.len();
    let mut sigma = -ComplexMatrix::identity(dim, dim);
    for k in free_grid(params) {
        let r = lat.to_range(&analytic_free_state(params, k)?.vector);
        let u = DVector::from_iterator(dim, coords.iter().map(|&c| r[c]));
        sigma += &u * u.adjoint();
    }
    Ok(hermitian_norm(sigma))
}

/// Remainder of a seeded random vector of the `d` piece after removing its
/// components along every closed-form eigenstate.
pub fn orthogonal_remainder(params: &TwoParticleParams, seed: u64) -> Result<f64, TwoParticleError> {
    let lat = params.lattice();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r = vec![C64::default(); lat.range_dim()];
    for c in d_coordinates(&lat) {
        r[c] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    let norm = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    r.iter_mut().for_each(|z| *z /= norm);
    let mut chi = lat.from_range(&r);
    let mut states = analytic_states(params)?;
    states.extend(contact_states(params));
    if params.decoupled_index().is_some_and(|n| n.rem_euclid(2) == 0) {
        states.retain(|s| s.family != Family::PhiB0);
    }
    for s in &states {
        let overlap: C64 = s.vector.iter().zip(&chi).map(|(a, b)| a.conj() * b).sum();
        for (x, a) in chi.iter_mut().zip(&s.vector) {
            *x -= overlap * a;
        }
    }
    Ok(chi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}

/// One line of the recurrence, labelled by the Fourier index `n` of the
/// orthogonality condition.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RecurrenceLine {
    pub n: i64,
    pub value: C64,
}

/// Evaluates the recurrence satisfied by a vector of the `d` piece that is
/// orthogonal to every scattering state, with `δ = γ`.
///
/// Coordinates: `c₁₀, c₂₀` are the conjugated e1, e2 amplitudes at `y = 0`
/// and `c₃[m]` the conjugated e3 amplitude at `y = 2m`.
pub fn recurrence_residual(params: &TwoParticleParams, chi: &[C64]) -> Vec<RecurrenceLine> {
    let lat = params.lattice();
    let gamma = params.gamma();
    let delta = gamma;
    let eps = params.epsilon();
    let sigma = -params.coupling();
    let half = params.half_width as i64 / 2;
    let c10 = chi[lat.index(0, 0)].conj();
    let c20 = chi[lat.index(1, 0)].conj();
    let c3 = |m: i64| chi[lat.index(2, 2 * m)].conj();
    let two_p = cis(2.0 * params.p);
    let mut out = Vec::with_capacity(params.half_width);
    for n in (-half + 1)..=-1 {
        out.push(RecurrenceLine { n, value: gamma * c3(n - 1) - eps * c3(n) + c3(n + 1) });
    }
    out.push(RecurrenceLine {
        n: 0,
        value: gamma * c3(-1) - eps * c3(0) + sigma * two_p.conj() * c10 + sigma * two_p * c20 + delta * c3(1),
    });
    out.push(RecurrenceLine { n: 1, value: delta * c3(0) - sigma * (c10 + c20) - eps * c3(1) + gamma * c3(2) });
    for n in 2..half {
        out.push(RecurrenceLine { n, value: c3(n - 1) - eps * c3(n) + gamma * c3(n + 1) });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootCase {
    /// Real roots with γ > 0.
    RealPositive,
    /// γ < 0.
    NegativeGamma,
    /// Complex pair, ε² < 4γ.
    ComplexPair,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RootSample {
    pub p: f64,
    pub lambda_abs: f64,
    pub case: RootCase,
    pub min_modulus: f64,
    /// `max |r_±|² − 1/γ|` for complex pairs, zero otherwise.
    pub modulus_identity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RootSweep {
    pub min_modulus: f64,
    pub max_modulus_identity: f64,
    pub samples: Vec<RootSample>,
}

impl RootSweep {
    pub fn count(&self, case: RootCase) -> usize {
        self.samples.iter().filter(|s| s.case == case).count()
    }
}

pub fn classify_roots(roots: &CharacteristicRoots) -> RootCase {
    if roots.gamma < 0.0 {
        RootCase::NegativeGamma
    } else if roots.discriminant() < 0.0 {
        RootCase::ComplexPair
    } else {
        RootCase::RealPositive
    }
}

/// Samples `p ∈ [−π, π)` and `√2|λ| ∈ [0, 2π)` uniformly, skipping `γ = 0`.
pub fn root_bound_sweep(n_samples: usize, seed: u64) -> RootSweep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(n_samples);
    while samples.len() < n_samples {
        let p = rng.random_range(-PI..PI);
        let mu = rng.random_range(0.0..TAU);
        let gamma = mu.cos();
        let Ok(roots) = CharacteristicRoots::from_coefficients(gamma, (2.0 * p).cos() * (gamma + 1.0)) else {
            continue;
        };
        samples.push(root_sample(p, mu / SQRT_2, &roots));
    }
    RootSweep {
        min_modulus: samples.iter().map(|s| s.min_modulus).fold(f64::INFINITY, f64::min),
        max_modulus_identity: samples.iter().map(|s| s.modulus_identity).fold(0.0, f64::max),
        samples,
    }
}

pub fn root_sample(p: f64, lambda_abs: f64, roots: &CharacteristicRoots) -> RootSample {
    let case = classify_roots(roots);
    let modulus_identity = if case == RootCase::ComplexPair {
        [roots.r_plus, roots.r_minus].iter().map(|r| (r.norm_sqr() - 1.0 / roots.gamma).abs()).fold(0.0, f64::max)
    } else {
        0.0
    };
    RootSample { p, lambda_abs, case, min_modulus: roots.min_modulus(), modulus_identity }
}

/// Convenience: spectrum of the model at `params`.
pub fn spectrum_at(params: &TwoParticleParams) -> Result<SpectrumReport, SpectralError> {
    brute_spectrum(&build_evolution(params))
}
