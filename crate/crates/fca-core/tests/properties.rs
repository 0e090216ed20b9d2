use std::f64::consts::{PI, SQRT_2};

use fca_core::exact::{exact_nullspace, exact_rank, gauss, ExactMatrix, ExactScalar};
use fca_core::fock::field_operator;
use fca_core::linalg::{c, eigenphases, hermitian_exp, unitarity_defect, ComplexMatrix, C64};
use fca_core::sim::{evolve, InitialState};
use fca_core::spectral::{analytic_states, orthogonal_remainder};
use fca_core::two_particle::{
    bound_state_vector, build_evolution, decomposition_defect, subspace_projectors, Family, PairSpace,
    TwoParticleParams,
};
use fca_core::walks::{bcc_generators, dirac_matrix, weyl_matrix, weyl_walk, Chirality};
use proptest::prelude::*;

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Taylor series with scaling and squaring.
fn series_exp(h: &ComplexMatrix, scale: f64) -> ComplexMatrix {
    let n = h.nrows();
    let a = h * c(0.0, -scale);
    let squarings = (max_abs(&a) * n as f64).log2().ceil().max(0.0) as i32 + 4;
    let a = a.unscale(2f64.powi(squarings));
    let mut term = ComplexMatrix::identity(n, n);
    let mut sum = term.clone();
    for j in 1..30 {
        term = &term * &a / c(j as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n * n).prop_map(move |v| {
        let m = ComplexMatrix::from_fn(n, n, |i, j| c(v[i * n + j].0, v[i * n + j].1));
        (&m + m.adjoint()).scale(0.5)
    })
}

fn momentum() -> impl Strategy<Value = [f64; 3]> {
    [-4.0..4.0f64, -4.0..4.0f64, -4.0..4.0f64]
}

fn coupling() -> impl Strategy<Value = (f64, f64, f64)> {
    (-PI..PI, 0.0..2.0 * PI / SQRT_2, -PI..PI)
}

#[test]
fn canonical_anticommutation() {
    let s = 4;
    let ops: Vec<_> = (0..s)
        .map(|j| (field_operator(j, false, s).unwrap().matrix, field_operator(j, true, s).unwrap().matrix))
        .collect();
    let id = ComplexMatrix::identity(1 << s, 1 << s);
    for (a, (psi_a, _)) in ops.iter().enumerate() {
        for (b, (psi_b, dag_b)) in ops.iter().enumerate() {
            assert!(max_abs(&(psi_a * psi_b + psi_b * psi_a)) < 1e-14);
            let expected = if a == b { id.clone() } else { ComplexMatrix::zeros(1 << s, 1 << s) };
            assert!(max_abs(&(psi_a * dag_b + dag_b * psi_a - expected)) < 1e-14);
        }
    }
}

#[test]
fn generators_sum_to_zero() {
    let h = bcc_generators();
    for axis in 0..3 {
        assert_eq!(h.iter().map(|g| g[axis]).sum::<f64>(), 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hermitian_exp_is_unitary(h in hermitian(6), scale in -3.0..3.0f64) {
        let u = hermitian_exp(&h, scale).unwrap();
        prop_assert!(unitarity_defect(&u) < 1e-12);
    }

    #[test]
    fn hermitian_exp_matches_series(h in hermitian(4), scale in -2.0..2.0f64) {
        let u = hermitian_exp(&h, scale).unwrap();
        prop_assert!(max_abs(&(u - series_exp(&h, scale))) < 1e-10);
    }

    #[test]
    fn nullspace_is_exact(entries in prop::collection::vec((-3i64..=3, -3i64..=3), 12), rows in 1usize..4) {
        let cols = entries.len() / rows;
        let m = ExactMatrix::from_fn(rows, cols, |i, j| {
            let (re, im) = entries[i * cols + j];
            gauss(re, im)
        });
        let basis = exact_nullspace(&m);
        prop_assert_eq!(basis.len(), cols - exact_rank(&m));
        let zero = ExactScalar::default();
        for v in &basis {
            prop_assert!(m.mul_vec(v).iter().all(|z| *z == zero));
        }
    }

    #[test]
    fn walks_are_unitary(k in momentum(), m in -1.0..=1.0f64) {
        for ch in [Chirality::Right, Chirality::Left] {
            let w = weyl_matrix(ch, k);
            prop_assert!(unitarity_defect(&w) < 1e-12);
            prop_assert!(max_abs(&(weyl_walk(ch).symbol(k) - &w)) < 1e-12);
        }
        prop_assert!(unitarity_defect(&dirac_matrix(k, m).unwrap()) < 1e-12);
    }

    #[test]
    fn block_decomposition_holds((p, abs, phase) in coupling()) {
        let params = TwoParticleParams::new(p, abs, phase, 8).unwrap();
        let ev = build_evolution(&params);
        prop_assert!(decomposition_defect(&ev, &subspace_projectors(&params)) < 1e-12);
    }

    #[test]
    fn interacting_pairs_block((p, abs, phase) in coupling()) {
        let params = TwoParticleParams::new(p, abs, phase, 8).unwrap();
        let report = PairSpace::new(&params).check();
        prop_assert!(report.commutator < 1e-12);
        prop_assert!(report.complement_defect < 1e-12);
        prop_assert!(report.block_defect < 1e-12);
    }

    #[test]
    fn analytic_eigenvalues_are_unimodular((p, abs, phase) in coupling()) {
        let params = TwoParticleParams::new(p, abs, phase, 16).unwrap();
        for s in analytic_states(&params).unwrap() {
            prop_assert!((s.eigenvalue.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn phi_b0_residual_is_truncation_independent(n in 0i64..2, phase in -PI..PI, abs in 0.1..4.0f64) {
        let params = TwoParticleParams::new(n as f64 * PI / 2.0, abs, phase, 16).unwrap();
        let value = c(if n == 0 { 1.0 } else { -1.0 }, 0.0);
        let residual = |pr: &TwoParticleParams| {
            let v = bound_state_vector(pr, Family::PhiB0).unwrap();
            build_evolution(pr).residual(&v, value, None)
        };
        let doubled = params.resized(32).unwrap();
        prop_assert!((residual(&params) - residual(&doubled)).abs() < 1e-13);
        prop_assert!(residual(&params) < 1e-13);
    }

    #[test]
    fn traces_have_period_pi(p in -PI..PI, abs in 0.0..4.0f64, phase in -PI..PI) {
        let a = TwoParticleParams::new(p, abs, phase, 16).unwrap();
        let b = TwoParticleParams::new(p + PI, abs, phase, 16).unwrap();
        let init = InitialState::Gaussian { y0: 0.0, width: 3.0, k0: 0.4 };
        let ta = evolve(&a, &init, 20, 3).unwrap();
        let tb = evolve(&b, &init, 20, 3).unwrap();
        for (ra, rb) in ta.probabilities.iter().zip(&tb.probabilities) {
            for (x, y) in ra.iter().zip(rb) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
        prop_assert!(ta.max_norm_defect() < 1e-10);
    }
}

#[test]
fn analytic_families_are_orthogonal() {
    for (p, abs) in [(0.7, 1.0 / SQRT_2), (0.3, 2.2), (0.5, PI / SQRT_2)] {
        let params = TwoParticleParams::new(p, abs, 0.4, 16).unwrap();
        let states = analytic_states(&params).unwrap();
        for (i, a) in states.iter().enumerate() {
            for b in &states[i + 1..] {
                let overlap: C64 = a.vector.iter().zip(&b.vector).map(|(x, y)| x.conj() * y).sum();
                assert!(overlap.norm() < 1e-10, "{:?} {:?} vs {:?} {:?}: {overlap}", a.family, a.k, b.family, b.k);
            }
        }
    }
}

#[test]
fn no_vector_is_orthogonal_to_every_eigenstate() {
    for (p, abs) in [(0.7, 1.0 / SQRT_2), (0.3, 2.2), (PI / 4.0, 2.0 * PI / SQRT_2), (0.0, 1.0)] {
        let params = TwoParticleParams::new(p, abs, -0.6, 16).unwrap();
        for seed in 0..3 {
            assert!(orthogonal_remainder(&params, seed).unwrap() < 1e-8);
        }
    }
}

#[test]
fn opposite_momentum_spectra_agree() {
    for (p, abs, phase) in [(0.7, 0.7, 0.3), (1.2, 2.0, -1.0)] {
        let plus =
            eigenphases(&build_evolution(&TwoParticleParams::new(p, abs, phase, 12).unwrap()).restricted()).unwrap();
        let minus = build_evolution(&TwoParticleParams::new(-p, abs, phase, 12).unwrap()).restricted();
        let minus = eigenphases(&minus).unwrap();
        let gap = plus.iter().zip(&minus).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-9, "{gap}");
    }
}

#[test]
fn pieces_fill_the_range() {
    for half_width in [8, 12, 16] {
        let params = TwoParticleParams::new(0.3, 1.0, 0.0, half_width).unwrap();
        let proj = subspace_projectors(&params);
        let rank = |m: &fca_core::sparse::SparseMatrix| m.to_dense().rank(1e-9);
        let total: usize = proj.all().iter().map(|m| rank(m)).sum();
        assert_eq!(total, params.lattice().range_dim());
    }
}
