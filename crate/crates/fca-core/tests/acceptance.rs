//! End-to-end acceptance run. Every criterion prints one line; the test fails
//! at the end if any of them did.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};
use std::time::{Duration, Instant};

use fca_core::classifier::{dirac_rep_exact, match_families, solve_invariants};
use fca_core::linalg::{c, unitarity_defect};
use fca_core::sim::{evolve, linspace, sweep, InitialState, SweepAxis};
use fca_core::spectral::{brute_spectrum, completeness_check, root_bound_sweep, CompletenessOptions, BOUND_PR};
use fca_core::two_particle::{
    analytic_free_state, analytic_scattering_state, bound_state_vector, build_evolution, decomposition_defect,
    free_grid, subspace_projectors, Family, TwoParticleParams,
};
use fca_core::walks::{
    bz_grid, isotropy_covariance_check, momentum_covariance, weyl_matrix, weyl_walk, Chirality, DiracRep, IsotropyRep,
    WalkModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn walk_unitarity() -> Outcome {
    let start = Instant::now();
    let rep = IsotropyRep::weyl();
    let grid = bz_grid(17);
    let mut unitarity: f64 = 0.0;
    let mut covariance: f64 = 0.0;
    for ch in [Chirality::Right, Chirality::Left] {
        covariance = covariance.max(isotropy_covariance_check(&weyl_walk(ch), &rep).unwrap());
        let model = WalkModel::Weyl(ch);
        for &k in &grid {
            unitarity = unitarity.max(unitarity_defect(&weyl_matrix(ch, k)));
            covariance = covariance.max(momentum_covariance(&model, &rep, k).unwrap());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        unitarity < 1e-12 && covariance < 1e-12 && elapsed < Duration::from_secs(5),
        format!("unitarity {unitarity:.2e}, covariance {covariance:.2e}, {elapsed:.2?}"),
    )
}

fn classification() -> Outcome {
    let start = Instant::now();
    let rep = dirac_rep_exact(DiracRep::WeylPair).unwrap();
    let basis = solve_invariants(&rep, &[4, 6, 8]).unwrap();
    let report = match_families(&basis, &rep).unwrap();
    let elapsed = start.elapsed();
    // Thirteen real couplings; the four complex ones add one imaginary
    // direction each, so the real solution space has 17 dimensions.
    let pass = report.family_count == 13
        && report.real_sector_dimension == 13
        && report.solution_dimension == 17
        && report.all_contained
        && report.span_equal
        && elapsed < Duration::from_secs(60);
    outcome(
        pass,
        format!(
            "families {}, real sector {}, total {}, contained {}, span equal {}, {elapsed:.2?}",
            report.family_count,
            report.real_sector_dimension,
            report.solution_dimension,
            report.all_contained,
            report.span_equal
        ),
    )
}

fn block_decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let p = rng.random_range(-PI..PI);
        let abs = rng.random_range(0.0..2.0 * PI / SQRT_2);
        let phase = rng.random_range(-PI..PI);
        let params = TwoParticleParams::new(p, abs, phase, 64).unwrap();
        let ev = build_evolution(&params);
        worst = worst.max(decomposition_defect(&ev, &subspace_projectors(&params)));
    }
    outcome(worst < 1e-12, format!("max defect {:.2e} over 20 samples", worst.abs()))
}

fn free_states() -> Outcome {
    let params = TwoParticleParams::new(0.7, 1.0 / SQRT_2, 0.3, 128).unwrap();
    let ev = build_evolution(&params);
    let grid = free_grid(&params);
    let worst = grid
        .iter()
        .map(|&k| {
            let s = analytic_free_state(&params, k).unwrap();
            ev.residual(&s.vector, s.eigenvalue, None)
        })
        .fold(0.0, f64::max);
    outcome(worst < 1e-10, format!("max residual {worst:.2e} over {} momenta", grid.len()))
}

fn scattering_states() -> Outcome {
    let params = TwoParticleParams::new(0.7, 1.0 / SQRT_2, 0.0, 256).unwrap();
    let ev = build_evolution(&params);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for k in linspace(-PI, PI, 129).into_iter().take(128) {
        let Ok(s) = analytic_scattering_state(&params, k) else { continue };
        worst = worst.max(ev.residual(&s.vector, s.eigenvalue, Some(252)));
        count += 1;
    }
    outcome(count > 100 && worst < 1e-8, format!("max interior residual {worst:.2e} over {count} momenta"))
}

fn bound_states() -> Outcome {
    let params = TwoParticleParams::new(0.5, PI / SQRT_2, 0.4, 64).unwrap();
    let report = brute_spectrum(&build_evolution(&params)).unwrap();
    let mut lines = Vec::new();
    let mut pass = true;
    for (family, value) in [(Family::PhiBMinus, c(1.0, 0.0)), (Family::PhiBPlus, c(-1.0, 0.0))] {
        let m = report.matches.iter().find(|m| m.family == family);
        let ok = m.is_some_and(|m| {
            m.fidelity >= 1.0 - 1e-10 && m.participation <= BOUND_PR && !report.eigenspace(value, 1e-8).is_empty()
        });
        pass &= ok;
        lines.push(match m {
            Some(m) => format!("{family:?} fidelity {:.12} PR {:.2}", m.fidelity, m.participation),
            None => format!("{family:?} missing"),
        });
    }
    let params = TwoParticleParams::new(0.0, 1.0 / SQRT_2, 0.0, 64).unwrap();
    let ev = build_evolution(&params);
    let residual =
        bound_state_vector(&params, Family::PhiB0).map(|v| ev.residual(&v, c(1.0, 0.0), None)).unwrap_or(f64::INFINITY);
    pass &= residual < 1e-12;
    lines.push(format!("phi_b0 residual {residual:.2e}"));
    outcome(pass, lines.join(", "))
}

fn negative_control() -> Outcome {
    let params = TwoParticleParams::new(0.7, 1.0 / SQRT_2, 0.0, 128).unwrap();
    let report = brute_spectrum(&build_evolution(&params)).unwrap();
    let count = report.bound_count();
    outcome(count == 0, format!("{count} localized eigenvectors, min PR {:.2}", report.min_participation()))
}

fn completeness() -> Outcome {
    let at = |half_width| {
        let params = TwoParticleParams::new(0.7, 1.0 / SQRT_2, 0.0, half_width).unwrap();
        completeness_check(&params, CompletenessOptions::default()).unwrap().defect
    };
    let (d256, d512) = (at(256), at(512));
    outcome(d256 < 1e-6 && d512 < d256, format!("L=256 defect {d256:.2e}, L=512 defect {d512:.2e}"))
}

fn root_bounds() -> Outcome {
    let sweep = root_bound_sweep(10_000, 5);
    // Recompute the roots of γz² − εz + 1 from the sampled parameters.
    let mut min_modulus = f64::INFINITY;
    let mut identity: f64 = 0.0;
    for s in &sweep.samples {
        let gamma = (SQRT_2 * s.lambda_abs).cos();
        let eps = (2.0 * s.p).cos() * (gamma + 1.0);
        let disc = eps * eps - 4.0 * gamma;
        let root = |sign: f64| {
            if disc < 0.0 {
                c(eps, sign * (-disc).sqrt()) / (2.0 * gamma)
            } else {
                c(eps + sign * disc.sqrt(), 0.0) / (2.0 * gamma)
            }
        };
        for r in [root(1.0), root(-1.0)] {
            min_modulus = min_modulus.min(r.norm());
            if disc < 0.0 {
                identity = identity.max((r.norm_sqr() - 1.0 / gamma).abs());
            }
        }
    }
    let pass = sweep.samples.len() == 10_000
        && min_modulus >= 1.0 - 1e-12
        && sweep.min_modulus >= 1.0 - 1e-12
        && identity < 1e-12
        && sweep.max_modulus_identity < 1e-12;
    outcome(
        pass,
        format!(
            "min |r| {:.15} (oracle {min_modulus:.15}), identity {:.2e} (oracle {identity:.2e})",
            sweep.min_modulus, sweep.max_modulus_identity
        ),
    )
}

fn localization_sweep() -> Outcome {
    let start = Instant::now();
    let base = TwoParticleParams::new(FRAC_PI_4, PI / SQRT_2, 0.0, 128).unwrap();
    let values = linspace(PI / SQRT_2, 2.0 * PI / SQRT_2, 33);
    let points = sweep(&base, SweepAxis::Lambda, &values, &InitialState::PhiBPlus, 60, 0).unwrap();
    let elapsed = start.elapsed();
    let (first, mid, last) = (points[0].metric, points[16].metric, points[32].metric);
    outcome(
        first >= 0.99 && last >= 0.99 && mid < 0.5 && elapsed < Duration::from_secs(600),
        format!("endpoints {first:.6} / {last:.6}, midpoint {mid:.3e}, {elapsed:.2?}"),
    )
}

fn norm_conservation() -> Outcome {
    let params = TwoParticleParams::new(FRAC_PI_4, 1.3, 0.5, 128).unwrap();
    let trace = evolve(&params, &InitialState::PhiS(0.9), 10_000, 0).unwrap();
    let defect = trace.max_norm_defect();
    outcome(defect < 1e-10, format!("max row-sum defect {defect:.2e} over {} rows", trace.row_sums().len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("walk unitarity and covariance", walk_unitarity),
        ("interaction classification", classification),
        ("block decomposition", block_decomposition),
        ("free states", free_states),
        ("scattering states", scattering_states),
        ("bound states", bound_states),
        ("no bound states at a generic point", negative_control),
        ("completeness", completeness),
        ("characteristic root bounds", root_bounds),
        ("localization sweep", localization_sweep),
        ("norm conservation", norm_conservation),
    ];
    let mut failed = Vec::new();
    for (n, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("[{}] {} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, n + 1, o.detail);
        if !o.pass {
            failed.push(format!("{} {name}", n + 1));
        }
    }
    assert!(failed.is_empty(), "failed criteria: {}", failed.join("; "));
}
