use std::f64::consts::PI;

use fca_core::classifier::{
    dirac_rep_exact, enumerate_monomials, match_families, solve_invariants, MatchReport, Monomial,
};
use fca_core::sim::{evolve, linspace, sweep, SweepAxis};
use fca_core::spectral::{
    brute_spectrum, completeness_check, orthogonal_remainder, root_sample, CompletenessOptions, SpectrumReport,
};
use fca_core::two_particle::{
    analytic_free_state, analytic_scattering_state, bound_states, build_evolution, characteristic_roots,
    decomposition_defect, free_grid, scattering_grid, subspace_projectors, PairSpace, TwoParticleParams,
};
use fca_core::walks::{
    bz_grid, dirac_walk, dispersion, isotropy_covariance_check, Chirality, DiracRep, IsotropyRep, WalkModel,
};
use serde::Serialize;

use crate::config::{parse_range, Options, DEFAULT_K_GRID, DEFAULT_STEPS};
use crate::format::{number, row};
use crate::CliError;

/// Text to write plus whether every check passed.
pub struct Output {
    pub text: String,
    pub passed: bool,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, passed: true }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn model_error(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// How one reading of the Dirac isotropy representation fares.
#[derive(Serialize)]
struct RepVariant {
    name: &'static str,
    projective_defect: f64,
    /// Covariance violation of the Dirac walk at m = 0.3.
    covariance: f64,
    solution_dimension: usize,
}

#[derive(Serialize)]
struct ClassifyReport {
    degrees: Vec<usize>,
    monomials: Vec<Monomial>,
    #[serde(flatten)]
    matching: MatchReport,
    variants: Vec<RepVariant>,
}

pub fn classify(quadratic: bool) -> Result<Output, CliError> {
    let degrees = if quadratic { vec![2, 4, 6, 8] } else { vec![4, 6, 8] };
    let rep = dirac_rep_exact(DiracRep::WeylPair).map_err(model_error)?;
    let basis = solve_invariants(&rep, &degrees).map_err(model_error)?;
    let matching = match_families(&basis, &rep).map_err(model_error)?;
    let monomials = enumerate_monomials(4, &degrees).map_err(model_error)?;
    let walk = dirac_walk(Chirality::Right, 0.3).map_err(model_error)?;
    let variants = DiracRep::ALL
        .iter()
        .map(|&variant| {
            let iso = IsotropyRep::dirac(variant);
            let exact = dirac_rep_exact(variant).map_err(model_error)?;
            Ok(RepVariant {
                name: variant.name(),
                projective_defect: iso.projective_defect(),
                covariance: isotropy_covariance_check(&walk, &iso).map_err(model_error)?,
                solution_dimension: solve_invariants(&exact, &degrees).map_err(model_error)?.dimension(),
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Output::ok(json(&ClassifyReport { degrees, monomials, matching, variants })))
}

pub fn dispersion_table(opts: &Options) -> Result<Output, CliError> {
    let model = opts.model()?;
    let n = opts.k_grid.unwrap_or(DEFAULT_K_GRID);
    let grid: Vec<[f64; 3]> = match model {
        WalkModel::Massless1d => linspace(-PI, PI, n).into_iter().map(|k| [k, 0.0, 0.0]).collect(),
        _ => bz_grid(n),
    };
    let mut text = String::from("k1,k2,k3,branch,omega\n");
    for k in grid {
        for (branch, omega) in dispersion(&model, k).map_err(model_error)?.into_iter().enumerate() {
            text += &row(&[number(k[0]), number(k[1]), number(k[2]), branch.to_string(), number(omega)]);
        }
    }
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct SpectrumOutput {
    params: TwoParticleParams,
    bound_count: usize,
    min_participation: f64,
    #[serde(flatten)]
    report: SpectrumReport,
}

pub fn spectrum(opts: &Options) -> Result<Output, CliError> {
    let params = opts.params()?;
    let report = brute_spectrum(&build_evolution(&params)).map_err(model_error)?;
    Ok(Output::ok(json(&SpectrumOutput {
        params,
        bound_count: report.bound_count(),
        min_participation: report.min_participation(),
        report,
    })))
}

pub fn evolve_table(opts: &Options) -> Result<Output, CliError> {
    let params = opts.params()?;
    let trace = evolve(&params, &opts.initial()?, opts.time(), opts.seed()).map_err(model_error)?;
    let mut text = String::from("t,y,probability\n");
    for (t, probabilities) in trace.probabilities.iter().enumerate() {
        for (y, p) in trace.grid.iter().zip(probabilities) {
            text += &row(&[t.to_string(), y.to_string(), number(*p)]);
        }
    }
    Ok(Output::ok(text))
}

pub fn sweep_table(opts: &Options) -> Result<Output, CliError> {
    let p_range = opts.p.as_deref().map(parse_range).transpose()?.flatten();
    let lambda_range = opts.lambda_abs.as_deref().map(parse_range).transpose()?.flatten();
    let (axis, (lo, hi), base) = match (p_range, lambda_range) {
        (Some(r), None) => {
            let base = TwoParticleParams::new(0.0, opts.lambda_abs()?, opts.lambda_phase()?, opts.half_width());
            (SweepAxis::P, r, base)
        }
        (None, Some(r)) => {
            // unit modulus only carries the phase into the sweep
            let base = TwoParticleParams::new(opts.p()?, 1.0, opts.lambda_phase()?, opts.half_width());
            (SweepAxis::Lambda, r, base)
        }
        (Some(_), Some(_)) => return Err(CliError::Usage("give a range for only one of --p, --lambda-abs".into())),
        (None, None) => return Err(CliError::Usage("sweep needs a range `lo:hi` on --p or --lambda-abs".into())),
    };
    let base = base.map_err(model_error)?;
    let values = linspace(lo, hi, opts.steps.unwrap_or(DEFAULT_STEPS));
    let points = sweep(&base, axis, &values, &opts.initial()?, opts.time(), opts.seed()).map_err(model_error)?;
    let mut text = format!("{},metric\n", axis.column());
    for pt in points {
        text += &row(&[number(pt.value), number(pt.metric)]);
    }
    Ok(Output::ok(text))
}

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
    /// `value ≤ tolerance`, or `value ≥ tolerance` for lower bounds.
    lower_bound: bool,
    pass: bool,
}

impl Check {
    fn at_most(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self { name, value, tolerance, lower_bound: false, pass: value <= tolerance }
    }

    fn at_least(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self { name, value, tolerance, lower_bound: true, pass: value >= tolerance }
    }
}

#[derive(Serialize)]
struct SpectrumSummary {
    eigenvalues: usize,
    eigen_residual: f64,
    matched_states: usize,
    max_phase_distance: f64,
    min_fidelity: f64,
    bound_count: usize,
    min_participation: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    params: TwoParticleParams,
    checks: Vec<Check>,
    spectrum: SpectrumSummary,
    pass: bool,
}

fn worst(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

pub fn verify(opts: &Options) -> Result<Output, CliError> {
    let params = opts.params()?;
    let ev = build_evolution(&params);
    let window = params.half_width as i64 - 4;
    let mut checks =
        vec![Check::at_most("block_decomposition", decomposition_defect(&ev, &subspace_projectors(&params)), 1e-12)];

    let q = PairSpace::new(&params).check();
    checks.push(Check::at_most("q_blocking", q.commutator.max(q.complement_defect).max(q.block_defect), 1e-12));

    let free = free_grid(&params)
        .into_iter()
        .map(|k| analytic_free_state(&params, k).map(|s| ev.residual(&s.vector, s.eigenvalue, None)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(model_error)?;
    checks.push(Check::at_most("free_states", worst(free.into_iter()), 1e-10));

    let scattering = scattering_grid(&params)
        .into_iter()
        .map(|k| analytic_scattering_state(&params, k).map(|s| ev.residual(&s.vector, s.eigenvalue, Some(window))))
        .collect::<Result<Vec<_>, _>>()
        .map_err(model_error)?;
    checks.push(Check::at_most("scattering_states", worst(scattering.into_iter()), 1e-8));

    let bound = bound_states(&params);
    if !bound.is_empty() {
        checks.push(Check::at_most(
            "bound_states",
            worst(bound.iter().map(|s| ev.residual(&s.vector, s.eigenvalue, None))),
            1e-12,
        ));
    }

    let report = brute_spectrum(&ev).map_err(model_error)?;
    let max_phase_distance = worst(report.matches.iter().map(|m| m.phase_distance));
    let min_fidelity = report.matches.iter().map(|m| m.fidelity).fold(1.0, f64::min);
    checks.push(Check::at_most("spectrum_phase_agreement", max_phase_distance, 1e-8));
    checks.push(Check::at_least("spectrum_fidelity", min_fidelity, 1.0 - 1e-6));

    let completeness = completeness_check(&params, CompletenessOptions::default()).map_err(model_error)?;
    checks.push(Check::at_most("completeness", completeness.defect, 1e-6));
    let remainder = orthogonal_remainder(&params, opts.seed()).map_err(model_error)?;
    checks.push(Check::at_most("orthogonal_remainder", remainder, 1e-8));

    // γ = 0 has no quadratic to bound
    if let Ok(roots) = characteristic_roots(&params) {
        let sample = root_sample(params.p, params.lambda.norm(), &roots);
        checks.push(Check::at_least("root_modulus", sample.min_modulus, 1.0 - 1e-12));
        checks.push(Check::at_most("root_modulus_identity", sample.modulus_identity, 1e-12));
    }

    let spectrum = SpectrumSummary {
        eigenvalues: report.eigenphases.len(),
        eigen_residual: report.residual,
        matched_states: report.matches.len(),
        max_phase_distance,
        min_fidelity,
        bound_count: report.bound_count(),
        min_participation: report.min_participation(),
    };
    let pass = checks.iter().all(|c| c.pass);
    Ok(Output { text: json(&VerifyReport { params, checks, spectrum, pass }), passed: pass })
}
