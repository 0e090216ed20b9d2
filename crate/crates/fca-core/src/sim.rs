//! Time evolution of two-particle states under the blocked evolution, and
//! localization sweeps over the coupling or the total momentum.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{cis, C64};
use crate::two_particle::{
    analytic_free_state, analytic_scattering_state, bound_state_vector, build_antisymmetrizer, build_evolution,
    BlockedEvolution, Family, TwoParticleError, TwoParticleParams,
};

/// Radius of the window used by the localization metric.
pub const METRIC_RADIUS: i64 = 2;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("unknown initial state `{0}`")]
    UnknownInitial(String),
    #[error("cannot parse number `{0}`")]
    BadNumber(String),
    #[error("number of steps must be positive")]
    ZeroSteps,
    #[error("initial state vanishes after antisymmetrization")]
    ZeroState,
    #[error(transparent)]
    Model(#[from] TwoParticleError),
}

/// Parses a real written as a product/quotient of factors, each a decimal
/// number, `pi`, or `sqrt2`, e.g. `-1.5*pi/sqrt2`.
pub fn parse_scalar(text: &str) -> Result<f64, SimError> {
    let bad = || SimError::BadNumber(text.to_string());
    let t = text.trim();
    let (sign, body) = match t.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, t),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let mut value = sign;
    let mut divide = false;
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let factor = match rest[..end].trim() {
            "pi" => std::f64::consts::PI,
            "sqrt2" => std::f64::consts::SQRT_2,
            num => num.parse::<f64>().map_err(|_| bad())?,
        };
        value = if divide { value / factor } else { value * factor };
        if end == rest.len() {
            break;
        }
        divide = rest.as_bytes()[end] == b'/';
        rest = &rest[end + 1..];
    }
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    PhiBPlus,
    PhiBMinus,
    PhiB0,
    PhiS(f64),
    PhiF(f64),
    /// Packet on e1, e2, e3 with seeded random relative phases.
    Gaussian {
        y0: f64,
        width: f64,
        k0: f64,
    },
    /// A single pair label (1..=6) at one site.
    Site {
        label: usize,
        y: i64,
    },
}

impl FromStr for InitialState {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        let unknown = || SimError::UnknownInitial(s.to_string());
        let s = s.trim();
        let (name, args) = match s.split_once('(') {
            Some((name, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(unknown)?;
                (name.trim(), inner.split(',').map(str::trim).collect::<Vec<_>>())
            }
            None => (s, Vec::new()),
        };
        let scalars = |n: usize| -> Result<Vec<f64>, SimError> {
            if args.len() != n {
                return Err(unknown());
            }
            args.iter().map(|a| parse_scalar(a)).collect()
        };
        match name {
            "phi_b_plus" if args.is_empty() => Ok(Self::PhiBPlus),
            "phi_b_minus" if args.is_empty() => Ok(Self::PhiBMinus),
            "phi_b0" if args.is_empty() => Ok(Self::PhiB0),
            "phi_s" => Ok(Self::PhiS(scalars(1)?[0])),
            "phi_f" => Ok(Self::PhiF(scalars(1)?[0])),
            "gaussian" => {
                let v = scalars(3)?;
                if v[1] <= 0.0 {
                    return Err(unknown());
                }
                Ok(Self::Gaussian { y0: v[0], width: v[1], k0: v[2] })
            }
            "site" if args.len() == 2 => {
                let label = args[0].trim_start_matches('e').parse::<usize>().map_err(|_| unknown())?;
                let y = args[1].parse::<i64>().map_err(|_| unknown())?;
                if !(1..=6).contains(&label) {
                    return Err(unknown());
                }
                Ok(Self::Site { label, y })
            }
            _ => Err(unknown()),
        }
    }
}

impl fmt::Display for InitialState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PhiBPlus => write!(f, "phi_b_plus"),
            Self::PhiBMinus => write!(f, "phi_b_minus"),
            Self::PhiB0 => write!(f, "phi_b0"),
            Self::PhiS(k) => write!(f, "phi_s({k})"),
            Self::PhiF(k) => write!(f, "phi_f({k})"),
            Self::Gaussian { y0, width, k0 } => write!(f, "gaussian({y0},{width},{k0})"),
            Self::Site { label, y } => write!(f, "site(e{label},{y})"),
        }
    }
}

impl InitialState {
    /// Normalized vector on the truncated lattice of `params`.
    pub fn prepare(&self, params: &TwoParticleParams, seed: u64) -> Result<Vec<C64>, SimError> {
        let lat = params.lattice();
        let raw = match *self {
            Self::PhiBPlus => bound_state_vector(params, Family::PhiBPlus).expect("bound family"),
            Self::PhiBMinus => bound_state_vector(params, Family::PhiBMinus).expect("bound family"),
            Self::PhiB0 => bound_state_vector(params, Family::PhiB0).expect("bound family"),
            Self::PhiS(k) => analytic_scattering_state(params, k)?.vector,
            Self::PhiF(k) => analytic_free_state(params, k)?.vector,
            Self::Gaussian { y0, width, k0 } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let phases: Vec<C64> = (0..3).map(|_| cis(rng.random_range(0.0..std::f64::consts::TAU))).collect();
                let mut v = vec![C64::default(); lat.dim()];
                for (label, phase) in phases.iter().enumerate() {
                    for y in lat.ys() {
                        let d = (y as f64 - y0) / width;
                        v[lat.index(label, y)] = phase * cis(k0 * y as f64) * (-0.5 * d * d).exp();
                    }
                }
                v
            }
            Self::Site { label, y } => {
                if y.abs() > params.half_width as i64 {
                    return Err(SimError::UnknownInitial(self.to_string()));
                }
                let mut v = vec![C64::default(); lat.dim()];
                v[lat.index(label - 1, y)] = C64::new(1.0, 0.0);
                v
            }
        };
        let mut v = build_antisymmetrizer(params).apply(&raw);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(SimError::ZeroState);
        }
        v.iter_mut().for_each(|z| *z /= norm);
        Ok(v)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationTrace {
    pub params: TwoParticleParams,
    pub steps: usize,
    pub grid: Vec<i64>,
    /// Row `t` (for `t = 0..=steps`) is the marginal `P(t, y)` over `grid`.
    pub probabilities: Vec<Vec<f64>>,
}

impl SimulationTrace {
    pub fn row_sums(&self) -> Vec<f64> {
        self.probabilities.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn max_norm_defect(&self) -> f64 {
        self.row_sums().iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `P(t, |y| ≤ radius)`
    pub fn window_probability(&self, t: usize, radius: i64) -> f64 {
        self.grid.iter().zip(&self.probabilities[t]).filter(|(y, _)| y.abs() <= radius).map(|(_, p)| p).sum()
    }

    /// The localization metric `P(T, |y| ≤ 2)`.
    pub fn metric(&self) -> f64 {
        self.window_probability(self.steps, METRIC_RADIUS)
    }
}

fn stepper(
    params: &TwoParticleParams,
    initial: &InitialState,
    steps: usize,
    seed: u64,
) -> Result<(BlockedEvolution, Vec<C64>), SimError> {
    if steps == 0 {
        return Err(SimError::ZeroSteps);
    }
    Ok((build_evolution(params), initial.prepare(params, seed)?))
}

/// Applies the evolution `steps` times, recording the marginal at every
/// step including the initial one.
pub fn evolve(
    params: &TwoParticleParams,
    initial: &InitialState,
    steps: usize,
    seed: u64,
) -> Result<SimulationTrace, SimError> {
    let (ev, mut state) = stepper(params, initial, steps, seed)?;
    let lat = ev.lattice;
    let mut probabilities = Vec::with_capacity(steps + 1);
    probabilities.push(lat.marginal(&state));
    for _ in 0..steps {
        state = ev.apply(&state);
        probabilities.push(lat.marginal(&state));
    }
    Ok(SimulationTrace { params: *params, steps, grid: lat.ys().collect(), probabilities })
}

/// `P(T, |y| ≤ 2)` without storing the trace.
pub fn localization_metric(
    params: &TwoParticleParams,
    initial: &InitialState,
    steps: usize,
    seed: u64,
) -> Result<f64, SimError> {
    let (ev, mut state) = stepper(params, initial, steps, seed)?;
    for _ in 0..steps {
        state = ev.apply(&state);
    }
    let lat = ev.lattice;
    Ok(lat.ys().zip(lat.marginal(&state)).filter(|(y, _)| y.abs() <= METRIC_RADIUS).map(|(_, p)| p).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// |λ|, keeping the phase of the base coupling.
    Lambda,
    P,
}

impl SweepAxis {
    pub fn column(self) -> &'static str {
        match self {
            Self::Lambda => "lambda",
            Self::P => "p",
        }
    }

    pub fn apply(self, base: &TwoParticleParams, value: f64) -> Result<TwoParticleParams, TwoParticleError> {
        match self {
            Self::Lambda => {
                let phase = if base.lambda.norm() > 0.0 { base.lambda.arg() } else { 0.0 };
                TwoParticleParams::new(base.p, value, phase, base.half_width)
            }
            Self::P => TwoParticleParams::with_lambda(value, base.lambda, base.half_width),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub value: f64,
    pub metric: f64,
}

/// `n` evenly spaced points from `lo` to `hi`, both included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect(),
    }
}

/// Localization metric at each value of the swept parameter, sorted by value.
pub fn sweep(
    base: &TwoParticleParams,
    axis: SweepAxis,
    values: &[f64],
    initial: &InitialState,
    steps: usize,
    seed: u64,
) -> Result<Vec<SweepPoint>, SimError> {
    let point = |&value: &f64| -> Result<SweepPoint, SimError> {
        let params = axis.apply(base, value)?;
        Ok(SweepPoint { value, metric: localization_metric(&params, initial, steps, seed)? })
    };
    #[cfg(feature = "parallel")]
    let points: Result<Vec<_>, _> = {
        use rayon::prelude::*;
        values.par_iter().map(point).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let points: Result<Vec<_>, _> = values.iter().map(point).collect();
    let mut points = points?;
    points.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    fn params(p: f64, mu: f64, l: usize) -> TwoParticleParams {
        TwoParticleParams::new(p, mu / SQRT_2, 0.0, l).unwrap()
    }

    #[test]
    fn scalar_expressions() {
        assert_eq!(parse_scalar("0.25").unwrap(), 0.25);
        assert!((parse_scalar("pi/4").unwrap() - PI / 4.0).abs() < 1e-16);
        assert!((parse_scalar("-1.5*pi/sqrt2").unwrap() + 1.5 * PI / SQRT_2).abs() < 1e-15);
        assert!(parse_scalar("pie").is_err());
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar("1/0").is_err());
    }

    #[test]
    fn initial_state_names_round_trip() {
        for text in
            ["phi_b_plus", "phi_b_minus", "phi_b0", "phi_s(0.5)", "phi_f(-1)", "gaussian(10,3,0.5)", "site(e3,0)"]
        {
            let parsed: InitialState = text.parse().unwrap();
            assert_eq!(parsed.to_string().parse::<InitialState>().unwrap(), parsed);
        }
        assert!("phi_x".parse::<InitialState>().is_err());
        assert!("gaussian(1,2)".parse::<InitialState>().is_err());
        assert!("site(e7,0)".parse::<InitialState>().is_err());
    }

    #[test]
    fn exact_bound_state_stays_put() {
        let trace = evolve(&params(PI / 4.0, PI, 32), &InitialState::PhiBPlus, 100, 0).unwrap();
        for t in 0..=100 {
            assert!((trace.window_probability(t, 0) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn free_pair_moves_ballistically() {
        let trace = evolve(&params(0.3, 0.0, 32), &InitialState::Site { label: 3, y: 0 }, 10, 0).unwrap();
        for t in 0..=10 {
            let y = -2 * t as i64;
            let row = &trace.probabilities[t];
            let at = |y: i64| row[(y + 32) as usize];
            // e3 at y, its antisymmetric partner e6 at −y
            let expect = if t == 0 { 1.0 } else { 0.5 };
            assert!((at(y) - expect).abs() < 1e-14 && (at(-y) - expect).abs() < 1e-14, "t = {t}");
        }
    }

    #[test]
    fn traces_are_normalized_and_period_pi_in_p() {
        let init: InitialState = "gaussian(4,3,0.7)".parse().unwrap();
        let a = evolve(&params(0.4, 1.3, 16), &init, 50, 9).unwrap();
        let b = evolve(&params(0.4 + PI, 1.3, 16), &init, 50, 9).unwrap();
        assert!(a.max_norm_defect() < 1e-12);
        for (ra, rb) in a.probabilities.iter().zip(&b.probabilities) {
            for (x, y) in ra.iter().zip(rb) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_zero_steps() {
        assert_eq!(evolve(&params(0.4, 1.0, 8), &InitialState::PhiB0, 0, 0).unwrap_err(), SimError::ZeroSteps);
    }

    #[test]
    fn sweep_is_sorted_and_empty_range_is_empty() {
        let base = params(PI / 4.0, PI, 16);
        let pts = sweep(&base, SweepAxis::Lambda, &[2.0, 1.0, 1.5], &InitialState::PhiBPlus, 5, 0).unwrap();
        assert!(pts.windows(2).all(|w| w[0].value < w[1].value));
        assert!(sweep(&base, SweepAxis::P, &[], &InitialState::PhiB0, 5, 0).unwrap().is_empty());
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }
}
