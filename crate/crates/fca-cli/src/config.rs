//! Run options from flags and an optional JSON file with the same keys.

use std::path::{Path, PathBuf};

use clap::Args;
use fca_core::sim::{parse_scalar, InitialState};
use fca_core::two_particle::TwoParticleParams;
use fca_core::walks::{Chirality, WalkModel};
use serde::Deserialize;

use crate::CliError;

/// Flags shared by every subcommand. Unset flags fall back to the config
/// file, then to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// Total quasi-momentum; accepts expressions like `pi/4`, or `lo:hi` for sweeps.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub p: Option<String>,
    /// Coupling modulus |λ|; `lo:hi` for sweeps.
    #[arg(long = "lambda-abs", global = true, allow_hyphen_values = true)]
    pub lambda_abs: Option<String>,
    #[arg(long = "lambda-phase", global = true, allow_hyphen_values = true)]
    pub lambda_phase: Option<String>,
    /// Half-width of the relative-coordinate lattice (even, at least 8).
    #[arg(long = "L", global = true)]
    pub half_width: Option<usize>,
    /// Number of evolution steps.
    #[arg(long = "T", global = true)]
    pub time: Option<usize>,
    /// Number of sweep points.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Momentum points per axis for dispersion.
    #[arg(long = "k-grid", global = true)]
    pub k_grid: Option<usize>,
    #[arg(long, global = true)]
    pub initial: Option<String>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Walk for dispersion: weyl+, weyl-, dirac+, dirac- or massless1d.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Dirac mass parameter m, |m| ≤ 1.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub mass: Option<String>,
}

/// A number or an expression string in the JSON file.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Number(f64),
    Text(String),
}

impl Scalar {
    fn into_text(self) -> String {
        match self {
            Scalar::Number(x) => format!("{x:?}"),
            Scalar::Text(s) => s,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileOptions {
    p: Option<Scalar>,
    lambda_abs: Option<Scalar>,
    lambda_phase: Option<Scalar>,
    #[serde(rename = "L")]
    half_width: Option<usize>,
    #[serde(rename = "T")]
    time: Option<usize>,
    steps: Option<usize>,
    k_grid: Option<usize>,
    initial: Option<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    model: Option<String>,
    mass: Option<Scalar>,
}

pub const DEFAULT_P: &str = "pi/4";
pub const DEFAULT_LAMBDA: &str = "1";
pub const DEFAULT_HALF_WIDTH: usize = 128;
pub const DEFAULT_TIME: usize = 100;
pub const DEFAULT_STEPS: usize = 33;
pub const DEFAULT_K_GRID: usize = 17;
pub const DEFAULT_INITIAL: &str = "phi_b_plus";

impl Options {
    /// Fills unset flags from the JSON file named by `--config`.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = read_file(&path)?;
        let or = |flag: &mut Option<String>, v: Option<Scalar>| {
            if flag.is_none() {
                *flag = v.map(Scalar::into_text);
            }
        };
        or(&mut self.p, file.p);
        or(&mut self.lambda_abs, file.lambda_abs);
        or(&mut self.lambda_phase, file.lambda_phase);
        or(&mut self.mass, file.mass);
        self.half_width = self.half_width.or(file.half_width);
        self.time = self.time.or(file.time);
        self.steps = self.steps.or(file.steps);
        self.k_grid = self.k_grid.or(file.k_grid);
        self.initial = self.initial.or(file.initial);
        self.out = self.out.or(file.out);
        self.seed = self.seed.or(file.seed);
        self.model = self.model.or(file.model);
        Ok(self)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn time(&self) -> usize {
        self.time.unwrap_or(DEFAULT_TIME)
    }

    pub fn half_width(&self) -> usize {
        self.half_width.unwrap_or(DEFAULT_HALF_WIDTH)
    }

    pub fn initial(&self) -> Result<InitialState, CliError> {
        let text = self.initial.as_deref().unwrap_or(DEFAULT_INITIAL);
        text.parse().map_err(|e| CliError::Usage(format!("--initial: {e}")))
    }

    fn scalar(flag: &str, value: Option<&str>, default: &str) -> Result<f64, CliError> {
        let text = value.unwrap_or(default);
        parse_scalar(text).map_err(|e| CliError::Usage(format!("--{flag}: {e}")))
    }

    pub fn p(&self) -> Result<f64, CliError> {
        Self::scalar("p", self.p.as_deref(), DEFAULT_P)
    }

    pub fn lambda_abs(&self) -> Result<f64, CliError> {
        Self::scalar("lambda-abs", self.lambda_abs.as_deref(), DEFAULT_LAMBDA)
    }

    pub fn lambda_phase(&self) -> Result<f64, CliError> {
        Self::scalar("lambda-phase", self.lambda_phase.as_deref(), "0")
    }

    pub fn params(&self) -> Result<TwoParticleParams, CliError> {
        TwoParticleParams::new(self.p()?, self.lambda_abs()?, self.lambda_phase()?, self.half_width())
            .map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn model(&self) -> Result<WalkModel, CliError> {
        let mass = Self::scalar("mass", self.mass.as_deref(), "0")?;
        match self.model.as_deref().unwrap_or("weyl+") {
            "weyl+" | "weyl" => Ok(WalkModel::Weyl(Chirality::Right)),
            "weyl-" => Ok(WalkModel::Weyl(Chirality::Left)),
            "dirac+" | "dirac" => Ok(WalkModel::Dirac { chirality: Chirality::Right, mass }),
            "dirac-" => Ok(WalkModel::Dirac { chirality: Chirality::Left, mass }),
            "massless1d" => Ok(WalkModel::Massless1d),
            other => Err(CliError::Usage(format!("--model: unknown walk `{other}`"))),
        }
    }
}

fn read_file(path: &Path) -> Result<FileOptions, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))
}

/// `lo:hi` as a pair of scalars, or `None` for a single value.
pub fn parse_range(text: &str) -> Result<Option<(f64, f64)>, CliError> {
    let Some((lo, hi)) = text.split_once(':') else {
        return Ok(None);
    };
    let parse = |s: &str| parse_scalar(s).map_err(|e| CliError::Usage(format!("range `{text}`: {e}")));
    Ok(Some((parse(lo)?, parse(hi)?)))
}
