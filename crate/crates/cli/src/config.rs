use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use wavspec_core::estimate::{Estimator, EstimatorConfig};
use wavspec_core::process::ArmaNoiseParams;
use wavspec_core::projection::{Descent, SolverOptions};
use wavspec_core::wavelet::Filter;

/// Data-generating model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// ARMA(2,2) plus white noise with the standard constants.
    Benchmark,
    WhiteNoise { variance: f64 },
    Arma {
        ar: Vec<f64>,
        ma: Vec<f64>,
        noise_scale: f64,
        innovation_variance: f64,
    },
}

impl ModelSpec {
    pub fn params(&self) -> Result<ArmaNoiseParams> {
        Ok(match self {
            ModelSpec::Benchmark => ArmaNoiseParams::benchmark(),
            ModelSpec::WhiteNoise { variance } => ArmaNoiseParams::white_noise(*variance)?,
            ModelSpec::Arma {
                ar,
                ma,
                noise_scale,
                innovation_variance,
            } => ArmaNoiseParams::new(ar.clone(), ma.clone(), *noise_scale, *innovation_variance)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum EstimatorName {
    Linear,
    HardOracle,
    HardAdaptive,
    BaselineHistogram,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum DescentName {
    Preconditioned,
    Steepest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iters: usize,
    pub descent: DescentName,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolverOptions::default();
        Self {
            tol: d.tol,
            max_iters: d.max_iters,
            descent: DescentName::Preconditioned,
        }
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    /// Single-column CSV used instead of simulating; disables truth-based metrics.
    pub input: Option<PathBuf>,
    pub n: usize,
    pub seed: u64,
    pub estimator: EstimatorName,
    /// Smoothness for the linear scale rule.
    pub smoothness: f64,
    pub filter: String,
    pub grid_j: Option<u32>,
    pub delta: f64,
    pub b: f64,
    pub kappa: f64,
    pub r: usize,
    pub eta: f64,
    pub solver: SolverConfig,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let e = EstimatorConfig::default();
        Self {
            model: ModelSpec::Benchmark,
            input: None,
            n: 1024,
            seed: 1,
            estimator: EstimatorName::HardAdaptive,
            smoothness: 1.0,
            filter: e.filter.name().to_string(),
            grid_j: None,
            delta: e.delta,
            b: e.b,
            kappa: e.kappa,
            r: e.degree,
            eta: e.eta,
            solver: SolverConfig::default(),
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn estimator(&self) -> Estimator {
        match self.estimator {
            EstimatorName::Linear => Estimator::Linear {
                smoothness: self.smoothness,
            },
            EstimatorName::HardOracle => Estimator::HardOracle,
            EstimatorName::HardAdaptive => Estimator::HardAdaptive,
            EstimatorName::BaselineHistogram => Estimator::BaselineHistogram,
        }
    }

    /// Checks the fields and converts them to the pipeline configuration.
    pub fn estimator_config(&self) -> Result<EstimatorConfig> {
        if self.n < 8 {
            bail!("n must be at least 8");
        }
        if !(self.eta > 0.0) {
            bail!("eta must be positive");
        }
        if !(self.kappa > 0.0) {
            bail!("kappa must be positive");
        }
        if !(self.solver.tol > 0.0) {
            bail!("solver tolerance must be positive");
        }
        let filter: Filter = self.filter.parse()?;
        Ok(EstimatorConfig {
            estimator: self.estimator(),
            filter,
            grid_exponent: self.grid_j,
            delta: self.delta,
            b: self.b,
            kappa: self.kappa,
            degree: self.r,
            eta: self.eta,
            solver: SolverOptions {
                tol: self.solver.tol,
                max_iters: self.solver.max_iters,
                descent: match self.solver.descent {
                    DescentName::Preconditioned => Descent::Preconditioned,
                    DescentName::Steepest => Descent::Steepest,
                },
                ..SolverOptions::default()
            },
            ..EstimatorConfig::default()
        })
    }
}
