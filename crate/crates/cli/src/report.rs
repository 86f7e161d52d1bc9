//! JSON views of pipeline results.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use wavspec_core::projection::ProjectionReport;
use wavspec_core::threshold::{SupNormEstimate, ThresholdPlan};
use wavspec_core::wavelet::WaveletCoefficients;

use crate::config::RunConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPlanJson {
    pub mode: String,
    pub delta: f64,
    pub b: Option<f64>,
    pub f_sup: f64,
    pub c_star: Option<f64>,
    pub per_level: BTreeMap<u32, f64>,
}

impl From<&ThresholdPlan> for ThresholdPlanJson {
    fn from(p: &ThresholdPlan) -> Self {
        Self {
            mode: p.mode.name().to_string(),
            delta: p.delta,
            b: p.b,
            f_sup: p.f_sup,
            c_star: p.c_star,
            per_level: p.per_level.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupNormJson {
    pub value: f64,
    pub r: usize,
    pub j_n: u32,
    pub n_n: usize,
    pub kappa: f64,
}

impl From<&SupNormEstimate> for SupNormJson {
    fn from(e: &SupNormEstimate) -> Self {
        Self {
            value: e.value,
            r: e.degree,
            j_n: e.partition_exponent,
            n_n: e.dimension,
            kappa: e.kappa,
        }
    }
}

/// `(level, k, value)`; scaling entries have level `j0 - 1`.
pub fn coefficient_triples(c: &WaveletCoefficients) -> Vec<(i32, usize, f64)> {
    c.iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionJson {
    pub theta: Vec<(i32, usize, f64)>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl From<&ProjectionReport> for ProjectionJson {
    fn from(r: &ProjectionReport) -> Self {
        Self {
            theta: coefficient_triples(r.theta_hat.theta()),
            residual: r.residual_norm,
            iterations: r.iterations,
            converged: r.converged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesovJson {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsJson {
    /// `Delta(f; f_hat)` against the truth.
    pub kl: Option<f64>,
    pub l2: Option<f64>,
    /// Besov norm of the estimated log-density coefficients.
    pub besov: Option<BesovJson>,
    /// Approximation error of the truth at level `j1`.
    pub d_j: Option<f64>,
    pub gamma_j: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceJson {
    pub max_lag: usize,
    pub m: usize,
    pub min_eigenvalue: f64,
    pub psd: bool,
    /// Same check on the unconstrained expansion, when there is one.
    pub unconstrained_min_eigenvalue: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelsJson {
    pub j0: u32,
    pub j1: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateSummary {
    pub min: f64,
    pub max: f64,
    pub unconstrained_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub estimate_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub estimator: String,
    pub n: usize,
    pub grid_exponent: u32,
    pub levels: Option<LevelsJson>,
    pub threshold_plan: Option<ThresholdPlanJson>,
    pub sup_norm_estimate: Option<SupNormJson>,
    pub histogram_m: Option<usize>,
    pub projection: Option<ProjectionJson>,
    pub estimate: EstimateSummary,
    pub metrics: MetricsJson,
    pub covariance: CovarianceJson,
    /// The data-driven threshold assumes `||f - f_n||_inf <= ||f||_inf / 4`,
    /// which cannot be checked from data.
    pub unchecked_assumptions: Vec<String>,
    pub artifacts: Vec<String>,
    pub timings: Timings,
}

impl RunReport {
    pub fn converged(&self) -> bool {
        self.projection.as_ref().is_none_or(|p| p.converged)
    }
}
