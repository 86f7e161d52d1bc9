//! The full estimation pipeline: periodogram, wavelet coefficients,
//! thresholding, the unconstrained expansion and its information projection.

use alloc::vec::Vec;

use crate::baseline::{baseline_histogram, HistogramSweep};
use crate::error::{invalid, Result};
use crate::grid::GridFunction;
use crate::periodogram::{bias_constant, default_grid_exponent, periodogram};
use crate::process::{true_covariance, true_spectral_density, ArmaNoiseParams, TimeSeries};
use crate::projection::{eval_family, init_theta, project, ProjectionReport, SolverOptions};
use crate::threshold::{apply_threshold, scale_levels, sup_norm_estimate, ScaleRule, SupNormEstimate, ThresholdPlan};
use crate::wavelet::{Filter, WaveletBasis, WaveletCoefficients};

/// Lags used for the oracle bias constant.
pub const ORACLE_COVARIANCE_LAGS: usize = 4096;
/// Smallest grid exponent the pipeline will use.
pub const MIN_GRID_EXPONENT: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    /// Projection of all coefficients in `Lambda_{j1}` with the linear scale rule.
    Linear { smoothness: f64 },
    /// Hard thresholding with the oracle threshold (needs the true model).
    HardOracle,
    /// Hard thresholding with the data-driven threshold.
    HardAdaptive,
    /// Regular histogram with oracle-selected dimension (needs the true model).
    BaselineHistogram,
}

impl Estimator {
    pub fn name(self) -> &'static str {
        match self {
            Estimator::Linear { .. } => "linear",
            Estimator::HardOracle => "hard_oracle",
            Estimator::HardAdaptive => "hard_adaptive",
            Estimator::BaselineHistogram => "baseline_histogram",
        }
    }

    pub fn needs_truth(self) -> bool {
        matches!(self, Estimator::HardOracle | Estimator::BaselineHistogram)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorConfig {
    pub estimator: Estimator,
    pub filter: Filter,
    /// Grid exponent; `None` picks `max(ceil log2 n, j1 + 4, 7)`.
    pub grid_exponent: Option<u32>,
    pub delta: f64,
    pub b: f64,
    pub kappa: f64,
    /// Degree of the sup-norm pre-estimator.
    pub degree: usize,
    /// Clipping floor for the initial value.
    pub eta: f64,
    pub solver: SolverOptions,
    /// Histogram dimensions swept by the baseline.
    pub histogram_dims: Vec<usize>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            estimator: Estimator::HardAdaptive,
            filter: Filter::default(),
            grid_exponent: None,
            delta: 6.0,
            b: 0.841,
            kappa: 1.0 / 36.0,
            degree: 0,
            eta: 1e-4,
            solver: SolverOptions::default(),
            histogram_dims: (1..=100).collect(),
        }
    }
}

/// Quantities of the true model needed by oracle estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleConstants {
    pub f_sup: f64,
    pub c_star: f64,
    pub truth: GridFunction,
}

impl OracleConstants {
    pub fn new(params: &ArmaNoiseParams, grid_exponent: u32) -> Result<Self> {
        let truth = true_spectral_density(params, grid_exponent);
        let c_star = bias_constant(&true_covariance(params, ORACLE_COVARIANCE_LAGS))?;
        Ok(Self {
            f_sup: truth.sup_norm(),
            c_star,
            truth,
        })
    }
}

/// A configured estimator for a fixed sample size; reusable across series.
#[derive(Debug, Clone)]
pub struct Pipeline {
    config: EstimatorConfig,
    n: usize,
    levels: Option<(u32, u32)>,
    basis: WaveletBasis,
    oracle: Option<OracleConstants>,
}

/// Everything produced by one run of a [`Pipeline`].
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub periodogram: GridFunction,
    /// Empirical coefficients on `Lambda_{j1}`; absent for the baseline.
    pub coefficients: Option<WaveletCoefficients>,
    pub sup_norm: Option<SupNormEstimate>,
    pub plan: Option<ThresholdPlan>,
    /// Projection targets (thresholded coefficients).
    pub targets: Option<WaveletCoefficients>,
    /// Expansion of the targets, not necessarily positive.
    pub unconstrained: Option<GridFunction>,
    pub projection: Option<ProjectionReport>,
    pub histogram: Option<HistogramSweep>,
    pub estimate: GridFunction,
}

impl Estimate {
    /// Whether the final estimate came out of a converged projection (or
    /// needed none).
    pub fn converged(&self) -> bool {
        self.projection.as_ref().is_none_or(|p| p.converged)
    }
}

impl Pipeline {
    pub fn new(config: EstimatorConfig, n: usize, truth: Option<&ArmaNoiseParams>) -> Result<Self> {
        let levels = match config.estimator {
            Estimator::Linear { smoothness } => Some(scale_levels(n, ScaleRule::Linear { smoothness })?),
            Estimator::HardOracle | Estimator::HardAdaptive => Some(scale_levels(n, ScaleRule::Adaptive)?),
            Estimator::BaselineHistogram => None,
        };
        let j1 = levels.map_or(0, |(_, j1)| j1);
        let grid_exponent = config
            .grid_exponent
            .unwrap_or_else(|| default_grid_exponent(n, j1).max(MIN_GRID_EXPONENT));
        if grid_exponent < j1 {
            return Err(invalid("grid exponent must be at least j1"));
        }
        let basis = WaveletBasis::new(config.filter, grid_exponent)?;
        let oracle = truth
            .map(|p| OracleConstants::new(p, grid_exponent))
            .transpose()?;
        if config.estimator.needs_truth() && oracle.is_none() {
            return Err(invalid(alloc::format!(
                "estimator {} needs the true model",
                config.estimator.name()
            )));
        }
        Ok(Self {
            config,
            n,
            levels,
            basis,
            oracle,
        })
    }

    pub fn config(&self) -> &EstimatorConfig {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> Option<(u32, u32)> {
        self.levels
    }

    pub fn basis(&self) -> &WaveletBasis {
        &self.basis
    }

    pub fn grid_exponent(&self) -> u32 {
        self.basis.grid_exponent()
    }

    pub fn oracle(&self) -> Option<&OracleConstants> {
        self.oracle.as_ref()
    }

    /// True density on the pipeline grid, when the model is known.
    pub fn truth(&self) -> Option<&GridFunction> {
        self.oracle.as_ref().map(|o| &o.truth)
    }

    pub fn run(&self, series: &TimeSeries) -> Result<Estimate> {
        if series.len() != self.n {
            return Err(invalid("series length differs from the pipeline sample size"));
        }
        let cfg = &self.config;
        let pgram = periodogram(series, self.grid_exponent())?;

        let Some((j0, j1)) = self.levels else {
            let dims: Vec<usize> = cfg.histogram_dims.iter().copied().filter(|&m| m <= pgram.len()).collect();
            let sweep = baseline_histogram(&pgram, &dims, self.truth())?;
            let estimate = sweep.best.clone().ok_or_else(|| invalid("baseline sweep selected nothing"))?;
            return Ok(Estimate {
                periodogram: pgram,
                coefficients: None,
                sup_norm: None,
                plan: None,
                targets: None,
                unconstrained: None,
                projection: None,
                histogram: Some(sweep),
                estimate,
            });
        };

        let coeffs = self.basis.analyze(&pgram, j0, j1)?;
        let (sup_norm, plan) = match cfg.estimator {
            Estimator::HardAdaptive => {
                let est = sup_norm_estimate(&pgram, self.n, cfg.degree, cfg.kappa)?;
                let plan = ThresholdPlan::data_driven(j0, j1, self.n, &est, cfg.delta, cfg.b, self.basis.psi_sup())?;
                (Some(est), Some(plan))
            }
            Estimator::HardOracle => {
                let o = self.oracle.as_ref().expect("checked in new");
                let plan = ThresholdPlan::oracle(j0, j1, self.n, o.f_sup, o.c_star, cfg.delta, self.basis.psi_sup())?;
                (None, Some(plan))
            }
            _ => (None, None),
        };
        let targets = match &plan {
            Some(p) => apply_threshold(&coeffs, p)?,
            None => coeffs.clone(),
        };
        let unconstrained = self.basis.synthesize(&targets)?;
        let init = init_theta(&unconstrained, cfg.eta, j0, j1, &self.basis)?;
        let report = project(&targets, &init, &cfg.solver, &self.basis)?;
        let estimate = eval_family(&report.theta_hat, &self.basis)?;
        Ok(Estimate {
            periodogram: pgram,
            coefficients: Some(coeffs),
            sup_norm,
            plan,
            targets: Some(targets),
            unconstrained: Some(unconstrained),
            projection: Some(report),
            histogram: None,
            estimate,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::process::simulate;
    use crate::projection::coefficient_map;

    #[test]
    fn hard_adaptive_positive_fixed_point() {
        let p = ArmaNoiseParams::benchmark();
        let pipe = Pipeline::new(EstimatorConfig::default(), 1024, None).unwrap();
        assert_eq!(pipe.levels(), Some((3, 8)));
        assert_eq!(pipe.grid_exponent(), 12);
        let est = pipe.run(&simulate(&p, 1024, 1).unwrap()).unwrap();
        let rep = est.projection.as_ref().unwrap();
        assert!(rep.converged, "{}", rep.residual_norm);
        assert!(est.estimate.min() > 0.0);
        let achieved = coefficient_map(&rep.theta_hat, pipe.basis()).unwrap();
        assert!(achieved.distance(est.targets.as_ref().unwrap()) <= 1e-6);
    }

    #[test]
    fn linear_levels_and_oracle_requirements() {
        let cfg = EstimatorConfig {
            estimator: Estimator::Linear { smoothness: 1.0 },
            ..EstimatorConfig::default()
        };
        let pipe = Pipeline::new(cfg, 1024, None).unwrap();
        assert_eq!(pipe.levels(), Some((0, 3)));
        for estimator in [Estimator::HardOracle, Estimator::BaselineHistogram] {
            let cfg = EstimatorConfig { estimator, ..EstimatorConfig::default() };
            assert!(Pipeline::new(cfg, 1024, None).is_err());
        }
    }

    #[test]
    fn baseline_runs_with_truth() {
        let p = ArmaNoiseParams::benchmark();
        let cfg = EstimatorConfig {
            estimator: Estimator::BaselineHistogram,
            ..EstimatorConfig::default()
        };
        let pipe = Pipeline::new(cfg, 512, Some(&p)).unwrap();
        let est = pipe.run(&simulate(&p, 512, 2).unwrap()).unwrap();
        let sweep = est.histogram.unwrap();
        assert_eq!(sweep.rows.len(), 100);
        assert!(sweep.best_m.is_some());
        assert!(pipe.run(&simulate(&p, 100, 2).unwrap()).is_err());
    }
}
