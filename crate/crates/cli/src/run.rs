use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use wavspec_core::covariance::{min_toeplitz_eigenvalue, spectral_to_covariance, CovarianceSource};
use wavspec_core::estimate::{Estimate, Estimator, Pipeline};
use wavspec_core::metrics::{approx_diagnostics, besov_norm, kl_divergence, BesovSpec, Exponent};
use wavspec_core::process::{simulate, TimeSeries};
use wavspec_core::GridFunction;

use crate::config::RunConfig;
use crate::io;
use crate::report::*;

/// Toeplitz dimension of the positive-definiteness check.
pub const PSD_DIMENSION: usize = 128;
pub const PSD_TOLERANCE: f64 = -1e-8;

/// Besov parameters used for the reported norm of `theta_hat`.
pub fn report_besov_spec() -> BesovSpec {
    BesovSpec::new(1.0, Exponent::Finite(2.0), Exponent::Finite(2.0), f64::INFINITY).expect("valid spec")
}

pub fn load_series(cfg: &RunConfig) -> Result<TimeSeries> {
    match &cfg.input {
        Some(path) => io::read_series(path),
        None => Ok(simulate(&cfg.model.params()?, cfg.n, cfg.seed)?),
    }
}

/// Builds the pipeline for `cfg`; the truth is known only for simulated data.
pub fn build_pipeline(cfg: &RunConfig, n: usize) -> Result<Pipeline> {
    let est_cfg = cfg.estimator_config()?;
    let truth = match cfg.input {
        Some(_) => None,
        None => Some(cfg.model.params()?),
    };
    Ok(Pipeline::new(est_cfg, n, truth.as_ref())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OutputOptions {
    pub gnuplot: bool,
}

/// `(min eigenvalue, checked dimension, max lag)` of the covariance of `g`.
pub fn psd_check(g: &GridFunction, m: usize) -> Result<(f64, usize, usize)> {
    let max_lag = (g.len() / 2 - 1).min(m.max(1) - 1);
    let cov = spectral_to_covariance(g, max_lag, CovarianceSource::NonlinearEstimate)?;
    let m = m.min(max_lag + 1);
    Ok((min_toeplitz_eigenvalue(&cov, m)?, m, max_lag))
}

pub fn run_estimate(cfg: &RunConfig, opts: OutputOptions) -> Result<RunReport> {
    let start = Instant::now();
    let series = load_series(cfg)?;
    let pipe = build_pipeline(cfg, series.len())?;
    let t = Instant::now();
    let est = pipe.run(&series)?;
    let estimate_ms = t.elapsed().as_secs_f64() * 1e3;

    std::fs::create_dir_all(&cfg.out).with_context(|| format!("cannot create {}", cfg.out.display()))?;
    let out = cfg.out.as_path();
    let mut artifacts = vec!["periodogram.csv", "unconstrained.csv", "estimate.csv", "covariance.csv"];
    io::write_grid(&out.join("periodogram.csv"), &est.periodogram)?;
    let unconstrained = est.unconstrained.as_ref().unwrap_or(&est.estimate);
    io::write_grid(&out.join("unconstrained.csv"), unconstrained)?;
    io::write_grid(&out.join("estimate.csv"), &est.estimate)?;
    if let Some(c) = &est.coefficients {
        io::write_coefficients(&out.join("coefficients.csv"), c)?;
        artifacts.push("coefficients.csv");
    }
    if let Some(t) = pipe.truth() {
        io::write_grid(&out.join("truth.csv"), t)?;
        artifacts.push("truth.csv");
    }

    let (min_eig, m, max_lag) = psd_check(&est.estimate, PSD_DIMENSION)?;
    let cov = spectral_to_covariance(&est.estimate, max_lag, CovarianceSource::NonlinearEstimate)?;
    io::write_covariance(&out.join("covariance.csv"), &cov)?;
    let unconstrained_min_eigenvalue = match &est.unconstrained {
        Some(u) => Some(psd_check(u, PSD_DIMENSION)?.0),
        None => None,
    };

    if opts.gnuplot {
        write_gnuplot(out, pipe.truth().is_some())?;
        artifacts.push("plot.gp");
    }
    artifacts.push("report.json");

    let report = RunReport {
        config: cfg.clone(),
        estimator: pipe.config().estimator.name().to_string(),
        n: series.len(),
        grid_exponent: pipe.grid_exponent(),
        levels: pipe.levels().map(|(j0, j1)| LevelsJson { j0, j1 }),
        threshold_plan: est.plan.as_ref().map(ThresholdPlanJson::from),
        sup_norm_estimate: est.sup_norm.as_ref().map(SupNormJson::from),
        histogram_m: est.histogram.as_ref().and_then(|h| h.best_m),
        projection: est.projection.as_ref().map(ProjectionJson::from),
        estimate: EstimateSummary {
            min: est.estimate.min(),
            max: est.estimate.max(),
            unconstrained_min: est.unconstrained.as_ref().map(|u| u.min()),
        },
        metrics: metrics(&pipe, &est)?,
        covariance: CovarianceJson {
            max_lag,
            m,
            min_eigenvalue: min_eig,
            psd: min_eig >= PSD_TOLERANCE,
            unconstrained_min_eigenvalue,
        },
        unchecked_assumptions: match pipe.config().estimator {
            Estimator::HardAdaptive => vec!["sup_norm_pre_estimator_close: ||f - f_n||_inf <= ||f||_inf / 4".into()],
            _ => Vec::new(),
        },
        artifacts: artifacts.into_iter().map(String::from).collect(),
        timings: Timings {
            estimate_ms,
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        },
    };
    io::write_json(&out.join("report.json"), &report)?;
    Ok(report)
}

fn metrics(pipe: &Pipeline, est: &Estimate) -> Result<MetricsJson> {
    let besov = est.projection.as_ref().map(|p| {
        let spec = report_besov_spec();
        BesovJson {
            s: spec.s(),
            p: 2.0,
            q: 2.0,
            value: besov_norm(p.theta_hat.theta(), &spec),
        }
    });
    let Some(truth) = pipe.truth() else {
        return Ok(MetricsJson {
            kl: None,
            l2: None,
            besov,
            d_j: None,
            gamma_j: None,
        });
    };
    let diag = match pipe.levels() {
        Some((_, j1)) => Some(approx_diagnostics(truth, j1, pipe.basis())?),
        None => None,
    };
    Ok(MetricsJson {
        kl: Some(kl_divergence(truth, &est.estimate)?),
        l2: Some(est.estimate.l2_distance(truth)?),
        besov,
        d_j: diag.map(|d| d.d_j),
        gamma_j: diag.map(|d| d.gamma_j),
    })
}

fn write_gnuplot(out: &Path, with_truth: bool) -> Result<()> {
    let mut script = String::from(
        "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'omega'\n\
         set terminal pngcairo size 1000,600\nset output 'estimate.png'\nplot ",
    );
    let mut curves = vec![
        "'unconstrained.csv' using 1:2 with lines title 'unconstrained'".to_string(),
        "'estimate.csv' using 1:2 with lines lw 2 title 'positive estimate'".to_string(),
    ];
    if with_truth {
        curves.insert(0, "'truth.csv' using 1:2 with lines lw 2 title 'true density'".to_string());
    }
    script.push_str(&curves.join(", \\\n     "));
    script.push('\n');
    std::fs::write(out.join("plot.gp"), script)?;
    Ok(())
}
