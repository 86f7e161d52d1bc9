//! Monte Carlo studies. Replications run in parallel; each draws its seed
//! from the root seed by stream splitting, so results do not depend on
//! scheduling.

use anyhow::{ensure, Result};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use wavspec_core::estimate::{Estimator, EstimatorConfig, OracleConstants, Pipeline};
use wavspec_core::metrics::kl_divergence;
use wavspec_core::periodogram::{default_grid_exponent, periodogram};
use wavspec_core::process::{simulate, true_spectral_density, ArmaNoiseParams};
use wavspec_core::threshold::{scale_levels, ScaleRule};
use wavspec_core::wavelet::{Filter, WaveletBasis};
use wavspec_core::GridFunction;

/// Seed of replication `stream` under `root`.
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(root);
    rng.set_stream(stream);
    rng.next_u64()
}

/// Sample median and interquartile range (linear interpolation).
pub fn median_iqr(values: &[f64]) -> (f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    (quantile(&v, 0.5), quantile(&v, 0.75) - quantile(&v, 0.25))
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Least-squares slope of `y` on `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

// ---------------------------------------------------------------------------
// Deviation inequality

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationRow {
    pub x: f64,
    pub radius: f64,
    pub exceedances: usize,
    pub empirical: f64,
    pub bound: f64,
    /// Binomial standard error of `empirical` under the bound.
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationStudy {
    pub n: usize,
    pub reps: usize,
    pub level: u32,
    pub k: usize,
    pub true_coefficient: f64,
    pub f_sup: f64,
    pub c_star: f64,
    pub psi_sup: f64,
    pub rows: Vec<DeviationRow>,
}

/// Exceedance frequencies of `|b_hat_{jk} - b_{jk}|` over
/// `2 ||f||_inf (sqrt(x/n) + 2^{j/2} ||psi||_inf x/n) + C*/sqrt(n)`.
///
/// `level` defaults to the adaptive `j0` and `k` to 1.
pub fn run_deviation_study(
    params: &ArmaNoiseParams,
    n: usize,
    root_seed: u64,
    x_values: &[f64],
    reps: usize,
    level: Option<u32>,
    k: usize,
) -> Result<DeviationStudy> {
    ensure!(reps > 0, "reps must be positive");
    let (j0, j1) = scale_levels(n, ScaleRule::Adaptive)?;
    let j = level.unwrap_or(j0);
    ensure!(j >= j0 && j < j1, "level {j} is outside the detail range {j0}..{j1}");
    ensure!(k < 1usize << j, "translation {k} out of range at level {j}");
    let grid = default_grid_exponent(n, j1).max(wavspec_core::estimate::MIN_GRID_EXPONENT);
    let basis = WaveletBasis::new(Filter::default(), grid)?;
    let oracle = OracleConstants::new(params, grid)?;
    let b_true = basis.analyze(&oracle.truth, j0, j1)?.detail(j)[k];

    let errors: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|r| -> Result<f64> {
            let x = simulate(params, n, derive_seed(root_seed, r))?;
            let c = basis.analyze(&periodogram(&x, grid)?, j0, j1)?;
            Ok((c.detail(j)[k] - b_true).abs())
        })
        .collect::<Result<_>>()?;

    let nf = n as f64;
    let rows = x_values
        .iter()
        .map(|&x| {
            let radius = 2.0 * oracle.f_sup * ((x / nf).sqrt() + 2f64.powf(j as f64 / 2.0) * basis.psi_sup() * x / nf)
                + oracle.c_star / nf.sqrt();
            let exceedances = errors.iter().filter(|&&e| e > radius).count();
            let bound = 2.0 * (-x).exp();
            let p = bound.min(1.0);
            DeviationRow {
                x,
                radius,
                exceedances,
                empirical: exceedances as f64 / reps as f64,
                bound,
                std_error: (p * (1.0 - p) / reps as f64).sqrt(),
            }
        })
        .collect();
    Ok(DeviationStudy {
        n,
        reps,
        level: j,
        k,
        true_coefficient: b_true,
        f_sup: oracle.f_sup,
        c_star: oracle.c_star,
        psi_sup: basis.psi_sup(),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Rate study

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub j0: u32,
    pub j1: u32,
    pub median_kl: f64,
    pub iqr: f64,
    pub non_converged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateStudy {
    pub estimator: String,
    pub reps: usize,
    pub rows: Vec<RateRow>,
    /// Slope of `ln median_kl` against `ln n`.
    pub log_log_slope: f64,
}

pub fn run_rate_study(
    params: &ArmaNoiseParams,
    config: &EstimatorConfig,
    n_values: &[usize],
    reps: usize,
    root_seed: u64,
) -> Result<RateStudy> {
    ensure!(reps > 0 && n_values.len() >= 2, "rate study needs reps > 0 and two sample sizes");
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let pipe = Pipeline::new(config.clone(), n, Some(params))?;
        let truth = pipe.truth().expect("model is known");
        let runs: Vec<(f64, bool)> = (0..reps as u64)
            .into_par_iter()
            .map(|r| -> Result<(f64, bool)> {
                let x = simulate(params, n, derive_seed(root_seed, ((n as u64) << 32) | r))?;
                let est = pipe.run(&x)?;
                Ok((kl_divergence(truth, &est.estimate)?, est.converged()))
            })
            .collect::<Result<_>>()?;
        let kls: Vec<f64> = runs.iter().map(|r| r.0).collect();
        let (median_kl, iqr) = median_iqr(&kls);
        let (j0, j1) = pipe.levels().unwrap_or((0, 0));
        rows.push(RateRow {
            n,
            j0,
            j1,
            median_kl,
            iqr,
            non_converged: runs.iter().filter(|r| !r.1).count(),
        });
    }
    let lx: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
    let ly: Vec<f64> = rows.iter().map(|r| r.median_kl.ln()).collect();
    Ok(RateStudy {
        estimator: config.estimator.name().to_string(),
        reps,
        log_log_slope: slope(&lx, &ly),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Comparison with the histogram baseline

/// Locations of the `count` highest local maxima of `g`.
pub fn dominant_peaks(g: &GridFunction, count: usize) -> Vec<f64> {
    let mut idx = g.local_maxima();
    idx.sort_by(|&a, &b| g.values()[b].total_cmp(&g.values()[a]));
    let mut peaks: Vec<f64> = idx.into_iter().take(count).map(|i| g.omega(i)).collect();
    peaks.sort_by(f64::total_cmp);
    peaks
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// Whether every location in `peaks` has a local maximum of `g` within `tol`.
pub fn captures_peaks(g: &GridFunction, peaks: &[f64], tol: f64) -> bool {
    let maxima: Vec<f64> = g.local_maxima().into_iter().map(|i| g.omega(i)).collect();
    peaks
        .iter()
        .all(|&p| maxima.iter().any(|&m| circular_distance(m, p) <= tol))
}

/// Tolerance on peak locations.
pub const PEAK_TOLERANCE: f64 = 0.02;
/// Grid exponent used to locate the true peaks.
const PEAK_GRID_EXPONENT: u32 = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub seed: u64,
    pub wavelet_l2: f64,
    pub wavelet_kl: f64,
    pub wavelet_captures_peaks: bool,
    pub wavelet_converged: bool,
    pub histogram_m: usize,
    pub histogram_l2: f64,
    pub histogram_captures_peaks: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareStudy {
    pub n: usize,
    pub estimator: String,
    /// The baseline dimension is chosen with the true density (oracle sweep);
    /// it is not a data-driven model selection.
    pub baseline: String,
    pub true_peaks: Vec<f64>,
    pub peak_tolerance: f64,
    pub rows: Vec<CompareRow>,
    pub wavelet_peak_captures: usize,
    pub histogram_peak_captures: usize,
    pub wavelet_median_l2: f64,
    pub histogram_median_l2: f64,
}

pub fn run_compare(params: &ArmaNoiseParams, config: &EstimatorConfig, n: usize, seeds: usize, root_seed: u64) -> Result<CompareStudy> {
    ensure!(seeds > 0, "compare needs at least one seed");
    let wavelet = Pipeline::new(config.clone(), n, Some(params))?;
    // share the grid so both estimates are compared on the same points
    let hist_cfg = EstimatorConfig {
        estimator: Estimator::BaselineHistogram,
        grid_exponent: Some(wavelet.grid_exponent()),
        ..config.clone()
    };
    let hist = Pipeline::new(hist_cfg, n, Some(params))?;
    let truth = wavelet.truth().expect("model is known");
    let true_peaks = dominant_peaks(&true_spectral_density(params, PEAK_GRID_EXPONENT), 2);

    let rows: Vec<CompareRow> = (0..seeds as u64)
        .into_par_iter()
        .map(|s| -> Result<CompareRow> {
            let seed = derive_seed(root_seed, s);
            let x = simulate(params, n, seed)?;
            let w = wavelet.run(&x)?;
            let h = hist.run(&x)?;
            Ok(CompareRow {
                seed,
                wavelet_l2: w.estimate.l2_distance(truth)?,
                wavelet_kl: kl_divergence(truth, &w.estimate)?,
                wavelet_captures_peaks: captures_peaks(&w.estimate, &true_peaks, PEAK_TOLERANCE),
                wavelet_converged: w.converged(),
                histogram_m: h.histogram.as_ref().and_then(|s| s.best_m).unwrap_or(0),
                histogram_l2: h.estimate.l2_distance(truth)?,
                histogram_captures_peaks: captures_peaks(&h.estimate, &true_peaks, PEAK_TOLERANCE),
            })
        })
        .collect::<Result<_>>()?;
    let wl2: Vec<f64> = rows.iter().map(|r| r.wavelet_l2).collect();
    let hl2: Vec<f64> = rows.iter().map(|r| r.histogram_l2).collect();
    Ok(CompareStudy {
        n,
        estimator: config.estimator.name().to_string(),
        baseline: "histogram, oracle-selected m in 1..=100".into(),
        true_peaks,
        peak_tolerance: PEAK_TOLERANCE,
        wavelet_peak_captures: rows.iter().filter(|r| r.wavelet_captures_peaks).count(),
        histogram_peak_captures: rows.iter().filter(|r| r.histogram_captures_peaks).count(),
        wavelet_median_l2: median_iqr(&wl2).0,
        histogram_median_l2: median_iqr(&hl2).0,
        rows,
    })
}
