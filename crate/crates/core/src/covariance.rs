use core::f64::consts::PI;

use alloc::vec::Vec;
use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Result};
use crate::fft;
use crate::grid::GridFunction;

/// Asymmetry `sup |f(omega) - f(1 - omega)|` above which a warning is recorded.
pub const ASYMMETRY_WARNING: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovarianceSource {
    True,
    LinearEstimate,
    NonlinearEstimate,
}

impl CovarianceSource {
    pub fn name(self) -> &'static str {
        match self {
            CovarianceSource::True => "true",
            CovarianceSource::LinearEstimate => "linear_estimate",
            CovarianceSource::NonlinearEstimate => "nonlinear_estimate",
        }
    }
}

/// Autocovariances `rho(0..=H)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSequence {
    rho: Vec<f64>,
    source: CovarianceSource,
    asymmetric: bool,
}

impl CovarianceSequence {
    pub fn new(rho: Vec<f64>, source: CovarianceSource) -> Result<Self> {
        if rho.is_empty() || rho.iter().any(|r| !r.is_finite()) {
            return Err(invalid("covariance sequence must be nonempty and finite"));
        }
        Ok(Self {
            rho,
            source,
            asymmetric: false,
        })
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn source(&self) -> CovarianceSource {
        self.source
    }

    pub fn max_lag(&self) -> usize {
        self.rho.len() - 1
    }

    /// Set when the input density was not symmetric about 1/2.
    pub fn asymmetric(&self) -> bool {
        self.asymmetric
    }

    /// `|rho(h)| <= rho(0) + 1e-9` for all lags.
    pub fn is_bounded_by_variance(&self) -> bool {
        let r0 = self.rho[0];
        self.rho.iter().all(|r| r.abs() <= r0 + 1e-9)
    }
}

/// `rho(h) = 2 pi int_0^1 f(omega) exp(-i 2 pi omega h) d omega`, `h = 0..=max_lag`.
pub fn spectral_to_covariance(f: &GridFunction, max_lag: usize, source: CovarianceSource) -> Result<CovarianceSequence> {
    if max_lag >= f.len() / 2 {
        return Err(invalid("max_lag must be below half the grid size"));
    }
    let asym = f.asymmetry();
    let asymmetric = asym > ASYMMETRY_WARNING;
    if asymmetric {
        log::warn!("spectral density is asymmetric ({asym:.2e}); taking the real part");
    }
    let (coeffs, _) = fft::cosine_coefficients(f.values(), max_lag);
    let mut seq = CovarianceSequence::new(coeffs.into_iter().map(|c| 2.0 * PI * c).collect(), source)?;
    seq.asymmetric = asymmetric;
    Ok(seq)
}

/// Smallest eigenvalue of the `m x m` Toeplitz matrix `[rho(|i - i'|)]`.
pub fn min_toeplitz_eigenvalue(rho: &CovarianceSequence, m: usize) -> Result<f64> {
    if m == 0 || m > rho.rho.len() {
        return Err(invalid("Toeplitz dimension must be in 1..=H+1"));
    }
    let mat = DMatrix::from_fn(m, m, |i, k| rho.rho[i.abs_diff(k)]);
    let eig = SymmetricEigen::new(mat);
    Ok(eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min))
}
