//! Gaussian ARMA-plus-white-noise sequences and their exact second-order
//! structure.
//!
//! The observed sequence is `X_t = Y_t + c0 Z_t`, where
//! `Y_t + a_1 Y_{t-1} + ... + a_p Y_{t-p} = b_0 e_t + ... + b_q e_{t-q}`
//! is driven by Gaussian innovations `e_t` of variance `sigma^2` and `Z_t` is
//! independent standard Gaussian noise. Frequencies live on `[0, 1]` with the
//! kernel `exp(i 2 pi omega h)`.

use core::f64::consts::PI;

use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::fft;
use crate::grid::GridFunction;

/// Samples generated and discarded before the returned path starts.
pub const BURN_IN: usize = 1000;

/// Resolution exponent of the quadrature grid behind [`true_covariance`].
pub const COVARIANCE_QUADRATURE_EXPONENT: u32 = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ArmaNoiseParams {
    ar: Vec<f64>,
    ma: Vec<f64>,
    noise_scale: f64,
    innovation_variance: f64,
}

impl ArmaNoiseParams {
    /// `ar = (a_1..a_p)`, `ma = (b_0..b_q)`.
    ///
    /// The AR polynomial `1 + a_1 z + ... + a_p z^p` must have every root
    /// strictly outside the unit circle so that the recursion is causal.
    pub fn new(ar: Vec<f64>, ma: Vec<f64>, noise_scale: f64, innovation_variance: f64) -> Result<Self> {
        if ar.iter().chain(&ma).any(|c| !c.is_finite()) {
            return Err(invalid("ARMA coefficients must be finite"));
        }
        if !(noise_scale >= 0.0 && noise_scale.is_finite()) {
            return Err(invalid("noise scale must be finite and nonnegative"));
        }
        if !(innovation_variance > 0.0 && innovation_variance.is_finite()) {
            return Err(invalid("innovation variance must be positive"));
        }
        if !is_causal(&ar) {
            return Err(Error::NonStationary);
        }
        Ok(Self {
            ar,
            ma,
            noise_scale,
            innovation_variance,
        })
    }

    /// The two-peak ARMA(2,2) plus white noise benchmark:
    /// `a = (0.2, 0.9)`, `b = (1, 0, 1)`, `c0 = 0.5`, unit innovations.
    pub fn benchmark() -> Self {
        Self::new(vec![0.2, 0.9], vec![1.0, 0.0, 1.0], 0.5, 1.0).expect("benchmark model is causal")
    }

    /// Gaussian white noise with the given variance.
    pub fn white_noise(variance: f64) -> Result<Self> {
        Self::new(Vec::new(), vec![1.0], 0.0, variance)
    }

    pub fn ar(&self) -> &[f64] {
        &self.ar
    }

    pub fn ma(&self) -> &[f64] {
        &self.ma
    }

    pub fn noise_scale(&self) -> f64 {
        self.noise_scale
    }

    pub fn innovation_variance(&self) -> f64 {
        self.innovation_variance
    }

    /// Spectral density at a single frequency.
    pub fn spectral_density_at(&self, omega: f64) -> f64 {
        let z = Complex64::from_polar(1.0, 2.0 * PI * omega);
        let a = poly_eval(1.0, &self.ar, z);
        let b = poly_eval_full(&self.ma, z);
        (self.innovation_variance * b.norm_sqr() / a.norm_sqr() + self.noise_scale * self.noise_scale) / (2.0 * PI)
    }
}

/// Step-down (Schur-Cohn) test: `1 + c_1 z + ... + c_p z^p` has all roots
/// strictly outside the unit circle iff every reflection coefficient has
/// modulus below one.
fn is_causal(ar: &[f64]) -> bool {
    let mut c: Vec<f64> = ar.to_vec();
    while let Some(&k) = c.last() {
        if !(k.abs() < 1.0) {
            return false;
        }
        let m = c.len();
        let denom = 1.0 - k * k;
        let next: Vec<f64> = (0..m - 1).map(|i| (c[i] - k * c[m - 2 - i]) / denom).collect();
        c = next;
    }
    true
}

fn poly_eval(lead: f64, coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = (acc + c) * z;
    }
    acc + lead
}

fn poly_eval_full(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// A finite sample path.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
    seed: Option<u64>,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        Self::with_seed(samples, None)
    }

    fn with_seed(samples: Vec<f64>, seed: Option<u64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid("a time series needs at least two samples"));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(invalid("time series contains non-finite samples"));
        }
        Ok(Self { samples, seed })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Mean-corrected autocovariance with divisor `n`.
    pub fn autocovariance(&self, lag: usize) -> f64 {
        let n = self.samples.len();
        if lag >= n {
            return 0.0;
        }
        let m = self.mean();
        (0..n - lag)
            .map(|t| (self.samples[t] - m) * (self.samples[t + lag] - m))
            .sum::<f64>()
            / n as f64
    }
}

/// Simulates `n` observations after discarding [`BURN_IN`] samples.
///
/// Innovations for the whole run are drawn first, followed by the additive
/// noise, all from a ChaCha8 stream keyed by `seed`.
pub fn simulate(params: &ArmaNoiseParams, n: usize, seed: u64) -> Result<TimeSeries> {
    if n < 2 {
        return Err(invalid("simulation length must be at least 2"));
    }
    let total = BURN_IN + n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = libm::sqrt(params.innovation_variance);
    let eps: Vec<f64> = (0..total)
        .map(|_| sd * Distribution::<f64>::sample(&StandardNormal, &mut rng))
        .collect();

    let mut y = vec![0.0; total];
    for t in 0..total {
        let mut v = 0.0;
        for (m, &b) in params.ma.iter().enumerate() {
            if t >= m {
                v += b * eps[t - m];
            }
        }
        for (i, &a) in params.ar.iter().enumerate() {
            if t > i {
                v -= a * y[t - 1 - i];
            }
        }
        y[t] = v;
    }

    let mut out = y.split_off(BURN_IN);
    if params.noise_scale > 0.0 {
        for x in out.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *x += params.noise_scale * z;
        }
    }
    TimeSeries::with_seed(out, Some(seed))
}

/// `f(omega) = (sigma^2 |b(e^{i2 pi omega})|^2 / |a(e^{i2 pi omega})|^2 + c0^2) / (2 pi)`
/// sampled on the grid of exponent `exponent`.
pub fn true_spectral_density(params: &ArmaNoiseParams, exponent: u32) -> GridFunction {
    GridFunction::from_fn(exponent, |w| params.spectral_density_at(w))
}

/// Process autocovariances `rho(h) = Cov(X_t, X_{t+h})` for `h = 0..=max_lag`.
///
/// Computed as `2 pi` times the Fourier coefficients of the spectral density,
/// by rectangle-rule quadrature on `2^16` points, so that
/// `f(omega) = (1/2 pi) sum_h rho(h) exp(i 2 pi omega h)`.
pub fn true_covariance(params: &ArmaNoiseParams, max_lag: usize) -> Vec<f64> {
    let f = true_spectral_density(params, COVARIANCE_QUADRATURE_EXPONENT);
    let (coeffs, imag) = fft::cosine_coefficients(f.values(), max_lag);
    debug_assert!(imag < 1e-10);
    coeffs.into_iter().map(|c| 2.0 * PI * c).collect()
}
