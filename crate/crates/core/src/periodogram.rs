use core::f64::consts::PI;

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::fft;
use crate::grid::GridFunction;
use crate::process::TimeSeries;

/// Mean-corrected periodogram
/// `I_n(omega) = |sum_t (X_t - mean) exp(i 2 pi omega t)|^2 / (2 pi n)`
/// evaluated exactly at `omega = i / 2^J`.
///
/// When `2^J < n` the samples are folded modulo the grid size before the
/// transform, which keeps the values exact.
pub fn periodogram(series: &TimeSeries, exponent: u32) -> Result<GridFunction> {
    let x = series.samples();
    let n = x.len();
    if n < 2 {
        return Err(invalid("periodogram needs at least two samples"));
    }
    let size = 1usize << exponent;
    if size < n {
        log::warn!("periodogram grid 2^{exponent} is coarser than the sample size {n}");
    }
    let mean = series.mean();
    let mut buf = vec![Complex64::new(0.0, 0.0); size];
    for (t, &v) in x.iter().enumerate() {
        buf[t % size].re += v - mean;
    }
    fft::transform(&mut buf, 1.0);
    let scale = 1.0 / (2.0 * PI * n as f64);
    let values: Vec<f64> = buf
        .iter()
        .map(|c| {
            let v = c.norm_sqr() * scale;
            debug_assert!(v >= -1e-12);
            v.max(0.0)
        })
        .collect();
    GridFunction::new(values)
}

/// Grid exponent used when none is requested: `max(ceil(log2 n), j1 + 4)`.
pub fn default_grid_exponent(n: usize, j1: u32) -> u32 {
    let ceil_log2 = usize::BITS - (n.max(1) - 1).leading_zeros();
    ceil_log2.max(j1 + 4)
}

/// Bias constant `C* = sqrt((C2 + 39 C1^2) / (4 pi^2))` where
/// `C1 = sum_h |rho(h)|` and `C2 = sum_h |h| rho(h)^2` over `h = -H..=H`.
pub fn bias_constant(rho: &[f64]) -> Result<f64> {
    let (first, rest) = rho
        .split_first()
        .ok_or_else(|| invalid("bias constant needs at least one covariance"))?;
    let c1 = first.abs() + 2.0 * rest.iter().map(|r| r.abs()).sum::<f64>();
    let c2 = 2.0
        * rest
            .iter()
            .enumerate()
            .map(|(i, r)| (i + 1) as f64 * r * r)
            .sum::<f64>();
    Ok(libm::sqrt((c2 + 39.0 * c1 * c1) / (4.0 * PI * PI)))
}
