//! In-place iterative radix-2 FFT for power-of-two lengths.

use core::f64::consts::PI;

use alloc::vec::Vec;

use num_complex::Complex64;

/// Computes `x[k] <- sum_t x[t] exp(sign * i 2 pi k t / N)` in place.
///
/// `sign` is `-1.0` for the forward transform and `+1.0` for the unnormalised
/// inverse. Panics if the length is not a power of two.
pub(crate) fn transform(x: &mut [Complex64], sign: f64) {
    let n = x.len();
    assert!(n.is_power_of_two(), "FFT length must be a power of two");
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            x.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let half = len / 2;
        // twiddles recomputed per butterfly span to avoid drift
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let (s, c) = libm::sincos(ang * k as f64);
                let w = Complex64::new(c, s);
                let u = x[start + k];
                let v = x[start + k + half] * w;
                x[start + k] = u + v;
                x[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
}

/// Real parts of `(1/N) sum_i v_i exp(-i 2 pi i h / N)` for `h = 0..=max_lag`,
/// together with the largest discarded imaginary part.
pub(crate) fn cosine_coefficients(values: &[f64], max_lag: usize) -> (Vec<f64>, f64) {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(&mut buf, -1.0);
    let scale = 1.0 / n as f64;
    let mut imag = 0.0f64;
    let coeffs = buf[..=max_lag]
        .iter()
        .map(|c| {
            imag = imag.max((c.im * scale).abs());
            c.re * scale
        })
        .collect();
    (coeffs, imag)
}
