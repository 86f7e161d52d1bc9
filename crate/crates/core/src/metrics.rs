use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::grid::GridFunction;
use crate::projection::{coefficient_map, eval_family, ExpFamilyParams};
use crate::wavelet::{WaveletBasis, WaveletCoefficients};

/// Coefficient mismatch tolerated by [`pythagoras_residual`].
pub const PYTHAGORAS_PRECONDITION_TOL: f64 = 1e-6;

/// `Delta(f; g) = int f log(f / g) - f + g`, rectangle rule.
///
/// Points with `f = 0` contribute `g`.
pub fn kl_divergence(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    f.check_same_grid(g)?;
    let mut acc = 0.0;
    for (&a, &b) in f.values().iter().zip(g.values()) {
        if !(b > 0.0) {
            return Err(invalid("second argument of the divergence must be positive"));
        }
        if a < 0.0 {
            return Err(invalid("first argument of the divergence must be nonnegative"));
        }
        acc += if a == 0.0 { b } else { a * libm::log(a / b) - a + b };
    }
    Ok(acc / f.len() as f64)
}

/// Integrability index in `[1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinite => 0.0,
        }
    }

    fn norm(self, values: impl Iterator<Item = f64>) -> f64 {
        match self {
            Exponent::Infinite => values.fold(0.0, |m, v| m.max(v.abs())),
            Exponent::Finite(p) => libm::pow(values.map(|v| libm::pow(v.abs(), p)).sum::<f64>(), 1.0 / p),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BesovSpec {
    s: f64,
    p: Exponent,
    q: Exponent,
    radius: f64,
}

impl BesovSpec {
    pub fn new(s: f64, p: Exponent, q: Exponent, radius: f64) -> Result<Self> {
        for e in [p, q] {
            if let Exponent::Finite(v) = e {
                if !(v >= 1.0) || !v.is_finite() {
                    return Err(invalid("Besov indices must lie in [1, inf]"));
                }
            }
        }
        if !s.is_finite() || s + 0.5 - p.reciprocal() < 0.0 {
            return Err(invalid("Besov parameters need s + 1/2 - 1/p >= 0"));
        }
        if !(radius >= 0.0) {
            return Err(invalid("Besov radius must be nonnegative"));
        }
        Ok(Self { s, p, q, radius })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn q(&self) -> Exponent {
        self.q
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `s* = s + 1/2 - 1/p`.
    pub fn s_star(&self) -> f64 {
        self.s + 0.5 - self.p.reciprocal()
    }
}

/// Besov sequence norm truncated to the levels present in `coeffs`.
pub fn besov_norm(coeffs: &WaveletCoefficients, spec: &BesovSpec) -> f64 {
    let scaling = spec.p.norm(coeffs.scaling().iter().copied());
    let s_star = spec.s_star();
    let levels = (coeffs.j0()..coeffs.j1())
        .map(|j| libm::pow(2.0, j as f64 * s_star) * spec.p.norm(coeffs.detail(j).iter().copied()));
    scaling + spec.q.norm(levels)
}

/// Whether `coeffs` lies in the Besov ball of the given radius.
pub fn in_besov_ball(coeffs: &WaveletCoefficients, spec: &BesovSpec) -> bool {
    besov_norm(coeffs, spec) <= spec.radius
}

/// Approximation diagnostics of `g` at level `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxDiagnostics {
    /// `||g - g_j||_2`.
    pub d_j: f64,
    /// `||g - g_j||_inf`.
    pub gamma_j: f64,
    /// Smallest `A` with `||v||_inf <= A ||v||_2` on `V_j`.
    pub a_j: f64,
}

pub fn approx_diagnostics(g: &GridFunction, j: u32, basis: &WaveletBasis) -> Result<ApproxDiagnostics> {
    let g_j = basis.synthesize(&basis.analyze(g, j, j)?)?;
    let err: Vec<f64> = g.values().iter().zip(g_j.values()).map(|(a, b)| a - b).collect();
    let err = GridFunction::new(err)?;
    Ok(ApproxDiagnostics {
        d_j: err.l2_norm(),
        gamma_j: err.sup_norm(),
        a_j: kernel_sup(j, basis)?,
    })
}

/// `sup_x sqrt(sum_k phi_{j,k}(x)^2)`; translates are circular shifts of `phi_{j,0}`.
fn kernel_sup(j: u32, basis: &WaveletBasis) -> Result<f64> {
    let phi = basis.scaling_function(j, 0)?;
    let n = phi.len();
    let shift = n >> j;
    let mut diag = vec![0.0; n];
    for k in 0..1usize << j {
        for (x, d) in diag.iter_mut().enumerate() {
            let v = phi.values()[(x + n - k * shift) % n];
            *d += v * v;
        }
    }
    Ok(libm::sqrt(diag.iter().fold(0.0f64, |m, &v| m.max(v))))
}

/// `|Delta(f; f_theta) - Delta(f; f_theta*) - Delta(f_theta*; f_theta)|`.
///
/// Fails with [`Error::CoefficientMismatch`] unless the coefficients of
/// `f_theta*` match those of `f` on `Lambda_{j1}`.
pub fn pythagoras_residual(
    f: &GridFunction,
    theta_star: &ExpFamilyParams,
    theta: &ExpFamilyParams,
    basis: &WaveletBasis,
) -> Result<f64> {
    let target = basis.analyze(f, theta_star.j0(), theta_star.j1())?;
    let mismatch = coefficient_map(theta_star, basis)?.distance(&target);
    if !(mismatch <= PYTHAGORAS_PRECONDITION_TOL) {
        return Err(Error::CoefficientMismatch(mismatch));
    }
    let f_star = eval_family(theta_star, basis)?;
    let f_theta = eval_family(theta, basis)?;
    let total = kl_divergence(f, &f_theta)?;
    let first = kl_divergence(f, &f_star)?;
    let second = kl_divergence(&f_star, &f_theta)?;
    Ok((total - first - second).abs())
}
