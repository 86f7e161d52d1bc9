//! Resolution levels, level-dependent hard thresholds and the piecewise
//! polynomial sup-norm pre-estimator. All logarithms are natural.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::grid::GridFunction;
use crate::wavelet::WaveletCoefficients;

/// How the resolution levels are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleRule {
    /// `j0 = 0` and the largest `j1` with `2^{j1} <= n^{1/(2s+1)}`.
    Linear { smoothness: f64 },
    /// Smallest `j0` with `2^{j0} >= ln n`, smallest `j1` with `2^{j1} >= n / ln n`.
    Adaptive,
}

/// Returns `(j0, j1)` for a sample of size `n`.
pub fn scale_levels(n: usize, rule: ScaleRule) -> Result<(u32, u32)> {
    if n < 8 {
        return Err(invalid("scale rules need n >= 8"));
    }
    let ln_n = libm::log(n as f64);
    match rule {
        ScaleRule::Linear { smoothness } => {
            if !(smoothness > 0.5) {
                return Err(invalid("linear scale rule requires smoothness s > 1/2"));
            }
            // largest j1 with 2^{j1 (2s+1)} <= n, compared in log space
            let per_level = (2.0 * smoothness + 1.0) * core::f64::consts::LN_2;
            let mut j1 = 0u32;
            while ((j1 + 1) as f64) * per_level <= ln_n * (1.0 + 1e-12) {
                j1 += 1;
            }
            Ok((0, j1))
        }
        ScaleRule::Adaptive => {
            let j0 = smallest_level_at_least(ln_n);
            let j1 = smallest_level_at_least(n as f64 / ln_n);
            if j0 > j1 {
                return Err(invalid("sample too small: adaptive j0 exceeds j1"));
            }
            Ok((j0, j1))
        }
    }
}

fn smallest_level_at_least(x: f64) -> u32 {
    let mut j = 0u32;
    while libm::ldexp(1.0, j as i32) < x {
        j += 1;
    }
    j
}

/// `x * 1{|x| >= xi}`.
#[inline]
pub fn hard_threshold(x: f64, xi: f64) -> f64 {
    if x.abs() >= xi {
        x
    } else {
        0.0
    }
}

/// Level-dependent threshold with known `||f||_inf` and bias constant:
/// `2 [2 ||f||_inf (sqrt(delta ln n / n) + 2^{j/2} ||psi||_inf delta ln n / n) + C* / sqrt(n)]`.
pub fn oracle_threshold(j: u32, n: usize, f_sup: f64, c_star: f64, delta: f64, psi_sup: f64) -> Result<f64> {
    if n < 2 {
        return Err(invalid("threshold needs n >= 2"));
    }
    if delta < 6.0 {
        log::warn!("delta = {delta} is below the validity range delta >= 6");
    }
    let n_f = n as f64;
    let r = delta * libm::log(n_f) / n_f;
    let level = libm::pow(2.0, j as f64 / 2.0);
    Ok(2.0 * (2.0 * f_sup * (libm::sqrt(r) + level * psi_sup * r) + c_star / libm::sqrt(n_f)))
}

/// Fully data-driven threshold:
/// `2 [2 ||f_n||_inf (sqrt(delta/(1-b)^2 ln n/n) + 2^{j/2} ||psi||_inf delta/(1-b)^2 ln n/n) + sqrt(ln n / n)]`.
pub fn data_threshold(j: u32, n: usize, f_sup_estimate: f64, delta: f64, b: f64, psi_sup: f64) -> Result<f64> {
    if !(0.75..1.0).contains(&b) {
        return Err(invalid("b must lie in [3/4, 1)"));
    }
    if n < 2 {
        return Err(invalid("threshold needs n >= 2"));
    }
    if delta != 6.0 {
        log::warn!("data-driven threshold calibrated for delta = 6, got {delta}");
    }
    let n_f = n as f64;
    let log_ratio = libm::log(n_f) / n_f;
    let r = delta / ((1.0 - b) * (1.0 - b)) * log_ratio;
    let level = libm::pow(2.0, j as f64 / 2.0);
    Ok(2.0 * (2.0 * f_sup_estimate * (libm::sqrt(r) + level * psi_sup * r) + libm::sqrt(log_ratio)))
}

/// Sup norm of the least-squares projection of a periodogram onto piecewise
/// polynomials of degree `r` on a regular dyadic partition.
#[derive(Debug, Clone, PartialEq)]
pub struct SupNormEstimate {
    pub value: f64,
    pub degree: usize,
    /// Partition exponent `J_n`: `2^{J_n}` intervals.
    pub partition_exponent: u32,
    /// `N_n = (r + 1) 2^{J_n}`.
    pub dimension: usize,
    pub kappa: f64,
}

/// `J_n` is the largest exponent with `(r+1) 2^{J_n} <= kappa/(r+1)^2 * n/ln n`;
/// the projection uses a discrete orthonormal polynomial basis per interval.
pub fn sup_norm_estimate(periodogram: &GridFunction, n: usize, degree: usize, kappa: f64) -> Result<SupNormEstimate> {
    if !(kappa > 0.0) {
        return Err(invalid("kappa must be positive"));
    }
    if n < 2 {
        return Err(invalid("sup-norm estimate needs n >= 2"));
    }
    let r1 = (degree + 1) as f64;
    let budget = kappa / (r1 * r1) * n as f64 / libm::log(n as f64);
    if budget < r1 {
        return Err(invalid(
            "no admissible partition: (r+1) exceeds kappa/(r+1)^2 * n/ln n",
        ));
    }
    let mut partition_exponent = 0u32;
    while r1 * libm::ldexp(1.0, partition_exponent as i32 + 1) <= budget {
        partition_exponent += 1;
    }
    if partition_exponent > periodogram.exponent() {
        partition_exponent = periodogram.exponent();
    }
    let per_interval = periodogram.len() >> partition_exponent;
    if per_interval < degree + 1 {
        return Err(invalid("grid too coarse for the requested polynomial degree"));
    }
    let basis = discrete_orthonormal_polynomials(per_interval, degree);
    let mut value = 0.0f64;
    for chunk in periodogram.values().chunks(per_interval) {
        let coeffs: Vec<f64> = basis
            .iter()
            .map(|p| p.iter().zip(chunk).map(|(a, b)| a * b).sum())
            .collect();
        for i in 0..per_interval {
            let fitted: f64 = basis.iter().zip(&coeffs).map(|(p, c)| p[i] * c).sum();
            value = value.max(fitted.abs());
        }
    }
    Ok(SupNormEstimate {
        value,
        degree,
        partition_exponent,
        dimension: (degree + 1) << partition_exponent,
        kappa,
    })
}

/// Gram-Schmidt on monomials of the centred local coordinate, orthonormal for
/// the counting measure on `points` equispaced nodes.
fn discrete_orthonormal_polynomials(points: usize, degree: usize) -> Vec<Vec<f64>> {
    let t: Vec<f64> = (0..points)
        .map(|i| if points > 1 { 2.0 * i as f64 / (points - 1) as f64 - 1.0 } else { 0.0 })
        .collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(degree + 1);
    for d in 0..=degree {
        let mut v: Vec<f64> = t.iter().map(|&x| libm::pow(x, d as f64)).collect();
        // two passes keep the basis orthogonal to rounding level
        for _ in 0..2 {
            for p in &basis {
                let proj: f64 = p.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(p).for_each(|(x, a)| *x -= proj * a);
            }
        }
        let norm = libm::sqrt(v.iter().map(|x| x * x).sum::<f64>());
        v.iter_mut().for_each(|x| *x /= norm);
        basis.push(v);
    }
    basis
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMode {
    Oracle,
    DataDriven,
    /// Hand-specified thresholds.
    Fixed,
}

impl ThresholdMode {
    pub fn name(self) -> &'static str {
        match self {
            ThresholdMode::Oracle => "oracle",
            ThresholdMode::DataDriven => "data_driven",
            ThresholdMode::Fixed => "fixed",
        }
    }
}

/// Per-level thresholds for the detail levels `j0..j1` and the constants
/// that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdPlan {
    pub mode: ThresholdMode,
    pub per_level: BTreeMap<u32, f64>,
    pub delta: f64,
    /// Only for the data-driven rule.
    pub b: Option<f64>,
    /// Only for the oracle rule.
    pub c_star: Option<f64>,
    /// `||f||_inf` (oracle) or its estimate (data-driven).
    pub f_sup: f64,
}

impl ThresholdPlan {
    #[allow(clippy::too_many_arguments)]
    pub fn oracle(j0: u32, j1: u32, n: usize, f_sup: f64, c_star: f64, delta: f64, psi_sup: f64) -> Result<Self> {
        let per_level = (j0..j1)
            .map(|j| Ok((j, oracle_threshold(j, n, f_sup, c_star, delta, psi_sup)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            mode: ThresholdMode::Oracle,
            per_level,
            delta,
            b: None,
            c_star: Some(c_star),
            f_sup,
        })
    }

    pub fn data_driven(j0: u32, j1: u32, n: usize, est: &SupNormEstimate, delta: f64, b: f64, psi_sup: f64) -> Result<Self> {
        let per_level = (j0..j1)
            .map(|j| Ok((j, data_threshold(j, n, est.value, delta, b, psi_sup)?)))
            .collect::<Result<_>>()?;
        Ok(Self {
            mode: ThresholdMode::DataDriven,
            per_level,
            delta,
            b: Some(b),
            c_star: None,
            f_sup: est.value,
        })
    }

    /// The same threshold on every level of `j0..j1`.
    pub fn uniform(j0: u32, j1: u32, xi: f64) -> Self {
        Self {
            mode: ThresholdMode::Fixed,
            per_level: (j0..j1).map(|j| (j, xi)).collect(),
            delta: 0.0,
            b: None,
            c_star: None,
            f_sup: 0.0,
        }
    }
}

/// Hard-thresholds the details level by level. Scaling coefficients pass
/// unchanged; levels at or above `j1` are already absent from `Lambda_{j1}`.
pub fn apply_threshold(coeffs: &WaveletCoefficients, plan: &ThresholdPlan) -> Result<WaveletCoefficients> {
    let mut out = coeffs.clone();
    for j in coeffs.j0()..coeffs.j1() {
        let xi = *plan
            .per_level
            .get(&j)
            .ok_or_else(|| invalid(alloc::format!("threshold plan has no entry for level {j}")))?;
        if !(xi >= 0.0) {
            return Err(invalid("thresholds must be nonnegative"));
        }
        out.detail_mut(j).iter_mut().for_each(|b| *b = hard_threshold(*b, xi));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const PSI: f64 = 1.3496718107059789;

    #[test]
    fn adaptive_levels() {
        assert_eq!(scale_levels(1024, ScaleRule::Adaptive).unwrap(), (3, 8));
        assert_eq!(scale_levels(8, ScaleRule::Adaptive).unwrap(), (2, 2));
        assert!(scale_levels(7, ScaleRule::Adaptive).is_err());
    }

    #[test]
    fn linear_levels() {
        let s1 = ScaleRule::Linear { smoothness: 1.0 };
        assert_eq!(scale_levels(1024, s1).unwrap(), (0, 3));
        // 512^(1/3) = 8 exactly: the boundary is accepted
        assert_eq!(scale_levels(512, s1).unwrap(), (0, 3));
        assert_eq!(scale_levels(511, s1).unwrap(), (0, 2));
        assert!(scale_levels(1024, ScaleRule::Linear { smoothness: 0.5 }).is_err());
    }

    #[test]
    fn hard_rule() {
        assert_eq!(hard_threshold(3.0, 2.0), 3.0);
        assert_eq!(hard_threshold(1.5, 2.0), 0.0);
        assert_eq!(hard_threshold(-2.0, 2.0), -2.0);
        assert_eq!(hard_threshold(0.0, 0.0), 0.0);
    }

    #[test]
    fn oracle_formula() {
        for j in 0..6 {
            assert_eq!(oracle_threshold(j, 1024, 0.0, 0.0, 6.0, PSI).unwrap(), 0.0);
        }
        let v = oracle_threshold(3, 1024, 1.0, 1.0, 6.0, PSI).unwrap();
        // 6 ln(1024)/1024 = 0.040610...; sqrt = 0.201520...; 2^{1.5} = 2.828427...
        let r = 6.0 * 6.931471805599453 / 1024.0;
        let expect = 2.0 * (2.0 * (libm::sqrt(r) + 2.8284271247461903 * PSI * r) + 1.0 / 32.0);
        assert!((v - expect).abs() < 1e-12);
        assert!(oracle_threshold(4, 1024, 1.0, 1.0, 6.0, PSI).unwrap() > v);
        assert!(oracle_threshold(3, 1, 1.0, 1.0, 6.0, PSI).is_err());
    }

    #[test]
    fn data_formula() {
        let n = 1024;
        let zero = data_threshold(2, n, 0.0, 6.0, 0.841, PSI).unwrap();
        assert!((zero - 2.0 * libm::sqrt(6.931471805599453 / 1024.0)).abs() < 1e-15);
        let lo = data_threshold(3, n, 1.0, 6.0, 0.75, PSI).unwrap();
        let hi = data_threshold(3, n, 1.0, 6.0, 0.9, PSI).unwrap();
        assert!(hi > lo);
        assert!(data_threshold(3, n, 1.0, 6.0, 0.7, PSI).is_err());
        assert!(data_threshold(3, n, 1.0, 6.0, 1.0, PSI).is_err());
    }

    #[test]
    fn thresholds_increase_in_level_and_decrease_in_n() {
        for n in [8usize, 64, 1024, 1 << 15] {
            for j in 0..10 {
                let a = oracle_threshold(j, n, 0.7, 2.0, 6.0, PSI).unwrap();
                let b = oracle_threshold(j + 1, n, 0.7, 2.0, 6.0, PSI).unwrap();
                assert!(b > a);
                assert!(oracle_threshold(j, 2 * n, 0.7, 2.0, 6.0, PSI).unwrap() < a);
                let c = data_threshold(j, n, 0.7, 6.0, 0.841, PSI).unwrap();
                assert!(data_threshold(j + 1, n, 0.7, 6.0, 0.841, PSI).unwrap() > c);
                assert!(data_threshold(j, 2 * n, 0.7, 6.0, 0.841, PSI).unwrap() < c);
            }
        }
    }

    #[test]
    fn sup_norm_of_constants_and_histograms() {
        let c = GridFunction::constant(10, 0.37);
        for r in 0..3 {
            let est = sup_norm_estimate(&c, 1 << 14, r, 1.0).unwrap();
            assert!((est.value - 0.37).abs() < 1e-12);
        }
        // r = 0: maximum of interval means
        let g = GridFunction::from_fn(10, |w| libm::sin(7.0 * w) + 2.0 * w);
        let est = sup_norm_estimate(&g, 1024, 0, 1.0 / 36.0).unwrap();
        assert_eq!(est.partition_exponent, 2);
        assert_eq!(est.dimension, 4);
        let means: Vec<f64> = g.values().chunks(256).map(|c| c.iter().sum::<f64>() / 256.0).collect();
        let brute = means.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((est.value - brute).abs() < 1e-12);
    }

    #[test]
    fn infeasible_partition() {
        let g = GridFunction::constant(12, 1.0);
        assert!(sup_norm_estimate(&g, 1024, 1, 1.0 / 36.0).is_err());
        assert!(sup_norm_estimate(&g, 1024, 0, 0.0).is_err());
    }

    #[test]
    fn piecewise_polynomials_are_reproduced() {
        // degree-2 pieces on 8 intervals, n chosen so that J_n = 3
        let pieces = [(1.0, -2.0, 3.0), (0.5, 1.0, -1.0), (2.0, 0.0, 0.0), (-1.0, 4.0, 2.0)];
        let g = GridFunction::from_fn(10, |w| {
            let idx = ((w * 8.0) as usize).min(7);
            let (a, b, c) = pieces[idx % 4];
            let t = w * 8.0 - idx as f64;
            a + b * t + c * t * t
        });
        let n = 2000usize;
        let est = sup_norm_estimate(&g, n, 2, 1.0).unwrap();
        assert_eq!(est.partition_exponent, 3);
        assert!((est.value - g.sup_norm()).abs() < 1e-9);
    }

    #[test]
    fn plans_and_application() {
        let c = WaveletCoefficients::new(1, 3, vec![10.0, -10.0, 0.1, 5.0, 0.5, -1.0, 2.0, -3.0]).unwrap();
        assert_eq!(apply_threshold(&c, &ThresholdPlan::uniform(1, 3, 0.0)).unwrap(), c);
        let all = apply_threshold(&c, &ThresholdPlan::uniform(1, 3, f64::INFINITY)).unwrap();
        assert_eq!(all.as_slice(), &[10.0, -10.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let mixed = apply_threshold(&c, &ThresholdPlan::uniform(1, 3, 1.0)).unwrap();
        assert_eq!(mixed.detail(1), &[0.0, 5.0]);
        assert_eq!(mixed.detail(2), &[0.0, -1.0, 2.0, -3.0]);
        assert_eq!(apply_threshold(&mixed, &ThresholdPlan::uniform(1, 3, 1.0)).unwrap(), mixed);
        assert!(apply_threshold(&c, &ThresholdPlan::uniform(1, 2, 1.0)).is_err());

        let est = SupNormEstimate { value: 0.9, degree: 0, partition_exponent: 2, dimension: 4, kappa: 1.0 / 36.0 };
        let plan = ThresholdPlan::data_driven(3, 8, 1024, &est, 6.0, 0.841, PSI).unwrap();
        assert_eq!(plan.per_level.len(), 5);
        let values: Vec<f64> = plan.per_level.values().copied().collect();
        assert!(values.windows(2).all(|w| w[1] > w[0]));
    }
}
