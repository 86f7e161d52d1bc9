use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// A real function sampled at `omega_i = i / 2^J`, `i = 0..2^J`, on `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
    exponent: u32,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        if n == 0 || !n.is_power_of_two() {
            return Err(invalid("grid length must be a power of two"));
        }
        Ok(Self {
            exponent: n.trailing_zeros(),
            values,
        })
    }

    pub fn constant(exponent: u32, value: f64) -> Self {
        Self {
            values: alloc::vec![value; 1usize << exponent],
            exponent,
        }
    }

    pub fn from_fn(exponent: u32, mut f: impl FnMut(f64) -> f64) -> Self {
        let n = 1usize << exponent;
        let step = 1.0 / n as f64;
        Self {
            values: (0..n).map(|i| f(i as f64 * step)).collect(),
            exponent,
        }
    }

    /// Grid exponent `J`.
    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn omega(&self, i: usize) -> f64 {
        i as f64 / self.values.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            exponent: self.exponent,
        }
    }

    /// Rectangle-rule integral over `[0, 1)`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Rectangle-rule inner product.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / self.values.len() as f64
    }

    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.inner(self))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `sup |g(omega) - g(1 - omega)|` over the grid.
    pub fn asymmetry(&self) -> f64 {
        let n = self.values.len();
        (1..n).fold(0.0, |m, i| m.max((self.values[i] - self.values[n - i]).abs()))
    }

    /// L2 distance (rectangle rule) to another function on the same grid.
    pub fn l2_distance(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        let s: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok(libm::sqrt(s / self.values.len() as f64))
    }

    pub(crate) fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.exponent != other.exponent {
            return Err(invalid("grid functions live on different grids"));
        }
        Ok(())
    }

    /// Indices of circular local maxima (strictly greater than the left
    /// neighbour and not smaller than the right one).
    pub fn local_maxima(&self) -> Vec<usize> {
        let v = &self.values;
        let n = v.len();
        if n < 3 {
            return Vec::new();
        }
        (0..n)
            .filter(|&i| {
                let prev = v[(i + n - 1) % n];
                let next = v[(i + 1) % n];
                v[i] > prev && v[i] >= next
            })
            .collect()
    }
}
