//! Periodized orthonormal wavelet bases on `[0, 1)`.
//!
//! A grid function `g` with `2^J` samples is identified with the element of
//! `V_J` whose scaling coefficients are `2^{-J/2} g(i / 2^J)`; the periodic
//! fast wavelet transform then yields the coarser scaling and detail
//! coefficients. Basis functions "sampled on the grid" are defined through the
//! same identification, so analysis and synthesis are exact orthogonal maps.
//!
//! Coefficients over `Lambda_{j1}` are stored in pyramid order: the `2^{j0}`
//! scaling coefficients first, then the details of level `j` at offsets
//! `2^j .. 2^{j+1}`. The total length is therefore exactly `2^{j1}`.

use core::fmt;
use core::str::FromStr;

use alloc::string::ToString;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::grid::GridFunction;

/// Resolution exponent of the cascade used for `||psi||_inf`.
pub const CASCADE_EXPONENT: u32 = 14;

/// Least asymmetric Daubechies filter with 8 vanishing moments (spectral
/// factorisation carried out in 50-digit arithmetic).
const SYMMLET8: [f64; 16] = [
    0.001889950332767689,
    -0.0003029205147241331,
    -0.014952258337062199,
    0.0038087520138944896,
    0.04913717967373029,
    -0.027219029917103486,
    -0.0519458381078818,
    0.36444189483617895,
    0.777185751699628,
    0.4813596512590534,
    -0.061273359067811076,
    -0.14329423835127267,
    0.007607487324976609,
    0.03169508781152599,
    -0.0005421323318000107,
    -0.0033824159510050028,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Filter {
    Haar,
    #[default]
    Symmlet8,
}

impl Filter {
    pub fn lowpass(self) -> Vec<f64> {
        match self {
            Filter::Haar => vec![core::f64::consts::FRAC_1_SQRT_2; 2],
            Filter::Symmlet8 => SYMMLET8.to_vec(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Filter::Haar => "haar",
            Filter::Symmlet8 => "symmlet8",
        }
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Filter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(Filter::Haar),
            "symmlet8" | "sym8" => Ok(Filter::Symmlet8),
            _ => Err(Error::UnsupportedFilter(s.to_string())),
        }
    }
}

/// Scaling and wavelet coefficients over `Lambda_{j1}` (pyramid order).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletCoefficients {
    j0: u32,
    j1: u32,
    data: Vec<f64>,
}

impl WaveletCoefficients {
    pub fn new(j0: u32, j1: u32, data: Vec<f64>) -> Result<Self> {
        if j0 > j1 {
            return Err(invalid("coarse level exceeds fine level"));
        }
        if data.len() != 1usize << j1 {
            return Err(invalid("coefficient vector must have exactly 2^j1 entries"));
        }
        Ok(Self { j0, j1, data })
    }

    pub fn zeros(j0: u32, j1: u32) -> Self {
        assert!(j0 <= j1);
        Self {
            j0,
            j1,
            data: vec![0.0; 1usize << j1],
        }
    }

    pub fn j0(&self) -> u32 {
        self.j0
    }

    pub fn j1(&self) -> u32 {
        self.j1
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn scaling(&self) -> &[f64] {
        &self.data[..1usize << self.j0]
    }

    pub fn scaling_mut(&mut self) -> &mut [f64] {
        &mut self.data[..1usize << self.j0]
    }

    /// Details of level `j`, for `j0 <= j < j1`.
    pub fn detail(&self, j: u32) -> &[f64] {
        assert!(j >= self.j0 && j < self.j1, "detail level out of range");
        &self.data[1usize << j..1usize << (j + 1)]
    }

    pub fn detail_mut(&mut self, j: u32) -> &mut [f64] {
        assert!(j >= self.j0 && j < self.j1, "detail level out of range");
        &mut self.data[1usize << j..1usize << (j + 1)]
    }

    /// Same coefficients restricted to (or zero-padded up to) level `j1`.
    pub fn with_fine_level(&self, j1: u32) -> Self {
        assert!(j1 >= self.j0);
        let mut data = self.data.clone();
        data.resize(1usize << j1, 0.0);
        Self {
            j0: self.j0,
            j1,
            data,
        }
    }

    /// `(level, k, value)` triples in `Lambda_{j1}` order; scaling entries
    /// carry the level tag `j0 - 1`.
    pub fn iter(&self) -> impl Iterator<Item = (i32, usize, f64)> + '_ {
        lambda_index(self.j0, self.j1)
            .into_iter()
            .zip(self.data.iter())
            .map(|((j, k), &v)| (j, k, v))
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|v| v * v).sum())
    }

    pub fn distance(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        libm::sqrt(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b) * (a - b))
                .sum(),
        )
    }
}

/// Enumerates `Lambda_{j1}`: scaling indices `(j0 - 1, k)` first, then the
/// detail indices by increasing `(j, k)`. The cardinality is `2^{j1}`.
pub fn lambda_index(j0: u32, j1: u32) -> Vec<(i32, usize)> {
    let mut out = Vec::with_capacity(1usize << j1.max(j0));
    out.extend((0..1usize << j0).map(|k| (j0 as i32 - 1, k)));
    for j in j0..j1 {
        out.extend((0..1usize << j).map(|k| (j as i32, k)));
    }
    out
}

/// Periodized multiresolution analysis evaluated on a `2^J` grid.
#[derive(Debug, Clone)]
pub struct WaveletBasis {
    filter: Filter,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
    grid_exponent: u32,
    psi_sup: f64,
    phi_sup: f64,
    phi_samples: Vec<f64>,
    psi_samples: Vec<f64>,
}

/// Builds a basis from a filter name (`"haar"`, `"symmlet8"`).
pub fn build_basis(filter_name: &str, grid_exponent: u32) -> Result<WaveletBasis> {
    WaveletBasis::new(filter_name.parse()?, grid_exponent)
}

impl WaveletBasis {
    pub fn new(filter: Filter, grid_exponent: u32) -> Result<Self> {
        if grid_exponent < 6 {
            return Err(invalid("wavelet grid exponent must be at least 6"));
        }
        if grid_exponent > 24 {
            return Err(invalid("wavelet grid exponent above 24 is not supported"));
        }
        let lowpass = filter.lowpass();
        let highpass = quadrature_mirror(&lowpass);
        let (phi_fine, psi_fine) = cascade(&lowpass, &highpass, CASCADE_EXPONENT);
        let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let (phi_samples, psi_samples) = if grid_exponent <= CASCADE_EXPONENT {
            let stride = 1usize << (CASCADE_EXPONENT - grid_exponent);
            (
                phi_fine.iter().step_by(stride).copied().collect(),
                psi_fine.iter().step_by(stride).copied().collect(),
            )
        } else {
            cascade(&lowpass, &highpass, grid_exponent)
        };
        Ok(Self {
            filter,
            psi_sup: sup(&psi_fine),
            phi_sup: sup(&phi_fine),
            lowpass,
            highpass,
            grid_exponent,
            phi_samples,
            psi_samples,
        })
    }

    pub fn filter(&self) -> Filter {
        self.filter
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    pub fn grid_exponent(&self) -> u32 {
        self.grid_exponent
    }

    pub fn grid_len(&self) -> usize {
        1 << self.grid_exponent
    }

    /// `||psi||_inf` of the mother wavelet (cascade at resolution `2^14`).
    pub fn psi_sup(&self) -> f64 {
        self.psi_sup
    }

    pub fn phi_sup(&self) -> f64 {
        self.phi_sup
    }

    /// Mother scaling function on `[0, L - 1]` at spacing `2^{-J}`.
    pub fn phi_samples(&self) -> &[f64] {
        &self.phi_samples
    }

    /// Mother wavelet on `[0, L - 1]` at spacing `2^{-J}`.
    pub fn psi_samples(&self) -> &[f64] {
        &self.psi_samples
    }

    /// Coefficients of `g` over `Lambda_{j1}`; detail levels `>= j1` are dropped.
    pub fn analyze(&self, g: &GridFunction, j0: u32, j1: u32) -> Result<WaveletCoefficients> {
        if g.exponent() != self.grid_exponent {
            return Err(invalid("grid function does not live on the basis grid"));
        }
        if j0 > j1 || j1 > self.grid_exponent {
            return Err(invalid("levels must satisfy j0 <= j1 <= J"));
        }
        Ok(self.analyze_values(g.values(), j0, j1))
    }

    pub(crate) fn analyze_values(&self, values: &[f64], j0: u32, j1: u32) -> WaveletCoefficients {
        let n = values.len();
        debug_assert_eq!(n, self.grid_len());
        let scale = libm::pow(2.0, -(self.grid_exponent as f64) / 2.0);
        let mut data: Vec<f64> = values.iter().map(|v| v * scale).collect();
        let mut approx = vec![0.0; n / 2];
        let mut detail = vec![0.0; n / 2];
        let mut len = n;
        while len > 1usize << j0 {
            let half = len / 2;
            for k in 0..half {
                let (mut a, mut d) = (0.0, 0.0);
                for (m, (&h, &g)) in self.lowpass.iter().zip(&self.highpass).enumerate() {
                    let x = data[(2 * k + m) % len];
                    a += h * x;
                    d += g * x;
                }
                approx[k] = a;
                detail[k] = d;
            }
            data[..half].copy_from_slice(&approx[..half]);
            data[half..len].copy_from_slice(&detail[..half]);
            len = half;
        }
        data.truncate(1usize << j1);
        WaveletCoefficients { j0, j1, data }
    }

    /// Samples of `sum a phi_{j0,k} + sum_{j < j1} sum_k b psi_{j,k}`.
    pub fn synthesize(&self, coeffs: &WaveletCoefficients) -> Result<GridFunction> {
        if coeffs.j1 > self.grid_exponent {
            return Err(invalid("coefficients are finer than the basis grid"));
        }
        GridFunction::new(self.synthesize_values(coeffs))
    }

    pub(crate) fn synthesize_values(&self, coeffs: &WaveletCoefficients) -> Vec<f64> {
        let n = self.grid_len();
        let mut data = vec![0.0; n];
        data[..coeffs.data.len()].copy_from_slice(&coeffs.data);
        let mut out = vec![0.0; n];
        let mut len = 1usize << coeffs.j0;
        while len < n {
            let full = 2 * len;
            out[..full].iter_mut().for_each(|v| *v = 0.0);
            for k in 0..len {
                let a = data[k];
                let d = data[len + k];
                if a == 0.0 && d == 0.0 {
                    continue;
                }
                for (m, (&h, &g)) in self.lowpass.iter().zip(&self.highpass).enumerate() {
                    out[(2 * k + m) % full] += h * a + g * d;
                }
            }
            data[..full].copy_from_slice(&out[..full]);
            len = full;
        }
        let scale = libm::pow(2.0, self.grid_exponent as f64 / 2.0);
        data.iter_mut().for_each(|v| *v *= scale);
        data
    }

    /// Grid samples of `phi_{j,k}`.
    pub fn scaling_function(&self, j: u32, k: usize) -> Result<GridFunction> {
        if j > self.grid_exponent || k >= 1usize << j {
            return Err(invalid("scaling function index out of range"));
        }
        let mut c = WaveletCoefficients::zeros(j, j);
        c.data[k] = 1.0;
        self.synthesize(&c)
    }

    /// Grid samples of `psi_{j,k}`.
    pub fn wavelet_function(&self, j: u32, k: usize) -> Result<GridFunction> {
        if j >= self.grid_exponent || k >= 1usize << j {
            return Err(invalid("wavelet index out of range"));
        }
        let mut c = WaveletCoefficients::zeros(j, j + 1);
        c.data[(1usize << j) + k] = 1.0;
        self.synthesize(&c)
    }
}

/// `g_m = (-1)^m h_{L-1-m}`.
fn quadrature_mirror(h: &[f64]) -> Vec<f64> {
    let l = h.len();
    (0..l)
        .map(|m| if m % 2 == 0 { h[l - 1 - m] } else { -h[l - 1 - m] })
        .collect()
}

/// Cascade iteration for the mother `phi` and `psi` at spacing `2^{-levels}`
/// on `[0, L - 1]`.
pub(crate) fn cascade(h: &[f64], g: &[f64], levels: u32) -> (Vec<f64>, Vec<f64>) {
    let sqrt2 = core::f64::consts::SQRT_2;
    let span = h.len() - 1;
    let mut phi = vec![1.0];
    for i in 0..levels - 1 {
        phi = refine(&phi, h, 1usize << i, span * (1usize << (i + 1)) + 1, sqrt2);
    }
    let psi = refine(&phi, g, 1usize << (levels - 1), span * (1usize << levels) + 1, sqrt2);
    let phi = refine(&phi, h, 1usize << (levels - 1), span * (1usize << levels) + 1, sqrt2);
    (phi, psi)
}

/// `out[m] = sqrt2 * sum_k taps[k] * v[m - k * stride]`.
fn refine(v: &[f64], taps: &[f64], stride: usize, len: usize, sqrt2: f64) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (k, &t) in taps.iter().enumerate() {
        let off = k * stride;
        for (i, &x) in v.iter().enumerate() {
            if let Some(o) = out.get_mut(off + i) {
                *o += sqrt2 * t * x;
            }
        }
    }
    out
}
