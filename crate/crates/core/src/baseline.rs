//! Regular-histogram projections of the periodogram, used as the comparison
//! baseline. Dimension is chosen by an oracle sweep against the true density.

use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::grid::GridFunction;

/// Least-squares projection of `g` onto `m` equal bins; grid point `i` falls
/// in bin `floor(i m / N)`.
pub fn histogram_projection(g: &GridFunction, m: usize) -> Result<GridFunction> {
    let n = g.len();
    if m == 0 || m > n {
        return Err(invalid("histogram dimension must be in 1..=grid size"));
    }
    let bin = |i: usize| i * m / n;
    let mut sums = vec![0.0; m];
    let mut counts = vec![0usize; m];
    for (i, &v) in g.values().iter().enumerate() {
        sums[bin(i)] += v;
        counts[bin(i)] += 1;
    }
    let means: Vec<f64> = sums.iter().zip(&counts).map(|(s, &c)| s / c as f64).collect();
    GridFunction::new((0..n).map(|i| means[bin(i)]).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramRow {
    pub m: usize,
    /// `L2` distance to the truth, when one was supplied.
    pub l2_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistogramSweep {
    pub rows: Vec<HistogramRow>,
    /// Dimension with the smallest true error (first on ties).
    pub best_m: Option<usize>,
    pub best: Option<GridFunction>,
}

/// Projects onto every dimension in `dims` and, given `truth`, selects the
/// oracle-best one.
pub fn baseline_histogram(periodogram: &GridFunction, dims: &[usize], truth: Option<&GridFunction>) -> Result<HistogramSweep> {
    if dims.is_empty() {
        return Err(invalid("histogram sweep needs at least one dimension"));
    }
    let mut rows = Vec::with_capacity(dims.len());
    let mut best: Option<(f64, usize, GridFunction)> = None;
    for &m in dims {
        let h = histogram_projection(periodogram, m)?;
        let l2_error = truth.map(|t| h.l2_distance(t)).transpose()?;
        if let Some(e) = l2_error {
            if best.as_ref().is_none_or(|(b, _, _)| e < *b) {
                best = Some((e, m, h));
            }
        }
        rows.push(HistogramRow { m, l2_error });
    }
    let (best_m, best) = match best {
        Some((_, m, h)) => (Some(m), Some(h)),
        None => (None, None),
    };
    Ok(HistogramSweep { rows, best_m, best })
}
