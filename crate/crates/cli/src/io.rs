//! CSV formats for series, grid functions, coefficients and covariances.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use wavspec_core::covariance::CovarianceSequence;
use wavspec_core::process::TimeSeries;
use wavspec_core::wavelet::WaveletCoefficients;
use wavspec_core::GridFunction;

#[derive(Debug, Serialize, Deserialize)]
struct GridRow {
    omega: f64,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CoefficientRow {
    level: i32,
    k: usize,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CovarianceRow {
    lag: usize,
    value: f64,
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("cannot create {}", path.display()))
}

/// Single column of numbers, no header.
pub fn read_series_from(reader: impl Read) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
    let mut samples = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        ensure!(record.len() == 1, "line {}: expected one column, found {}", line + 1, record.len());
        let v: f64 = record[0]
            .parse()
            .with_context(|| format!("line {}: not a number: {:?}", line + 1, &record[0]))?;
        samples.push(v);
    }
    Ok(TimeSeries::new(samples)?)
}

pub fn read_series(path: &Path) -> Result<TimeSeries> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_series_from(f)
}

pub fn write_series_to(series: &TimeSeries, mut w: impl Write) -> Result<()> {
    for v in series.samples() {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

pub fn write_series(path: &Path, series: &TimeSeries) -> Result<()> {
    write_series_to(series, create(path)?)
}

/// `omega,value` with a header.
pub fn write_grid(path: &Path, g: &GridFunction) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for (i, &value) in g.values().iter().enumerate() {
        w.serialize(GridRow { omega: g.omega(i), value })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid(path: &Path) -> Result<GridFunction> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let values = rdr
        .deserialize::<GridRow>()
        .map(|r| r.map(|r| r.value))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(GridFunction::new(values)?)
}

/// `level,k,value`; scaling coefficients carry level `j0 - 1`.
pub fn write_coefficients(path: &Path, c: &WaveletCoefficients) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for (level, k, value) in c.iter() {
        w.serialize(CoefficientRow { level, k, value })?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_coefficients(path: &Path) -> Result<WaveletCoefficients> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("cannot open {}", path.display()))?;
    let rows = rdr.deserialize::<CoefficientRow>().collect::<std::result::Result<Vec<_>, _>>()?;
    let Some(first) = rows.first() else {
        bail!("coefficient file {} is empty", path.display());
    };
    ensure!(first.level >= -1, "scaling level tag must be at least -1");
    let j0 = (first.level + 1) as u32;
    let len = rows.len();
    ensure!(len.is_power_of_two(), "coefficient count {len} is not a power of two");
    let j1 = len.trailing_zeros();
    let expected = WaveletCoefficients::zeros(j0, j1);
    for ((level, k, _), row) in expected.iter().zip(&rows) {
        ensure!(
            row.level == level && row.k == k,
            "unexpected index ({}, {}), wanted ({level}, {k})",
            row.level,
            row.k
        );
    }
    Ok(WaveletCoefficients::new(j0, j1, rows.into_iter().map(|r| r.value).collect())?)
}

/// `lag,value` with a header.
pub fn write_covariance(path: &Path, c: &CovarianceSequence) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for (lag, &value) in c.rho().iter().enumerate() {
        w.serialize(CovarianceRow { lag, value })?;
    }
    w.flush()?;
    Ok(())
}

/// Writes any serializable rows with a header.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    writeln!(f)?;
    Ok(())
}
