#![no_std]

#[macro_use]
extern crate alloc;

pub mod baseline;
pub mod covariance;
pub mod error;
pub mod estimate;
mod fft;
pub mod grid;
pub mod metrics;
pub mod periodogram;
pub mod process;
pub mod projection;
pub mod threshold;
pub mod wavelet;

pub use error::{Error, Result};
pub use grid::GridFunction;
