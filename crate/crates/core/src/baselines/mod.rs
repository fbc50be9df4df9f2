//! Per-pixel reference methods: inter-event interval medians and per-pixel
//! Fourier analysis.

mod fft;
mod simple;

use thiserror::Error;

pub use fft::{fft_baseline, FftBaselineConfig, FftBaselineResult, Polarity, RateMap};
pub use simple::{simple_baseline, PixelTimestampIndex, SimpleBaselineResult};

use crate::voxel::GridError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BaselineError {
    #[error("stream has no events")]
    EmptyStream,
    #[error("no pixel produced an estimate")]
    NoEstimate,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Grid(#[from] GridError),
}
