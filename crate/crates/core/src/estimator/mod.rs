//! Rate estimation by correlating per-window templates along the time axis.
//!
//! The pipeline is: quantize the stream into a ternary voxel grid, split it
//! into `W`×`W` windows, take each window's leading slab holding `N` events
//! as its template, correlate the template with the whole window along time,
//! read the period off the spacing of the response peaks, and report the
//! median period over all windows as a rate.

pub mod correlate;
pub mod peaks;
pub mod template;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use correlate::{
    correlate_time, correlate_time_with, CorrelationError, CorrelationMethod, ResponseSeries,
};
pub use peaks::{detect_peaks, find_peaks, PeakParams};
pub use template::{select_template, template_depth, Rejection, Template};

use crate::event::{EventStream, Roi};
use crate::stats::{lower_median, mean_median};
use crate::voxel::{quantize, split_windows, AreaRef, GridError, VoxelGrid};

/// Parameters of the estimator. Defaults: 45 px windows, 1800 template
/// events, 100 µs bins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EepprConfig {
    /// Window side `W` in pixels.
    pub window: u16,
    /// Template event count `N`.
    pub template_events: u64,
    pub t_quant_us: u64,
    pub peak: PeakParams,
    /// Largest fraction of the grid depth a template may span.
    pub max_template_fraction: f64,
    pub correlation: CorrelationMethod,
}

impl Default for EepprConfig {
    fn default() -> Self {
        Self {
            window: 45,
            template_events: 1800,
            t_quant_us: 100,
            peak: PeakParams::default(),
            max_template_fraction: 0.25,
            correlation: CorrelationMethod::Auto,
        }
    }
}

impl EepprConfig {
    pub fn validate(&self) -> Result<(), EstimateError> {
        let bad = |m: String| Err(EstimateError::InvalidConfig(m));
        if self.window == 0 {
            return bad("window size must be at least 1 px".into());
        }
        if self.template_events == 0 {
            return bad("template event count must be at least 1".into());
        }
        if self.t_quant_us == 0 {
            return bad("t_quant must be at least 1 us".into());
        }
        if !(self.max_template_fraction > 0.0 && self.max_template_fraction <= 1.0) {
            return bad(format!(
                "max_template_fraction must be in (0, 1], got {}",
                self.max_template_fraction
            ));
        }
        self.peak.validate().map_err(EstimateError::InvalidConfig)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum WindowStatus {
    Accepted,
    Rejected { reason: RejectReason },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    EmptyWindow,
    InsufficientEvents,
    TooFewPeaks,
}

impl WindowStatus {
    /// Short name for tabular output: `accepted` or the rejection reason.
    pub fn label(&self) -> &'static str {
        match self {
            WindowStatus::Accepted => "accepted",
            WindowStatus::Rejected { reason } => match reason {
                RejectReason::EmptyWindow => "empty_window",
                RejectReason::InsufficientEvents => "insufficient_events",
                RejectReason::TooFewPeaks => "too_few_peaks",
            },
        }
    }
}

/// Per-window outcome with diagnostics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowEstimate {
    pub area_index: usize,
    /// Window corner in grid pixels.
    pub origin: (u16, u16),
    pub window_events: u64,
    pub template_depth_bins: Option<usize>,
    pub template_events: Option<u64>,
    pub template_nonzero: Option<usize>,
    pub peak_offsets: Vec<usize>,
    /// Median peak spacing times the bin length, for accepted windows.
    pub period_us: Option<u64>,
    #[serde(flatten)]
    pub status: WindowStatus,
}

impl WindowEstimate {
    pub fn is_accepted(&self) -> bool {
        self.status == WindowStatus::Accepted
    }

    fn rejected(area: &AreaRef, window_events: u64, reason: RejectReason) -> Self {
        Self {
            area_index: area.index,
            origin: (area.x0, area.y0),
            window_events,
            template_depth_bins: None,
            template_events: None,
            template_nonzero: None,
            peak_offsets: Vec::new(),
            period_us: None,
            status: WindowStatus::Rejected { reason },
        }
    }
}

/// Period from the spacing of consecutive peaks.
///
/// Accepted with `period_us = lower_median(deltas) × t_quant_us` when at
/// least two peaks exist, otherwise rejected as `TooFewPeaks`. Template
/// diagnostics are left empty.
pub fn window_period(area_index: usize, peaks: &[usize], t_quant_us: u64) -> WindowEstimate {
    let mut deltas: Vec<u64> = peaks.windows(2).map(|w| (w[1] - w[0]) as u64).collect();
    let (period_us, status) = match lower_median(&mut deltas) {
        Some(d) => (Some(d * t_quant_us), WindowStatus::Accepted),
        None => (
            None,
            WindowStatus::Rejected {
                reason: RejectReason::TooFewPeaks,
            },
        ),
    };
    WindowEstimate {
        area_index,
        origin: (0, 0),
        window_events: 0,
        template_depth_bins: None,
        template_events: None,
        template_nonzero: None,
        peak_offsets: peaks.to_vec(),
        period_us,
        status,
    }
}

/// Final estimate with per-window diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub rate_hz: f64,
    pub period_us: f64,
    pub accepted_windows: usize,
    pub rejected_windows: usize,
    pub windows: Vec<WindowEstimate>,
    pub config: EepprConfig,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("stream has no events")]
    EmptyStream,
    #[error("no valid windows ({rejected} rejected)")]
    NoValidWindows { rejected: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Correlation(#[from] CorrelationError),
}

/// Median of accepted window periods; even counts average the two middles.
pub fn aggregate_periods(periods_us: &[u64]) -> Option<f64> {
    let mut v: Vec<f64> = periods_us.iter().map(|&p| p as f64).collect();
    mean_median(&mut v)
}

/// Runs the whole pipeline on `stream`, restricted to `roi` when given.
///
/// Windows are processed on the current rayon pool.
pub fn estimate(
    stream: &EventStream,
    config: &EepprConfig,
    roi: Option<Roi>,
) -> Result<RateEstimate, EstimateError> {
    config.validate()?;
    if stream.is_empty() {
        return Err(EstimateError::EmptyStream);
    }
    let grid = match quantize(stream, config.t_quant_us, roi) {
        Err(GridError::EmptyStream) => return Err(EstimateError::EmptyStream),
        other => other?,
    };
    estimate_grid(&grid, config)
}

/// Pipeline from an already quantized grid.
pub fn estimate_grid(grid: &VoxelGrid, config: &EepprConfig) -> Result<RateEstimate, EstimateError> {
    config.validate()?;
    let areas = split_windows(grid, config.window)?;
    let windows = areas
        .par_iter()
        .map(|area| process_window(grid, area, config))
        .collect::<Result<Vec<_>, _>>()?;

    let periods: Vec<u64> = windows.iter().filter_map(|w| w.period_us).collect();
    let accepted = periods.len();
    let rejected = windows.len() - accepted;
    let period_us = aggregate_periods(&periods).ok_or(EstimateError::NoValidWindows { rejected })?;
    Ok(RateEstimate {
        rate_hz: 1e6 / period_us,
        period_us,
        accepted_windows: accepted,
        rejected_windows: rejected,
        windows,
        config: config.clone(),
    })
}

/// Template selection, correlation, peak picking and period for one window.
pub fn process_window(
    grid: &VoxelGrid,
    area: &AreaRef,
    config: &EepprConfig,
) -> Result<WindowEstimate, CorrelationError> {
    let view = grid.area(area);
    let window_events = view.event_count();
    let template = match select_template(&view, config.template_events, config.max_template_fraction)
    {
        Ok(t) => t,
        Err(Rejection::EmptyWindow) => {
            return Ok(WindowEstimate::rejected(area, window_events, RejectReason::EmptyWindow))
        }
        Err(Rejection::InsufficientEvents { .. }) => {
            return Ok(WindowEstimate::rejected(
                area,
                window_events,
                RejectReason::InsufficientEvents,
            ))
        }
    };
    let response = correlate_time_with(&view, &template, false, config.correlation)?;
    let peaks = detect_peaks(&response, &config.peak);
    let mut est = window_period(area.index, &peaks, grid.t_quant_us());
    est.origin = (area.x0, area.y0);
    est.window_events = window_events;
    est.template_depth_bins = Some(template.depth_bins);
    est.template_events = Some(template.event_count);
    est.template_nonzero = Some(template.nonzero_count);
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_peaks() {
        let w = window_period(0, &[0, 5, 10, 15], 100);
        assert!(w.is_accepted());
        assert_eq!(w.period_us, Some(500));
    }

    #[test]
    fn single_peak_rejected() {
        let w = window_period(3, &[3], 100);
        assert_eq!(
            w.status,
            WindowStatus::Rejected {
                reason: RejectReason::TooFewPeaks
            }
        );
        assert_eq!(w.period_us, None);
        assert!(!window_period(0, &[], 100).is_accepted());
    }

    #[test]
    fn jittered_peaks_use_lower_middle() {
        // deltas [5, 5, 4, 6] -> sorted [4, 5, 5, 6] -> lower middle 5
        let w = window_period(0, &[0, 5, 10, 14, 20], 100);
        assert_eq!(w.period_us, Some(500));
    }

    #[test]
    fn aggregate_even_count_averages() {
        assert_eq!(aggregate_periods(&[400, 600]), Some(500.0));
        assert_eq!(aggregate_periods(&[500, 400, 600]), Some(500.0));
        assert_eq!(aggregate_periods(&[]), None);
    }

    #[test]
    fn config_validation() {
        assert!(EepprConfig::default().validate().is_ok());
        let bad = EepprConfig {
            max_template_fraction: 0.0,
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(EstimateError::InvalidConfig(_))));
        let bad = EepprConfig {
            window: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn empty_stream() {
        let s = EventStream::empty(64, 64);
        assert_eq!(
            estimate(&s, &EepprConfig::default(), None).unwrap_err(),
            EstimateError::EmptyStream
        );
    }
}
