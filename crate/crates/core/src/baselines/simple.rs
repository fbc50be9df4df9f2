use serde::Serialize;

use super::BaselineError;
use crate::event::{EventStream, Roi};
use crate::stats::{lower_median, lower_median_f64};
use crate::voxel::{window_layout, AreaRef};

/// Timestamps of every `(pixel, polarity)` pair, in time order.
#[derive(Clone, Debug)]
pub struct PixelTimestampIndex {
    width: u16,
    height: u16,
    offsets: Vec<usize>,
    times: Vec<u64>,
}

impl PixelTimestampIndex {
    /// Indexes the events inside `roi`; coordinates become ROI-relative.
    pub fn build(stream: &EventStream, roi: Option<Roi>) -> Result<Self, BaselineError> {
        let roi = roi.unwrap_or_else(|| Roi::full(stream.width(), stream.height()));
        if !roi.fits(stream.width(), stream.height()) {
            return Err(BaselineError::Grid(crate::voxel::GridError::InvalidRoi(roi)));
        }
        let slot = |x: u16, y: u16, p: bool| {
            ((y - roi.y) as usize * roi.width as usize + (x - roi.x) as usize) * 2 + p as usize
        };
        let nslots = roi.width as usize * roi.height as usize * 2;
        let mut offsets = vec![0usize; nslots + 1];
        for e in stream.events().iter().filter(|e| roi.contains(e.x, e.y)) {
            offsets[slot(e.x, e.y, e.p) + 1] += 1;
        }
        for i in 0..nslots {
            offsets[i + 1] += offsets[i];
        }
        let mut cursor = offsets.clone();
        let mut times = vec![0u64; offsets[nslots]];
        for e in stream.events().iter().filter(|e| roi.contains(e.x, e.y)) {
            let s = slot(e.x, e.y, e.p);
            times[cursor[s]] = e.t;
            cursor[s] += 1;
        }
        Ok(Self {
            width: roi.width,
            height: roi.height,
            offsets,
            times,
        })
    }

    pub fn width(&self) -> u16 {
        self.width
    }

    pub fn height(&self) -> u16 {
        self.height
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Sorted timestamps of pixel `(x, y)` with polarity `p`.
    pub fn timestamps(&self, x: u16, y: u16, p: bool) -> &[u64] {
        let s = (y as usize * self.width as usize + x as usize) * 2 + p as usize;
        &self.times[self.offsets[s]..self.offsets[s + 1]]
    }

    /// Median inter-event interval of one pixel and polarity, if it has at
    /// least two events.
    pub fn temporal_result(&self, x: u16, y: u16, p: bool) -> Option<u64> {
        let mut deltas: Vec<u64> = self
            .timestamps(x, y, p)
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect();
        lower_median(&mut deltas)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SimpleBaselineResult {
    /// Median over windows of the per-window rates.
    pub rate_hz: f64,
    pub windows: Vec<AreaRef>,
    /// Median temporal result per window, `None` when nothing was measured.
    pub window_periods_us: Vec<Option<u64>>,
    pub window_rates_hz: Vec<Option<f64>>,
}

/// Inter-event interval baseline.
///
/// Per pixel and polarity, the median interval between consecutive events;
/// per `window`×`window` area, the median of those; per area, `10⁶ / T`;
/// overall, the median of the area rates. Every median takes the lower
/// middle element for even counts.
pub fn simple_baseline(
    stream: &EventStream,
    window: u16,
    roi: Option<Roi>,
) -> Result<SimpleBaselineResult, BaselineError> {
    if stream.is_empty() {
        return Err(BaselineError::EmptyStream);
    }
    let index = PixelTimestampIndex::build(stream, roi)?;
    if index.is_empty() {
        return Err(BaselineError::EmptyStream);
    }
    let windows = window_layout(index.width(), index.height(), window)?;
    let mut periods = Vec::with_capacity(windows.len());
    let mut rates = Vec::with_capacity(windows.len());
    for a in &windows {
        let mut results = Vec::with_capacity(2 * a.size as usize * a.size as usize);
        for y in a.y0..a.y0 + a.size {
            for x in a.x0..a.x0 + a.size {
                for p in [false, true] {
                    results.extend(index.temporal_result(x, y, p));
                }
            }
        }
        let period = lower_median(&mut results).filter(|&t| t > 0);
        periods.push(period);
        rates.push(period.map(|t| 1e6 / t as f64));
    }
    let mut valid: Vec<f64> = rates.iter().flatten().copied().collect();
    let rate_hz = lower_median_f64(&mut valid).ok_or(BaselineError::NoEstimate)?;
    Ok(SimpleBaselineResult {
        rate_hz,
        windows,
        window_periods_us: periods,
        window_rates_hz: rates,
    })
}
