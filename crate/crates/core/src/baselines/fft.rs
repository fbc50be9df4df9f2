use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::BaselineError;
use crate::event::{EventStream, Roi};
use crate::stats::lower_median;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    #[default]
    Negative,
}

impl Polarity {
    fn matches(self, p: bool) -> bool {
        p == (self == Polarity::Positive)
    }
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "positive" | "pos" | "1" | "on" => Ok(Polarity::Positive),
            "negative" | "neg" | "0" | "off" => Ok(Polarity::Negative),
            _ => Err(format!("unknown polarity {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FftBaselineConfig {
    pub polarity: Polarity,
    /// Sampling step of the impulse train.
    pub bin_us: u64,
    /// Transform length; `None` picks the next power of two covering the stream.
    pub n_fft: Option<usize>,
}

impl Default for FftBaselineConfig {
    fn default() -> Self {
        Self {
            polarity: Polarity::Negative,
            bin_us: 100,
            n_fft: None,
        }
    }
}

impl FftBaselineConfig {
    pub fn validate(&self) -> Result<(), BaselineError> {
        if self.bin_us == 0 {
            return Err(BaselineError::InvalidParams("bin_us must be at least 1".into()));
        }
        if matches!(self.n_fft, Some(n) if n < 2) {
            return Err(BaselineError::InvalidParams("n_fft must be at least 2".into()));
        }
        Ok(())
    }
}

/// Per-pixel rates stored as DFT bin indices; `None` marks pixels without
/// an estimate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateMap {
    pub width: u16,
    pub height: u16,
    /// Frequency step of one DFT bin.
    pub bin_hz: f64,
    pub bins: Vec<Option<u32>>,
}

impl RateMap {
    pub fn new(width: u16, height: u16, bin_hz: f64) -> Self {
        Self {
            width,
            height,
            bin_hz,
            bins: vec![None; width as usize * height as usize],
        }
    }

    pub fn get(&self, x: u16, y: u16) -> Option<u32> {
        self.bins[y as usize * self.width as usize + x as usize]
    }

    pub fn set(&mut self, x: u16, y: u16, bin: Option<u32>) {
        self.bins[y as usize * self.width as usize + x as usize] = bin;
    }

    pub fn rate_hz(&self, x: u16, y: u16) -> Option<f64> {
        self.get(x, y).map(|b| b as f64 * self.bin_hz)
    }

    /// 3×3 median filter over the available neighbours of every pixel that
    /// has an estimate. Pixels without one stay empty; borders use the
    /// clipped neighbourhood.
    pub fn median_filtered(&self) -> RateMap {
        let (w, h) = (self.width as i32, self.height as i32);
        let mut out = RateMap::new(self.width, self.height, self.bin_hz);
        let mut neigh = Vec::with_capacity(9);
        for y in 0..h {
            for x in 0..w {
                if self.get(x as u16, y as u16).is_none() {
                    continue;
                }
                neigh.clear();
                for dy in -1..=1 {
                    for dx in -1..=1 {
                        let (nx, ny) = (x + dx, y + dy);
                        if nx >= 0 && ny >= 0 && nx < w && ny < h {
                            neigh.extend(self.get(nx as u16, ny as u16));
                        }
                    }
                }
                out.set(x as u16, y as u16, lower_median(&mut neigh));
            }
        }
        out
    }

    /// Most frequent bin; ties go to the lower frequency.
    pub fn mode_bin(&self) -> Option<u32> {
        let mut bins: Vec<u32> = self.bins.iter().flatten().copied().collect();
        bins.sort_unstable();
        let mut best: Option<(u32, usize)> = None;
        for run in bins.chunk_by(|a, b| a == b) {
            if best.is_none_or(|(_, n)| run.len() > n) {
                best = Some((run[0], run.len()));
            }
        }
        best.map(|(b, _)| b)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FftBaselineResult {
    pub rate_hz: f64,
    pub n_fft: usize,
    pub bin_hz: f64,
    pub raw: RateMap,
    pub filtered: RateMap,
}

/// Symmetric Hann window of length `m`.
pub(crate) fn hann(m: usize) -> Vec<f64> {
    if m == 1 {
        return vec![1.0];
    }
    (0..m)
        .map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / (m - 1) as f64).cos())
        .collect()
}

/// Index of the largest non-DC magnitude in `1..=n/2`, lowest index on ties.
fn peak_bin(mags: impl Iterator<Item = f64>) -> Option<u32> {
    let mut best: Option<(u32, f64)> = None;
    for (k, m) in mags.enumerate() {
        if m > best.map_or(0.0, |(_, b)| b) {
            best = Some((k as u32 + 1, m));
        }
    }
    best.map(|(k, _)| k)
}

/// Per-pixel Fourier baseline.
///
/// Each pixel's events of the chosen polarity become unit impulses on a
/// `bin_us` grid, are Hann-windowed and transformed; the strongest non-DC
/// bin gives the pixel rate. The rate map is 3×3 median filtered and the
/// most frequent rate is returned.
pub fn fft_baseline(
    stream: &EventStream,
    config: &FftBaselineConfig,
    roi: Option<Roi>,
) -> Result<FftBaselineResult, BaselineError> {
    config.validate()?;
    if stream.is_empty() {
        return Err(BaselineError::EmptyStream);
    }
    let roi = roi.unwrap_or_else(|| Roi::full(stream.width(), stream.height()));
    if !roi.fits(stream.width(), stream.height()) {
        return Err(BaselineError::Grid(crate::voxel::GridError::InvalidRoi(roi)));
    }
    let samples = stream.duration_us().div_ceil(config.bin_us).max(1) as usize;
    let n_fft = config.n_fft.unwrap_or_else(|| samples.next_power_of_two().max(2));
    let used = samples.min(n_fft);
    let bin_hz = 1e6 / (config.bin_us as f64 * n_fft as f64);

    // Impulse positions per pixel, grouped by counting sort.
    let npix = roi.width as usize * roi.height as usize;
    let pixel_of = |x: u16, y: u16| (y - roi.y) as usize * roi.width as usize + (x - roi.x) as usize;
    let selected = || {
        stream.events().iter().filter(move |e| {
            config.polarity.matches(e.p)
                && roi.contains(e.x, e.y)
                && ((e.t / config.bin_us) as usize) < used
        })
    };
    let mut offsets = vec![0usize; npix + 1];
    for e in selected() {
        offsets[pixel_of(e.x, e.y) + 1] += 1;
    }
    for i in 0..npix {
        offsets[i + 1] += offsets[i];
    }
    let mut cursor = offsets.clone();
    let mut impulses = vec![0u32; offsets[npix]];
    for e in selected() {
        let p = pixel_of(e.x, e.y);
        impulses[cursor[p]] = (e.t / config.bin_us) as u32;
        cursor[p] += 1;
    }
    let active: Vec<usize> = (0..npix).filter(|&p| offsets[p + 1] > offsets[p]).collect();
    if active.is_empty() {
        return Err(BaselineError::NoEstimate);
    }

    let window = hann(used);
    let fft: Arc<dyn Fft<f64>> = FftPlanner::new().plan_fft_forward(n_fft);
    let train = |p: usize| &impulses[offsets[p]..offsets[p + 1]];
    let estimates: Vec<(usize, Option<u32>)> = active
        .par_chunks(2)
        .map_init(
            || {
                (
                    vec![Complex::new(0.0, 0.0); n_fft],
                    vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()],
                )
            },
            |(buf, scratch), pair| {
                // Two real trains share one complex transform.
                buf.fill(Complex::new(0.0, 0.0));
                for &k in train(pair[0]) {
                    buf[k as usize].re += window[k as usize];
                }
                if let Some(&q) = pair.get(1) {
                    for &k in train(q) {
                        buf[k as usize].im += window[k as usize];
                    }
                }
                fft.process_with_scratch(buf, scratch);
                let half = n_fft / 2;
                let z = &*buf;
                let first = peak_bin((1..=half).map(|k| (z[k] + z[n_fft - k].conj()).norm()));
                let mut out = vec![(pair[0], first)];
                if let Some(&q) = pair.get(1) {
                    let second =
                        peak_bin((1..=half).map(|k| (z[k] - z[n_fft - k].conj()).norm()));
                    out.push((q, second));
                }
                out
            },
        )
        .flatten()
        .collect();

    let mut raw = RateMap::new(roi.width, roi.height, bin_hz);
    for (p, bin) in estimates {
        raw.bins[p] = bin;
    }
    let filtered = raw.median_filtered();
    let mode = filtered.mode_bin().ok_or(BaselineError::NoEstimate)?;
    Ok(FftBaselineResult {
        rate_hz: mode as f64 * bin_hz,
        n_fft,
        bin_hz,
        raw,
        filtered,
    })
}
