//! Peak picking on 1-D correlation responses.

use serde::{Deserialize, Serialize};

use super::correlate::ResponseSeries;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakParams {
    /// Minimum topographic prominence as a fraction of `max − min` of the series.
    pub min_prominence: f64,
    /// Minimum lag between two reported peaks, in bins.
    pub min_separation_bins: usize,
}

impl Default for PeakParams {
    fn default() -> Self {
        Self {
            min_prominence: 0.3,
            min_separation_bins: 2,
        }
    }
}

impl PeakParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.min_prominence > 0.0 && self.min_prominence <= 1.0) {
            return Err(format!(
                "min_prominence must be in (0, 1], got {}",
                self.min_prominence
            ));
        }
        if self.min_separation_bins == 0 {
            return Err("min_separation_bins must be at least 1".into());
        }
        Ok(())
    }
}

/// Strictly increasing offsets of the peaks of `response` that pass `params`.
pub fn detect_peaks(response: &ResponseSeries, params: &PeakParams) -> Vec<usize> {
    find_peaks(&response.scores, params)
}

/// Peak search on a raw slice.
///
/// Candidates are interior local maxima, flat tops reported at their middle
/// sample (left-middle for an even width). Candidates closer than
/// `min_separation_bins` are thinned by keeping the higher one, then the
/// prominence threshold is applied.
pub fn find_peaks(x: &[f64], params: &PeakParams) -> Vec<usize> {
    let (lo, hi) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let range = hi - lo;
    if !(range > 0.0) {
        return Vec::new();
    }
    let mut peaks = local_maxima(x);
    if params.min_separation_bins > 1 {
        peaks = thin_by_distance(x, &peaks, params.min_separation_bins);
    }
    let min_prom = params.min_prominence * range;
    peaks
        .into_iter()
        .filter(|&p| prominence(x, p) >= min_prom)
        .collect()
}

/// Interior local maxima, including flat tops.
pub fn local_maxima(x: &[f64]) -> Vec<usize> {
    let n = x.len();
    let mut peaks = Vec::new();
    if n < 3 {
        return peaks;
    }
    let last = n - 1;
    let mut i = 1;
    while i < last {
        if x[i - 1] < x[i] {
            let mut ahead = i + 1;
            while ahead < last && x[ahead] == x[i] {
                ahead += 1;
            }
            if x[ahead] < x[i] {
                peaks.push((i + ahead - 1) / 2);
                i = ahead;
            }
        }
        i += 1;
    }
    peaks
}

fn thin_by_distance(x: &[f64], peaks: &[usize], distance: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..peaks.len()).collect();
    // Highest first; ties go to the earlier peak.
    order.sort_by(|&a, &b| x[peaks[b]].total_cmp(&x[peaks[a]]).then(a.cmp(&b)));
    let mut keep = vec![true; peaks.len()];
    for &i in &order {
        if !keep[i] {
            continue;
        }
        let mut j = i;
        while j > 0 && peaks[i] - peaks[j - 1] < distance {
            keep[j - 1] = false;
            j -= 1;
        }
        let mut j = i + 1;
        while j < peaks.len() && peaks[j] - peaks[i] < distance {
            keep[j] = false;
            j += 1;
        }
    }
    peaks
        .iter()
        .zip(keep)
        .filter_map(|(&p, k)| k.then_some(p))
        .collect()
}

/// Topographic prominence of the sample at `peak`: its height above the
/// higher of the two lowest points reached on each side before meeting a
/// strictly higher sample (or the series end).
pub fn prominence(x: &[f64], peak: usize) -> f64 {
    let h = x[peak];
    let mut left_min = h;
    for &v in x[..peak].iter().rev() {
        if v > h {
            break;
        }
        left_min = left_min.min(v);
    }
    let mut right_min = h;
    for &v in &x[peak + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}
