//! Reference implementations written directly from the definitions, with
//! plain loops and dense arrays. Slow on purpose.

#![allow(dead_code)]

use std::collections::BTreeMap;

use eeppr::Event;

/// Dense ternary volume indexed `[(y * w + x) * depth + k]`.
pub struct Dense {
    pub width: usize,
    pub height: usize,
    pub depth: usize,
    pub values: Vec<i8>,
}

impl Dense {
    pub fn at(&self, x: usize, y: usize, k: usize) -> i8 {
        self.values[(y * self.width + x) * self.depth + k]
    }
}

/// Last-event-wins quantization by a sequential scan over a dense array.
pub fn quantize_dense(events: &[Event], width: usize, height: usize, duration_us: u64, t_quant: u64) -> Dense {
    let depth = duration_us.div_ceil(t_quant).max(1) as usize;
    let mut values = vec![0i8; width * height * depth];
    for e in events {
        let k = (e.t / t_quant) as usize;
        values[(e.y as usize * width + e.x as usize) * depth + k] = if e.p { 1 } else { -1 };
    }
    Dense { width, height, depth, values }
}

/// Correlation of the leading `d`-bin slab of the window at `(x0, y0)` of
/// side `size` against the whole window: a triple sum per lag.
pub fn correlate_dense(vol: &Dense, x0: usize, y0: usize, size: usize, d: usize) -> Vec<i64> {
    (0..=vol.depth - d)
        .map(|lag| {
            let mut s = 0i64;
            for y in y0..y0 + size {
                for x in x0..x0 + size {
                    for k in 0..d {
                        s += vol.at(x, y, k) as i64 * vol.at(x, y, k + lag) as i64;
                    }
                }
            }
            s
        })
        .collect()
}

fn lower_mid<T: Ord + Copy>(mut v: Vec<T>) -> Option<T> {
    if v.is_empty() {
        return None;
    }
    v.sort();
    Some(v[(v.len() - 1) / 2])
}

/// Per-window rates and the aggregate of the interval baseline, computed
/// from a map of per-pixel timestamp lists.
pub fn simple_baseline_reference(
    events: &[Event],
    width: u16,
    height: u16,
    window: u16,
) -> (Vec<Option<f64>>, Option<f64>) {
    let mut lists: BTreeMap<(u16, u16, bool), Vec<u64>> = BTreeMap::new();
    for e in events {
        lists.entry((e.x, e.y, e.p)).or_default().push(e.t);
    }
    let mut window_rates = Vec::new();
    let (nx, ny) = (width / window, height / window);
    for wy in 0..ny {
        for wx in 0..nx {
            let mut results = Vec::new();
            for y in wy * window..(wy + 1) * window {
                for x in wx * window..(wx + 1) * window {
                    for p in [false, true] {
                        let Some(ts) = lists.get(&(x, y, p)) else { continue };
                        let mut ts = ts.clone();
                        ts.sort();
                        let deltas: Vec<u64> = (1..ts.len()).map(|i| ts[i] - ts[i - 1]).collect();
                        if let Some(m) = lower_mid(deltas) {
                            results.push(m);
                        }
                    }
                }
            }
            window_rates.push(lower_mid(results).filter(|&t| t > 0).map(|t| 1e6 / t as f64));
        }
    }
    let mut valid: Vec<f64> = window_rates.iter().flatten().copied().collect();
    valid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let agg = (!valid.is_empty()).then(|| valid[(valid.len() - 1) / 2]);
    (window_rates, agg)
}

/// Magnitudes of the DFT of a real signal at bins `0 ..= n/2`, summed
/// term by term.
pub fn dft_magnitudes(signal: &[f64], n: usize) -> Vec<f64> {
    (0..=n / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (j, &v) in signal.iter().enumerate().take(n) {
                if v != 0.0 {
                    let a = -2.0 * std::f64::consts::PI * (k * j % n) as f64 / n as f64;
                    re += v * a.cos();
                    im += v * a.sin();
                }
            }
            re.hypot(im)
        })
        .collect()
}

/// Hann-windowed impulse train of `times` on a `bin_us` grid, `samples` long.
pub fn windowed_impulses(times: &[u64], bin_us: u64, samples: usize) -> Vec<f64> {
    let mut s = vec![0.0; samples];
    for &t in times {
        let k = (t / bin_us) as usize;
        if k < samples {
            s[k] += 1.0;
        }
    }
    if samples > 1 {
        for (k, v) in s.iter_mut().enumerate() {
            *v *= 0.5 - 0.5 * (2.0 * std::f64::consts::PI * k as f64 / (samples - 1) as f64).cos();
        }
    }
    s
}

/// Index of the largest magnitude among bins `1 ..= n/2`, lowest on ties.
pub fn peak_index(mags: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, &m) in mags.iter().enumerate().skip(1) {
        if m > best.map_or(0.0, |b| b.1) {
            best = Some((k, m));
        }
    }
    best.map(|b| b.0)
}
