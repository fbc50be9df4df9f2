//! Correlation of a template with its window along the time axis.
//!
//! `score(τ) = Σ_{x,y,k} A[x, y, τ + k] · T[x, y, k]` for `τ ∈ [0, D − d]`.
//!
//! Two exact routes compute it. The sparse route walks the nonzero cells of
//! each pixel pair directly. The FFT route accumulates the cross spectrum of
//! every pixel and inverts once; two real pixel series are packed into one
//! complex transform, since the real part of the complex correlation of
//! `a₁ + i·a₂` with `t₁ + i·t₂` is `a₁⋆t₁ + a₂⋆t₂`. Cell values are ternary,
//! so every score is an integer and the FFT output is rounded.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::template::Template;
use crate::voxel::{AreaView, Cell};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorrelationError {
    #[error("template depth {template} exceeds window depth {area}")]
    TemplateDeeperThanArea { template: usize, area: usize },
    #[error("template was taken from window {template}, not window {area}")]
    MismatchedWindow { template: usize, area: usize },
}

/// Which exact route computes the response.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMethod {
    /// Pick the cheaper route from the cell counts.
    #[default]
    Auto,
    Fft,
    Sparse,
}

/// Correlation score per time lag for one window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResponseSeries {
    pub area_index: usize,
    /// `scores[τ]` for lags `τ = 0 ..= D − d`.
    pub scores: Vec<f64>,
}

impl ResponseSeries {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Affine min-max rescale to `[0, 1]`; a constant series maps to zeros.
    pub fn normalized(mut self) -> Self {
        let (lo, hi) = self
            .scores
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
        let range = hi - lo;
        for s in &mut self.scores {
            *s = if range > 0.0 { (*s - lo) / range } else { 0.0 };
        }
        self
    }
}

/// Correlates `template` with `area`, choosing the route automatically.
pub fn correlate_time(
    area: &AreaView<'_>,
    template: &Template,
    normalize: bool,
) -> Result<ResponseSeries, CorrelationError> {
    correlate_time_with(area, template, normalize, CorrelationMethod::Auto)
}

pub fn correlate_time_with(
    area: &AreaView<'_>,
    template: &Template,
    normalize: bool,
    method: CorrelationMethod,
) -> Result<ResponseSeries, CorrelationError> {
    let depth = area.depth();
    if template.depth_bins > depth || template.depth_bins == 0 {
        return Err(CorrelationError::TemplateDeeperThanArea {
            template: template.depth_bins,
            area: depth,
        });
    }
    if template.area_index != area.area().index {
        return Err(CorrelationError::MismatchedWindow {
            template: template.area_index,
            area: area.area().index,
        });
    }
    let method = match method {
        CorrelationMethod::Auto => pick_method(area, template),
        m => m,
    };
    let scores = match method {
        CorrelationMethod::Fft => fft_scores(area, template),
        _ => sparse_scores(area, template),
    };
    let series = ResponseSeries {
        area_index: template.area_index,
        scores,
    };
    Ok(if normalize { series.normalized() } else { series })
}

fn pick_method(area: &AreaView<'_>, template: &Template) -> CorrelationMethod {
    let mut sparse_cost = 0u64;
    let mut active = 0u64;
    for (a, t) in area.pixels().zip(template.pixels()) {
        if !t.is_empty() {
            active += 1;
            sparse_cost += t.len() as u64 * a.len() as u64;
        }
    }
    let n = area.depth().next_power_of_two() as u64;
    // Two forward transforms per packed pixel pair, roughly n·log2(n) each.
    let fft_cost = active.div_ceil(2) * 2 * n * (n.trailing_zeros() as u64).max(1);
    if fft_cost < sparse_cost {
        CorrelationMethod::Fft
    } else {
        CorrelationMethod::Sparse
    }
}

fn sparse_scores(area: &AreaView<'_>, template: &Template) -> Vec<f64> {
    let max_lag = area.depth() - template.depth_bins;
    let mut acc = vec![0i64; max_lag + 1];
    for (a, t) in area.pixels().zip(template.pixels()) {
        for tc in t {
            let start = a.partition_point(|c| c.bin < tc.bin);
            for ac in &a[start..] {
                let lag = (ac.bin - tc.bin) as usize;
                if lag > max_lag {
                    break;
                }
                acc[lag] += (tc.value as i64) * (ac.value as i64);
            }
        }
    }
    acc.into_iter().map(|v| v as f64).collect()
}

fn fill(buf: &mut [Complex<f64>], first: &[Cell], second: &[Cell]) {
    buf.fill(Complex::new(0.0, 0.0));
    for c in first {
        buf[c.bin as usize].re = c.value as f64;
    }
    for c in second {
        buf[c.bin as usize].im = c.value as f64;
    }
}

fn fft_scores(area: &AreaView<'_>, template: &Template) -> Vec<f64> {
    let depth = area.depth();
    let max_lag = depth - template.depth_bins;
    // Lags never wrap: τ + k ≤ D − 1 < n.
    let n = depth.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);

    let pairs: Vec<(&[Cell], &[Cell])> = area
        .pixels()
        .zip(template.pixels())
        .filter(|(_, t)| !t.is_empty())
        .collect();

    let mut spectrum = vec![Complex::new(0.0, 0.0); n];
    let mut abuf = vec![Complex::new(0.0, 0.0); n];
    let mut tbuf = vec![Complex::new(0.0, 0.0); n];
    let mut scratch = vec![Complex::new(0.0, 0.0); forward.get_inplace_scratch_len()];
    for chunk in pairs.chunks(2) {
        let (a1, t1) = chunk[0];
        let (a2, t2) = chunk.get(1).copied().unwrap_or((&[], &[]));
        fill(&mut abuf, a1, a2);
        fill(&mut tbuf, t1, t2);
        forward.process_with_scratch(&mut abuf, &mut scratch);
        forward.process_with_scratch(&mut tbuf, &mut scratch);
        for ((s, a), t) in spectrum.iter_mut().zip(&abuf).zip(&tbuf) {
            *s += t.conj() * a;
        }
    }
    let mut scratch = vec![Complex::new(0.0, 0.0); inverse.get_inplace_scratch_len()];
    inverse.process_with_scratch(&mut spectrum, &mut scratch);
    let scale = 1.0 / n as f64;
    spectrum[..=max_lag]
        .iter()
        .map(|c| (c.re * scale).round())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::template::Template;
    use crate::voxel::{split_windows, VoxelGrid};

    fn grid_with(w: u16, depth: usize, cells: &[(usize, usize, i8)]) -> VoxelGrid {
        let mut dense = vec![0i8; w as usize * w as usize * depth];
        for &(p, k, v) in cells {
            dense[p * depth + k] = v;
        }
        VoxelGrid::from_dense(w, w, depth, 100, &dense)
    }

    #[test]
    fn self_correlation_at_zero_counts_template_cells() {
        let g = grid_with(2, 12, &[(0, 0, 1), (0, 1, -1), (3, 2, 1), (1, 7, 1), (2, 9, -1)]);
        let area = split_windows(&g, 2).unwrap()[0];
        let view = g.area(&area);
        let t = Template::leading(&view, 3);
        for m in [CorrelationMethod::Sparse, CorrelationMethod::Fft] {
            let r = correlate_time_with(&view, &t, false, m).unwrap();
            assert_eq!(r.len(), 12 - 3 + 1);
            assert_eq!(r.scores[0], t.nonzero_count as f64);
        }
    }

    #[test]
    fn all_zero_area_normalizes_to_zero() {
        let g = grid_with(2, 8, &[(0, 0, 1)]);
        let area = split_windows(&g, 2).unwrap()[0];
        let view = g.area(&area);
        // Template over bins [0, 1) while the response beyond lag 0 is empty.
        let t = Template::leading(&view, 1);
        let r = correlate_time(&view, &t, false).unwrap();
        assert_eq!(r.scores[0], 1.0);
        assert!(r.scores[1..].iter().all(|&s| s == 0.0));

        let z = ResponseSeries {
            area_index: 0,
            scores: vec![0.0; 5],
        };
        assert_eq!(z.normalized().scores, vec![0.0; 5]);
    }

    #[test]
    fn template_deeper_than_area() {
        let g = grid_with(1, 4, &[(0, 0, 1)]);
        let area = split_windows(&g, 1).unwrap()[0];
        let view = g.area(&area);
        let t = Template::leading(&view, 5);
        assert_eq!(
            correlate_time(&view, &t, false),
            Err(CorrelationError::TemplateDeeperThanArea { template: 5, area: 4 })
        );
    }

    #[test]
    fn normalized_range() {
        let r = ResponseSeries {
            area_index: 0,
            scores: vec![-2.0, 0.0, 6.0],
        }
        .normalized();
        assert_eq!(r.scores, vec![0.0, 0.25, 1.0]);
    }
}
