//! Correlation template selection.

use serde::{Deserialize, Serialize};

use crate::voxel::{AreaView, Cell};

/// Why a window produced no template.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Rejection {
    EmptyWindow,
    InsufficientEvents {
        /// Events reachable within the allowed depth.
        available: u64,
        required: u64,
        max_depth_bins: usize,
    },
}

/// Leading time slab of one window, used as the correlation kernel.
#[derive(Clone, Debug)]
pub struct Template {
    pub area_index: usize,
    pub origin: (u16, u16),
    pub size: u16,
    pub depth_bins: usize,
    /// Raw events covered by the template.
    pub event_count: u64,
    pub nonzero_count: usize,
    offsets: Vec<usize>,
    cells: Vec<Cell>,
}

impl Template {
    /// Copies bins `[0, depth_bins)` of the window.
    pub fn leading(area: &AreaView<'_>, depth_bins: usize) -> Template {
        let mut offsets = Vec::with_capacity(area.area().size as usize * area.area().size as usize + 1);
        let mut cells = Vec::new();
        let mut event_count = 0;
        offsets.push(0);
        for px in area.pixels() {
            let end = px.partition_point(|c| (c.bin as usize) < depth_bins);
            event_count += px[..end].iter().map(|c| c.events as u64).sum::<u64>();
            cells.extend_from_slice(&px[..end]);
            offsets.push(cells.len());
        }
        let a = area.area();
        Template {
            area_index: a.index,
            origin: (a.x0, a.y0),
            size: a.size,
            depth_bins,
            event_count,
            nonzero_count: cells.len(),
            offsets,
            cells,
        }
    }

    /// Template cells per window pixel, in the window's row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = &[Cell]> + '_ {
        self.offsets.windows(2).map(|w| &self.cells[w[0]..w[1]])
    }

    /// Negates every cell.
    pub fn negated(&self) -> Template {
        let mut t = self.clone();
        for c in &mut t.cells {
            c.value = -c.value;
        }
        t
    }
}

/// Smallest depth `d` such that bins `[0, d)` hold at least `required`
/// events, given raw event counts per bin. `max_depth` caps `d`.
pub fn template_depth(
    per_bin_counts: &[u64],
    required: u64,
    max_depth: usize,
) -> Result<usize, Rejection> {
    let mut total = 0u64;
    let mut within_cap = 0u64;
    for (k, &n) in per_bin_counts.iter().enumerate() {
        total += n;
        if k < max_depth {
            within_cap = total;
            if total >= required {
                return Ok(k + 1);
            }
        }
    }
    if total == 0 {
        Err(Rejection::EmptyWindow)
    } else {
        Err(Rejection::InsufficientEvents {
            available: within_cap,
            required,
            max_depth_bins: max_depth,
        })
    }
}

/// Largest template depth allowed for a grid of `depth` bins.
pub fn max_template_depth(depth: usize, max_fraction: f64) -> usize {
    ((depth as f64 * max_fraction).floor() as usize).clamp(1, depth.max(1))
}

/// Picks the template of a window by thresholding the cumulative raw event
/// count at `required` events, starting from bin 0.
pub fn select_template(
    area: &AreaView<'_>,
    required: u64,
    max_fraction: f64,
) -> Result<Template, Rejection> {
    let mut counts = vec![0u64; area.depth()];
    for px in area.pixels() {
        for c in px {
            counts[c.bin as usize] += c.events as u64;
        }
    }
    let depth = template_depth(&counts, required, max_template_depth(area.depth(), max_fraction))?;
    Ok(Template::leading(area, depth))
}
