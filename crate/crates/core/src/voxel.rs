//! Quantization of sparse events into a ternary spatio-temporal grid, and
//! the split of that grid into square analysis windows.
//!
//! The grid is stored sparsely: for every pixel a time-ordered run of
//! nonzero [`Cell`]s. A one-second capture at the default 100 µs bin length
//! has 10⁴ bins per pixel, so a dense HD grid would not fit in memory, while
//! the number of nonzero cells is bounded by the number of events.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{EventStream, Roi};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("no events inside the region of interest")]
    EmptyStream,
    #[error("region of interest {0:?} does not fit the sensor")]
    InvalidRoi(Roi),
    #[error("quantization length must be at least 1 us")]
    InvalidQuantization,
    #[error("window size must be at least 1 px")]
    InvalidWindowSize,
    #[error("window of {window} px does not fit a {width}x{height} grid")]
    WindowTooLarge { window: u16, width: u16, height: u16 },
}

/// One nonzero voxel: the time bin, the signed polarity of the last event in
/// it, and how many raw events were folded into it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cell {
    pub bin: u32,
    pub value: i8,
    pub events: u32,
}

/// Ternary voxel grid over `(x, y, bin)`.
///
/// Immutable once built; shared read-only between workers.
#[derive(Clone, Debug)]
pub struct VoxelGrid {
    width: u16,
    height: u16,
    depth: usize,
    t_quant_us: u64,
    origin: (u16, u16),
    offsets: Vec<usize>,
    cells: Vec<Cell>,
    event_count: usize,
}

impl VoxelGrid {
    pub fn width(&self) -> u16 {
        self.width
    }

    pub fn height(&self) -> u16 {
        self.height
    }

    /// Number of time bins.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn t_quant_us(&self) -> u64 {
        self.t_quant_us
    }

    /// Sensor coordinates of the grid's `(0, 0)` pixel (the ROI corner).
    pub fn origin(&self) -> (u16, u16) {
        self.origin
    }

    /// Raw events that went into the grid.
    pub fn event_count(&self) -> usize {
        self.event_count
    }

    pub fn nonzero_count(&self) -> usize {
        self.cells.len()
    }

    /// Nonzero cells of pixel `(x, y)`, ordered by bin.
    #[inline]
    pub fn pixel_cells(&self, x: u16, y: u16) -> &[Cell] {
        let i = y as usize * self.width as usize + x as usize;
        &self.cells[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Cell value at `(x, y, k)`; zero for empty cells.
    pub fn value(&self, x: u16, y: u16, k: usize) -> i8 {
        let cells = self.pixel_cells(x, y);
        match cells.binary_search_by_key(&(k as u64), |c| c.bin as u64) {
            Ok(i) => cells[i].value,
            Err(_) => 0,
        }
    }

    /// Dense copy indexed as `((y * width + x) * depth + k)`. Only sensible
    /// for small grids.
    pub fn to_dense(&self) -> Vec<i8> {
        let mut out = vec![0i8; self.width as usize * self.height as usize * self.depth];
        for p in 0..self.width as usize * self.height as usize {
            for c in &self.cells[self.offsets[p]..self.offsets[p + 1]] {
                out[p * self.depth + c.bin as usize] = c.value;
            }
        }
        out
    }

    /// Read-only view of one analysis window.
    pub fn area(&self, area: &AreaRef) -> AreaView<'_> {
        AreaView { grid: self, area: *area }
    }
}

impl VoxelGrid {
    /// Builds a grid from a dense ternary volume indexed as
    /// `((y * width + x) * depth + k)`. Each nonzero value counts as one event.
    ///
    /// Values outside `{-1, 0, 1}` are clamped to their sign.
    pub fn from_dense(
        width: u16,
        height: u16,
        depth: usize,
        t_quant_us: u64,
        values: &[i8],
    ) -> VoxelGrid {
        let npix = width as usize * height as usize;
        assert_eq!(values.len(), npix * depth, "dense volume has the wrong size");
        let mut offsets = Vec::with_capacity(npix + 1);
        let mut cells = Vec::new();
        offsets.push(0);
        for p in 0..npix {
            for (k, &v) in values[p * depth..(p + 1) * depth].iter().enumerate() {
                if v != 0 {
                    cells.push(Cell {
                        bin: k as u32,
                        value: v.signum(),
                        events: 1,
                    });
                }
            }
            offsets.push(cells.len());
        }
        let event_count = cells.len();
        VoxelGrid {
            width,
            height,
            depth,
            t_quant_us,
            origin: (0, 0),
            offsets,
            cells,
            event_count,
        }
    }
}

/// Quantizes `stream` into bins of `t_quant_us` microseconds.
///
/// Event `t` lands in bin `floor(t / t_quant_us)`; each nonzero cell holds
/// the polarity of the chronologically last event of that pixel and bin.
/// Events outside `roi` are discarded and grid coordinates are relative to
/// the ROI corner.
pub fn quantize(
    stream: &EventStream,
    t_quant_us: u64,
    roi: Option<Roi>,
) -> Result<VoxelGrid, GridError> {
    if t_quant_us == 0 {
        return Err(GridError::InvalidQuantization);
    }
    let roi = roi.unwrap_or_else(|| Roi::full(stream.width(), stream.height()));
    if !roi.fits(stream.width(), stream.height()) {
        return Err(GridError::InvalidRoi(roi));
    }
    let depth = stream.duration_us().div_ceil(t_quant_us) as usize;
    let (w, h) = (roi.width as usize, roi.height as usize);
    let npix = w * h;
    let pixel_of = |x: u16, y: u16| (y - roi.y) as usize * w + (x - roi.x) as usize;

    let mut counts = vec![0usize; npix + 1];
    let mut inside = 0usize;
    for e in stream.events() {
        if roi.contains(e.x, e.y) {
            counts[pixel_of(e.x, e.y) + 1] += 1;
            inside += 1;
        }
    }
    if inside == 0 {
        return Err(GridError::EmptyStream);
    }
    for i in 0..npix {
        counts[i + 1] += counts[i];
    }

    // Counting-sort by pixel; stability keeps each pixel's events in time order.
    let mut cursor = counts.clone();
    let mut scattered = vec![(0u32, 0i8); inside];
    for e in stream.events() {
        if roi.contains(e.x, e.y) {
            let p = pixel_of(e.x, e.y);
            scattered[cursor[p]] = ((e.t / t_quant_us) as u32, e.sign());
            cursor[p] += 1;
        }
    }

    let mut offsets = Vec::with_capacity(npix + 1);
    let mut cells: Vec<Cell> = Vec::with_capacity(inside);
    offsets.push(0);
    for p in 0..npix {
        let run_start = cells.len();
        for &(bin, value) in &scattered[counts[p]..counts[p + 1]] {
            match cells[run_start..].last_mut() {
                Some(c) if c.bin == bin => {
                    c.value = value;
                    c.events += 1;
                }
                _ => cells.push(Cell { bin, value, events: 1 }),
            }
        }
        offsets.push(cells.len());
    }
    cells.shrink_to_fit();

    Ok(VoxelGrid {
        width: roi.width,
        height: roi.height,
        depth,
        t_quant_us,
        origin: (roi.x, roi.y),
        offsets,
        cells,
        event_count: inside,
    })
}

/// A `size`×`size` window of a grid, anchored at `(x0, y0)` grid pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AreaRef {
    pub index: usize,
    pub x0: u16,
    pub y0: u16,
    pub size: u16,
}

/// Splits the grid into non-overlapping `window`×`window` areas anchored at
/// the origin, in row-major order. Right and bottom margins narrower than
/// `window` are left out.
pub fn split_windows(grid: &VoxelGrid, window: u16) -> Result<Vec<AreaRef>, GridError> {
    window_layout(grid.width(), grid.height(), window)
}

/// Window layout for a `width`×`height` pixel plane.
pub fn window_layout(width: u16, height: u16, window: u16) -> Result<Vec<AreaRef>, GridError> {
    if window == 0 {
        return Err(GridError::InvalidWindowSize);
    }
    let cols = width / window;
    let rows = height / window;
    if cols == 0 || rows == 0 {
        return Err(GridError::WindowTooLarge {
            window,
            width,
            height,
        });
    }
    let mut areas = Vec::with_capacity(cols as usize * rows as usize);
    for j in 0..rows {
        for i in 0..cols {
            areas.push(AreaRef {
                index: areas.len(),
                x0: i * window,
                y0: j * window,
                size: window,
            });
        }
    }
    Ok(areas)
}

#[derive(Clone, Copy, Debug)]
pub struct AreaView<'a> {
    grid: &'a VoxelGrid,
    area: AreaRef,
}

impl<'a> AreaView<'a> {
    pub fn area(&self) -> &AreaRef {
        &self.area
    }

    pub fn depth(&self) -> usize {
        self.grid.depth
    }

    pub fn t_quant_us(&self) -> u64 {
        self.grid.t_quant_us
    }

    /// Cell runs of every pixel in the window, row-major.
    pub fn pixels(&self) -> impl Iterator<Item = &'a [Cell]> + 'a {
        let AreaRef { x0, y0, size, .. } = self.area;
        let grid = self.grid;
        (y0..y0 + size).flat_map(move |y| (x0..x0 + size).map(move |x| grid.pixel_cells(x, y)))
    }

    /// Total raw events in the window.
    pub fn event_count(&self) -> u64 {
        self.pixels()
            .flat_map(|cells| cells.iter())
            .map(|c| c.events as u64)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{validate_stream, Event};

    fn stream(raw: &[(i64, i64, bool, i64)], w: u16, h: u16) -> EventStream {
        validate_stream(raw, w, h).unwrap()
    }

    #[test]
    fn single_positive_event() {
        let s = stream(&[(1, 2, true, 50)], 4, 4);
        let g = quantize(&s, 100, None).unwrap();
        assert_eq!(g.depth(), 1);
        let dense = g.to_dense();
        assert_eq!(dense.iter().filter(|&&v| v != 0).count(), 1);
        assert_eq!(g.value(1, 2, 0), 1);
    }

    #[test]
    fn last_event_wins_within_bin() {
        let s = stream(&[(0, 0, true, 10), (0, 0, false, 90)], 2, 2);
        let g = quantize(&s, 100, None).unwrap();
        assert_eq!(g.value(0, 0, 0), -1);
        assert_eq!(g.pixel_cells(0, 0)[0].events, 2);
        assert_eq!(g.nonzero_count(), 1);
        assert_eq!(g.event_count(), 2);
    }

    #[test]
    fn identical_timestamps_use_input_order() {
        let s = stream(&[(0, 0, false, 40), (0, 0, true, 40)], 1, 1);
        let g = quantize(&s, 100, None).unwrap();
        assert_eq!(g.value(0, 0, 0), 1);
    }

    #[test]
    fn floor_bin_assignment() {
        let s = stream(&[(0, 0, true, 250)], 1, 1);
        let g = quantize(&s, 100, None).unwrap();
        assert_eq!(g.depth(), 3);
        assert_eq!(g.value(0, 0, 2), 1);
        assert_eq!(g.value(0, 0, 1), 0);
    }

    #[test]
    fn roi_crops_and_rebases() {
        let s = stream(&[(0, 0, true, 0), (3, 2, false, 100), (2, 1, true, 5)], 4, 4);
        let g = quantize(&s, 100, Some(Roi::new(2, 1, 2, 2))).unwrap();
        assert_eq!((g.width(), g.height()), (2, 2));
        assert_eq!(g.origin(), (2, 1));
        assert_eq!(g.event_count(), 2);
        assert_eq!(g.value(0, 0, 0), 1);
        assert_eq!(g.value(1, 1, 1), -1);
    }

    #[test]
    fn errors() {
        let s = stream(&[(0, 0, true, 0)], 4, 4);
        assert_eq!(
            quantize(&s, 100, Some(Roi::new(2, 2, 2, 2))).unwrap_err(),
            GridError::EmptyStream
        );
        assert_eq!(
            quantize(&s, 100, Some(Roi::new(3, 3, 2, 2))).unwrap_err(),
            GridError::InvalidRoi(Roi::new(3, 3, 2, 2))
        );
        assert_eq!(quantize(&s, 0, None).unwrap_err(), GridError::InvalidQuantization);
        let empty = EventStream::empty(4, 4);
        assert_eq!(quantize(&empty, 100, None).unwrap_err(), GridError::EmptyStream);
    }

    fn grid_of(w: u16, h: u16) -> VoxelGrid {
        let s = EventStream::new(vec![Event::new(0, 0, true, 0)], w, h, 1).unwrap();
        quantize(&s, 1, None).unwrap()
    }

    #[test]
    fn windows_square_grid() {
        let areas = split_windows(&grid_of(90, 90), 45).unwrap();
        let corners: Vec<_> = areas.iter().map(|a| (a.x0, a.y0)).collect();
        assert_eq!(corners, vec![(0, 0), (45, 0), (0, 45), (45, 45)]);
        assert!(areas.iter().enumerate().all(|(i, a)| a.index == i && a.size == 45));
    }

    #[test]
    fn windows_drop_margin() {
        let areas = split_windows(&grid_of(100, 90), 45).unwrap();
        assert_eq!(areas.len(), 4);
        assert!(areas.iter().all(|a| a.x0 + a.size <= 90));
    }

    #[test]
    fn window_too_large() {
        assert!(matches!(
            split_windows(&grid_of(44, 44), 45),
            Err(GridError::WindowTooLarge { .. })
        ));
        assert_eq!(split_windows(&grid_of(4, 4), 0), Err(GridError::InvalidWindowSize));
    }

    #[test]
    fn area_view_counts_events() {
        let s = stream(
            &[(0, 0, true, 0), (0, 0, false, 10), (1, 1, true, 300), (3, 3, true, 0)],
            4,
            4,
        );
        let g = quantize(&s, 100, None).unwrap();
        let areas = split_windows(&g, 2).unwrap();
        let view = g.area(&areas[0]);
        assert_eq!(view.event_count(), 3);
        assert_eq!(view.pixels().count(), 4);
        assert_eq!(g.area(&areas[3]).event_count(), 1);
    }
}
