//! Events and validated event streams.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A single brightness-change event.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event {
    /// Timestamp in microseconds since stream start.
    pub t: u64,
    pub x: u16,
    pub y: u16,
    /// `true` for a positive (brighter) change.
    pub p: bool,
}

impl Event {
    pub const fn new(x: u16, y: u16, p: bool, t: u64) -> Self {
        Self { t, x, y, p }
    }

    /// Polarity as a signed unit value.
    #[inline]
    pub fn sign(&self) -> i8 {
        if self.p {
            1
        } else {
            -1
        }
    }
}

/// Raw event tuple as it comes out of a reader, before validation.
pub type RawEvent = (i64, i64, bool, i64);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StreamError {
    #[error("event {0} lies outside the sensor geometry")]
    OutOfRangeEvent(usize),
    #[error("event {0} has a negative timestamp")]
    NegativeTimestamp(usize),
    #[error("event {0} has a timestamp that does not fit in 63 bits")]
    TimestampOverflow(usize),
    #[error("events are not sorted by timestamp (first violation at index {0})")]
    Unsorted(usize),
    #[error("declared duration {duration_us} us does not cover last timestamp {last_t}")]
    DurationTooShort { duration_us: u64, last_t: u64 },
    #[error("sensor geometry {0}x{1} is empty")]
    EmptyGeometry(u32, u32),
}

/// Rectangular region of interest in sensor pixels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Roi {
    pub x: u16,
    pub y: u16,
    pub width: u16,
    pub height: u16,
}

impl Roi {
    pub const fn new(x: u16, y: u16, width: u16, height: u16) -> Self {
        Self {
            x,
            y,
            width,
            height,
        }
    }

    pub fn full(width: u16, height: u16) -> Self {
        Self::new(0, 0, width, height)
    }

    /// Whether the ROI is non-empty and lies inside a `width`×`height` sensor.
    pub fn fits(&self, width: u16, height: u16) -> bool {
        self.width > 0
            && self.height > 0
            && self.x as u32 + self.width as u32 <= width as u32
            && self.y as u32 + self.height as u32 <= height as u32
    }

    #[inline]
    pub fn contains(&self, x: u16, y: u16) -> bool {
        x >= self.x && y >= self.y && x - self.x < self.width && y - self.y < self.height
    }
}

impl std::str::FromStr for Roi {
    type Err = String;

    /// Parses `x,y,width,height`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(format!("expected x,y,width,height but got {s:?}"));
        }
        let mut vals = [0u16; 4];
        for (v, p) in vals.iter_mut().zip(&parts) {
            *v = p.parse().map_err(|e| format!("bad ROI component {p:?}: {e}"))?;
        }
        Ok(Roi::new(vals[0], vals[1], vals[2], vals[3]))
    }
}

/// Time-ordered events together with the sensor geometry they were captured on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventStream {
    events: Vec<Event>,
    width: u16,
    height: u16,
    duration_us: u64,
}

impl EventStream {
    /// Builds a stream from already sorted events, checking every invariant.
    pub fn new(
        events: Vec<Event>,
        width: u16,
        height: u16,
        duration_us: u64,
    ) -> Result<Self, StreamError> {
        check_geometry(&events, width, height)?;
        if let Some(i) = events.windows(2).position(|w| w[1].t < w[0].t) {
            return Err(StreamError::Unsorted(i + 1));
        }
        if let Some(last) = events.last() {
            if duration_us <= last.t {
                return Err(StreamError::DurationTooShort {
                    duration_us,
                    last_t: last.t,
                });
            }
        }
        Ok(Self {
            events,
            width,
            height,
            duration_us,
        })
    }

    /// Sorts (stably) and validates `events`, keeping the given duration or
    /// extending it to cover the last event.
    pub fn from_unsorted(
        mut events: Vec<Event>,
        width: u16,
        height: u16,
        duration_us: u64,
    ) -> Result<Self, StreamError> {
        events.sort_by_key(|e| e.t);
        let min_duration = events.last().map_or(0, |e| e.t + 1);
        Self::new(events, width, height, duration_us.max(min_duration))
    }

    pub fn empty(width: u16, height: u16) -> Self {
        Self {
            events: Vec::new(),
            width,
            height,
            duration_us: 0,
        }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn into_events(self) -> Vec<Event> {
        self.events
    }

    pub fn width(&self) -> u16 {
        self.width
    }

    pub fn height(&self) -> u16 {
        self.height
    }

    pub fn duration_us(&self) -> u64 {
        self.duration_us
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Events in `[start_us, start_us + len_us)`, re-based so the segment starts at 0.
    ///
    /// The returned duration is `len_us`, clipped to what remains of the stream.
    pub fn segment(&self, start_us: u64, len_us: u64) -> EventStream {
        let end = start_us.saturating_add(len_us);
        let lo = self.events.partition_point(|e| e.t < start_us);
        let hi = self.events.partition_point(|e| e.t < end);
        let events = self.events[lo..hi]
            .iter()
            .map(|e| Event { t: e.t - start_us, ..*e })
            .collect();
        let duration_us = self.duration_us.min(end).saturating_sub(start_us);
        EventStream {
            events,
            width: self.width,
            height: self.height,
            duration_us,
        }
    }

    /// Number of events that fall inside `roi`.
    pub fn count_in(&self, roi: &Roi) -> usize {
        self.events.iter().filter(|e| roi.contains(e.x, e.y)).count()
    }
}

fn check_geometry(events: &[Event], width: u16, height: u16) -> Result<(), StreamError> {
    if width == 0 || height == 0 {
        if events.is_empty() {
            return Ok(());
        }
        return Err(StreamError::EmptyGeometry(width as u32, height as u32));
    }
    for (i, e) in events.iter().enumerate() {
        if e.x >= width || e.y >= height {
            return Err(StreamError::OutOfRangeEvent(i));
        }
        if e.t > i64::MAX as u64 {
            return Err(StreamError::TimestampOverflow(i));
        }
    }
    Ok(())
}

/// Validates raw `(x, y, p, t)` tuples against a `width`×`height` sensor.
///
/// Events are stably sorted by timestamp and the duration is set to the last
/// timestamp plus one (zero for an empty input). Indices in errors refer to
/// the input order.
pub fn validate_stream(
    raw_events: &[RawEvent],
    width: u16,
    height: u16,
) -> Result<EventStream, StreamError> {
    let mut events = Vec::with_capacity(raw_events.len());
    for (i, &(x, y, p, t)) in raw_events.iter().enumerate() {
        if t < 0 {
            return Err(StreamError::NegativeTimestamp(i));
        }
        if x < 0 || y < 0 || x >= width as i64 || y >= height as i64 {
            return Err(StreamError::OutOfRangeEvent(i));
        }
        events.push(Event::new(x as u16, y as u16, p, t as u64));
    }
    events.sort_by_key(|e| e.t);
    let duration_us = events.last().map_or(0, |e| e.t + 1);
    Ok(EventStream {
        events,
        width,
        height,
        duration_us,
    })
}
