//! Event files.
//!
//! Text: one event per line as `t_us,x,y,p` with `p ∈ {0, 1}`, optionally
//! preceded by a `t,x,y,p` header line.
//!
//! Binary (little-endian):
//!
//! ```text
//! offset  size  field
//!      0     4  magic "EVS1" (format version 1)
//!      4     2  width  u16
//!      6     2  height u16
//!      8     8  event_count u64
//!     16     8  duration_us u64
//!     24  16·n  records: t u64, x u16, y u16, p u8 (0/1), 3 zero bytes
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{Event, EventStream, RawEvent, StreamError};

pub const MAGIC: &[u8; 4] = b"EVS1";
pub const HEADER_LEN: usize = 24;
pub const RECORD_LEN: usize = 16;

#[derive(Debug, Error)]
pub enum EventIoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    ParseError { line: usize, msg: String },
    #[error("not an EVS1 event file")]
    BadMagic,
    #[error("file ends in the middle of the header or of a record")]
    TruncatedFile,
    #[error("header declares {declared} events but the file holds {found}")]
    CountMismatch { declared: u64, found: u64 },
    #[error("record {0} has a polarity byte other than 0 or 1")]
    InvalidRecord(usize),
    #[error(transparent)]
    Stream(#[from] StreamError),
}

impl EventIoError {
    /// 1-based line number of a text parse error.
    pub fn line(&self) -> Option<usize> {
        match self {
            EventIoError::ParseError { line, .. } => Some(*line),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Auto,
    Text,
    Binary,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Format::Auto),
            "text" | "csv" => Ok(Format::Text),
            "binary" | "evs" => Ok(Format::Binary),
            _ => Err(format!("unknown format {s:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReadOptions {
    /// Sensor width; inferred from the data when `None` (text only).
    pub width: Option<u16>,
    pub height: Option<u16>,
    /// Reject out-of-order files instead of re-sorting them.
    pub strict: bool,
}

/// Reads a file in the given format; `Auto` sniffs the binary magic.
pub fn read_events(
    path: impl AsRef<Path>,
    format: Format,
    opts: &ReadOptions,
) -> Result<EventStream, EventIoError> {
    let path = path.as_ref();
    let format = match format {
        Format::Auto => {
            let mut head = [0u8; 4];
            let mut f = File::open(path)?;
            let n = f.read(&mut head)?;
            if n == 4 && &head == MAGIC {
                Format::Binary
            } else {
                Format::Text
            }
        }
        f => f,
    };
    match format {
        Format::Binary => read_binary_with(path, opts.strict),
        _ => read_text(path, opts),
    }
}

pub fn read_text(path: impl AsRef<Path>, opts: &ReadOptions) -> Result<EventStream, EventIoError> {
    parse_text(BufReader::new(File::open(path)?), opts)
}

/// Parses text events from any reader.
pub fn parse_text(reader: impl BufRead, opts: &ReadOptions) -> Result<EventStream, EventIoError> {
    let mut raw: Vec<RawEvent> = Vec::new();
    let (mut max_x, mut max_y) = (0i64, 0i64);
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if raw.is_empty() && line_no == 1 && is_header(line) {
            continue;
        }
        let err = |msg: String| EventIoError::ParseError { line: line_no, msg };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", fields.len())));
        }
        let num = |s: &str, name: &str| {
            s.parse::<i64>()
                .map_err(|e| err(format!("bad {name} {s:?}: {e}")))
        };
        let t = num(fields[0], "timestamp")?;
        let x = num(fields[1], "x")?;
        let y = num(fields[2], "y")?;
        let p = match fields[3] {
            "0" => false,
            "1" => true,
            other => return Err(err(format!("polarity must be 0 or 1, got {other:?}"))),
        };
        if t < 0 || x < 0 || y < 0 || x > u16::MAX as i64 - 1 || y > u16::MAX as i64 - 1 {
            return Err(err("value out of range".into()));
        }
        max_x = max_x.max(x);
        max_y = max_y.max(y);
        raw.push((x, y, p, t));
    }
    let width = opts.width.unwrap_or(if raw.is_empty() { 0 } else { max_x as u16 + 1 });
    let height = opts.height.unwrap_or(if raw.is_empty() { 0 } else { max_y as u16 + 1 });
    check_order(raw.iter().map(|e| e.3 as u64), opts.strict)?;
    Ok(crate::event::validate_stream(&raw, width, height)?)
}

fn is_header(line: &str) -> bool {
    line.split(',')
        .next()
        .is_some_and(|f| f.trim().parse::<i64>().is_err())
}

fn check_order(times: impl Iterator<Item = u64>, strict: bool) -> Result<(), EventIoError> {
    let mut prev = 0u64;
    for (i, t) in times.enumerate() {
        if t < prev {
            if strict {
                return Err(StreamError::Unsorted(i).into());
            }
            log::warn!("events are not time-ordered (first at index {i}); re-sorting");
            return Ok(());
        }
        prev = t;
    }
    Ok(())
}

pub fn write_text(stream: &EventStream, path: impl AsRef<Path>) -> Result<(), EventIoError> {
    let mut w = BufWriter::new(File::create(path)?);
    write_text_to(stream, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_text_to(stream: &EventStream, w: &mut impl Write) -> std::io::Result<()> {
    writeln!(w, "t,x,y,p")?;
    for e in stream.events() {
        writeln!(w, "{},{},{},{}", e.t, e.x, e.y, e.p as u8)?;
    }
    Ok(())
}

/// Serializes a stream to the binary layout.
pub fn encode_binary(stream: &EventStream) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + RECORD_LEN * stream.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&stream.width().to_le_bytes());
    out.extend_from_slice(&stream.height().to_le_bytes());
    out.extend_from_slice(&(stream.len() as u64).to_le_bytes());
    out.extend_from_slice(&stream.duration_us().to_le_bytes());
    for e in stream.events() {
        out.extend_from_slice(&e.t.to_le_bytes());
        out.extend_from_slice(&e.x.to_le_bytes());
        out.extend_from_slice(&e.y.to_le_bytes());
        out.extend_from_slice(&[e.p as u8, 0, 0, 0]);
    }
    out
}

pub fn write_binary(stream: &EventStream, path: impl AsRef<Path>) -> Result<(), EventIoError> {
    let mut f = BufWriter::new(File::create(path)?);
    f.write_all(&encode_binary(stream))?;
    f.flush()?;
    Ok(())
}

pub fn read_binary(path: impl AsRef<Path>) -> Result<EventStream, EventIoError> {
    read_binary_with(path, false)
}

pub fn read_binary_with(path: impl AsRef<Path>, strict: bool) -> Result<EventStream, EventIoError> {
    decode_binary(&std::fs::read(path)?, strict)
}

fn le_u16(b: &[u8]) -> u16 {
    u16::from_le_bytes([b[0], b[1]])
}

fn le_u64(b: &[u8]) -> u64 {
    u64::from_le_bytes(b[..8].try_into().expect("8 bytes"))
}

/// Parses the binary layout. Out-of-order records are re-sorted (with a
/// warning) unless `strict` is set.
pub fn decode_binary(bytes: &[u8], strict: bool) -> Result<EventStream, EventIoError> {
    if bytes.len() >= 4 && &bytes[..4] != MAGIC {
        return Err(EventIoError::BadMagic);
    }
    if bytes.len() < HEADER_LEN {
        return Err(EventIoError::TruncatedFile);
    }
    let width = le_u16(&bytes[4..]);
    let height = le_u16(&bytes[6..]);
    let declared = le_u64(&bytes[8..]);
    let duration_us = le_u64(&bytes[16..]);
    let body = &bytes[HEADER_LEN..];
    if body.len() % RECORD_LEN != 0 {
        return Err(EventIoError::TruncatedFile);
    }
    let found = (body.len() / RECORD_LEN) as u64;
    if found != declared {
        return Err(EventIoError::CountMismatch { declared, found });
    }
    let mut events = Vec::with_capacity(found as usize);
    for (i, r) in body.chunks_exact(RECORD_LEN).enumerate() {
        let p = match r[12] {
            0 => false,
            1 => true,
            _ => return Err(EventIoError::InvalidRecord(i)),
        };
        events.push(Event::new(le_u16(&r[8..]), le_u16(&r[10..]), p, le_u64(r)));
    }
    check_order(events.iter().map(|e| e.t), strict)?;
    if events.windows(2).any(|w| w[1].t < w[0].t) {
        events.sort_by_key(|e| e.t);
    }
    Ok(EventStream::new(events, width, height, duration_us)?)
}
