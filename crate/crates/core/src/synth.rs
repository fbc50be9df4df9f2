//! Synthetic event streams with exact ground-truth rates.
//!
//! Emission is geometric: a pixel fires when a moving dark feature starts or
//! stops covering its centre (negative on entry, positive on exit), or when a
//! flashing region switches on or off. Crossing times are solved analytically
//! and rounded half-up to integer microseconds.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::event::{Event, EventStream, Roi};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    Flash,
    RotatingLine,
    RotatingDot,
    VibratingEdge,
    TranslatingPattern,
}

impl std::str::FromStr for SynthKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "flash" => Ok(Self::Flash),
            "rotating_line" => Ok(Self::RotatingLine),
            "rotating_dot" => Ok(Self::RotatingDot),
            "vibrating_edge" => Ok(Self::VibratingEdge),
            "translating_pattern" => Ok(Self::TranslatingPattern),
            _ => Err(format!("unknown synthetic kind {s:?}")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid synthetic spec: {0}")]
pub struct InvalidSpec(pub String);

/// Description of one synthetic scene.
///
/// Which geometry fields matter depends on `kind`:
/// - `Flash`: `region` flashes with duty cycle `duty`.
/// - `RotatingLine`: a radius of length `radius` and width `line_width`
///   turns about `center`.
/// - `RotatingDot`: a dot of radius `dot_radius` orbits `center` at `radius`.
/// - `VibratingEdge`: horizontal dark/bright bands of pitch `spacing_px`
///   inside `region` oscillate vertically with amplitude `amplitude_px`.
/// - `TranslatingPattern`: vertical stripes of pitch `spacing_px` inside
///   `region` move horizontally, one pitch per period; `duty` is the dark
///   fraction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub rate_hz: f64,
    pub duration_us: u64,
    pub width: u16,
    pub height: u16,
    /// Active region; `None` means the whole sensor.
    pub region: Option<Roi>,
    /// Rotation centre; `None` means the sensor centre.
    pub center: Option<(f64, f64)>,
    pub radius: f64,
    pub dot_radius: f64,
    pub line_width: f64,
    pub amplitude_px: f64,
    pub spacing_px: f64,
    pub duty: f64,
    /// Standard deviation of Gaussian timestamp noise.
    pub jitter_us: f64,
    /// Uniform background events per pixel per second.
    pub noise_rate: f64,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            kind: SynthKind::Flash,
            rate_hz: 100.0,
            duration_us: 1_000_000,
            width: 128,
            height: 128,
            region: None,
            center: None,
            radius: 40.0,
            dot_radius: 6.0,
            line_width: 1.0,
            amplitude_px: 3.0,
            spacing_px: 16.0,
            duty: 0.5,
            jitter_us: 0.0,
            noise_rate: 0.0,
            seed: 0,
        }
    }
}

impl SynthSpec {
    /// Flashing 64×64 patch in the middle of a 256×256 sensor.
    pub fn flash(rate_hz: f64, duration_us: u64) -> Self {
        Self {
            kind: SynthKind::Flash,
            rate_hz,
            duration_us,
            width: 256,
            height: 256,
            region: Some(Roi::new(96, 96, 64, 64)),
            ..Default::default()
        }
    }

    pub fn rotating_line(rate_hz: f64, duration_us: u64) -> Self {
        Self {
            kind: SynthKind::RotatingLine,
            rate_hz,
            duration_us,
            center: Some((64.0, 64.0)),
            radius: 40.0,
            ..Default::default()
        }
    }

    pub fn rotating_dot(rate_hz: f64, duration_us: u64) -> Self {
        Self {
            kind: SynthKind::RotatingDot,
            rate_hz,
            duration_us,
            center: Some((64.0, 64.0)),
            radius: 30.0,
            dot_radius: 8.0,
            ..Default::default()
        }
    }

    pub fn vibrating_edge(rate_hz: f64, duration_us: u64) -> Self {
        Self {
            kind: SynthKind::VibratingEdge,
            rate_hz,
            duration_us,
            width: 90,
            height: 90,
            ..Default::default()
        }
    }

    pub fn translating_pattern(rate_hz: f64, duration_us: u64) -> Self {
        Self {
            kind: SynthKind::TranslatingPattern,
            rate_hz,
            duration_us,
            width: 90,
            height: 90,
            spacing_px: 24.0,
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_noise(mut self, noise_rate: f64) -> Self {
        self.noise_rate = noise_rate;
        self
    }

    pub fn period_us(&self) -> f64 {
        1e6 / self.rate_hz
    }

    fn region(&self) -> Roi {
        self.region.unwrap_or_else(|| Roi::full(self.width, self.height))
    }

    fn center(&self) -> (f64, f64) {
        self.center
            .unwrap_or((self.width as f64 / 2.0, self.height as f64 / 2.0))
    }

    pub fn validate(&self) -> Result<(), InvalidSpec> {
        let bad = |m: String| Err(InvalidSpec(m));
        if !(self.rate_hz.is_finite() && self.rate_hz > 0.0) {
            return bad(format!("rate must be positive, got {}", self.rate_hz));
        }
        if (self.duration_us as f64) < 2.0 * self.period_us() {
            return bad(format!(
                "duration {} us is shorter than two periods ({:.1} us)",
                self.duration_us,
                2.0 * self.period_us()
            ));
        }
        if self.width == 0 || self.height == 0 {
            return bad("sensor geometry is empty".into());
        }
        if !self.region().fits(self.width, self.height) {
            return bad(format!("region {:?} does not fit the sensor", self.region));
        }
        if !(self.jitter_us >= 0.0 && self.jitter_us.is_finite()) {
            return bad("jitter must be non-negative".into());
        }
        if !(self.noise_rate >= 0.0 && self.noise_rate.is_finite()) {
            return bad("noise rate must be non-negative".into());
        }
        match self.kind {
            SynthKind::Flash | SynthKind::TranslatingPattern
                if !(self.duty > 0.0 && self.duty < 1.0) =>
            {
                bad(format!("duty must be in (0, 1), got {}", self.duty))
            }
            SynthKind::RotatingLine | SynthKind::RotatingDot if !(self.radius > 0.0) => {
                bad("radius must be positive".into())
            }
            SynthKind::RotatingLine if !(self.line_width > 0.0) => {
                bad("line width must be positive".into())
            }
            SynthKind::RotatingDot if !(self.dot_radius > 0.0) => {
                bad("dot radius must be positive".into())
            }
            SynthKind::VibratingEdge if !(self.amplitude_px >= 0.0) => {
                bad("amplitude must be non-negative".into())
            }
            SynthKind::VibratingEdge if !(self.spacing_px > 0.0) => {
                bad("band pitch must be positive".into())
            }
            SynthKind::TranslatingPattern if !(self.spacing_px > 0.0) => {
                bad("zero velocity: stripe pitch must be positive".into())
            }
            _ => Ok(()),
        }
    }
}

/// Generates the stream described by `spec`, dispatching on its kind.
pub fn generate(spec: &SynthSpec) -> Result<EventStream, InvalidSpec> {
    spec.validate()?;
    let clean = match spec.kind {
        SynthKind::Flash => flash_events(spec),
        SynthKind::RotatingLine => {
            let half = spec.line_width / 2.0;
            rotating_events(spec, |r| {
                if r > spec.radius {
                    None
                } else if r <= half {
                    Some(PI)
                } else {
                    Some((half / r).asin())
                }
            })
        }
        SynthKind::RotatingDot => {
            let (orbit, dot) = (spec.radius, spec.dot_radius);
            rotating_events(spec, |r| {
                if (r - orbit).abs() >= dot {
                    return None;
                }
                let c = (r * r + orbit * orbit - dot * dot) / (2.0 * r * orbit);
                Some(if c <= -1.0 { PI } else { c.min(1.0).acos() })
            })
        }
        SynthKind::VibratingEdge => vibrating_events(spec),
        SynthKind::TranslatingPattern => translating_events(spec),
    };
    Ok(finish(spec, clean))
}

fn check_kind(spec: &SynthSpec, kind: SynthKind) -> Result<(), InvalidSpec> {
    if spec.kind != kind {
        return Err(InvalidSpec(format!("expected a {kind:?} spec, got {:?}", spec.kind)));
    }
    Ok(())
}

pub fn gen_flash(spec: &SynthSpec) -> Result<EventStream, InvalidSpec> {
    check_kind(spec, SynthKind::Flash)?;
    generate(spec)
}

pub fn gen_rotating_line(spec: &SynthSpec) -> Result<EventStream, InvalidSpec> {
    check_kind(spec, SynthKind::RotatingLine)?;
    generate(spec)
}

pub fn gen_rotating_dot(spec: &SynthSpec) -> Result<EventStream, InvalidSpec> {
    check_kind(spec, SynthKind::RotatingDot)?;
    generate(spec)
}

pub fn gen_vibrating_edge(spec: &SynthSpec) -> Result<EventStream, InvalidSpec> {
    check_kind(spec, SynthKind::VibratingEdge)?;
    generate(spec)
}

pub fn gen_translating_pattern(spec: &SynthSpec) -> Result<EventStream, InvalidSpec> {
    check_kind(spec, SynthKind::TranslatingPattern)?;
    generate(spec)
}

/// Noise rate (events per pixel per second) whose expected event count is
/// `fraction` times the number of signal events `spec` produces without noise.
pub fn noise_rate_for_fraction(spec: &SynthSpec, fraction: f64) -> Result<f64, InvalidSpec> {
    if !(fraction >= 0.0 && fraction.is_finite()) {
        return Err(InvalidSpec(format!("noise fraction must be non-negative, got {fraction}")));
    }
    let clean = generate(&SynthSpec {
        noise_rate: 0.0,
        ..spec.clone()
    })?;
    let pixel_seconds = spec.width as f64 * spec.height as f64 * spec.duration_us as f64 * 1e-6;
    Ok(fraction * clean.len() as f64 / pixel_seconds)
}

/// Seconds to integer microseconds, rounding half up.
#[inline]
fn to_us(t_s: f64) -> i64 {
    (t_s * 1e6 + 0.5).floor() as i64
}

/// Raw timestamps are kept as `f64` seconds until jitter is applied.
struct Emission {
    t_s: f64,
    x: u16,
    y: u16,
    p: bool,
}

/// Times `phase + m·period` (seconds) inside `[0, duration)`.
fn repeats(phase_s: f64, period_s: f64, duration_s: f64) -> impl Iterator<Item = f64> {
    let phase = phase_s.rem_euclid(period_s);
    (0..)
        .map(move |m| phase + m as f64 * period_s)
        .take_while(move |&t| t < duration_s)
}

fn flash_events(spec: &SynthSpec) -> Vec<Emission> {
    let region = spec.region();
    let period = 1.0 / spec.rate_hz;
    let duration = spec.duration_us as f64 * 1e-6;
    let mut out = Vec::new();
    for k in 0.. {
        let rise = k as f64 * period;
        if rise >= duration {
            break;
        }
        let fall = (k as f64 + spec.duty) * period;
        for (t_s, p) in [(rise, true), (fall, false)] {
            if t_s >= duration {
                continue;
            }
            for y in region.y..region.y + region.height {
                for x in region.x..region.x + region.width {
                    out.push(Emission { t_s, x, y, p });
                }
            }
        }
    }
    out
}

/// Rotating dark feature. `half_width(r)` gives the angular half-width of
/// the feature at radius `r` from the centre (`None` if never covered; `π`
/// or more if always covered).
fn rotating_events(spec: &SynthSpec, half_width: impl Fn(f64) -> Option<f64>) -> Vec<Emission> {
    let (cx, cy) = spec.center();
    let region = spec.region();
    let period = 1.0 / spec.rate_hz;
    let duration = spec.duration_us as f64 * 1e-6;
    let mut out = Vec::new();
    for y in region.y..region.y + region.height {
        for x in region.x..region.x + region.width {
            let (dx, dy) = (x as f64 + 0.5 - cx, y as f64 + 0.5 - cy);
            let r = dx.hypot(dy);
            let Some(delta) = half_width(r) else { continue };
            if delta >= PI {
                continue;
            }
            let theta = dy.atan2(dx);
            let enter = (theta - delta) / TAU * period;
            let exit = (theta + delta) / TAU * period;
            out.extend(repeats(enter, period, duration).map(|t_s| Emission { t_s, x, y, p: false }));
            out.extend(repeats(exit, period, duration).map(|t_s| Emission { t_s, x, y, p: true }));
        }
    }
    out
}

fn vibrating_events(spec: &SynthSpec) -> Vec<Emission> {
    let region = spec.region();
    let amp = spec.amplitude_px;
    let mut out = Vec::new();
    if amp == 0.0 {
        return out;
    }
    let period = 1.0 / spec.rate_hz;
    let duration = spec.duration_us as f64 * 1e-6;
    let omega = TAU * spec.rate_hz;
    let half_pitch = spec.spacing_px / 2.0;
    let edges = (region.height as f64 / half_pitch).ceil() as usize;
    for y in region.y..region.y + region.height {
        let yc = y as f64 + 0.5;
        for j in 0..edges {
            let rest = region.y as f64 + (j as f64 + 0.5) * half_pitch;
            let u = (yc - rest) / amp;
            if u.abs() >= 1.0 {
                continue;
            }
            // The edge passes the row moving down at `down`, up at `up`.
            let down = u.asin() / omega;
            let up = (PI - u.asin()) / omega;
            // Even edges have the dark band above them.
            let down_p = j % 2 == 1;
            for x in region.x..region.x + region.width {
                out.extend(repeats(down, period, duration).map(|t_s| Emission { t_s, x, y, p: down_p }));
                out.extend(repeats(up, period, duration).map(|t_s| Emission { t_s, x, y, p: !down_p }));
            }
        }
    }
    out
}

fn translating_events(spec: &SynthSpec) -> Vec<Emission> {
    let region = spec.region();
    let period = 1.0 / spec.rate_hz;
    let duration = spec.duration_us as f64 * 1e-6;
    let pitch = spec.spacing_px;
    let velocity = pitch * spec.rate_hz;
    let mut out = Vec::new();
    for x in region.x..region.x + region.width {
        // Phase (xc − v·t)/pitch falls through `duty` (dark starts) and
        // through 0 (dark ends) once per period.
        let xc = x as f64 + 0.5;
        let dark_from = (xc - spec.duty * pitch) / velocity;
        let dark_to = xc / velocity;
        for y in region.y..region.y + region.height {
            out.extend(repeats(dark_from, period, duration).map(|t_s| Emission { t_s, x, y, p: false }));
            out.extend(repeats(dark_to, period, duration).map(|t_s| Emission { t_s, x, y, p: true }));
        }
    }
    out
}

/// Applies jitter, adds background noise, rounds and sorts.
fn finish(spec: &SynthSpec, clean: Vec<Emission>) -> EventStream {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let duration = spec.duration_us as i64;
    let mut events = Vec::with_capacity(clean.len());
    let jitter = (spec.jitter_us > 0.0)
        .then(|| Normal::new(0.0, spec.jitter_us).expect("jitter validated"));
    let max_shift = spec.period_us() / 4.0;
    for e in clean {
        let mut t = e.t_s * 1e6;
        if let Some(n) = &jitter {
            t += n.sample(&mut rng).clamp(-max_shift, max_shift);
        }
        let t = to_us(t * 1e-6).max(0);
        if t < duration {
            events.push(Event::new(e.x, e.y, e.p, t as u64));
        }
    }
    let expected = spec.noise_rate
        * spec.width as f64
        * spec.height as f64
        * (spec.duration_us as f64 * 1e-6);
    if expected > 0.0 {
        let count = Poisson::new(expected).expect("noise rate validated").sample(&mut rng) as u64;
        events.reserve(count as usize);
        for _ in 0..count {
            let x = rng.random_range(0..spec.width);
            let y = rng.random_range(0..spec.height);
            let t = rng.random_range(0..spec.duration_us);
            let p = rng.random_bool(0.5);
            events.push(Event::new(x, y, p, t));
        }
    }
    events.sort_by_key(|e| e.t);
    EventStream::new(events, spec.width, spec.height, spec.duration_us)
        .expect("generated events respect the sensor geometry")
}
