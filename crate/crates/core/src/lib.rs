//! Rate estimation of periodic phenomena (rotation, flicker, vibration,
//! repetitive motion) from event-camera streams.
//!
//! The main estimator ([`estimator::estimate`]) quantizes events into a
//! ternary voxel grid and correlates per-window templates along the time
//! axis. Two per-pixel baselines ([`baselines`]), a synthetic stream
//! generator with exact ground truth ([`synth`]), text and binary event
//! files ([`io`]) and an evaluation harness ([`bench`]) complete the crate.
//!
//! ```no_run
//! use eeppr::{estimate, synth::SynthSpec, EepprConfig};
//!
//! let spec = SynthSpec::flash(2000.0, 1_000_000);
//! let stream = eeppr::synth::generate(&spec).unwrap();
//! let est = estimate(&stream, &EepprConfig::default(), None).unwrap();
//! println!("{:.1} Hz", est.rate_hz);
//! ```

pub mod baselines;
pub mod bench;
pub mod cli;
pub mod estimator;
pub mod event;
pub mod io;
pub mod stats;
pub mod synth;
pub mod voxel;

pub use estimator::{estimate, EepprConfig, EstimateError, RateEstimate};
pub use event::{validate_stream, Event, EventStream, Roi, StreamError};
pub use voxel::{quantize, split_windows, AreaRef, VoxelGrid};
