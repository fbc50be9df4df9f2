//! Estimates the rate of a synthetic 2 kHz flashing LED and prints the
//! per-window breakdown.
//!
//! cargo run --release --example estimate_flash [rate_hz]

use eeppr::synth::{generate, SynthSpec};
use eeppr::{estimate, EepprConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rate: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2000.0);
    let stream = generate(&SynthSpec::flash(rate, 1_000_000))?;
    println!("{} events on a {}x{} sensor", stream.len(), stream.width(), stream.height());

    let est = estimate(&stream, &EepprConfig::default(), None)?;
    println!(
        "rate {:.3} Hz, period {} us, {} accepted / {} rejected windows",
        est.rate_hz, est.period_us, est.accepted_windows, est.rejected_windows
    );
    for w in est.windows.iter().filter(|w| w.is_accepted()) {
        println!(
            "  window {:>3} at {:?}: {:>6} events, template {:?} bins, period {:?} us ({})",
            w.area_index,
            w.origin,
            w.window_events,
            w.template_depth_bins,
            w.period_us,
            w.status.label()
        );
    }
    Ok(())
}
