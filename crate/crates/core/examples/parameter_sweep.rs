//! Sweeps window size and template event count over the built-in suite with
//! background noise and timing jitter.

use eeppr::bench::{format_sweep, sweep, synthetic_suite, Source};
use eeppr::EepprConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut suite = synthetic_suite(0.1);
    for s in &mut suite {
        if let Source::Synth { spec } = &mut s.source {
            spec.jitter_us = 30.0;
        }
    }
    let table = sweep(&[30, 45, 60, 75], &[100, 1800], &suite, &EepprConfig::default())?;
    print!("{}", format_sweep(&table));
    Ok(())
}
