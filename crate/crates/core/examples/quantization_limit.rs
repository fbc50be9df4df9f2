//! Shows how the time quantum bounds accuracy: a period that is not a whole
//! number of bins is reported as the nearest whole number of bins.

use eeppr::synth::{generate, SynthSpec};
use eeppr::{estimate, EepprConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>8} {:>6} {:>12} {:>12} {:>9}", "rate", "tq_us", "period_us", "estimate", "error_%");
    for rate in [240.0, 333.0, 1000.0, 1500.0] {
        let stream = generate(&SynthSpec::flash(rate, 1_000_000))?;
        for tq in [10, 50, 100] {
            let cfg = EepprConfig { t_quant_us: tq, ..EepprConfig::default() };
            match estimate(&stream, &cfg, None) {
                Ok(e) => println!(
                    "{rate:>8} {tq:>6} {:>12} {:>12.3} {:>9.3}",
                    e.period_us,
                    e.rate_hz,
                    (e.rate_hz - rate).abs() / rate * 100.0
                ),
                Err(e) => println!("{rate:>8} {tq:>6} {e}"),
            }
        }
    }
    Ok(())
}
