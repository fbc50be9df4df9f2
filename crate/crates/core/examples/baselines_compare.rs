//! Runs the correlation estimator and both per-pixel baselines on the same
//! scenes, with and without background noise.

use eeppr::baselines::{fft_baseline, simple_baseline, FftBaselineConfig};
use eeppr::synth::{generate, noise_rate_for_fraction, SynthSpec};
use eeppr::{estimate, EepprConfig};

fn show(r: Result<f64, String>) -> String {
    match r {
        Ok(hz) => format!("{hz:>10.2}"),
        Err(e) => format!("{:>10}", e.chars().take(10).collect::<String>()),
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenes = [
        SynthSpec::flash(800.0, 1_000_000),
        SynthSpec::rotating_dot(40.0, 1_000_000),
        SynthSpec::vibrating_edge(98.0, 1_000_000),
    ];
    println!("{:<16} {:>6} {:>10} {:>10} {:>10}", "scene", "noise", "eeppr", "simple", "fft");
    for spec in scenes {
        for fraction in [0.0, 0.1] {
            let noise = noise_rate_for_fraction(&spec, fraction)?;
            let stream = generate(&spec.clone().with_noise(noise))?;
            let e = estimate(&stream, &EepprConfig::default(), None).map(|r| r.rate_hz);
            let s = simple_baseline(&stream, 45, None).map(|r| r.rate_hz);
            let f = fft_baseline(&stream, &FftBaselineConfig::default(), None).map(|r| r.rate_hz);
            println!(
                "{:<16} {:>5.0}% {} {} {}",
                format!("{:?} {}", spec.kind, spec.rate_hz),
                fraction * 100.0,
                show(e.map_err(|e| e.to_string())),
                show(s.map_err(|e| e.to_string())),
                show(f.map_err(|e| e.to_string()))
            );
        }
    }
    Ok(())
}
