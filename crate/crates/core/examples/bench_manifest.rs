//! Loads a JSON scenario manifest, runs every method and writes a CSV report
//! next to a text summary.
//!
//! cargo run --release --example bench_manifest [manifest.json]

use eeppr::bench::{format_report, load_manifest, run_manifest, write_csv};

const DEMO: &str = r#"[
  {"id": "led-2khz", "source": {"type": "synth", "spec": {"kind": "flash", "rate_hz": 2000.0,
    "duration_us": 1000000, "width": 128, "height": 128}}, "gt_rate_hz": 2000.0},
  {"id": "fan-20hz", "source": {"type": "synth", "spec": {"kind": "rotating_line", "rate_hz": 20.0,
    "duration_us": 1000000, "noise_rate": 20.0}}, "gt_rate_hz": 20.0},
  {"id": "recording", "source": {"type": "file", "path": "missing.evs"}, "gt_rate_hz": 50.0}
]"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = match std::env::args().nth(1) {
        Some(p) => p.into(),
        None => {
            let p = std::env::temp_dir().join("eeppr-demo-manifest.json");
            std::fs::write(&p, DEMO)?;
            p
        }
    };
    let report = run_manifest(&load_manifest(&path)?);
    print!("{}", format_report(&report));
    let csv_path = path.with_extension("csv");
    write_csv(&report, std::fs::File::create(&csv_path)?)?;
    println!("csv written to {}", csv_path.display());
    Ok(())
}
