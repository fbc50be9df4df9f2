//! Generates every scene kind, writes it in both file formats and reads it
//! back.

use eeppr::io::{read_binary, read_text, write_binary, write_text, ReadOptions};
use eeppr::synth::{generate, SynthSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("eeppr-synth-and-io");
    std::fs::create_dir_all(&dir)?;
    let specs = [
        SynthSpec::flash(100.0, 200_000),
        SynthSpec::rotating_line(20.0, 200_000),
        SynthSpec::rotating_dot(40.0, 200_000),
        SynthSpec::vibrating_edge(98.0, 200_000),
        SynthSpec::translating_pattern(25.0, 200_000),
    ];
    for spec in specs {
        let stream = generate(&spec.clone().with_noise(50.0).with_seed(3))?;
        let name = format!("{:?}", spec.kind).to_lowercase();
        let bin = dir.join(format!("{name}.evs"));
        let txt = dir.join(format!("{name}.txt"));
        write_binary(&stream, &bin)?;
        write_text(&stream, &txt)?;
        let from_bin = read_binary(&bin)?;
        let opts = ReadOptions { width: Some(stream.width()), height: Some(stream.height()), ..Default::default() };
        let from_txt = read_text(&txt, &opts)?;
        println!(
            "{name:<20} {:>7} events, {:>8} bytes binary, {:>8} bytes text, round trip ok: {}",
            stream.len(),
            std::fs::metadata(&bin)?.len(),
            std::fs::metadata(&txt)?.len(),
            from_bin.events() == stream.events() && from_txt.events() == stream.events()
        );
    }
    println!("files in {}", dir.display());
    Ok(())
}
