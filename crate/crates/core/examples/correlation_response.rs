//! Prints the normalised template response of the first accepted window
//! together with the detected peaks, as a coarse text plot.

use eeppr::estimator::{correlate_time, detect_peaks, estimate_grid, Template};
use eeppr::synth::{generate, SynthSpec};
use eeppr::voxel::window_layout;
use eeppr::{quantize, EepprConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = EepprConfig::default();
    let spec = SynthSpec::rotating_line(50.0, 200_000).with_noise(20.0);
    let grid = quantize(&generate(&spec)?, cfg.t_quant_us, None)?;
    let est = estimate_grid(&grid, &cfg)?;
    let Some(w) = est.windows.iter().find(|w| w.is_accepted()) else {
        return Err("no accepted window".into());
    };
    let area = window_layout(grid.width(), grid.height(), cfg.window)?[w.area_index];
    let view = grid.area(&area);
    let template = Template::leading(&view, w.template_depth_bins.unwrap_or(1));
    let response = correlate_time(&view, &template, false)?.normalized();
    let peaks = detect_peaks(&response, &cfg.peak);

    println!(
        "window at ({}, {}), template {} bins, {} lags, peaks at {:?}, period {:?} us",
        area.x0,
        area.y0,
        template.depth_bins,
        response.len(),
        peaks,
        w.period_us
    );
    for lag in (0..response.len()).step_by(10) {
        let v = response.scores[lag];
        let mark = if peaks.iter().any(|p| p / 10 == lag / 10) { '*' } else { ' ' };
        println!("{lag:>5} {mark} {}", "#".repeat((v * 60.0).round() as usize));
    }
    Ok(())
}
