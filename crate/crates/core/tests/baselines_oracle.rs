mod common;

use common::{dft_magnitudes, peak_index, simple_baseline_reference, windowed_impulses};
use eeppr::baselines::{fft_baseline, simple_baseline, FftBaselineConfig, Polarity};
use eeppr::validate_stream;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn simple_baseline_matches_reference_on_random_streams() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..20 {
        let (w, h) = (rng.random_range(4..40u16), rng.random_range(4..40u16));
        let window = rng.random_range(1..=w.min(h));
        let n = rng.random_range(10..10_000);
        let raw: Vec<_> = (0..n)
            .map(|_| {
                (
                    rng.random_range(0..w as i64),
                    rng.random_range(0..h as i64),
                    rng.random_bool(0.5),
                    rng.random_range(0..200_000i64),
                )
            })
            .collect();
        let stream = validate_stream(&raw, w, h).unwrap();
        let (rates, agg) = simple_baseline_reference(stream.events(), w, h, window);
        match simple_baseline(&stream, window, None) {
            Ok(r) => {
                assert_eq!(r.window_rates_hz, rates, "case {case}");
                assert_eq!(Some(r.rate_hz), agg, "case {case}");
            }
            Err(_) => assert_eq!(agg, None, "case {case}"),
        }
    }
}

#[test]
fn simple_baseline_matches_reference_on_ten_thousand_periodic_events() {
    let mut raw = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    while raw.len() < 10_000 {
        let (x, y) = (rng.random_range(0..30i64), rng.random_range(0..30i64));
        let period = [400i64, 500, 650][rng.random_range(0..3)];
        let phase = rng.random_range(0..period);
        for k in 0..8 {
            raw.push((x, y, k % 2 == 0, phase + k * period / 2));
        }
    }
    raw.truncate(10_000);
    let stream = validate_stream(&raw, 30, 30).unwrap();
    let (rates, agg) = simple_baseline_reference(stream.events(), 30, 30, 10);
    let r = simple_baseline(&stream, 10, None).unwrap();
    assert_eq!(r.window_rates_hz, rates);
    assert_eq!(Some(r.rate_hz), agg);
}

#[test]
fn fft_per_pixel_peaks_match_direct_dft() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (w, h) = (5u16, 3u16);
    let duration = 60_000i64;
    let mut raw = Vec::new();
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let period = rng.random_range(900..4000i64);
            let mut t = rng.random_range(0..period);
            while t < duration {
                raw.push((x, y, false, t + rng.random_range(0..150)));
                raw.push((x, y, true, t + period / 3));
                t += period;
            }
        }
    }
    raw.retain(|e| e.3 < duration);
    let stream = validate_stream(&raw, w, h).unwrap();
    let cfg = FftBaselineConfig {
        polarity: Polarity::Negative,
        bin_us: 50,
        n_fft: Some(1500),
    };
    let r = fft_baseline(&stream, &cfg, None).unwrap();
    let samples = (stream.duration_us().div_ceil(50) as usize).min(1500);
    for y in 0..h {
        for x in 0..w {
            let times: Vec<u64> = stream
                .events()
                .iter()
                .filter(|e| e.x == x && e.y == y && !e.p)
                .map(|e| e.t)
                .collect();
            let mags = dft_magnitudes(&windowed_impulses(&times, 50, samples), 1500);
            let want = peak_index(&mags).unwrap();
            let got = r.raw.get(x, y).unwrap() as usize;
            // Equal up to rounding of near-tied magnitudes.
            assert!(
                got == want || (mags[got] - mags[want]).abs() <= 1e-9 * mags[want],
                "pixel ({x}, {y}): {got} vs {want}"
            );
        }
    }
}

#[test]
fn fft_single_pixel_comb() {
    let raw: Vec<_> = (0..200).map(|k| (0i64, 0i64, false, k * 500)).collect();
    let stream = validate_stream(&raw, 1, 1).unwrap();
    let times: Vec<u64> = stream.events().iter().map(|e| e.t).collect();
    let samples = stream.duration_us().div_ceil(100) as usize;

    // A comb with a 5-sample period has equal magnitude at every harmonic;
    // with 8192 points the 4 kHz harmonic sits closer to a bin centre.
    let cfg = FftBaselineConfig {
        polarity: Polarity::Negative,
        bin_us: 100,
        n_fft: Some(8192),
    };
    let r = fft_baseline(&stream, &cfg, None).unwrap();
    let want = peak_index(&dft_magnitudes(&windowed_impulses(&times, 100, samples), 8192)).unwrap();
    assert_eq!(r.raw.get(0, 0), Some(want as u32));
    assert_eq!(want, 3277);

    // With a length divisible by 5 the harmonics tie exactly and the lowest wins.
    let cfg = FftBaselineConfig {
        n_fft: Some(10_000),
        ..cfg
    };
    let r = fft_baseline(&stream, &cfg, None).unwrap();
    assert_eq!(r.rate_hz, 2000.0);
}

#[test]
fn fft_depends_only_on_selected_polarity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let base: Vec<_> = (0..400).map(|k| (k % 4, 0i64, false, k * 250)).collect();
    let noise: Vec<_> = (0..400)
        .map(|_| (rng.random_range(0..4i64), 0i64, true, rng.random_range(0..99_750i64)))
        .collect();
    let clean = validate_stream(&base, 4, 1).unwrap();
    let mixed = validate_stream(&[base.clone(), noise].concat(), 4, 1).unwrap();
    let cfg = FftBaselineConfig {
        n_fft: Some(1024),
        ..Default::default()
    };
    let a = fft_baseline(&clean, &cfg, None).unwrap();
    let b = fft_baseline(&mixed, &cfg, None).unwrap();
    assert_eq!(a.raw, b.raw);
    assert_eq!(a.rate_hz, b.rate_hz);
}
