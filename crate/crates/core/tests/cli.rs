use std::path::Path;
use std::process::{Command, Output};

fn eeppr(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eeppr"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn synth_then_estimate_flash_2khz() {
    let dir = tempfile::tempdir().unwrap();
    let o = eeppr(dir.path(), &["synth", "flash", "--rate", "2000", "--duty", "0.5", "--duration", "1000000", "-o", "f.evs"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = eeppr(dir.path(), &["estimate", "f.evs"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("rate_hz: 2000.0"), "{}", stdout(&o));
    let o = eeppr(dir.path(), &["baseline", "simple", "f.evs"]);
    assert!(stdout(&o).contains("rate_hz: 2000.0"), "{}", stdout(&o));
}

#[test]
fn estimate_json_is_parseable_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let o = eeppr(dir.path(), &["--seed", "4", "synth", "rotating-line", "--rate", "40", "--noise-rate", "2", "-o", "l.evs"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let a = eeppr(dir.path(), &["--output", "json", "estimate", "l.evs"]);
    let b = eeppr(dir.path(), &["estimate", "l.evs", "--output", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["rate_hz"].as_f64(), Some(40.0));
    assert!(v["windows"].as_array().unwrap().iter().all(|w| w["status"].is_string()));
    assert_eq!(v["config"]["window"].as_u64(), Some(45));
}

#[test]
fn fft_baseline_on_240hz_flash() {
    let dir = tempfile::tempdir().unwrap();
    eeppr(dir.path(), &["synth", "flash", "--rate", "240", "-o", "f240.evs"]);
    let o = eeppr(dir.path(), &["--output", "json", "baseline", "fft", "--polarity", "negative", "f240.evs", "--dump-map", "map.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let (rate, bin) = (v["rate_hz"].as_f64().unwrap(), v["bin_hz"].as_f64().unwrap());
    assert!((rate - 240.0).abs() <= bin, "{rate}");
    let map = std::fs::read_to_string(dir.path().join("map.csv")).unwrap();
    assert_eq!(map.lines().count(), 64 * 64 + 1);
}

#[test]
fn errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = eeppr(dir.path(), &["estimate", "missing.evs"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.evs"));

    std::fs::write(dir.path().join("empty.csv"), "t,x,y,p\n").unwrap();
    let o = eeppr(dir.path(), &["estimate", "empty.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no valid windows"));

    std::fs::write(dir.path().join("bad.csv"), "0,1,1,1\n5,1,1,3\n").unwrap();
    let o = eeppr(dir.path(), &["estimate", "bad.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = eeppr(dir.path(), &["baseline", "fft", "--n-fft", "1", "empty.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let o = eeppr(dir.path(), &["synth", "flash", "--rate", "0", "-o", "x.evs"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("x.evs").exists());
    let o = eeppr(dir.path(), &["estimate", "--window", "0", "empty.csv"]);
    assert_eq!(o.status.code(), Some(1));
    let o = eeppr(dir.path(), &["--help"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn sparse_stream_has_no_valid_windows() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("few.csv"), "0,1,1,1\n900,2,2,0\n").unwrap();
    let o = eeppr(dir.path(), &["--width", "64", "estimate", "few.csv"]);
    assert_eq!(o.status.code(), Some(1), "--width is an input flag, not global");
    let o = eeppr(dir.path(), &["estimate", "few.csv", "--width", "64", "--height", "64"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("no valid windows"));
}

#[test]
fn roi_and_segment_flags_apply() {
    let dir = tempfile::tempdir().unwrap();
    eeppr(dir.path(), &["synth", "flash", "--rate", "500", "--duration", "2000000", "-o", "f.evs"]);
    let o = eeppr(dir.path(), &["--roi", "96,96,64,64", "--start-us", "500000", "estimate", "f.evs"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("rate_hz: 500.0"), "{out}");
    assert!(out.contains("rejected_windows: 0"), "{out}");
    let o = eeppr(dir.path(), &["--roi", "250,250,64,64", "estimate", "f.evs"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_manifest_writes_one_row_per_scenario_and_method() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = r#"[
      {"id": "gone", "source": {"type": "file", "path": "nope.evs"}, "gt_rate_hz": 20.0},
      {"id": "flash", "source": {"type": "synth", "spec": {"kind": "flash", "rate_hz": 40.0,
        "duration_us": 1000000, "width": 64, "height": 64}}, "gt_rate_hz": 40.0},
      {"id": "line", "source": {"type": "synth", "spec": {"kind": "rotating_line", "rate_hz": 20.0,
        "duration_us": 1000000}}, "gt_rate_hz": 20.0, "methods": ["eeppr"]}
    ]"#;
    std::fs::write(dir.path().join("suite.json"), manifest).unwrap();
    let o = eeppr(dir.path(), &["bench", "--manifest", "suite.json", "-o", "report.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut rdr = csv::Reader::from_path(dir.path().join("report.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3 + 3 + 1);
    let skipped = rows.iter().filter(|r| &r[0] == "gone").all(|r| &r[2] == "skipped");
    assert!(skipped);
    let line = rows.iter().find(|r| &r[0] == "line").unwrap();
    assert_eq!((&line[1], &line[2], &line[4]), ("eeppr", "ok", "20.0"));
}

#[test]
fn bench_sweep_prints_one_cell_per_window() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = r#"[
      {"id": "a", "source": {"type": "synth", "spec": {"kind": "vibrating_edge", "rate_hz": 98.0,
        "duration_us": 1000000, "width": 90, "height": 90}}, "gt_rate_hz": 98.0}
    ]"#;
    std::fs::write(dir.path().join("s.json"), manifest).unwrap();
    let o = eeppr(dir.path(), &["--output", "json", "bench", "--manifest", "s.json", "--sweep", "W=30,45,60,75", "N=1800"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let cells = v["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 4);
    let windows: Vec<u64> = cells.iter().map(|c| c["window"].as_u64().unwrap()).collect();
    assert_eq!(windows, vec![30, 45, 60, 75]);
    let o = eeppr(dir.path(), &["bench", "--manifest", "s.json", "--sweep", "W=30,45,60,75", "N=1800"]);
    let table = stdout(&o);
    assert!(table.contains("45x45") && table.contains("1800"), "{table}");
}

#[test]
fn synth_text_output_is_readable() {
    let dir = tempfile::tempdir().unwrap();
    let o = eeppr(dir.path(), &["synth", "vibrating-edge", "--rate", "98", "--amplitude", "2", "-o", "v.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let head = std::fs::read_to_string(dir.path().join("v.csv")).unwrap();
    assert!(head.starts_with("t,x,y,p\n"));
    let o = eeppr(dir.path(), &["--threads", "2", "estimate", "v.csv"]);
    assert!(stdout(&o).contains("rate_hz: 98.039"), "{}", stdout(&o));
}
