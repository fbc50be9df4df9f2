//! Evaluation harness: one-second segments, per-method estimates, relative
//! errors against ground truth, and `W`×`N` parameter sweeps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::{fft_baseline, simple_baseline, FftBaselineConfig};
use crate::estimator::{estimate, EepprConfig};
use crate::event::{EventStream, Roi};
use crate::io::{read_events, Format, ReadOptions};
use crate::synth::{generate, SynthSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Eeppr,
    Simple,
    Fft,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Eeppr, Method::Simple, Method::Fft];

    pub fn name(self) -> &'static str {
        match self {
            Method::Eeppr => "eeppr",
            Method::Simple => "simple",
            Method::Fft => "fft",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eeppr" => Ok(Method::Eeppr),
            "simple" => Ok(Method::Simple),
            "fft" => Ok(Method::Fft),
            _ => Err(format!("unknown method {s:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Source {
    File {
        path: PathBuf,
        #[serde(default)]
        format: Format,
    },
    Synth {
        spec: SynthSpec,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Overrides {
    pub eeppr: Option<EepprConfig>,
    pub simple_window: Option<u16>,
    pub fft: Option<FftBaselineConfig>,
}

fn default_segment() -> u64 {
    1_000_000
}

fn default_methods() -> Vec<Method> {
    Method::ALL.to_vec()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: String,
    pub source: Source,
    pub gt_rate_hz: f64,
    #[serde(default)]
    pub start_us: u64,
    #[serde(default = "default_segment")]
    pub segment_us: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub roi: Option<Roi>,
    #[serde(default)]
    pub overrides: Overrides,
}

impl Scenario {
    /// Synthetic scenario with the spec's own rate as ground truth.
    pub fn synthetic(id: impl Into<String>, spec: SynthSpec) -> Self {
        Self {
            id: id.into(),
            gt_rate_hz: spec.rate_hz,
            source: Source::Synth { spec },
            start_us: 0,
            segment_us: default_segment(),
            methods: default_methods(),
            roi: None,
            overrides: Overrides::default(),
        }
    }

    pub fn with_methods(mut self, methods: &[Method]) -> Self {
        self.methods = methods.to_vec();
        self
    }

    pub fn with_eeppr(mut self, config: EepprConfig) -> Self {
        self.overrides.eeppr = Some(config);
        self
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read manifest {path}: {source}")]
    Manifest {
        path: PathBuf,
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error("empty parameter grid")]
    EmptyGrid,
    #[error("ground-truth rate of scenario {0:?} must be positive")]
    InvalidGroundTruth(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Failed,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub scenario: String,
    pub method: Method,
    pub status: RowStatus,
    pub gt_rate_hz: f64,
    pub estimate_hz: Option<f64>,
    pub relative_error_pct: Option<f64>,
    pub runtime_ms: f64,
    pub accepted_windows: Option<usize>,
    pub rejected_windows: Option<usize>,
    pub message: String,
}

impl BenchRow {
    /// Error used for summaries: failed rows count as 100 % (a zero estimate).
    pub fn scored_error_pct(&self) -> Option<f64> {
        match self.status {
            RowStatus::Ok => self.relative_error_pct,
            RowStatus::Failed => Some(100.0),
            RowStatus::Skipped => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub ok: usize,
    pub failed: usize,
    pub skipped: usize,
    pub mean_relative_error_pct: Option<f64>,
    pub max_relative_error_pct: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub summary: Vec<MethodSummary>,
}

/// `|estimate − gt| / gt × 100`.
pub fn relative_error_pct(estimate_hz: f64, gt_hz: f64) -> f64 {
    (estimate_hz - gt_hz).abs() / gt_hz * 100.0
}

/// Reads a JSON array of scenarios. Relative file paths are resolved
/// against the manifest's directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<Vec<Scenario>, BenchError> {
    let path = path.as_ref();
    let wrap = |e: Box<dyn std::error::Error + Send + Sync>| BenchError::Manifest {
        path: path.to_path_buf(),
        source: e,
    };
    let text = std::fs::read_to_string(path).map_err(|e| wrap(e.into()))?;
    let mut scenarios: Vec<Scenario> = serde_json::from_str(&text).map_err(|e| wrap(e.into()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    for s in &mut scenarios {
        if let Source::File { path, .. } = &mut s.source {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
    }
    Ok(scenarios)
}

enum Loaded {
    Stream(EventStream),
    Skipped(String),
    Failed(String),
}

fn load(s: &Scenario) -> Loaded {
    let stream = match &s.source {
        Source::File { path, .. } if !path.exists() => {
            return Loaded::Skipped(format!("file {} not found", path.display()))
        }
        Source::File { path, format } => match read_events(path, *format, &ReadOptions::default()) {
            Ok(st) => st,
            Err(e) => return Loaded::Failed(e.to_string()),
        },
        Source::Synth { spec } => match generate(spec) {
            Ok(st) => st,
            Err(e) => return Loaded::Failed(e.to_string()),
        },
    };
    Loaded::Stream(stream.segment(s.start_us, s.segment_us))
}

fn row(s: &Scenario, method: Method, status: RowStatus, message: String) -> BenchRow {
    BenchRow {
        scenario: s.id.clone(),
        method,
        status,
        gt_rate_hz: s.gt_rate_hz,
        estimate_hz: None,
        relative_error_pct: None,
        runtime_ms: 0.0,
        accepted_windows: None,
        rejected_windows: None,
        message,
    }
}

fn run_method(s: &Scenario, stream: &EventStream, method: Method) -> BenchRow {
    let start = Instant::now();
    let mut windows = (None, None);
    let result: Result<f64, String> = match method {
        Method::Eeppr => {
            let cfg = s.overrides.eeppr.clone().unwrap_or_default();
            estimate(stream, &cfg, s.roi)
                .map(|e| {
                    windows = (Some(e.accepted_windows), Some(e.rejected_windows));
                    e.rate_hz
                })
                .map_err(|e| e.to_string())
        }
        Method::Simple => {
            let w = s.overrides.simple_window.unwrap_or(45);
            simple_baseline(stream, w, s.roi)
                .map(|r| r.rate_hz)
                .map_err(|e| e.to_string())
        }
        Method::Fft => {
            let cfg = s.overrides.fft.clone().unwrap_or_default();
            fft_baseline(stream, &cfg, s.roi)
                .map(|r| r.rate_hz)
                .map_err(|e| e.to_string())
        }
    };
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut r = match result {
        Ok(hz) => BenchRow {
            estimate_hz: Some(hz),
            relative_error_pct: Some(relative_error_pct(hz, s.gt_rate_hz)),
            ..row(s, method, RowStatus::Ok, String::new())
        },
        Err(msg) => row(s, method, RowStatus::Failed, msg),
    };
    r.runtime_ms = runtime_ms;
    (r.accepted_windows, r.rejected_windows) = windows;
    r
}

/// Loads or generates the scenario's stream, cuts its segment and runs
/// every requested method. Method errors become failed rows.
pub fn run_scenario(s: &Scenario) -> Vec<BenchRow> {
    if !(s.gt_rate_hz > 0.0) {
        return s
            .methods
            .iter()
            .map(|&m| row(s, m, RowStatus::Failed, "ground-truth rate must be positive".into()))
            .collect();
    }
    match load(s) {
        Loaded::Stream(stream) => s.methods.iter().map(|&m| run_method(s, &stream, m)).collect(),
        Loaded::Skipped(msg) => {
            log::warn!("scenario {}: {msg}; skipping", s.id);
            s.methods.iter().map(|&m| row(s, m, RowStatus::Skipped, msg.clone())).collect()
        }
        Loaded::Failed(msg) => s
            .methods
            .iter()
            .map(|&m| row(s, m, RowStatus::Failed, msg.clone()))
            .collect(),
    }
}

/// Runs all scenarios on the current rayon pool; rows are ordered by
/// scenario id, then method.
pub fn run_manifest(scenarios: &[Scenario]) -> BenchReport {
    let mut rows: Vec<BenchRow> = scenarios.par_iter().flat_map_iter(run_scenario).collect();
    rows.sort_by(|a, b| a.scenario.cmp(&b.scenario).then(a.method.cmp(&b.method)));
    let summary = summarize(&rows);
    BenchReport { rows, summary }
}

fn mean_max(errors: &[f64]) -> (Option<f64>, Option<f64>) {
    if errors.is_empty() {
        return (None, None);
    }
    let mean = errors.iter().sum::<f64>() / errors.len() as f64;
    let max = errors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (Some(mean), Some(max))
}

/// Mean and max relative error per method; failed rows score 100 %.
pub fn summarize(rows: &[BenchRow]) -> Vec<MethodSummary> {
    let mut methods: Vec<Method> = rows.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    methods
        .into_iter()
        .map(|m| {
            let of: Vec<&BenchRow> = rows.iter().filter(|r| r.method == m).collect();
            let count = |st| of.iter().filter(|r| r.status == st).count();
            let errors: Vec<f64> = of.iter().filter_map(|r| r.scored_error_pct()).collect();
            let (mean, max) = mean_max(&errors);
            MethodSummary {
                method: m,
                ok: count(RowStatus::Ok),
                failed: count(RowStatus::Failed),
                skipped: count(RowStatus::Skipped),
                mean_relative_error_pct: mean,
                max_relative_error_pct: max,
            }
        })
        .collect()
}

pub fn write_csv(report: &BenchReport, w: impl std::io::Write) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in &report.rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.prec$}"))
}

/// Plain-text table of rows followed by the per-method summary.
pub fn format_report(report: &BenchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<24} {:<7} {:>10} {:>12} {:>10} {:>10}  status",
        "scenario", "method", "gt_hz", "estimate_hz", "rel_err_%", "ms"
    );
    for r in &report.rows {
        let status = match r.status {
            RowStatus::Ok => "ok".to_string(),
            RowStatus::Failed => format!("failed: {}", r.message),
            RowStatus::Skipped => format!("skipped: {}", r.message),
        };
        let _ = writeln!(
            s,
            "{:<24} {:<7} {:>10.3} {:>12} {:>10} {:>10.1}  {}",
            r.scenario,
            r.method.name(),
            r.gt_rate_hz,
            fmt_opt(r.estimate_hz, 3),
            fmt_opt(r.relative_error_pct, 3),
            r.runtime_ms,
            status
        );
    }
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "{:<7} {:>4} {:>6} {:>7} {:>12} {:>12}",
        "method", "ok", "failed", "skipped", "mean_err_%", "max_err_%"
    );
    for m in &report.summary {
        let _ = writeln!(
            s,
            "{:<7} {:>4} {:>6} {:>7} {:>12} {:>12}",
            m.method.name(),
            m.ok,
            m.failed,
            m.skipped,
            fmt_opt(m.mean_relative_error_pct, 3),
            fmt_opt(m.max_relative_error_pct, 3)
        );
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub window: u16,
    pub template_events: u64,
    pub mean_relative_error_pct: Option<f64>,
    pub max_relative_error_pct: Option<f64>,
    pub failed: usize,
    pub scenarios: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub windows: Vec<u16>,
    pub template_events: Vec<u64>,
    /// Row-major over `template_events` × `windows`.
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn cell(&self, window: u16, template_events: u64) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.window == window && c.template_events == template_events)
    }
}

/// Rates covered by [`synthetic_suite`].
pub const SUITE_RATES_HZ: [f64; 6] = [3.2, 20.0, 40.0, 98.0, 240.0, 2000.0];

/// Flash, rotating-line and vibrating-edge scenes at every rate in
/// [`SUITE_RATES_HZ`] on a 90×90 sensor. Scenes shrink at high rates to keep
/// event counts moderate, and slow scenes run for at least five periods.
///
/// `noise_fraction` adds uniform background noise whose expected count is
/// that fraction of the scene's signal events.
pub fn synthetic_suite(noise_fraction: f64) -> Vec<Scenario> {
    let mut out = Vec::new();
    for (i, &rate) in SUITE_RATES_HZ.iter().enumerate() {
        let duration = ((5e6 / rate).ceil() as u64).max(1_000_000);
        let fast = rate > 500.0;
        let flash = SynthSpec {
            width: 90,
            height: 90,
            region: Some(if fast { Roi::new(33, 33, 24, 24) } else { Roi::new(13, 13, 64, 64) }),
            ..SynthSpec::flash(rate, duration)
        };
        let line = SynthSpec {
            width: 90,
            height: 90,
            center: Some((45.0, 45.0)),
            radius: if fast { 10.0 } else { 30.0 },
            ..SynthSpec::rotating_line(rate, duration)
        };
        let edge = SynthSpec {
            region: fast.then(|| Roi::new(30, 30, 30, 30)),
            ..SynthSpec::vibrating_edge(rate, duration)
        };
        for (j, (name, spec)) in [("flash", flash), ("line", line), ("edge", edge)].into_iter().enumerate() {
            let mut spec = spec.with_seed((i * 3 + j) as u64);
            if noise_fraction > 0.0 {
                spec.noise_rate = crate::synth::noise_rate_for_fraction(&spec, noise_fraction)
                    .expect("suite specs are valid");
            }
            let mut s = Scenario::synthetic(format!("{name}-{rate}hz"), spec);
            s.segment_us = duration;
            out.push(s);
        }
    }
    out
}

/// Runs the estimator for every `(W, N)` pair over all scenarios. Other
/// settings come from `base`; failed estimates score 100 %, skipped
/// scenarios are left out.
pub fn sweep(
    windows: &[u16],
    template_events: &[u64],
    scenarios: &[Scenario],
    base: &EepprConfig,
) -> Result<SweepTable, BenchError> {
    if windows.is_empty() || template_events.is_empty() {
        return Err(BenchError::EmptyGrid);
    }
    if let Some(s) = scenarios.iter().find(|s| !(s.gt_rate_hz > 0.0)) {
        return Err(BenchError::InvalidGroundTruth(s.id.clone()));
    }
    let loaded: Vec<(Option<EventStream>, &Scenario)> = scenarios
        .par_iter()
        .map(|s| match load(s) {
            Loaded::Stream(st) => (Some(st), s),
            Loaded::Skipped(msg) => {
                log::warn!("scenario {}: {msg}; skipping", s.id);
                (None, s)
            }
            Loaded::Failed(msg) => {
                log::warn!("scenario {}: {msg}", s.id);
                (None, s)
            }
        })
        .collect();

    let grid: Vec<(u64, u16)> = template_events
        .iter()
        .flat_map(|&n| windows.iter().map(move |&w| (n, w)))
        .collect();
    let cells = grid
        .par_iter()
        .map(|&(n, w)| {
            let cfg = EepprConfig {
                window: w,
                template_events: n,
                ..base.clone()
            };
            let mut errors = Vec::new();
            let mut failed = 0;
            for (stream, s) in &loaded {
                let Some(stream) = stream else { continue };
                match estimate(stream, &cfg, s.roi) {
                    Ok(e) => errors.push(relative_error_pct(e.rate_hz, s.gt_rate_hz)),
                    Err(_) => {
                        failed += 1;
                        errors.push(100.0);
                    }
                }
            }
            let (mean, max) = mean_max(&errors);
            SweepCell {
                window: w,
                template_events: n,
                mean_relative_error_pct: mean,
                max_relative_error_pct: max,
                failed,
                scenarios: errors.len(),
            }
        })
        .collect();
    Ok(SweepTable {
        windows: windows.to_vec(),
        template_events: template_events.to_vec(),
        cells,
    })
}

/// Table with one row per `N` and one column per `W`, each cell `mean / max`.
pub fn format_sweep(table: &SweepTable) -> String {
    let mut s = String::new();
    let _ = write!(s, "{:>8} |", "N \\ W");
    for w in &table.windows {
        let _ = write!(s, " {:>21} |", format!("{w}x{w}"));
    }
    let _ = writeln!(s);
    for &n in &table.template_events {
        let _ = write!(s, "{n:>8} |");
        for &w in &table.windows {
            let cell = table.cell(w, n).expect("every grid cell is computed");
            let _ = write!(
                s,
                " {:>21} |",
                format!(
                    "{} / {}",
                    fmt_opt(cell.mean_relative_error_pct, 2),
                    fmt_opt(cell.max_relative_error_pct, 2)
                )
            );
        }
        let _ = writeln!(s);
    }
    let _ = writeln!(s, "(mean / max relative error, %)");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_definition() {
        assert_eq!(relative_error_pct(100.0, 100.0), 0.0);
        assert_eq!(relative_error_pct(238.1, 240.0), (240.0f64 - 238.1).abs() / 240.0 * 100.0);
        assert_eq!(relative_error_pct(90.0, 100.0), 10.0);
        assert_eq!(relative_error_pct(150.0, 100.0), 50.0);
    }

    #[test]
    fn missing_file_is_skipped() {
        let s = Scenario {
            id: "missing".into(),
            source: Source::File {
                path: "/nonexistent/seq.evs".into(),
                format: Format::Auto,
            },
            gt_rate_hz: 50.0,
            start_us: 0,
            segment_us: 1_000_000,
            methods: vec![Method::Eeppr, Method::Simple],
            roi: None,
            overrides: Overrides::default(),
        };
        let rows = run_scenario(&s);
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.status == RowStatus::Skipped));
        let summary = summarize(&rows);
        assert_eq!(summary[0].skipped, 1);
        assert_eq!(summary[0].mean_relative_error_pct, None);
    }

    #[test]
    fn failures_score_full_error() {
        let mut r = BenchRow {
            scenario: "a".into(),
            method: Method::Fft,
            status: RowStatus::Failed,
            gt_rate_hz: 10.0,
            estimate_hz: None,
            relative_error_pct: None,
            runtime_ms: 0.0,
            accepted_windows: None,
            rejected_windows: None,
            message: String::new(),
        };
        assert_eq!(r.scored_error_pct(), Some(100.0));
        r.status = RowStatus::Ok;
        r.relative_error_pct = Some(2.0);
        assert_eq!(r.scored_error_pct(), Some(2.0));
    }

    #[test]
    fn manifest_json_shape() {
        let json = r#"[
            {"id": "flash", "gt_rate_hz": 2000.0,
             "source": {"type": "synth", "spec": {"kind": "flash", "rate_hz": 2000.0}}},
            {"id": "disc", "gt_rate_hz": 20.0, "methods": ["eeppr"],
             "source": {"type": "file", "path": "disc.csv", "format": "text"}}
        ]"#;
        let s: Vec<Scenario> = serde_json::from_str(json).unwrap();
        assert_eq!(s[0].segment_us, 1_000_000);
        assert_eq!(s[0].methods, Method::ALL.to_vec());
        assert_eq!(s[1].methods, vec![Method::Eeppr]);
        assert!(matches!(s[1].source, Source::File { format: Format::Text, .. }));
    }

    #[test]
    fn empty_grid_rejected() {
        assert!(matches!(
            sweep(&[], &[1800], &[], &EepprConfig::default()),
            Err(BenchError::EmptyGrid)
        ));
    }
}
