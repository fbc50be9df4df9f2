//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage, I/O, parse and validation errors,
//! 2 when the input holds no usable signal (empty stream or no valid
//! windows).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::baselines::{
    fft_baseline, simple_baseline, BaselineError, FftBaselineConfig, FftBaselineResult, Polarity,
    RateMap,
};
use crate::bench::{self, Scenario};
use crate::estimator::{estimate, CorrelationMethod, EepprConfig, EstimateError, PeakParams};
use crate::event::{EventStream, Roi};
use crate::io::{read_events, write_binary, write_text, Format, ReadOptions};
use crate::synth::{self, SynthKind, SynthSpec};

#[derive(Parser, Debug)]
#[command(name = "eeppr", version, about = "Periodic-motion rate estimation from event streams")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Spatial crop `x,y,w,h` applied before processing.
    #[arg(long, global = true)]
    roi: Option<Roi>,
    /// Start of the analysed segment.
    #[arg(long, global = true, default_value_t = 0)]
    start_us: u64,
    /// Length of the analysed segment.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    duration_us: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputKind::Text)]
    output: OutputKind,
    /// Seed for synthetic generation.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputKind {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Auto,
    Text,
    Binary,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Auto => Format::Auto,
            FormatArg::Text => Format::Text,
            FormatArg::Binary => Format::Binary,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Auto,
    Fft,
    Sparse,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate the rate with template correlation.
    Estimate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        params: EstimateArgs,
    },
    /// Run one of the reference estimators.
    Baseline {
        #[command(subcommand)]
        which: BaselineCommand,
    },
    /// Write a synthetic event stream.
    Synth(SynthArgs),
    /// Run a benchmark manifest or a parameter sweep.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Event file (text `t,x,y,p` or binary).
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
    /// Sensor width for text input; inferred from the events otherwise.
    #[arg(long)]
    width: Option<u16>,
    #[arg(long)]
    height: Option<u16>,
    /// Fail on out-of-order timestamps instead of sorting.
    #[arg(long)]
    strict: bool,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    /// Window side in pixels.
    #[arg(long, short = 'w', default_value_t = 45)]
    window: u16,
    /// Events required in the template.
    #[arg(long, short = 'n', default_value_t = 1800)]
    template_events: u64,
    /// Time bin length.
    #[arg(long, default_value_t = 100)]
    t_quant_us: u64,
    #[arg(long, default_value_t = 0.3)]
    min_prominence: f64,
    #[arg(long, default_value_t = 2)]
    min_separation_bins: usize,
    /// Largest template depth as a fraction of the window depth.
    #[arg(long, default_value_t = 0.25)]
    max_template_fraction: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    correlation: MethodArg,
}

impl EstimateArgs {
    fn config(&self) -> EepprConfig {
        EepprConfig {
            window: self.window,
            template_events: self.template_events,
            t_quant_us: self.t_quant_us,
            peak: PeakParams {
                min_prominence: self.min_prominence,
                min_separation_bins: self.min_separation_bins,
            },
            max_template_fraction: self.max_template_fraction,
            correlation: match self.correlation {
                MethodArg::Auto => CorrelationMethod::Auto,
                MethodArg::Fft => CorrelationMethod::Fft,
                MethodArg::Sparse => CorrelationMethod::Sparse,
            },
        }
    }
}

#[derive(Subcommand, Debug)]
enum BaselineCommand {
    /// Median of per-pixel inter-event intervals.
    Simple {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, short = 'w', default_value_t = 45)]
        window: u16,
    },
    /// Per-pixel spectral peak, median filtered, mode aggregated.
    Fft {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value = "negative")]
        polarity: Polarity,
        /// Transform length; defaults to the next power of two covering the segment.
        #[arg(long)]
        n_fft: Option<usize>,
        #[arg(long, default_value_t = 100)]
        bin_us: u64,
        /// Write the per-pixel rate maps as CSV.
        #[arg(long)]
        dump_map: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SynthArgs {
    kind: SynthKind,
    #[arg(long)]
    rate: f64,
    #[arg(long, default_value_t = 1_000_000)]
    duration: u64,
    #[arg(long, short = 'o')]
    out: PathBuf,
    /// Output encoding; `auto` writes text for `.csv`/`.txt` names and binary otherwise.
    #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
    format: FormatArg,
    #[arg(long)]
    duty: Option<f64>,
    #[arg(long)]
    width: Option<u16>,
    #[arg(long)]
    height: Option<u16>,
    /// Active region `x,y,w,h`.
    #[arg(long)]
    region: Option<Roi>,
    /// Rotation centre `x,y`.
    #[arg(long, value_parser = parse_point)]
    center: Option<(f64, f64)>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    dot_radius: Option<f64>,
    #[arg(long)]
    line_width: Option<f64>,
    #[arg(long)]
    amplitude: Option<f64>,
    #[arg(long)]
    spacing: Option<f64>,
    /// Standard deviation of timestamp jitter.
    #[arg(long)]
    jitter_us: Option<f64>,
    /// Background noise in events per pixel per second.
    #[arg(long)]
    noise_rate: Option<f64>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// JSON scenario list; the built-in synthetic suite is used when absent.
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Report file; `.json` writes JSON, anything else CSV.
    #[arg(long, short = 'o')]
    out: Option<PathBuf>,
    /// Sweep grid, e.g. `--sweep W=30,45,60,75 N=1800`.
    #[arg(long, num_args = 1..=2, value_name = "AXIS=LIST")]
    sweep: Option<Vec<String>>,
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `x,y`, got {s:?}"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok((num(x)?, num(y)?))
}

/// Failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    fn no_signal(detail: impl std::fmt::Display) -> Self {
        Self {
            code: 2,
            message: format!("no valid windows: {detail}"),
        }
    }
}

impl From<EstimateError> for Failure {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::EmptyStream | EstimateError::NoValidWindows { .. } => {
                Failure::no_signal(e)
            }
            e => Failure::usage(e.to_string()),
        }
    }
}

impl From<BaselineError> for Failure {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::EmptyStream | BaselineError::NoEstimate => Failure::no_signal(e),
            e => Failure::usage(e.to_string()),
        }
    }
}

type CmdResult = Result<String, Failure>;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Reports go to stdout, diagnostics to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.global.threads {
        Some(0) => Err(Failure::usage("--threads must be at least 1")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&cli)),
            Err(e) => Err(Failure::usage(e.to_string())),
        },
        None => run(&cli),
    };
    match result {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(report.as_bytes()).and_then(|_| out.flush()).is_err() {
                return 1;
            }
            0
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn run(cli: &Cli) -> CmdResult {
    let g = &cli.global;
    match &cli.command {
        Command::Estimate { input, params } => cmd_estimate(g, input, params),
        Command::Baseline { which } => match which {
            BaselineCommand::Simple { input, window } => cmd_simple(g, input, *window),
            BaselineCommand::Fft {
                input,
                polarity,
                n_fft,
                bin_us,
                dump_map,
            } => {
                let cfg = FftBaselineConfig {
                    polarity: *polarity,
                    bin_us: *bin_us,
                    n_fft: *n_fft,
                };
                cmd_fft(g, input, &cfg, dump_map.as_deref())
            }
        },
        Command::Synth(args) => cmd_synth(g, args),
        Command::Bench(args) => cmd_bench(g, args),
    }
}

fn load_input(g: &GlobalArgs, input: &InputArgs) -> Result<EventStream, Failure> {
    let opts = ReadOptions {
        width: input.width,
        height: input.height,
        strict: input.strict,
    };
    let stream = read_events(&input.input, input.format.into(), &opts)
        .map_err(|e| Failure::usage(format!("{}: {e}", input.input.display())))?;
    if let Some(roi) = g.roi {
        if !roi.fits(stream.width(), stream.height()) {
            return Err(Failure::usage(format!(
                "roi {roi:?} does not fit the {}x{} sensor",
                stream.width(),
                stream.height()
            )));
        }
    }
    Ok(stream.segment(g.start_us, g.duration_us))
}

fn json<T: Serialize>(value: &T) -> CmdResult {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::usage(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> CmdResult {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Failure::usage(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::usage(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Failure::usage(e.to_string()))
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn cmd_estimate(g: &GlobalArgs, input: &InputArgs, params: &EstimateArgs) -> CmdResult {
    let cfg = params.config();
    cfg.validate().map_err(Failure::from)?;
    let stream = load_input(g, input)?;
    let est = estimate(&stream, &cfg, g.roi)?;
    match g.output {
        OutputKind::Json => json(&est),
        OutputKind::Csv => csv_table(
            &["area_index", "x0", "y0", "window_events", "template_depth_bins", "template_events", "period_us", "status"],
            &est.windows
                .iter()
                .map(|w| {
                    vec![
                        w.area_index.to_string(),
                        w.origin.0.to_string(),
                        w.origin.1.to_string(),
                        w.window_events.to_string(),
                        opt(w.template_depth_bins),
                        opt(w.template_events),
                        opt(w.period_us),
                        w.status.label().to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        OutputKind::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "rate_hz: {:?}", est.rate_hz);
            let _ = writeln!(s, "period_us: {:?}", est.period_us);
            let _ = writeln!(s, "accepted_windows: {}", est.accepted_windows);
            let _ = writeln!(s, "rejected_windows: {}", est.rejected_windows);
            Ok(s)
        }
    }
}

fn cmd_simple(g: &GlobalArgs, input: &InputArgs, window: u16) -> CmdResult {
    if window == 0 {
        return Err(Failure::usage("--window must be at least 1"));
    }
    let stream = load_input(g, input)?;
    let r = simple_baseline(&stream, window, g.roi)?;
    match g.output {
        OutputKind::Json => json(&r),
        OutputKind::Csv => csv_table(
            &["area_index", "x0", "y0", "period_us", "rate_hz"],
            &r.windows
                .iter()
                .zip(r.window_periods_us.iter().zip(&r.window_rates_hz))
                .map(|(a, (p, hz))| {
                    vec![
                        a.index.to_string(),
                        a.x0.to_string(),
                        a.y0.to_string(),
                        opt(*p),
                        opt(*hz),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        OutputKind::Text => {
            let measured = r.window_rates_hz.iter().flatten().count();
            Ok(format!(
                "rate_hz: {:?}\nwindows: {}\nmeasured_windows: {measured}\n",
                r.rate_hz,
                r.windows.len()
            ))
        }
    }
}

#[derive(Serialize)]
struct FftSummary {
    rate_hz: f64,
    n_fft: usize,
    bin_hz: f64,
    pixels_with_estimate: usize,
}

impl From<&FftBaselineResult> for FftSummary {
    fn from(r: &FftBaselineResult) -> Self {
        Self {
            rate_hz: r.rate_hz,
            n_fft: r.n_fft,
            bin_hz: r.bin_hz,
            pixels_with_estimate: r.raw.bins.iter().flatten().count(),
        }
    }
}

fn dump_rate_maps(path: &Path, raw: &RateMap, filtered: &RateMap, roi: Roi) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["x", "y", "raw_hz", "filtered_hz"])?;
    for y in 0..raw.height {
        for x in 0..raw.width {
            if raw.get(x, y).is_none() {
                continue;
            }
            w.write_record([
                (x + roi.x).to_string(),
                (y + roi.y).to_string(),
                opt(raw.rate_hz(x, y)),
                opt(filtered.rate_hz(x, y)),
            ])?;
        }
    }
    w.flush()
}

fn cmd_fft(g: &GlobalArgs, input: &InputArgs, cfg: &FftBaselineConfig, dump: Option<&Path>) -> CmdResult {
    cfg.validate()?;
    let stream = load_input(g, input)?;
    let r = fft_baseline(&stream, cfg, g.roi)?;
    if let Some(path) = dump {
        let roi = g.roi.unwrap_or_else(|| Roi::full(stream.width(), stream.height()));
        dump_rate_maps(path, &r.raw, &r.filtered, roi)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    }
    let summary = FftSummary::from(&r);
    match g.output {
        OutputKind::Json => json(&summary),
        OutputKind::Csv => csv_table(
            &["rate_hz", "n_fft", "bin_hz", "pixels_with_estimate"],
            &[vec![
                summary.rate_hz.to_string(),
                summary.n_fft.to_string(),
                summary.bin_hz.to_string(),
                summary.pixels_with_estimate.to_string(),
            ]],
        ),
        OutputKind::Text => Ok(format!(
            "rate_hz: {:?}\nn_fft: {}\nbin_hz: {:?}\npixels_with_estimate: {}\n",
            summary.rate_hz, summary.n_fft, summary.bin_hz, summary.pixels_with_estimate
        )),
    }
}

fn synth_spec(g: &GlobalArgs, a: &SynthArgs) -> SynthSpec {
    let mut spec = match a.kind {
        SynthKind::Flash => SynthSpec::flash(a.rate, a.duration),
        SynthKind::RotatingLine => SynthSpec::rotating_line(a.rate, a.duration),
        SynthKind::RotatingDot => SynthSpec::rotating_dot(a.rate, a.duration),
        SynthKind::VibratingEdge => SynthSpec::vibrating_edge(a.rate, a.duration),
        SynthKind::TranslatingPattern => SynthSpec::translating_pattern(a.rate, a.duration),
    };
    if a.width.is_some() || a.height.is_some() {
        // A new sensor size drops the preset region and centre unless given.
        spec.region = None;
        spec.center = None;
    }
    spec.width = a.width.unwrap_or(spec.width);
    spec.height = a.height.unwrap_or(spec.height);
    spec.region = a.region.or(spec.region);
    spec.center = a.center.or(spec.center);
    spec.duty = a.duty.unwrap_or(spec.duty);
    spec.radius = a.radius.unwrap_or(spec.radius);
    spec.dot_radius = a.dot_radius.unwrap_or(spec.dot_radius);
    spec.line_width = a.line_width.unwrap_or(spec.line_width);
    spec.amplitude_px = a.amplitude.unwrap_or(spec.amplitude_px);
    spec.spacing_px = a.spacing.unwrap_or(spec.spacing_px);
    spec.jitter_us = a.jitter_us.unwrap_or(spec.jitter_us);
    spec.noise_rate = a.noise_rate.unwrap_or(spec.noise_rate);
    spec.seed = g.seed.unwrap_or(spec.seed);
    spec
}

fn is_text_name(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("csv" | "txt")
    )
}

#[derive(Serialize)]
struct SynthSummary<'a> {
    path: &'a Path,
    events: usize,
    width: u16,
    height: u16,
    duration_us: u64,
    period_us: f64,
    spec: &'a SynthSpec,
}

fn cmd_synth(g: &GlobalArgs, a: &SynthArgs) -> CmdResult {
    let spec = synth_spec(g, a);
    spec.validate().map_err(|e| Failure::usage(e.to_string()))?;
    let stream = synth::generate(&spec).map_err(|e| Failure::usage(e.to_string()))?;
    let text = match a.format {
        FormatArg::Text => true,
        FormatArg::Binary => false,
        FormatArg::Auto => is_text_name(&a.out),
    };
    let written = if text {
        write_text(&stream, &a.out)
    } else {
        write_binary(&stream, &a.out)
    };
    written.map_err(|e| Failure::usage(format!("{}: {e}", a.out.display())))?;
    let summary = SynthSummary {
        path: &a.out,
        events: stream.len(),
        width: stream.width(),
        height: stream.height(),
        duration_us: stream.duration_us(),
        period_us: spec.period_us(),
        spec: &spec,
    };
    match g.output {
        OutputKind::Json => json(&summary),
        OutputKind::Csv => csv_table(
            &["path", "events", "width", "height", "duration_us", "period_us"],
            &[vec![
                a.out.display().to_string(),
                summary.events.to_string(),
                summary.width.to_string(),
                summary.height.to_string(),
                summary.duration_us.to_string(),
                summary.period_us.to_string(),
            ]],
        ),
        OutputKind::Text => Ok(format!(
            "wrote {} events ({}x{}, {} us) to {}\n",
            summary.events,
            summary.width,
            summary.height,
            summary.duration_us,
            a.out.display()
        )),
    }
}

/// Parses `W=30,45` / `N=1800` sweep axes; a missing axis uses the default.
fn parse_sweep(items: &[String]) -> Result<(Vec<u16>, Vec<u64>), Failure> {
    let defaults = EepprConfig::default();
    let mut windows = vec![defaults.window];
    let mut counts = vec![defaults.template_events];
    for item in items {
        let (axis, list) = item
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("sweep axis {item:?} must look like W=30,45")))?;
        let bad = |v: &str| Failure::usage(format!("bad sweep value {v:?} in {item:?}"));
        match axis.trim().to_ascii_uppercase().as_str() {
            "W" => {
                windows = list
                    .split(',')
                    .map(|v| v.trim().parse::<u16>().ok().filter(|&w| w > 0).ok_or_else(|| bad(v)))
                    .collect::<Result<_, _>>()?
            }
            "N" => {
                counts = list
                    .split(',')
                    .map(|v| v.trim().parse::<u64>().ok().filter(|&n| n > 0).ok_or_else(|| bad(v)))
                    .collect::<Result<_, _>>()?
            }
            other => return Err(Failure::usage(format!("unknown sweep axis {other:?}; use W or N"))),
        }
    }
    Ok((windows, counts))
}

fn apply_globals(g: &GlobalArgs, scenarios: &mut [Scenario]) {
    for s in scenarios {
        if let (Some(seed), bench::Source::Synth { spec }) = (g.seed, &mut s.source) {
            spec.seed = seed;
        }
        if s.roi.is_none() {
            s.roi = g.roi;
        }
    }
}

fn write_report_file(path: &Path, report: &bench::BenchReport) -> Result<(), Failure> {
    let fail = |e: String| Failure::usage(format!("{}: {e}", path.display()));
    let file = File::create(path).map_err(|e| fail(e.to_string()))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        serde_json::to_writer_pretty(BufWriter::new(file), report).map_err(|e| fail(e.to_string()))
    } else {
        bench::write_csv(report, BufWriter::new(file)).map_err(|e| fail(e.to_string()))
    }
}

fn cmd_bench(g: &GlobalArgs, a: &BenchArgs) -> CmdResult {
    let sweep_axes = a.sweep.as_deref().map(parse_sweep).transpose()?;
    let mut scenarios = match &a.manifest {
        Some(path) => bench::load_manifest(path).map_err(|e| Failure::usage(e.to_string()))?,
        None => bench::synthetic_suite(0.0),
    };
    apply_globals(g, &mut scenarios);

    if let Some((windows, counts)) = sweep_axes {
        let table = bench::sweep(&windows, &counts, &scenarios, &EepprConfig::default())
            .map_err(|e| Failure::usage(e.to_string()))?;
        if let Some(path) = &a.out {
            let file = File::create(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            serde_json::to_writer_pretty(BufWriter::new(file), &table)
                .map_err(|e| Failure::usage(e.to_string()))?;
        }
        return match g.output {
            OutputKind::Json => json(&table),
            OutputKind::Csv => csv_table(
                &["window", "template_events", "mean_relative_error_pct", "max_relative_error_pct", "failed", "scenarios"],
                &table
                    .cells
                    .iter()
                    .map(|c| {
                        vec![
                            c.window.to_string(),
                            c.template_events.to_string(),
                            opt(c.mean_relative_error_pct),
                            opt(c.max_relative_error_pct),
                            c.failed.to_string(),
                            c.scenarios.to_string(),
                        ]
                    })
                    .collect::<Vec<_>>(),
            ),
            OutputKind::Text => Ok(bench::format_sweep(&table)),
        };
    }

    let report = bench::run_manifest(&scenarios);
    if let Some(path) = &a.out {
        write_report_file(path, &report)?;
    }
    match g.output {
        OutputKind::Json => json(&report),
        OutputKind::Csv => {
            let mut buf = Vec::new();
            bench::write_csv(&report, &mut buf).map_err(|e| Failure::usage(e.to_string()))?;
            String::from_utf8(buf).map_err(|e| Failure::usage(e.to_string()))
        }
        OutputKind::Text => Ok(bench::format_report(&report)),
    }
}
