//! `qftcheck`: seeded experiment runner for inverse-QFT verification,
//! randomized phase estimation and its applications.
//!
//! Exit codes: 0 on success or PASS, 1 on FAIL, 2 on usage or config
//! errors.

mod commands;
mod config;

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use commands::Report;
use config::ConfigFile;

#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Parser)]
#[command(
    name = "qftcheck",
    version,
    about = "Inverse-QFT verification and randomized phase estimation experiments"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Master seed; every shot derives its own stream from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON file with command parameters; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for shot-level parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Include per-shot data in reports.
    #[arg(long, short, global = true)]
    verbose: bool,
    /// Omit the wall-clock duration, making reports byte-reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a channel's average infidelity and compare it to a threshold.
    Verify(VerifyArgs),
    /// Randomized phase estimation of a single phase.
    Pe(PeArgs),
    /// Period finding through randomized phase estimation.
    Period(PeriodArgs),
    /// Amplitude estimation through randomized phase estimation.
    Amplitude(AmplitudeArgs),
    /// Exact window tails next to the rigorous and conjectured bounds.
    Bounds(BoundsArgs),
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Channel document (JSON).
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    /// PASS iff eta_hat + epsilon <= threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Stop early with an empirical-Bernstein rule when failures are rare.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Args)]
pub struct PeArgs {
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// Register size; defaults to the channel's.
    #[arg(long)]
    pub n: Option<usize>,
    /// Phase in [0, 1).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Window parameter K.
    #[arg(long, short = 'K')]
    pub window: Option<u64>,
    #[arg(long)]
    pub shots: Option<usize>,
    /// Average infidelity for the bound; computed from the channel if absent.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Fix the offset to this grid index instead of randomizing it.
    #[arg(long)]
    pub pin_offset: Option<u64>,
    /// Noise realizations when estimating eta for per-gate noise.
    #[arg(long)]
    pub noise_realizations: Option<usize>,
}

#[derive(Args)]
pub struct PeriodArgs {
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Period r.
    #[arg(long, short = 'r')]
    pub period: Option<u64>,
    /// Offset s of the periodic state.
    #[arg(long, short = 's')]
    pub offset: Option<u64>,
    /// Largest admissible period R; defaults to max(floor(sqrt N), r).
    #[arg(long, short = 'R')]
    pub bound: Option<u64>,
    /// Number of independent attempts.
    #[arg(long)]
    pub runs: Option<usize>,
}

#[derive(Args)]
pub struct AmplitudeArgs {
    #[arg(long)]
    pub channel: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Angle mu in [0, pi/2].
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub shots: Option<usize>,
    /// Window K used for the reported tolerance K*pi/N.
    #[arg(long, short = 'K')]
    pub window: Option<u64>,
}

#[derive(Args)]
pub struct BoundsArgs {
    /// Dimension N = 2^n.
    #[arg(long, short = 'N')]
    pub dim: Option<u64>,
    /// Window parameters K, comma separated.
    #[arg(long, short = 'K', value_delimiter = ',')]
    pub window: Vec<u64>,
    /// Fractional parts x, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Vec<f64>,
    /// Use the grid x = i/points for i < points.
    #[arg(long)]
    pub x_grid: Option<usize>,
}

struct Settings {
    seed: u64,
    format: Format,
    out: Option<PathBuf>,
    verbose: bool,
    timing: bool,
}

fn settings(
    common: &CommonArgs,
    cfg: &ConfigFile,
    default_format: Format,
) -> Result<Settings, UsageError> {
    let threads: Option<usize> = cfg.pick(common.threads, "threads")?;
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| UsageError(format!("cannot set thread count: {e}")))?;
    }
    Ok(Settings {
        seed: cfg.pick(common.seed, "seed")?.unwrap_or(0),
        format: cfg.pick(common.format, "format")?.unwrap_or(default_format),
        out: cfg.pick(common.out.clone(), "out")?,
        verbose: cfg.flag_or(common.verbose, "verbose")?,
        timing: !cfg.flag_or(common.no_timing, "no_timing")?,
    })
}

fn render_json(report: &Report, duration: Option<f64>) -> String {
    let mut doc = match &report.result {
        Value::Object(map) => map.clone(),
        other => {
            let mut map = serde_json::Map::new();
            map.insert("result".into(), other.clone());
            map
        }
    };
    doc.insert("command".into(), json!(report.command));
    doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    doc.insert("config".into(), report.config.clone());
    if let Some(d) = duration {
        doc.insert("duration_seconds".into(), json!(d));
    }
    let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("report serializes");
    text.push('\n');
    text
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Data rows, then `#` comment lines carrying the report metadata.
fn render_csv(report: &Report, seed: u64, duration: Option<f64>) -> String {
    let (header, rows): (Vec<String>, Vec<Vec<String>>) = match &report.table {
        Some(t) => (
            t.header.iter().map(|h| h.to_string()).collect(),
            t.rows.clone(),
        ),
        None => {
            let scalars: Vec<(&String, &Value)> = report
                .result
                .as_object()
                .map(|m| {
                    m.iter()
                        .filter(|(_, v)| !v.is_array() && !v.is_object())
                        .collect()
                })
                .unwrap_or_default();
            (
                scalars.iter().map(|(k, _)| k.to_string()).collect(),
                vec![scalars.iter().map(|(_, v)| csv_field(v)).collect()],
            )
        }
    };
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out.push_str(&format!(
        "# command={} version={} seed={seed}\n",
        report.command,
        env!("CARGO_PKG_VERSION")
    ));
    out.push_str(&format!("# config={}\n", report.config));
    if let Some(d) = duration {
        out.push_str(&format!("# duration_seconds={d}\n"));
    }
    out
}

fn run(cli: Cli) -> Result<bool, UsageError> {
    let cfg = ConfigFile::load(cli.common.config.as_deref())?;
    let default_format = match cli.command {
        Command::Bounds(_) => Format::Csv,
        _ => Format::Json,
    };
    let s = settings(&cli.common, &cfg, default_format)?;
    let start = Instant::now();
    let report = match &cli.command {
        Command::Verify(a) => commands::verify(a, &cfg, s.seed)?,
        Command::Pe(a) => commands::pe(a, &cfg, s.seed, s.verbose)?,
        Command::Period(a) => commands::period(a, &cfg, s.seed, s.verbose)?,
        Command::Amplitude(a) => commands::amplitude(a, &cfg, s.seed, s.verbose)?,
        Command::Bounds(a) => commands::bounds(a, &cfg, s.seed)?,
    };
    let duration = s.timing.then(|| start.elapsed().as_secs_f64());
    let text = match s.format {
        Format::Json => render_json(&report, duration),
        Format::Csv => render_csv(&report, s.seed, duration),
    };
    match &s.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())))?,
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| UsageError(format!("cannot write output: {e}")))?,
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
