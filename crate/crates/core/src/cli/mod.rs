//! The `latdist` command-line front end.
//!
//! Every subcommand resolves a [`RunConfig`] (defaults, then `--config`, then
//! flags) and echoes it: as a `# config {json}` first line in CSV output, or
//! as a `config` member in JSON output.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

pub use config::{OutputFormat, RunConfig};

use crate::budget::Scheme;
use crate::channel::ChannelFamily;
use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Infeasible(_) | CliError::Lib(Error::NoFeasibleN(_)) => EXIT_INFEASIBLE,
            CliError::Lib(
                Error::Domain(_)
                | Error::BetaNotAboveDelta { .. }
                | Error::EpsilonOutOfRange { .. }
                | Error::TooFewClasses(_),
            ) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Parses a serde-named enum variant such as `fading-csi` or `as-printed`.
fn serde_name<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_ascii_lowercase()))
        .map_err(|e| e.to_string())
}

fn parse_dataset_format(s: &str) -> std::result::Result<crate::ingest::DatasetFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Grid values parsed from a `lo:hi:count` flag.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRange(pub Vec<f64>);

/// `lo:hi:count`, inclusive, evenly spaced.
fn parse_range(s: &str) -> std::result::Result<GridRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("expected lo:hi:count, got '{s}'"));
    };
    let lo: f64 = lo.parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("{e}"))?;
    let n: usize = n.parse().map_err(|e| format!("{e}"))?;
    Ok(GridRange(match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }))
}

#[derive(Debug, Parser)]
#[command(name = "latdist", version, about = "Probability-vector quantization and latency-distortion tradeoffs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Bit budgets of every scheme over a βs grid.
    Budget,
    /// Latency over a βs sweep at fixed βt.
    Tradeoff,
    /// Minimum latency per βt and its lower convex hull.
    Hull,
    /// Encode probability vectors to payload bytes (hex).
    Quantize,
    /// Decode hex payloads back to probability vectors.
    Dequantize,
    /// Monte Carlo check of the expected distortion bound.
    Simulate,
    /// Top-mass curve and k_top recommendation for a dataset.
    Stats,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Budget => "budget",
            Command::Tradeoff => "tradeoff",
            Command::Hull => "hull",
            Command::Quantize => "quantize",
            Command::Dequantize => "dequantize",
            Command::Simulate => "simulate",
            Command::Stats => "stats",
        }
    }
}

#[derive(Debug, Default, Clone, Args)]
pub struct Options {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads for sweeps and simulation.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// awgn, fading-csi or fading-nocsi.
    #[arg(long, global = true, value_parser = serde_name::<ChannelFamily>)]
    pub channel: Option<ChannelFamily>,
    /// Reference SNR γ₀ in dB.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub snr_db: Option<f64>,
    /// Reference bandwidth B₀ in Hz.
    #[arg(long, global = true)]
    pub ref_bandwidth: Option<f64>,
    /// Operating bandwidth B in Hz.
    #[arg(long, global = true)]
    pub bandwidth: Option<f64>,
    /// Coherence interval F in channel uses.
    #[arg(long, global = true)]
    pub coherence: Option<u32>,

    /// Comma-separated schemes: uq, lq, slq.
    #[arg(long, global = true, value_delimiter = ',')]
    pub scheme: Option<Vec<Scheme>>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub k_top: Option<usize>,
    /// SLQ tail-mass allowance δ.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub ell: Option<u64>,
    #[arg(long, global = true)]
    pub bits_per_entry: Option<u32>,

    /// Comma-separated βt values.
    #[arg(long, global = true, value_delimiter = ',')]
    pub beta_t: Option<Vec<f64>>,
    /// βt values as lo:hi:count.
    #[arg(long, global = true, value_parser = parse_range, conflicts_with = "beta_t")]
    pub beta_t_range: Option<GridRange>,
    /// Comma-separated βs values.
    #[arg(long, global = true, value_delimiter = ',')]
    pub beta_s: Option<Vec<f64>>,
    /// βs values as lo:hi:count.
    #[arg(long, global = true, value_parser = parse_range, conflicts_with = "beta_s")]
    pub beta_s_range: Option<GridRange>,
    #[arg(long, global = true)]
    pub grid_points: Option<usize>,
    /// uniform or log.
    #[arg(long, global = true, value_parser = serde_name::<crate::optimizer::GridMode>)]
    pub grid_mode: Option<crate::optimizer::GridMode>,
    #[arg(long, global = true)]
    pub grid_lower: Option<f64>,
    /// real or integer.
    #[arg(long, global = true, value_parser = serde_name::<crate::budget::BitsMode>)]
    pub bits_mode: Option<crate::budget::BitsMode>,
    /// consistent or as-printed.
    #[arg(long, global = true, value_parser = serde_name::<crate::optimizer::Denominator>)]
    pub denominator: Option<crate::optimizer::Denominator>,
    /// Shrink n by integer search against the exact error model.
    #[arg(long, global = true)]
    pub refine: bool,
    #[arg(long, global = true)]
    pub eps_cap: Option<f64>,

    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// uniform-lattice-point or adversarial-vertex.
    #[arg(long, global = true, value_parser = serde_name::<crate::sim::ErrorModel>)]
    pub error_model: Option<crate::sim::ErrorModel>,
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,
    /// flat, sparse:C or tail[:DELTA].
    #[arg(long, global = true)]
    pub source: Option<String>,

    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// jsonl or csv; guessed from the extension when absent.
    #[arg(long, global = true, value_parser = parse_dataset_format)]
    pub input_format: Option<crate::ingest::DatasetFormat>,
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Comma-separated hex payloads.
    #[arg(long, global = true, value_delimiter = ',')]
    pub payload: Option<Vec<String>>,
    /// Comma-separated probabilities.
    #[arg(long, global = true, value_delimiter = ',')]
    pub vector: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub delta_target: Option<f64>,
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Defaults, then the `--config` file, then explicit flags.
pub fn resolve_config(command: Command, opts: &Options) -> CliResult<RunConfig> {
    let mut cfg = match &opts.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    cfg.command = command.name().to_string();
    let o = opts.clone();
    let c = &mut cfg.channel;
    set(&mut c.family, o.channel);
    set(&mut c.snr_db, o.snr_db);
    set(&mut c.ref_bandwidth_hz, o.ref_bandwidth);
    set(&mut c.bandwidth_hz, o.bandwidth);
    set(&mut c.coherence, o.coherence);
    let s = &mut cfg.scheme;
    set(&mut s.schemes, o.scheme);
    if o.k.is_some() {
        s.k = o.k;
    }
    if o.k_top.is_some() {
        s.k_top = o.k_top;
    }
    set(&mut s.delta, o.delta);
    if o.ell.is_some() {
        s.ell = o.ell;
    }
    if o.bits_per_entry.is_some() {
        s.bits_per_entry = o.bits_per_entry;
    }
    let w = &mut cfg.sweep;
    set(&mut w.beta_t, o.beta_t.or(o.beta_t_range.map(|r| r.0)));
    set(&mut w.beta_s, o.beta_s.or(o.beta_s_range.map(|r| r.0)));
    set(&mut w.grid_points, o.grid_points);
    set(&mut w.grid_mode, o.grid_mode);
    if o.grid_lower.is_some() {
        w.grid_lower = o.grid_lower;
    }
    set(&mut w.bits_mode, o.bits_mode);
    set(&mut w.denominator, o.denominator);
    w.refine |= o.refine;
    set(&mut w.eps_cap, o.eps_cap);
    let m = &mut cfg.sim;
    set(&mut m.trials, o.trials);
    set(&mut m.seed, o.seed);
    set(&mut m.error_model, o.error_model);
    if o.epsilon.is_some() {
        m.epsilon = o.epsilon;
    }
    set(&mut m.source, o.source);
    let io = &mut cfg.io;
    if o.input.is_some() {
        io.input = o.input;
    }
    if o.input_format.is_some() {
        io.input_format = o.input_format;
    }
    if o.output.is_some() {
        io.output = o.output;
    }
    set(&mut io.format, o.format);
    set(&mut io.payload, o.payload);
    set(&mut io.vector, o.vector);
    set(&mut io.delta_target, o.delta_target);
    Ok(cfg)
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code. Output goes to `out` unless `--output` is set.
pub fn run<I, T, W, E>(args: I, out: &mut W, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "latdist: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command line.
pub fn execute<W: Write>(cli: &Cli, out: &mut W) -> CliResult<()> {
    let cfg = resolve_config(cli.command, &cli.opts)?;
    let mut buf = Vec::new();
    commands::dispatch(cli.command, &cfg, cli.opts.jobs, &mut buf)?;
    match &cfg.io.output {
        Some(path) => std::fs::write(path, &buf)?,
        None => out.write_all(&buf)?,
    }
    Ok(())
}
