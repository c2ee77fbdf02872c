use std::io::Write;

use serde::Serialize;

use super::config::{OutputFormat, RunConfig};
use super::{CliError, CliResult, Command};
use crate::budget::{budget_lq, budget_slq, budget_uq, uq_bits_per_entry, BudgetFn, Scheme};
use crate::channel::{db_to_linear, ChannelModel, ChannelSpec, Correction};
use crate::error::Error;
use crate::ingest::{self, DatasetFormat};
use crate::optimizer::{
    epsilon_target, sweep_beta_s, sweep_beta_t, GridSpec, Problem, SolveOptions, TradeoffPoint,
};
use crate::prob::ProbVector;
use crate::quantize::Quantizer;
use crate::sim::{self, SimConfig, Source};

pub(super) fn dispatch<W: Write>(
    command: Command,
    cfg: &RunConfig,
    jobs: Option<usize>,
    out: &mut W,
) -> CliResult<()> {
    match command {
        Command::Budget => cmd_budget(cfg, out),
        Command::Tradeoff => cmd_tradeoff(cfg, jobs, out),
        Command::Hull => cmd_hull(cfg, jobs, out),
        Command::Quantize => cmd_quantize(cfg, out),
        Command::Dequantize => cmd_dequantize(cfg, out),
        Command::Simulate => cmd_simulate(cfg, jobs, out),
        Command::Stats => cmd_stats(cfg, out),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn config_line(cfg: &RunConfig) -> CliResult<String> {
    serde_json::to_string(cfg).map_err(|e| CliError::Lib(Error::Io(e.to_string())))
}

fn write_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Lib(Error::Io(e.to_string())))?;
    writeln!(out)?;
    Ok(())
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn require_k(cfg: &RunConfig) -> CliResult<usize> {
    cfg.scheme.k.ok_or_else(|| usage("--k is required"))
}

fn single_scheme(cfg: &RunConfig) -> CliResult<Scheme> {
    match cfg.scheme.schemes.as_slice() {
        [s] => Ok(*s),
        _ => Err(usage("exactly one --scheme is required")),
    }
}

fn single_beta_s(cfg: &RunConfig) -> CliResult<f64> {
    match cfg.sweep.beta_s.as_slice() {
        [b] => Ok(*b),
        _ => Err(usage("exactly one --beta-s is required")),
    }
}

fn budget_fn(cfg: &RunConfig, scheme: Scheme, k: usize) -> CliResult<BudgetFn> {
    Ok(match scheme {
        Scheme::Uq => BudgetFn::uq(k),
        Scheme::Lq => BudgetFn::lq(k),
        Scheme::Slq => {
            let k_top = cfg.scheme.k_top.ok_or_else(|| usage("--k-top is required for slq"))?;
            BudgetFn::slq(k, k_top, cfg.scheme.delta)
        }
    })
}

fn channel_model(cfg: &RunConfig) -> CliResult<ChannelModel> {
    let c = &cfg.channel;
    let spec = ChannelSpec {
        family: c.family,
        reference_snr: db_to_linear(c.snr_db),
        reference_bandwidth_hz: c.ref_bandwidth_hz,
        bandwidth_hz: c.bandwidth_hz,
        coherence: c.coherence,
        correction: Correction::default(),
    };
    Ok(ChannelModel::from_spec(&spec)?)
}

fn problem(cfg: &RunConfig, scheme: Scheme, channel: ChannelModel) -> CliResult<Problem> {
    Ok(Problem {
        budget: budget_fn(cfg, scheme, require_k(cfg)?)?,
        channel,
        bandwidth_hz: cfg.channel.bandwidth_hz,
        bits_mode: cfg.sweep.bits_mode,
        solve: SolveOptions {
            eps_cap: cfg.sweep.eps_cap,
            refine: cfg.sweep.refine,
            denominator: cfg.sweep.denominator,
        },
    })
}

fn grid(cfg: &RunConfig) -> GridSpec {
    GridSpec {
        points: cfg.sweep.grid_points,
        mode: cfg.sweep.grid_mode,
        lower: cfg.sweep.grid_lower,
    }
}

#[derive(Serialize)]
struct BudgetRow {
    beta_s: f64,
    #[serde(rename = "J_UQ")]
    j_uq: Option<u64>,
    #[serde(rename = "J_LQ")]
    j_lq: Option<u64>,
    #[serde(rename = "J_SLQ")]
    j_slq: Option<u64>,
    ell_lq: Option<u64>,
    ell_slq: Option<u64>,
    #[serde(rename = "J_UQ_real")]
    j_uq_real: Option<f64>,
    #[serde(rename = "J_LQ_real")]
    j_lq_real: Option<f64>,
    #[serde(rename = "J_SLQ_real")]
    j_slq_real: Option<f64>,
}

fn cmd_budget<W: Write>(cfg: &RunConfig, out: &mut W) -> CliResult<()> {
    let k = require_k(cfg)?;
    if cfg.sweep.beta_s.is_empty() {
        return Err(usage("empty beta_s range"));
    }
    let rows: Vec<BudgetRow> = cfg
        .sweep
        .beta_s
        .iter()
        .map(|&bs| {
            let uq = uq_bits_per_entry(k, bs).ok();
            let lq = budget_lq(k, bs).ok();
            let slq = cfg
                .scheme
                .k_top
                .and_then(|t| budget_slq(k, t, cfg.scheme.delta, bs).ok());
            BudgetRow {
                beta_s: bs,
                j_uq: uq.map(|j| j as u64 * k as u64),
                j_lq: lq.map(|b| b.bits),
                j_slq: slq.map(|b| b.bits),
                ell_lq: lq.map(|b| b.ell),
                ell_slq: slq.map(|b| b.ell),
                j_uq_real: uq.and(budget_uq(k, bs).ok()),
                j_lq_real: lq.map(|b| b.bits_real),
                j_slq_real: slq.map(|b| b.bits_real),
            }
        })
        .collect();
    match cfg.io.format {
        OutputFormat::Json => write_json(out, &serde_json::json!({ "config": cfg, "rows": rows })),
        OutputFormat::Csv => {
            writeln!(out, "# config {}", config_line(cfg)?)?;
            writeln!(out, "beta_s,J_UQ,J_LQ,J_SLQ,ell_LQ,ell_SLQ,J_UQ_real,J_LQ_real,J_SLQ_real")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    r.beta_s,
                    opt(r.j_uq),
                    opt(r.j_lq),
                    opt(r.j_slq),
                    opt(r.ell_lq),
                    opt(r.ell_slq),
                    opt(r.j_uq_real),
                    opt(r.j_lq_real),
                    opt(r.j_slq_real)
                )?;
            }
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct CurveRow {
    scheme: &'static str,
    beta_t: f64,
    beta_s: f64,
    #[serde(rename = "J_bits")]
    j_bits: Option<f64>,
    epsilon_target: Option<f64>,
    n: Option<u64>,
    latency_ms: Option<f64>,
    feasible: bool,
    hull_member: bool,
    latency_s: Option<f64>,
}

impl CurveRow {
    fn new(scheme: Scheme, p: &TradeoffPoint, hull_member: bool) -> Self {
        Self {
            scheme: scheme.name(),
            beta_t: p.beta_t,
            beta_s: p.beta_s,
            j_bits: finite(p.bits),
            epsilon_target: finite(p.epsilon_target),
            n: p.n,
            latency_ms: p.latency_ms(),
            feasible: p.feasible,
            hull_member,
            latency_s: p.latency_s,
        }
    }
}

const CURVE_COLUMNS: &str =
    "scheme,beta_t,beta_s,J_bits,epsilon_target,n,latency_ms,feasible,hull_member,latency_s";

fn write_curve<W: Write>(cfg: &RunConfig, rows: &[CurveRow], out: &mut W) -> CliResult<()> {
    match cfg.io.format {
        OutputFormat::Json => write_json(out, &serde_json::json!({ "config": cfg, "rows": rows })),
        OutputFormat::Csv => {
            writeln!(out, "# config {}", config_line(cfg)?)?;
            writeln!(out, "{CURVE_COLUMNS}")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{}",
                    r.scheme,
                    r.beta_t,
                    r.beta_s,
                    opt(r.j_bits),
                    opt(r.epsilon_target),
                    opt(r.n),
                    opt(r.latency_ms),
                    r.feasible,
                    r.hull_member,
                    opt(r.latency_s)
                )?;
            }
            Ok(())
        }
    }
}

fn infeasible(e: Error) -> CliError {
    match e {
        Error::NoFeasibleN(m) => CliError::Infeasible(m),
        other => CliError::Lib(other),
    }
}

fn cmd_tradeoff<W: Write>(cfg: &RunConfig, jobs: Option<usize>, out: &mut W) -> CliResult<()> {
    if cfg.sweep.beta_t.is_empty() {
        return Err(usage("--beta-t is required"));
    }
    let channel = channel_model(cfg)?;
    let mut rows = Vec::new();
    for &scheme in &cfg.scheme.schemes {
        let problem = problem(cfg, scheme, channel)?;
        for &bt in &cfg.sweep.beta_t {
            let sweep = sweep_beta_s(bt, &problem, &grid(cfg), jobs).map_err(infeasible)?;
            rows.extend(sweep.points.iter().map(|p| CurveRow::new(scheme, p, false)));
        }
    }
    write_curve(cfg, &rows, out)
}

fn cmd_hull<W: Write>(cfg: &RunConfig, jobs: Option<usize>, out: &mut W) -> CliResult<()> {
    if cfg.sweep.beta_t.is_empty() {
        return Err(usage("--beta-t or --beta-t-range is required"));
    }
    let channel = channel_model(cfg)?;
    let mut rows = Vec::new();
    for &scheme in &cfg.scheme.schemes {
        let problem = problem(cfg, scheme, channel)?;
        let curve = sweep_beta_t(&cfg.sweep.beta_t, &problem, &grid(cfg), jobs).map_err(infeasible)?;
        rows.extend(
            curve
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| CurveRow::new(scheme, p, curve.is_hull_member(i))),
        );
    }
    write_curve(cfg, &rows, out)
}

/// Quantizer from explicit overrides, or from the budget at the single `βs`.
fn resolve_quantizer(cfg: &RunConfig, scheme: Scheme, k: usize) -> CliResult<Quantizer> {
    let s = &cfg.scheme;
    let from_budget = || -> CliResult<Quantizer> {
        Ok(budget_fn(cfg, scheme, k)?.eval(single_beta_s(cfg)?)?.quantizer)
    };
    match scheme {
        Scheme::Uq => match s.bits_per_entry {
            Some(b) => Ok(Quantizer::Uq { bits_per_entry: b }),
            None => from_budget(),
        },
        Scheme::Lq => match s.ell {
            Some(ell) => Ok(Quantizer::Lq { ell }),
            None => from_budget(),
        },
        Scheme::Slq => match (s.ell, s.k_top) {
            (Some(ell), Some(k_top)) => Ok(Quantizer::Slq { k_top, ell }),
            (_, None) => Err(usage("--k-top is required for slq")),
            _ => from_budget(),
        },
    }
}

fn input_format(cfg: &RunConfig, path: &std::path::Path) -> DatasetFormat {
    cfg.io
        .input_format
        .unwrap_or_else(|| DatasetFormat::from_path(path))
}

fn input_vectors(cfg: &RunConfig) -> CliResult<Vec<ProbVector>> {
    if !cfg.io.vector.is_empty() {
        return Ok(vec![ProbVector::new(&cfg.io.vector, true)?]);
    }
    let path = cfg
        .io
        .input
        .as_ref()
        .ok_or_else(|| usage("--vector or --input is required"))?;
    Ok(ingest::load_dataset(path, input_format(cfg, path))?
        .vectors()
        .to_vec())
}

#[derive(Serialize)]
struct PayloadRow {
    index: usize,
    quantizer: Quantizer,
    payload_bits: u64,
    payload_hex: String,
}

fn cmd_quantize<W: Write>(cfg: &RunConfig, out: &mut W) -> CliResult<()> {
    let scheme = single_scheme(cfg)?;
    let vectors = input_vectors(cfg)?;
    let k = vectors[0].k();
    if cfg.scheme.k.is_some_and(|ck| ck != k) {
        return Err(Error::DimensionMismatch(cfg.scheme.k.unwrap(), k).into());
    }
    let quantizer = resolve_quantizer(cfg, scheme, k)?;
    let rows = vectors
        .iter()
        .enumerate()
        .map(|(index, p)| {
            Ok(PayloadRow {
                index,
                quantizer,
                payload_bits: quantizer.payload_bits(k),
                payload_hex: hex::encode(quantizer.encode(p)?.to_bytes()),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    match cfg.io.format {
        OutputFormat::Json => write_json(out, &serde_json::json!({ "config": cfg, "rows": rows })),
        OutputFormat::Csv => {
            writeln!(out, "# config {}", config_line(cfg)?)?;
            writeln!(out, "index,scheme,payload_bits,payload_hex")?;
            for r in rows {
                writeln!(out, "{},{},{},{}", r.index, scheme.name(), r.payload_bits, r.payload_hex)?;
            }
            Ok(())
        }
    }
}

fn cmd_dequantize<W: Write>(cfg: &RunConfig, out: &mut W) -> CliResult<()> {
    let scheme = single_scheme(cfg)?;
    let k = require_k(cfg)?;
    let quantizer = resolve_quantizer(cfg, scheme, k)?;
    let payloads: Vec<String> = if !cfg.io.payload.is_empty() {
        cfg.io.payload.clone()
    } else if let Some(path) = &cfg.io.input {
        std::fs::read_to_string(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect()
    } else {
        return Err(usage("--payload or --input is required"));
    };
    let vectors = payloads
        .iter()
        .map(|h| {
            let bytes = hex::decode(h).map_err(|e| Error::Payload(format!("'{h}': {e}")))?;
            Ok(quantizer.decode_bytes(&bytes, k)?.decode()?.into_inner())
        })
        .collect::<CliResult<Vec<_>>>()?;
    match cfg.io.format {
        OutputFormat::Json => {
            let rows: Vec<_> = vectors
                .iter()
                .enumerate()
                .map(|(index, values)| serde_json::json!({ "index": index, "values": values }))
                .collect();
            write_json(out, &serde_json::json!({ "config": cfg, "rows": rows }))
        }
        OutputFormat::Csv => {
            writeln!(out, "# config {}", config_line(cfg)?)?;
            let cols: Vec<String> = (0..k).map(|i| format!("p{i}")).collect();
            writeln!(out, "index,{}", cols.join(","))?;
            for (i, v) in vectors.iter().enumerate() {
                let vals: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                writeln!(out, "{i},{}", vals.join(","))?;
            }
            Ok(())
        }
    }
}

fn parse_source(cfg: &RunConfig) -> CliResult<Source> {
    let text = cfg.sim.source.trim().to_ascii_lowercase();
    let mut parts = text.splitn(2, ':');
    let kind = parts.next().unwrap_or_default();
    let arg = parts.next();
    let number = |a: &str| {
        a.parse::<f64>()
            .map_err(|e| usage(format!("source '{text}': {e}")))
    };
    match (kind, arg) {
        ("flat", None) => Ok(Source::Flat),
        ("sparse", Some(c)) => Ok(Source::Sparse {
            concentration: number(c)?,
        }),
        ("tail", a) => Ok(Source::TailBounded {
            k_top: cfg
                .scheme
                .k_top
                .ok_or_else(|| usage("tail source needs --k-top"))?,
            delta: a.map(number).transpose()?.unwrap_or(cfg.scheme.delta),
        }),
        _ => Err(usage(format!("unknown source '{text}'"))),
    }
}

#[derive(Serialize)]
struct SimOutput<'a> {
    #[serde(flatten)]
    report: &'a sim::SimReport,
    run_config: &'a RunConfig,
}

fn cmd_simulate<W: Write>(cfg: &RunConfig, jobs: Option<usize>, out: &mut W) -> CliResult<()> {
    let scheme = single_scheme(cfg)?;
    let k = require_k(cfg)?;
    let beta_s = single_beta_s(cfg)?;
    let epsilon = match (cfg.sim.epsilon, cfg.sweep.beta_t.as_slice()) {
        (Some(e), _) => e,
        (None, [bt]) => epsilon_target(*bt, beta_s)?,
        _ => return Err(usage("--epsilon or a single --beta-t is required")),
    };
    let sim_cfg = SimConfig {
        trials: cfg.sim.trials,
        seed: cfg.sim.seed,
        error_model: cfg.sim.error_model,
        budget: budget_fn(cfg, scheme, k)?,
        beta_s,
        epsilon,
        source: parse_source(cfg)?,
    };
    let report = sim::simulate_end_to_end(&sim_cfg, jobs)?;
    write_json(
        out,
        &SimOutput {
            report: &report,
            run_config: cfg,
        },
    )
}

fn cmd_stats<W: Write>(cfg: &RunConfig, out: &mut W) -> CliResult<()> {
    let path = cfg.io.input.as_ref().ok_or_else(|| usage("--input is required"))?;
    let ds = ingest::load_dataset(path, input_format(cfg, path))?;
    let curve = ingest::top_mass_curve(&ds, 1..=ds.k())?;
    let rec = ingest::recommend_ktop(&ds, cfg.io.delta_target)?;
    let q99 = ingest::tail_mass_quantile(&ds, rec.k_top, 0.99)?;
    match cfg.io.format {
        OutputFormat::Json => write_json(
            out,
            &serde_json::json!({
                "config": cfg,
                "vectors": ds.len(),
                "curve": curve,
                "recommendation": rec,
                "tail_mass_q99": q99,
            }),
        ),
        OutputFormat::Csv => {
            writeln!(out, "# config {}", config_line(cfg)?)?;
            writeln!(
                out,
                "# recommended k_top={} delta_avg={} reachable={} violation_fraction={} tail_mass_q99={}",
                rec.k_top, rec.delta_avg, rec.reachable, rec.violation_fraction, q99
            )?;
            curve.write_delimited(out)?;
            Ok(())
        }
    }
}
