//! Resolved run configuration: defaults, then an optional JSON file, then flags.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::budget::{BitsMode, Scheme, DEFAULT_DELTA};
use crate::channel::ChannelFamily;
use crate::ingest::DatasetFormat;
use crate::optimizer::{Denominator, GridMode};
use crate::sim::ErrorModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub family: ChannelFamily,
    /// Reference SNR `γ₀` in dB.
    pub snr_db: f64,
    pub ref_bandwidth_hz: f64,
    pub bandwidth_hz: f64,
    pub coherence: u32,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            family: ChannelFamily::Awgn,
            snr_db: 5.0,
            ref_bandwidth_hz: 10e3,
            bandwidth_hz: 10e3,
            coherence: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeConfig {
    pub schemes: Vec<Scheme>,
    pub k: Option<usize>,
    pub k_top: Option<usize>,
    pub delta: f64,
    /// Lattice denominator override for quantize/dequantize.
    pub ell: Option<u64>,
    /// UQ bits-per-entry override for quantize/dequantize.
    pub bits_per_entry: Option<u32>,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            schemes: vec![Scheme::Uq, Scheme::Lq, Scheme::Slq],
            k: None,
            k_top: None,
            delta: DEFAULT_DELTA,
            ell: None,
            bits_per_entry: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub beta_t: Vec<f64>,
    pub beta_s: Vec<f64>,
    pub grid_points: usize,
    pub grid_mode: GridMode,
    pub grid_lower: Option<f64>,
    pub bits_mode: BitsMode,
    pub denominator: Denominator,
    pub refine: bool,
    pub eps_cap: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            beta_t: Vec::new(),
            beta_s: Vec::new(),
            grid_points: 1000,
            grid_mode: GridMode::Uniform,
            grid_lower: None,
            bits_mode: BitsMode::Real,
            denominator: Denominator::Consistent,
            refine: false,
            eps_cap: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub trials: u64,
    pub seed: u64,
    pub error_model: ErrorModel,
    /// Failure probability; derived from `beta_t` when absent.
    pub epsilon: Option<f64>,
    /// `flat`, `sparse:C` or `tail[:DELTA]`.
    pub source: String,
}

impl Default for SimSection {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 42,
            error_model: ErrorModel::UniformLatticePoint,
            epsilon: None,
            source: "flat".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IoConfig {
    pub input: Option<PathBuf>,
    pub input_format: Option<DatasetFormat>,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Hex payloads for dequantize.
    pub payload: Vec<String>,
    /// A single vector for quantize.
    pub vector: Vec<f64>,
    /// `δ_avg` target for the `k_top` recommendation.
    pub delta_target: f64,
}

impl Default for IoConfig {
    fn default() -> Self {
        Self {
            input: None,
            input_format: None,
            output: None,
            format: OutputFormat::Csv,
            payload: Vec::new(),
            vector: Vec::new(),
            delta_target: 0.01,
        }
    }
}

/// Everything a run depends on. Thread count is deliberately absent so that
/// outputs do not vary with it.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub channel: ChannelConfig,
    pub scheme: SchemeConfig,
    pub sweep: SweepConfig,
    pub sim: SimSection,
    pub io: IoConfig,
}
