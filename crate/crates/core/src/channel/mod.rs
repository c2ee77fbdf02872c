//! Finite-blocklength decoding-error models.
//!
//! Units follow the error formulas themselves: the AWGN model works in bits
//! (`log₂`), the fading models in nats with the payload converted by `ln 2`.
//!
//! | family | `ε*(n, γ, J)` |
//! |---|---|
//! | AWGN | `Q((nC − J + ½log₂n) / √(nV))` |
//! | fading, CSI at receiver | `Q((nC_c − J ln2) / √(nF·V_c))` |
//! | fading, no CSI (high SNR) | `Q((nĪ − JF ln2) / √(nF·Ũ))` |

pub mod gaussian;
pub mod quadrature;

use std::f64::consts::{LN_2, LOG2_E, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use gaussian::{q_func, q_inv};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Absolute tolerance used for the fading moment quadratures.
pub const MOMENT_TOLERANCE: f64 = 1e-10;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelFamily {
    Awgn,
    FadingCsi,
    FadingNoCsi,
}

impl ChannelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelFamily::Awgn => "awgn",
            ChannelFamily::FadingCsi => "fading-csi",
            ChannelFamily::FadingNoCsi => "fading-nocsi",
        }
    }
}

impl std::str::FromStr for ChannelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "awgn" => Ok(ChannelFamily::Awgn),
            "fading-csi" | "csi" => Ok(ChannelFamily::FadingCsi),
            "fading-nocsi" | "fading-no-csi" | "nocsi" => Ok(ChannelFamily::FadingNoCsi),
            other => Err(Error::Domain(format!("unknown channel family '{other}'"))),
        }
    }
}

/// The vanishing high-SNR correction term `K'(F, γ)` of the no-CSI model.
#[derive(Clone, Copy)]
pub struct Correction(pub fn(coherence: f64, snr: f64) -> f64);

impl Correction {
    #[inline]
    pub fn eval(&self, coherence: f64, snr: f64) -> f64 {
        (self.0)(coherence, snr)
    }
}

/// `K'(F, γ) = F / (5γ)`.
pub fn default_correction(coherence: f64, snr: f64) -> f64 {
    coherence / (5.0 * snr)
}

impl Default for Correction {
    fn default() -> Self {
        Correction(default_correction)
    }
}

impl fmt::Debug for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Correction(..)")
    }
}

/// Channel family plus the parameters that fix its operating SNR.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub family: ChannelFamily,
    /// Reference SNR `γ₀` (linear) at the reference bandwidth.
    pub reference_snr: f64,
    /// Reference bandwidth `B₀` in Hz.
    pub reference_bandwidth_hz: f64,
    /// Operating bandwidth `B` in Hz.
    pub bandwidth_hz: f64,
    /// Coherence interval `F` in channel uses (fading families only).
    pub coherence: u32,
    #[serde(skip)]
    pub correction: Correction,
}

impl ChannelSpec {
    pub fn awgn(reference_snr: f64, reference_bandwidth_hz: f64, bandwidth_hz: f64) -> Self {
        Self {
            family: ChannelFamily::Awgn,
            reference_snr,
            reference_bandwidth_hz,
            bandwidth_hz,
            coherence: 1,
            correction: Correction::default(),
        }
    }

    pub fn fading_csi(
        reference_snr: f64,
        reference_bandwidth_hz: f64,
        bandwidth_hz: f64,
        coherence: u32,
    ) -> Self {
        Self {
            family: ChannelFamily::FadingCsi,
            coherence,
            ..Self::awgn(reference_snr, reference_bandwidth_hz, bandwidth_hz)
        }
    }

    pub fn fading_nocsi(
        reference_snr: f64,
        reference_bandwidth_hz: f64,
        bandwidth_hz: f64,
        coherence: u32,
    ) -> Self {
        Self {
            family: ChannelFamily::FadingNoCsi,
            coherence,
            ..Self::awgn(reference_snr, reference_bandwidth_hz, bandwidth_hz)
        }
    }

    /// Operating SNR `γ = γ₀·B₀/B`.
    pub fn snr(&self) -> Result<f64> {
        operational_snr(self)
    }
}

/// Operating SNR `γ = γ₀·B₀/B` (linear).
pub fn operational_snr(spec: &ChannelSpec) -> Result<f64> {
    let ChannelSpec {
        reference_snr,
        reference_bandwidth_hz,
        bandwidth_hz,
        ..
    } = *spec;
    for (name, v) in [
        ("reference SNR", reference_snr),
        ("reference bandwidth", reference_bandwidth_hz),
        ("bandwidth", bandwidth_hz),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    Ok(reference_snr * reference_bandwidth_hz / bandwidth_hz)
}

fn check_snr(snr: f64) -> Result<()> {
    if !(snr > 0.0 && snr.is_finite()) {
        return Err(Error::Domain(format!("SNR must be positive, got {snr}")));
    }
    Ok(())
}

/// AWGN capacity and dispersion, both in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AwgnCoefficients {
    pub capacity: f64,
    pub dispersion: f64,
}

/// `C = ½log₂(1+γ)`, `V = γ(γ+2)/(2(γ+1)²)·(log₂e)²`.
pub fn awgn_coeffs(snr: f64) -> Result<AwgnCoefficients> {
    check_snr(snr)?;
    Ok(AwgnCoefficients {
        capacity: 0.5 * snr.ln_1p() * LOG2_E,
        dispersion: snr * (snr + 2.0) / (2.0 * (snr + 1.0).powi(2)) * LOG2_E * LOG2_E,
    })
}

/// Moments of `L = ln(1 + γZ)` and `1/(1 + γZ)` for `Z ~ Exp(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingMoments {
    pub mean_log: f64,
    pub var_log: f64,
    pub mean_inv: f64,
}

pub fn fading_moments(snr: f64) -> Result<FadingMoments> {
    check_snr(snr)?;
    let mean_log = quadrature::exponential_expectation(|z| (snr * z).ln_1p(), MOMENT_TOLERANCE)?;
    let var_log = quadrature::exponential_expectation(
        |z| {
            let d = (snr * z).ln_1p() - mean_log;
            d * d
        },
        MOMENT_TOLERANCE,
    )?;
    let mean_inv =
        quadrature::exponential_expectation(|z| 1.0 / (1.0 + snr * z), MOMENT_TOLERANCE)?;
    Ok(FadingMoments {
        mean_log,
        var_log,
        mean_inv,
    })
}

/// Coherent (CSI at receiver) block-fading coefficients, in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingCsiCoefficients {
    /// `C_c = E[ln(1+γZ)]`
    pub capacity: f64,
    /// `V_c = var[ln(1+γZ)] + 1/F − E[1/(1+γZ)]²/F`
    pub dispersion: f64,
    pub moments: FadingMoments,
}

pub fn fading_csi_coeffs(snr: f64, coherence: u32) -> Result<FadingCsiCoefficients> {
    if coherence < 1 {
        return Err(Error::Domain("coherence interval must be >= 1".into()));
    }
    let moments = fading_moments(snr)?;
    Ok(csi_from_moments(moments, coherence))
}

fn csi_from_moments(moments: FadingMoments, coherence: u32) -> FadingCsiCoefficients {
    let f = coherence as f64;
    FadingCsiCoefficients {
        capacity: moments.mean_log,
        dispersion: moments.var_log + 1.0 / f - moments.mean_inv * moments.mean_inv / f,
        moments,
    }
}

/// Non-coherent high-SNR block-fading coefficients, in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoCsiCoefficients {
    /// `Ī = (F−1)ln(Fγ) − lnΓ(F) − (F−1)(1+η) + K'(F, γ)`
    pub info: f64,
    /// `Ũ = (F−1)²π²/6 + (F−1)`
    pub dispersion: f64,
}

pub fn fading_nocsi_coeffs(snr: f64, coherence: u32) -> Result<NoCsiCoefficients> {
    fading_nocsi_coeffs_with(snr, coherence, Correction::default())
}

pub fn fading_nocsi_coeffs_with(
    snr: f64,
    coherence: u32,
    correction: Correction,
) -> Result<NoCsiCoefficients> {
    check_snr(snr)?;
    if coherence <= 2 {
        return Err(Error::Domain(format!(
            "no-CSI model needs coherence interval > 2, got {coherence}"
        )));
    }
    let f = coherence as f64;
    let info = (f - 1.0) * (f * snr).ln() - libm::lgamma(f) - (f - 1.0) * (1.0 + EULER_GAMMA)
        + correction.eval(f, snr);
    let dispersion = (f - 1.0).powi(2) * PI * PI / 6.0 + (f - 1.0);
    Ok(NoCsiCoefficients { info, dispersion })
}

fn check_n_bits(n: u64, bits: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::Domain("blocklength must be >= 1".into()));
    }
    if !(bits > 0.0 && bits.is_finite()) {
        return Err(Error::Domain(format!("payload bits must be positive, got {bits}")));
    }
    Ok(())
}

pub fn epsilon_awgn(n: u64, snr: f64, bits: f64) -> Result<f64> {
    check_n_bits(n, bits)?;
    Ok(ChannelModel::awgn(snr)?.epsilon(n as f64, bits))
}

pub fn epsilon_fading_csi(n: u64, snr: f64, bits: f64, coherence: u32) -> Result<f64> {
    check_n_bits(n, bits)?;
    Ok(ChannelModel::fading_csi(snr, coherence)?.epsilon(n as f64, bits))
}

pub fn epsilon_fading_nocsi(n: u64, snr: f64, bits: f64, coherence: u32) -> Result<f64> {
    check_n_bits(n, bits)?;
    Ok(ChannelModel::fading_nocsi(snr, coherence, Correction::default())?.epsilon(n as f64, bits))
}

/// A channel with its coefficients resolved at one operating SNR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ChannelModel {
    Awgn {
        snr: f64,
        coeffs: AwgnCoefficients,
    },
    FadingCsi {
        snr: f64,
        coherence: u32,
        coeffs: FadingCsiCoefficients,
    },
    FadingNoCsi {
        snr: f64,
        coherence: u32,
        coeffs: NoCsiCoefficients,
    },
}

impl ChannelModel {
    pub fn awgn(snr: f64) -> Result<Self> {
        Ok(ChannelModel::Awgn {
            snr,
            coeffs: awgn_coeffs(snr)?,
        })
    }

    pub fn fading_csi(snr: f64, coherence: u32) -> Result<Self> {
        Ok(ChannelModel::FadingCsi {
            snr,
            coherence,
            coeffs: fading_csi_coeffs(snr, coherence)?,
        })
    }

    pub fn fading_nocsi(snr: f64, coherence: u32, correction: Correction) -> Result<Self> {
        Ok(ChannelModel::FadingNoCsi {
            snr,
            coherence,
            coeffs: fading_nocsi_coeffs_with(snr, coherence, correction)?,
        })
    }

    pub fn from_spec(spec: &ChannelSpec) -> Result<Self> {
        let snr = operational_snr(spec)?;
        match spec.family {
            ChannelFamily::Awgn => Self::awgn(snr),
            ChannelFamily::FadingCsi => Self::fading_csi(snr, spec.coherence),
            ChannelFamily::FadingNoCsi => Self::fading_nocsi(snr, spec.coherence, spec.correction),
        }
    }

    pub fn family(&self) -> ChannelFamily {
        match self {
            ChannelModel::Awgn { .. } => ChannelFamily::Awgn,
            ChannelModel::FadingCsi { .. } => ChannelFamily::FadingCsi,
            ChannelModel::FadingNoCsi { .. } => ChannelFamily::FadingNoCsi,
        }
    }

    pub fn snr(&self) -> f64 {
        match *self {
            ChannelModel::Awgn { snr, .. }
            | ChannelModel::FadingCsi { snr, .. }
            | ChannelModel::FadingNoCsi { snr, .. } => snr,
        }
    }

    /// Decoding error probability at (possibly fractional) blocklength `n`.
    pub fn epsilon(&self, n: f64, bits: f64) -> f64 {
        match *self {
            ChannelModel::Awgn { coeffs, .. } => q_func(
                (n * coeffs.capacity - bits + 0.5 * n.log2()) / (n * coeffs.dispersion).sqrt(),
            ),
            ChannelModel::FadingCsi {
                coherence, coeffs, ..
            } => q_func(
                (n * coeffs.capacity - bits * LN_2)
                    / (n * coherence as f64 * coeffs.dispersion).sqrt(),
            ),
            ChannelModel::FadingNoCsi {
                coherence, coeffs, ..
            } => {
                let f = coherence as f64;
                q_func((n * coeffs.info - bits * f * LN_2) / (n * f * coeffs.dispersion).sqrt())
            }
        }
    }
}
