//! Bit budgets `J(βs)` that guarantee a TV source distortion of at most `βs`.
//!
//! Each budget is available both as a real-valued bound (what the latency
//! optimizer consumes) and as the integer payload size the codec actually
//! sends.

use serde::{Deserialize, Serialize};

use crate::codec::{composition_count_bits, log2_binomial, subset_count_bits};
use crate::error::{Error, Result};
use crate::quantize::{Quantizer, MAX_UQ_BITS};

/// Default tail-mass allowance for SLQ.
pub const DEFAULT_DELTA: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Uq,
    Lq,
    Slq,
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Uq => "uq",
            Scheme::Lq => "lq",
            Scheme::Slq => "slq",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uq" => Ok(Scheme::Uq),
            "lq" => Ok(Scheme::Lq),
            "slq" => Ok(Scheme::Slq),
            other => Err(Error::Domain(format!("unknown scheme '{other}'"))),
        }
    }
}

fn check_open_unit(beta_s: f64) -> Result<()> {
    if !(beta_s > 0.0 && beta_s < 1.0) {
        return Err(Error::Domain(format!("beta_s must be in (0, 1), got {beta_s}")));
    }
    Ok(())
}

/// UQ budget `2k·log₂(k/βs)` bits.
pub fn budget_uq(k: usize, beta_s: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::TooFewClasses(k));
    }
    check_open_unit(beta_s)?;
    Ok(2.0 * k as f64 * (k as f64 / beta_s).log2())
}

/// Tighter UQ budget `k·log₂(k/2α*)` with `α* = 2βs/(k + 1 + βs)`.
pub fn budget_uq_tight(k: usize, beta_s: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::TooFewClasses(k));
    }
    check_open_unit(beta_s)?;
    let kf = k as f64;
    let alpha = 2.0 * beta_s / (kf + 1.0 + beta_s);
    Ok(kf * (kf / (2.0 * alpha)).log2())
}

/// Bits per UQ entry, `⌈2·log₂(k/βs)⌉`.
pub fn uq_bits_per_entry(k: usize, beta_s: f64) -> Result<u32> {
    let per_entry = budget_uq(k, beta_s)? / k as f64;
    let j = per_entry.ceil();
    if j > MAX_UQ_BITS as f64 {
        return Err(Error::Domain(format!(
            "UQ needs {j} bits per entry, above the supported {MAX_UQ_BITS}"
        )));
    }
    Ok(j as u32)
}

/// A lattice budget: denominator and payload bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeBudget {
    pub ell: u64,
    /// Integer payload size.
    pub bits: u64,
    /// The same budget before the outer ceilings.
    pub bits_real: f64,
}

fn lattice_denominator(numerator: f64, denominator: f64) -> Result<u64> {
    let ell = (numerator / denominator).ceil();
    if !(ell.is_finite() && ell >= 1.0 && ell < 2f64.powi(53)) {
        return Err(Error::Domain(format!("lattice denominator {ell} out of range")));
    }
    Ok(ell as u64)
}

/// LQ budget with `ell = ⌈k/(4βs)⌉`.
pub fn budget_lq(k: usize, beta_s: f64) -> Result<LatticeBudget> {
    if k < 1 {
        return Err(Error::Empty);
    }
    check_open_unit(beta_s)?;
    let ell = lattice_denominator(k as f64, 4.0 * beta_s)?;
    let n = ell + k as u64 - 1;
    Ok(LatticeBudget {
        ell,
        bits: composition_count_bits(k, ell),
        bits_real: log2_binomial(n, k as u64 - 1),
    })
}

/// SLQ budget with `ell = ⌈k_top/(4(βs − δ))⌉`.
pub fn budget_slq(k: usize, k_top: usize, delta: f64, beta_s: f64) -> Result<LatticeBudget> {
    if k_top == 0 || k_top > k {
        return Err(Error::Domain(format!("k_top must be in 1..={k}, got {k_top}")));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!("delta must be in [0, 1), got {delta}")));
    }
    check_open_unit(beta_s)?;
    if beta_s <= delta {
        return Err(Error::BetaNotAboveDelta { beta_s, delta });
    }
    let ell = lattice_denominator(k_top as f64, 4.0 * (beta_s - delta))?;
    Ok(LatticeBudget {
        ell,
        bits: subset_count_bits(k, k_top) + composition_count_bits(k_top, ell),
        bits_real: log2_binomial(k as u64, k_top as u64)
            + log2_binomial(ell + k_top as u64 - 1, k_top as u64 - 1),
    })
}

/// Which value of the budget the latency solver consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BitsMode {
    /// Real-valued bound, continuous in `βs` between lattice steps.
    #[default]
    Real,
    /// Integer payload size actually sent.
    Integer,
}

/// One evaluation of a budget function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetValue {
    pub bits_real: f64,
    pub bits: u64,
    pub quantizer: Quantizer,
}

impl BudgetValue {
    pub fn bits_for(&self, mode: BitsMode) -> f64 {
        match mode {
            BitsMode::Real => self.bits_real,
            BitsMode::Integer => self.bits as f64,
        }
    }
}

/// `βs ↦ J(βs)` for a scheme at a fixed dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetFn {
    pub scheme: Scheme,
    pub k: usize,
    pub k_top: Option<usize>,
    pub delta: f64,
}

impl BudgetFn {
    pub fn uq(k: usize) -> Self {
        Self {
            scheme: Scheme::Uq,
            k,
            k_top: None,
            delta: 0.0,
        }
    }

    pub fn lq(k: usize) -> Self {
        Self {
            scheme: Scheme::Lq,
            k,
            k_top: None,
            delta: 0.0,
        }
    }

    pub fn slq(k: usize, k_top: usize, delta: f64) -> Self {
        Self {
            scheme: Scheme::Slq,
            k,
            k_top: Some(k_top),
            delta,
        }
    }

    /// Smallest `βs` the budget is defined for (exclusive).
    pub fn domain_floor(&self) -> f64 {
        match self.scheme {
            Scheme::Slq => self.delta,
            _ => 0.0,
        }
    }

    pub fn eval(&self, beta_s: f64) -> Result<BudgetValue> {
        match self.scheme {
            Scheme::Uq => {
                let j = uq_bits_per_entry(self.k, beta_s)?;
                Ok(BudgetValue {
                    bits_real: budget_uq(self.k, beta_s)?,
                    bits: self.k as u64 * j as u64,
                    quantizer: Quantizer::Uq { bits_per_entry: j },
                })
            }
            Scheme::Lq => {
                let b = budget_lq(self.k, beta_s)?;
                Ok(BudgetValue {
                    bits_real: b.bits_real,
                    bits: b.bits,
                    quantizer: Quantizer::Lq { ell: b.ell },
                })
            }
            Scheme::Slq => {
                let k_top = self
                    .k_top
                    .ok_or_else(|| Error::Domain("SLQ needs k_top".into()))?;
                let b = budget_slq(self.k, k_top, self.delta, beta_s)?;
                Ok(BudgetValue {
                    bits_real: b.bits_real,
                    bits: b.bits,
                    quantizer: Quantizer::Slq { k_top, ell: b.ell },
                })
            }
        }
    }
}
