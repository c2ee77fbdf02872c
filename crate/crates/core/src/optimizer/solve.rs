//! Closed-form blocklength solvers.
//!
//! Each family's normal approximation is linear in `n` and `√n` once the
//! `½log₂n` term (AWGN only) is dropped, so `√n` is the positive root of
//! `a·x² − r·x − c = 0`. The integer `n` is then adjusted until the exact
//! error model meets the target.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::channel::{q_inv, ChannelModel};
use crate::error::{Error, Result};

/// Tolerance on the ε-cap comparison.
pub const EPSILON_TOLERANCE: f64 = 1e-12;

/// Largest blocklength the solvers will return.
pub const MAX_BLOCKLENGTH: u64 = 1 << 53;

/// Leading coefficient of the fading quadratics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Denominator {
    /// The family's own capacity term (`C_c` or `Ī`).
    #[default]
    Consistent,
    /// AWGN `C(γ)` for every family, without the exact-ε correction.
    AsPrinted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Upper limit on `ε_target`.
    pub eps_cap: f64,
    /// Shrink `n` by integer search while the exact ε stays on target.
    pub refine: bool,
    pub denominator: Denominator,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            eps_cap: 0.5,
            refine: false,
            denominator: Denominator::Consistent,
        }
    }
}

/// Solver output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Blocklength {
    pub n: u64,
    /// Square of the quadratic root, before rounding.
    pub n_real: f64,
    /// Exact model error at `n`.
    pub epsilon: f64,
}

/// `ε_target = (βt − βs)/(1 − βs)`.
pub fn epsilon_target(beta_t: f64, beta_s: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&beta_s) || !(beta_t > beta_s && beta_t <= 1.0) {
        return Err(Error::Domain(format!(
            "need 0 <= beta_s < beta_t <= 1, got beta_s={beta_s}, beta_t={beta_t}"
        )));
    }
    Ok((beta_t - beta_s) / (1.0 - beta_s))
}

/// Latency `T = n/(2B)` in seconds.
pub fn latency_seconds(n: u64, bandwidth_hz: f64) -> f64 {
    n as f64 / (2.0 * bandwidth_hz)
}

fn check_epsilon(model: &ChannelModel, epsilon: f64, opts: &SolveOptions) -> Result<()> {
    let strict_half = matches!(model, ChannelModel::FadingNoCsi { .. });
    let upper = if strict_half {
        opts.eps_cap.min(0.5)
    } else {
        opts.eps_cap
    };
    let too_high = if strict_half {
        epsilon >= 0.5 || epsilon > upper + EPSILON_TOLERANCE
    } else {
        epsilon > upper + EPSILON_TOLERANCE
    };
    if !(epsilon > 0.0) || epsilon >= 1.0 || too_high {
        return Err(Error::EpsilonOutOfRange {
            epsilon,
            lower: 0.0,
            upper,
        });
    }
    Ok(())
}

/// `(a, r, c)` with `√n` the positive root of `a·x² − r·x − c = 0`.
fn quadratic(model: &ChannelModel, epsilon: f64, bits: f64, den: Denominator) -> Result<(f64, f64, f64)> {
    let qi = q_inv(epsilon)?;
    let (a, r, c) = match *model {
        ChannelModel::Awgn { coeffs, .. } => (coeffs.capacity, coeffs.dispersion.sqrt() * qi, bits),
        ChannelModel::FadingCsi {
            coherence, coeffs, ..
        } => (
            coeffs.capacity,
            (coherence as f64 * coeffs.dispersion).sqrt() * qi,
            bits * LN_2,
        ),
        ChannelModel::FadingNoCsi {
            coherence, coeffs, ..
        } => {
            let f = coherence as f64;
            (coeffs.info, (f * coeffs.dispersion).sqrt() * qi, bits * f * LN_2)
        }
    };
    let a = match den {
        Denominator::Consistent => a,
        Denominator::AsPrinted => crate::channel::awgn_coeffs(model.snr())?.capacity,
    };
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::NoFeasibleN(format!(
            "non-positive rate coefficient {a} at SNR {}",
            model.snr()
        )));
    }
    Ok((a, r, c))
}

/// Minimum integer blocklength with `ε*(n) ≤ epsilon` for payload `bits`.
pub fn solve_blocklength(
    model: &ChannelModel,
    epsilon: f64,
    bits: f64,
    opts: &SolveOptions,
) -> Result<Blocklength> {
    check_epsilon(model, epsilon, opts)?;
    if !(bits > 0.0 && bits.is_finite()) {
        return Err(Error::Domain(format!("payload bits must be positive, got {bits}")));
    }
    let (a, r, c) = quadratic(model, epsilon, bits, opts.denominator)?;
    let root = (r + (r * r + 4.0 * a * c).sqrt()) / (2.0 * a);
    let n_real = root * root;
    if !(n_real.is_finite() && n_real < MAX_BLOCKLENGTH as f64) {
        return Err(Error::NoFeasibleN(format!("blocklength {n_real:e} out of range")));
    }
    let mut n = ((n_real * (1.0 - 1e-12)).ceil() as u64).max(1);
    let meets = |n: u64| model.epsilon(n as f64, bits) <= epsilon;
    if opts.denominator == Denominator::Consistent {
        if !meets(n) {
            n = grow_until(n, &meets)?;
        }
        if opts.refine {
            n = shrink(n, &meets);
        }
    }
    Ok(Blocklength {
        n,
        n_real,
        epsilon: model.epsilon(n as f64, bits),
    })
}

/// Smallest `m > n` meeting the predicate, by doubling then bisection.
fn grow_until(n: u64, meets: &impl Fn(u64) -> bool) -> Result<u64> {
    let mut lo = n;
    let mut step = 1u64;
    let mut hi = n + step;
    while !meets(hi) {
        lo = hi;
        step = step.saturating_mul(2);
        hi = n.saturating_add(step);
        if hi >= MAX_BLOCKLENGTH {
            return Err(Error::NoFeasibleN("exact error never reaches target".into()));
        }
    }
    // invariant: !meets(lo), meets(hi)
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if meets(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Smallest `m <= n` meeting the predicate, assuming it is monotone on `[1, n]`.
fn shrink(n: u64, meets: &impl Fn(u64) -> bool) -> u64 {
    if meets(1) {
        return 1;
    }
    let (mut lo, mut hi) = (1u64, n);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if meets(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

pub fn solve_blocklength_awgn(
    beta_t: f64,
    beta_s: f64,
    bits: f64,
    snr: f64,
    opts: &SolveOptions,
) -> Result<Blocklength> {
    let eps = epsilon_target(beta_t, beta_s)?;
    solve_blocklength(&ChannelModel::awgn(snr)?, eps, bits, opts)
}

pub fn solve_blocklength_fading_csi(
    beta_t: f64,
    beta_s: f64,
    bits: f64,
    snr: f64,
    coherence: u32,
    opts: &SolveOptions,
) -> Result<Blocklength> {
    let eps = epsilon_target(beta_t, beta_s)?;
    solve_blocklength(&ChannelModel::fading_csi(snr, coherence)?, eps, bits, opts)
}

pub fn solve_blocklength_fading_nocsi(
    beta_t: f64,
    beta_s: f64,
    bits: f64,
    snr: f64,
    coherence: u32,
    opts: &SolveOptions,
) -> Result<Blocklength> {
    let eps = epsilon_target(beta_t, beta_s)?;
    let model = ChannelModel::fading_nocsi(snr, coherence, Default::default())?;
    solve_blocklength(&model, eps, bits, opts)
}
